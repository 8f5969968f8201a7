"""
Generation of the Ehrenfeucht-Mycielski sequence.

The sequence starts 0,1,0. Every further bit is found by taking the longest
suffix of the sequence so far that occurred before, selecting its last earlier
occurrence and emitting the complement of the bit that followed it.
"""

import logging

import numpy as np

from em_sequence_toolkit.errors import CapacityError, PositionRangeError, StateMismatchError
from em_sequence_toolkit.models.measures import TraceLog
from em_sequence_toolkit.utils import MAX_PACKED_WORD_LEN, timing

logger = logging.getLogger(__name__)

SEED = "010"
DEFAULT_MAX_BITS = 2 ** 32

_ZERO = 48  # ord("0")


class BitSequence(object):
    """
    Immutable binary sequence x_1^n with 1-based positions.

    Bits are kept packed in 64-bit blocks, least significant bit first within a
    block. An unpacked uint8 view is built on first use and shared read-only.
    """

    def __init__(self, bits):
        """
        Parameters
        ----------
        bits: array-like
            Values in {0, 1}
        """
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.ndim != 1:
            raise ValueError("Bits must be one dimensional.")
        if bits.size and bits.max() > 1:
            raise ValueError("Bits must be 0 or 1.")

        self._length = int(bits.size)

        packed = np.packbits(bits, bitorder="little")
        pad = (-packed.size) % 8
        packed = np.concatenate([packed, np.zeros(pad, dtype=np.uint8)])
        self._blocks = packed.view("<u8").copy()
        self._blocks.flags.writeable = False

        self._array = bits.copy()
        self._array.flags.writeable = False
        self._text = None

    @classmethod
    def from_string(cls, text):
        """
        Build from a string of '0'/'1' characters.
        """
        text = text.strip()
        if text.strip("01"):
            raise ValueError("Sequence text may only contain '0' and '1'.")

        return cls(np.frombuffer(text.encode("ascii"), dtype=np.uint8) - _ZERO)

    @classmethod
    def from_packed(cls, payload, length):
        """
        Build from LSB-first packed bytes holding length bits.
        """
        packed = np.frombuffer(payload, dtype=np.uint8)
        bits = np.unpackbits(packed, count=length, bitorder="little")

        return cls(bits)

    @property
    def blocks(self):
        """
        The packed 64-bit blocks, LSB-first.
        """
        return self._blocks

    def packed_bytes(self):
        """
        ceil(n/8) bytes, bit i at byte (i-1)//8, bit position (i-1) % 8.
        """
        return self._blocks.view(np.uint8)[: (self._length + 7) // 8].tobytes()

    def to_array(self):
        """
        Read-only uint8 array of the bits, 0-based.
        """
        return self._array

    def to_string(self):

        if self._text is None:
            self._text = (self._array + _ZERO).tobytes().decode("ascii")

        return self._text

    def substring(self, i, j):
        """
        The word x_i^j, 1-based and inclusive.
        """
        if j < i:
            return ""
        self._check_position(i)
        self._check_position(j)

        return self.to_string()[i - 1 : j]

    def prefix(self, n):
        """
        The prefix x_1^n as a new sequence.
        """
        if not 0 <= n <= self._length:
            raise PositionRangeError("Prefix length {} outside 0..{}".format(n, self._length))

        return BitSequence(self._array[:n])

    def _check_position(self, i):

        if not 1 <= i <= self._length:
            raise PositionRangeError("Position {} outside 1..{}".format(i, self._length))

    def __len__(self):
        return self._length

    def __getitem__(self, i):
        self._check_position(i)

        return int(self._array[i - 1])

    def __iter__(self):
        return iter(self._array.tolist())

    def __eq__(self, other):
        if not isinstance(other, BitSequence):
            return NotImplemented

        return self._length == other._length and np.array_equal(self._blocks, other._blocks)

    def __hash__(self):
        return hash((self._length, self._blocks.tobytes()))

    def __repr__(self):
        head = self.to_string()[:40]
        return "BitSequence(n={}, {}{})".format(self._length, head, "..." if self._length > 40 else "")


class EngineState(object):
    """
    Snapshot of an engine, enough to recognise which sequence it holds.
    """

    def __init__(self, engine_name, length, alpha, depth, tail):

        self.engine_name = engine_name
        self.length = length
        self.alpha = alpha
        self.depth = depth
        self.tail = tail

    def __repr__(self):

        return "{} n={} alpha={} depth={} tail={}".format(
            self.engine_name, self.length, self.alpha, self.depth, self.tail
        )


class SequenceEngine(object):
    """
    A class with abstract and convenience methods for sequence engines. An
    engine owns its bits and trace and is extended in place by update().
    Engine state is single-owner.
    """

    name = None

    def __init__(self, max_bits=DEFAULT_MAX_BITS):

        self.max_bits = max_bits
        self._text = bytearray()
        self._forced = None
        self._trace = TraceLog(first_step=4)
        self._alpha = 0
        self._prev_len = 0

    def get_state(self):
        """
        Get the current state of the engine.

        Returns
        -------
        EngineState
        """
        return EngineState(
            engine_name=self.name,
            length=len(self._text),
            alpha=self._alpha,
            depth=getattr(self, "_depth", None),
            tail=self._text[-16:].decode("ascii"),
        )

    def update(self, extra, **kwargs):
        """
        Emit extra more bits.

        Parameters
        ----------
        extra: int
            Number of bits to add
        """
        if extra < 0:
            raise ValueError("Cannot generate a negative number of bits.")

        target = len(self._text) + extra
        if target > self.max_bits:
            raise CapacityError(
                "Requested {} bits exceeds the bit-storage limit of {}".format(target, self.max_bits)
            )

        if self._forced is not None and target > len(self._forced):
            raise PositionRangeError("Replay input only holds {} bits".format(len(self._forced)))

        while len(self._text) < min(len(SEED), target):
            if self._forced is not None:
                self._text.append(self._forced[len(self._text)])
            else:
                self._text.append(ord(SEED[len(self._text)]))

        steps = target - len(self._text)
        if steps > 0:
            self._prepare()
            self._run(steps)

    def _prepare(self):
        pass

    def _run(self, count):
        raise NotImplementedError

    def _next_bit(self, t, source_end):
        """
        The bit at position t given the end of the selected earlier occurrence.
        """
        if self._forced is not None:
            return self._forced[t - 1] - _ZERO

        if source_end == 0:
            # No suffix occurred before; unreachable after the seed.
            assert t <= len(SEED), "zero-length match at t={}".format(t)
            return 0

        return 1 - (self._text[source_end] - _ZERO)

    def get_sequence(self):
        """
        Returns
        -------
        BitSequence
            The bits generated so far
        """
        return BitSequence(np.frombuffer(bytes(self._text), dtype=np.uint8) - _ZERO)

    def get_trace(self):
        """
        Returns
        -------
        TraceLog
            One record per emitted position 4..n
        """
        return self._trace

    def __len__(self):
        return len(self._text)

    def holds(self, seq):
        """
        Check the engine's bits are exactly seq.
        """
        return len(seq) == len(self._text) and seq.to_string().encode("ascii") == bytes(self._text)


class NaiveEngine(SequenceEngine):
    """
    Reference engine: rescans the whole prefix for every suffix length at every
    step. Quadratic; used as an oracle for the fast engine.
    """

    name = "naive"

    def _run(self, count):

        text = self._text
        trace = self._trace

        for _ in range(count):
            t = len(text) + 1

            # Earlier occurrences must end at or before t - 2; the copy ending
            # at t - 1 is the suffix itself.
            match_len, source_end = 0, 0
            length = 1
            while length <= t - 2:
                pos = text.rfind(text[t - 1 - length : t - 1], 0, t - 2)
                if pos < 0:
                    break
                match_len, source_end = length, pos + length
                length += 1

            bit = self._next_bit(t, source_end)
            text.append(_ZERO + bit)
            trace.append(match_len, source_end, bit)

            self._prev_len = match_len
            if match_len > self._alpha:
                self._alpha = match_len


class FastEngine(SequenceEngine):
    """
    Indexed engine. Keeps a dictionary from (length, packed word) to the last
    end position of that word, for every length up to alpha + 2, lagging one
    position behind the sequence so the current suffix never matches itself.

    A matched suffix at step t is at most one longer than at step t - 1, so the
    search walks down from the previous matchlength + 1.
    """

    name = "fast"

    _FULL = (1 << 64) - 1

    def __init__(self, max_bits=DEFAULT_MAX_BITS):
        super().__init__(max_bits=max_bits)

        self._last_end = dict()
        self._depth = 2
        self._indexed_end = 0
        self._window = 0
        # The first search may reach t - 2.
        self._prev_len = len(SEED) - 2

        self._masks = [(1 << length) - 1 for length in range(MAX_PACKED_WORD_LEN + 1)]
        self._sentinels = [1 << length for length in range(MAX_PACKED_WORD_LEN + 1)]

    def _prepare(self):
        """
        Bring the index up to date with everything but the last bit.
        """
        last = len(self._text) - 1
        if self._indexed_end < last:
            for length in range(1, self._depth + 1):
                self._index_words(length, self._indexed_end + 1, last)
            self._indexed_end = last

        self._window = int(bytes(self._text[-64:]), 2)

    def _index_words(self, length, lo, hi):
        """
        Record last end positions for all words of a length ending in lo..hi.
        """
        lo = max(lo, length)
        if hi < lo:
            return

        bits = np.frombuffer(bytes(self._text[:hi]), dtype=np.uint8).astype(np.int64) - _ZERO
        first_start = lo - length
        count = hi - lo + 1

        codes = np.zeros(count, dtype=np.int64)
        for k in range(length):
            codes = (codes << 1) | bits[first_start + k : first_start + k + count]

        keys = (codes | (1 << length)).tolist()
        self._last_end.update(zip(keys, range(lo, hi + 1)))

    def _deepen(self, depth):
        """
        Extend the index to cover word lengths up to depth.
        """
        if depth > MAX_PACKED_WORD_LEN:
            raise CapacityError("Matchlength {} exceeds packed word capacity".format(depth - 2))

        for length in range(self._depth + 1, depth + 1):
            self._index_words(length, 1, self._indexed_end)

        logger.debug("Index depth %d -> %d at n=%d", self._depth, depth, len(self._text))
        self._depth = depth

    def _run(self, count):

        text = self._text
        trace = self._trace
        last_end = self._last_end
        get = last_end.get
        masks = self._masks
        sentinels = self._sentinels
        full = self._FULL

        window = self._window
        prev = self._prev_len
        depth = self._depth

        for _ in range(count):
            t = len(text) + 1

            length = prev + 1
            if length > t - 2:
                length = t - 2

            source_end = 0
            while length > 0:
                found = get((window & masks[length]) | sentinels[length])
                if found is not None:
                    source_end = found
                    break
                length -= 1

            bit = self._next_bit(t, source_end)
            text.append(_ZERO + bit)
            trace.append(length, source_end, bit)

            # Words ending at t - 1 become visible to step t + 1.
            end = t - 1
            top = depth if depth < end else end
            for word_len in range(1, top + 1):
                last_end[(window & masks[word_len]) | sentinels[word_len]] = end
            self._indexed_end = end

            window = ((window << 1) | bit) & full
            prev = length

            if length > self._alpha:
                self._alpha = length
                if length + 2 > depth:
                    self._deepen(length + 2)
                    depth = self._depth

        self._window = window
        self._prev_len = prev


ENGINES = {
    NaiveEngine.name: NaiveEngine,
    FastEngine.name: FastEngine,
}


def make_engine(engine="fast", max_bits=DEFAULT_MAX_BITS):
    """
    Get a fresh engine by name.

    Parameters
    ----------
    engine: str
        "naive" or "fast"

    max_bits: int
        Bit-storage limit

    Returns
    -------
    SequenceEngine
    """
    try:
        engine_cls = ENGINES[engine]
    except KeyError:
        raise ValueError("Unknown engine {!r}, expected one of {}".format(engine, sorted(ENGINES)))

    return engine_cls(max_bits=max_bits)


@timing
def generate(n, engine="fast", max_bits=DEFAULT_MAX_BITS):
    """
    Generate the first n bits.

    Parameters
    ----------
    n: int
        Number of bits, n >= 1

    engine: str or SequenceEngine
        Engine name, or a fresh engine instance to generate with

    max_bits: int
        Bit-storage limit

    Returns
    -------
    (BitSequence, TraceLog)
        x_1^n and one trace record per position 4..n
    """
    if n < 1:
        raise ValueError("n must be positive, got {}".format(n))

    if isinstance(engine, SequenceEngine):
        if len(engine) != 0:
            raise StateMismatchError("generate() needs a fresh engine; use extend() to grow one.")
        sequence_engine = engine
    else:
        sequence_engine = make_engine(engine, max_bits=max_bits)

    sequence_engine.update(n)
    logger.debug("Generated %d bits with %s engine, alpha=%d", n, sequence_engine.name, sequence_engine._alpha)

    return sequence_engine.get_sequence(), sequence_engine.get_trace()


def extend(seq, engine, extra):
    """
    Grow a generated sequence by extra bits using the engine that produced it.

    Parameters
    ----------
    seq: BitSequence
        A sequence returned by generate/extend

    engine: SequenceEngine
        The engine that produced seq, in its state right after producing it

    extra: int
        Bits to add

    Returns
    -------
    (BitSequence, TraceLog)
        The longer sequence and the trace records of the new positions only
    """
    if not engine.holds(seq):
        raise StateMismatchError(
            "Engine holds {} bits ({}) which do not match the {}-bit sequence".format(
                len(engine), engine.get_state().tail, len(seq)
            )
        )

    steps_before = len(engine.get_trace())
    engine.update(extra)

    return engine.get_sequence(), engine.get_trace()[steps_before:]


@timing
def replay_trace(seq):
    """
    Run the matching rule over given bits instead of emitting them.

    For the EM sequence this reproduces the generation trace. For any other
    input the trace still records the longest earlier-seen suffix at every
    step, with match_len 0 and source_end 0 where no suffix occurred before.

    Parameters
    ----------
    seq: BitSequence

    Returns
    -------
    TraceLog
    """
    engine = FastEngine(max_bits=max(len(seq), 1))
    engine._forced = seq.to_string().encode("ascii")
    engine.update(len(seq))

    return engine.get_trace()
