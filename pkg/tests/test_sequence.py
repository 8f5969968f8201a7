import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from em_sequence_toolkit.errors import CapacityError, PositionRangeError, StateMismatchError
from em_sequence_toolkit.models.sequence import (
    BitSequence,
    FastEngine,
    NaiveEngine,
    extend,
    generate,
    make_engine,
    replay_trace,
)

from conftest import GOLDEN_30


@pytest.mark.parametrize("engine", ["naive", "fast"])
def test_golden_prefix(engine):
    """
    The first 30 bits of the sequence.
    """
    seq, trace = generate(30, engine=engine)

    assert seq.to_string() == GOLDEN_30
    assert len(trace) == 27
    assert trace.first_step == 4


@pytest.mark.parametrize("engine", ["naive", "fast"])
def test_bit_31(engine):
    """
    Bit 31 follows the match of 1001 against its occurrence at 2..5.
    """
    seq, trace = generate(31, engine=engine)
    step = trace.step(31)

    assert seq[31] == 0
    assert step.match_len == 4
    assert step.match_start == 27
    assert step.source_end == 5
    assert step.emitted == 0


def test_first_steps():

    _, trace = generate(5)

    # x_1^3 = 010: suffix 0 was seen ending at 1 and was followed by 1
    assert (trace.step(4).match_len, trace.step(4).source_end, trace.step(4).emitted) == (1, 1, 0)
    assert (trace.step(5).match_len, trace.step(5).source_end, trace.step(5).emitted) == (1, 3, 1)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_seed_only(n):

    seq, trace = generate(n)

    assert seq.to_string() == "010"[:n]
    assert len(trace) == 0


def test_engines_agree(em_5000):
    """
    The naive and fast engines produce the same bits and traces.
    """
    seq_fast, trace_fast = em_5000
    seq_naive, trace_naive = generate(5000, engine="naive")

    assert seq_naive == seq_fast
    assert trace_naive == trace_fast


def test_trace_is_maximal():
    """
    Each step records the longest suffix seen earlier and its last earlier occurrence.
    """
    seq, trace = generate(400)
    text = seq.to_string()

    for step in trace:
        t, length = step.t, step.match_len
        prefix = text[: t - 1]
        suffix = prefix[len(prefix) - length :]

        # Earlier occurrences end at or before t - 2.
        last_start = prefix.rfind(suffix, 0, t - 2)
        assert last_start >= 0
        assert last_start + length == step.source_end

        if length + 1 <= t - 2:
            longer = prefix[len(prefix) - length - 1 :]
            assert prefix.rfind(longer, 0, t - 2) < 0

        assert int(text[t - 1]) == 1 - int(text[step.source_end])


def test_extend_matches_generate():

    engine = make_engine("fast")
    seq, _ = generate(1000, engine=engine)
    longer, new_trace = extend(seq, engine, 500)

    full, full_trace = generate(1500)

    assert longer == full
    assert new_trace.first_step == 1001
    assert len(new_trace) == 500
    assert new_trace == full_trace[997:]


def test_extend_by_zero():

    engine = make_engine("fast")
    seq, _ = generate(1000, engine=engine)
    same, new_trace = extend(seq, engine, 0)

    assert same == seq
    assert len(new_trace) == 0


@settings(max_examples=25, deadline=None)
@given(first=st.integers(min_value=1, max_value=400), extra=st.integers(min_value=0, max_value=400))
def test_extend_any_split(first, extra):
    """
    Growing in two steps gives the same bits as generating at once.
    """
    for engine_name in ("naive", "fast"):
        engine = make_engine(engine_name)
        seq, _ = generate(first, engine=engine)
        longer, _ = extend(seq, engine, extra)

        assert longer.to_string() == generate(first + extra)[0].to_string()


def test_extend_rejects_foreign_sequence():

    engine = make_engine("fast")
    seq, _ = generate(100, engine=engine)
    other = BitSequence.from_string(seq.to_string()[:-1] + str(1 - seq[100]))

    with pytest.raises(StateMismatchError):
        extend(other, engine, 10)

    with pytest.raises(StateMismatchError):
        extend(seq.prefix(50), engine, 10)


def test_generate_rejects_used_engine():

    engine = FastEngine()
    generate(10, engine=engine)

    with pytest.raises(StateMismatchError):
        generate(10, engine=engine)


def test_capacity():

    with pytest.raises(CapacityError):
        generate(100, max_bits=50)

    engine = NaiveEngine(max_bits=20)
    seq, _ = generate(20, engine=engine)
    with pytest.raises(CapacityError):
        extend(seq, engine, 1)


def test_bad_arguments():

    with pytest.raises(ValueError):
        generate(0)

    with pytest.raises(ValueError):
        make_engine("suffix-tree")

    engine = make_engine("fast")
    seq, _ = generate(10, engine=engine)
    with pytest.raises(ValueError):
        extend(seq, engine, -1)


def test_replay_trace(em_5000):

    seq, trace = em_5000

    assert replay_trace(seq) == trace


def test_replay_other_input():
    """
    Replay records matches for any bits, including steps with no earlier suffix.
    """
    trace = replay_trace(BitSequence.from_string("000011"))

    assert [step.match_len for step in trace] == [2, 3, 0]
    assert [step.source_end for step in trace] == [2, 3, 0]
    assert [step.emitted for step in trace] == [0, 1, 1]


def test_engine_state():

    engine = make_engine("fast")
    generate(31, engine=engine)
    state = engine.get_state()

    assert state.engine_name == "fast"
    assert state.length == 31
    assert state.alpha == 4
    assert state.tail == (GOLDEN_30 + "0")[-16:]


def test_bit_sequence_access(golden_seq):

    assert len(golden_seq) == 30
    assert golden_seq[1] == 0
    assert golden_seq[2] == 1
    assert golden_seq.substring(27, 30) == "1001"
    assert golden_seq.substring(5, 4) == ""
    assert golden_seq.prefix(3).to_string() == "010"
    assert list(golden_seq)[:4] == [0, 1, 0, 0]

    with pytest.raises(PositionRangeError):
        golden_seq[0]
    with pytest.raises(PositionRangeError):
        golden_seq[31]
    with pytest.raises(PositionRangeError):
        golden_seq.prefix(31)


def test_bit_sequence_packing():
    """
    Bit i is stored at byte (i - 1) // 8, bit (i - 1) % 8.
    """
    seq = BitSequence.from_string("100000001")

    assert seq.packed_bytes() == bytes([0x01, 0x01])
    assert seq.blocks.dtype == np.dtype("<u8")
    assert not seq.blocks.flags.writeable
    assert not seq.to_array().flags.writeable
    assert BitSequence.from_packed(seq.packed_bytes(), 9) == seq


def test_bit_sequence_validation():

    with pytest.raises(ValueError):
        BitSequence.from_string("0102")

    with pytest.raises(ValueError):
        BitSequence([0, 2, 1])

    assert BitSequence.from_string("0110\n") == BitSequence([0, 1, 1, 0])
    assert hash(BitSequence.from_string("0110")) == hash(BitSequence([0, 1, 1, 0]))


@pytest.mark.slow
def test_generate_million_bits():

    seq, trace = generate(10 ** 6)

    assert len(seq) == 10 ** 6
    assert len(trace) == 10 ** 6 - 3
    alpha = int(trace.alpha_series()[-1])
    assert 0.5 <= alpha / math.log2(10 ** 6) <= 3.0
