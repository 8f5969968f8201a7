"""
Readers and writers for sequence artifacts: the EMSQ binary format, one-line
text files, trace CSV files and the on-disk sequence cache.
"""

import io
import logging
import os
import re
import struct

from dotenv import load_dotenv

from em_sequence_toolkit.errors import MalformedHeaderError, TruncatedPayloadError, VersionMismatchError
from em_sequence_toolkit.models.sequence import BitSequence, generate
from em_sequence_toolkit.utils import write_atomic

logger = logging.getLogger(__name__)

MAGIC = b"EMSQ"
VERSION = 0x01
HEADER_FORMAT = "<4sBQ"
HEADER_SIZE = struct.calcsize(HEADER_FORMAT)

CACHE_ENV_VAR = "EMSEQ_CACHE_DIR"
CACHE_FILE_PATTERN = re.compile(r"^em-(\d+)\.emsq$")


def encode_bits(seq):
    """
    Serialize a sequence to EMSQ bytes.

    Parameters
    ----------
    seq: BitSequence

    Returns
    -------
    bytes
        Header (magic, version, little-endian bit count) then LSB-first payload
    """
    header = struct.pack(HEADER_FORMAT, MAGIC, VERSION, len(seq))

    return header + seq.packed_bytes()


def decode_bits(data):
    """
    Parse EMSQ bytes.

    Parameters
    ----------
    data: bytes

    Returns
    -------
    BitSequence
    """
    if len(data) < HEADER_SIZE:
        raise MalformedHeaderError("Stream holds {} bytes, header needs {}".format(len(data), HEADER_SIZE))

    magic, version, length = struct.unpack_from(HEADER_FORMAT, data)
    if magic != MAGIC:
        raise MalformedHeaderError("Bad magic {!r}, expected {!r}".format(magic, MAGIC))

    if version != VERSION:
        raise VersionMismatchError("Format version {} is not supported, expected {}".format(version, VERSION))

    payload = data[HEADER_SIZE:]
    expected = (length + 7) // 8
    if len(payload) < expected:
        raise TruncatedPayloadError(
            "Payload holds {} bytes but {} bits need {}".format(len(payload), length, expected)
        )
    if len(payload) > expected:
        raise MalformedHeaderError(
            "Bit count {} does not account for {} trailing bytes".format(length, len(payload) - expected)
        )

    return BitSequence.from_packed(payload, length)


def store_bits(seq, destination=None):
    """
    Write a sequence in the EMSQ binary format.

    Parameters
    ----------
    seq: BitSequence

    destination: str, file-like or None
        A path (written atomically), a binary stream, or None to only return the bytes

    Returns
    -------
    bytes
        The serialized stream
    """
    data = encode_bits(seq)

    if isinstance(destination, (str, os.PathLike)):
        write_atomic(destination, data)
    elif destination is not None:
        destination.write(data)

    return data


def load_bits(source):
    """
    Read an EMSQ binary stream.

    Parameters
    ----------
    source: str, bytes or file-like
        A path, the raw bytes, or a binary stream

    Returns
    -------
    BitSequence
    """
    if isinstance(source, (bytes, bytearray, memoryview)):
        data = bytes(source)
    elif isinstance(source, (str, os.PathLike)):
        with open(source, "rb") as f:
            data = f.read()
    else:
        data = source.read()

    return decode_bits(data)


def store_text(seq, destination=None):
    """
    Write a sequence as one line of '0'/'1' characters.

    Returns
    -------
    str
        The text written, newline terminated
    """
    text = seq.to_string() + "\n"

    if isinstance(destination, (str, os.PathLike)):
        write_atomic(destination, text)
    elif destination is not None:
        destination.write(text)

    return text


def load_text(source=None, text=None):
    """
    Read a one-line text sequence.

    Parameters
    ----------
    source: str or file-like
        A path or a text stream; a missing path raises FileNotFoundError

    text: str
        The sequence text itself, used when source is None

    Returns
    -------
    BitSequence
    """
    if (source is None) == (text is None):
        raise ValueError("Give exactly one of source and text")

    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="ascii") as f:
            text = f.read()
    elif source is not None:
        text = source.read()

    lines = [line for line in text.splitlines() if line.strip()]
    if len(lines) != 1:
        raise MalformedHeaderError("Text sequence files hold exactly one line, found {}".format(len(lines)))

    return BitSequence.from_string(lines[0])


def df_to_csv_text(df):
    """
    Render a dataframe as CSV text with stable formatting.
    """
    buffer = io.StringIO()
    df.to_csv(buffer, index=False, lineterminator="\n")

    return buffer.getvalue()


def store_df_csv(df, destination):
    """
    Write a dataframe as CSV atomically.

    Returns
    -------
    str
        The CSV text
    """
    text = df_to_csv_text(df)
    write_atomic(destination, text)

    return text


def store_trace_csv(trace, destination):
    """
    Write a trace with columns t, match_start, match_len, source_end, emitted.

    Parameters
    ----------
    trace: TraceLog

    destination: str
    """
    return store_df_csv(trace.get_results_df(), destination)


def get_cache_dir():
    """
    The sequence cache directory from EMSEQ_CACHE_DIR, or None when caching is off.
    """
    load_dotenv()
    cache_dir = os.getenv(CACHE_ENV_VAR)

    return cache_dir or None


def find_cached(n, cache_dir):
    """
    Path of the shortest cached sequence holding at least n bits, or None.
    """
    if cache_dir is None or not os.path.isdir(cache_dir):
        return None

    candidates = []
    for filename in os.listdir(cache_dir):
        match = CACHE_FILE_PATTERN.match(filename)
        if match and int(match.group(1)) >= n:
            candidates.append((int(match.group(1)), os.path.join(cache_dir, filename)))

    if not candidates:
        return None

    return min(candidates)[1]


def load_or_generate(n, cache_dir=None, max_bits=None):
    """
    Get the first n bits, from the cache when one is configured.

    Parameters
    ----------
    n: int

    cache_dir: str or None
        Overrides EMSEQ_CACHE_DIR

    max_bits: int or None
        Bit-storage limit for generation

    Returns
    -------
    BitSequence
    """
    cache_dir = cache_dir or get_cache_dir()

    cached_path = find_cached(n, cache_dir)
    if cached_path is not None:
        try:
            seq = load_bits(cached_path)
            if len(seq) >= n:
                logger.debug("Using cached sequence %s for n=%d", cached_path, n)
                return seq.prefix(n)
        except (MalformedHeaderError, TruncatedPayloadError, VersionMismatchError) as e:
            logger.warning("Ignoring unreadable cache file %s: %s", cached_path, e)

    kwargs = {} if max_bits is None else {"max_bits": max_bits}
    seq, _ = generate(n, engine="fast", **kwargs)

    if cache_dir is not None:
        store_bits(seq, os.path.join(cache_dir, "em-{}.emsq".format(n)))
        logger.info("Cached %d bits in %s", n, cache_dir)

    return seq
