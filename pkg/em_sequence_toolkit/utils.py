"""
Small helpers shared across the toolkit.
"""

import functools
import logging
import os
import tempfile
import time

from em_sequence_toolkit.errors import EmptyWordError

logger = logging.getLogger(__name__)

# Words are packed MSB-first into int64 codes; one bit is kept free for sign.
MAX_PACKED_WORD_LEN = 62


def timing(f):
    """
    Util decorator for timing functions. Elapsed time goes to the debug log.
    """

    @functools.wraps(f)
    def wrap(*args, **kwargs):
        time1 = time.time()
        ret = f(*args, **kwargs)
        time2 = time.time()
        logger.debug("%s function took %.3f ms", f.__name__, (time2 - time1) * 1000.0)

        return ret

    return wrap


def validate_word(word):
    """
    Check a word is a nonempty string over {0, 1}.

    Parameters
    ----------
    word: str

    Returns
    -------
    str
        The same word
    """
    if word is None or len(word) == 0:
        raise EmptyWordError("The empty word has no occurrences to query.")

    if word.strip("01"):
        raise ValueError("Word {!r} is not a binary word.".format(word))

    return word


def word_to_code(word):
    """
    Pack a binary word into an integer, first bit most significant.
    """
    return int(word, 2)


def code_to_word(code, length):
    """
    Unpack an integer code into a binary word of the given length.
    """
    return format(int(code), "0{}b".format(length))


def all_words(length):
    """
    All binary words of a length in lexicographic order.

    Parameters
    ----------
    length: int

    Returns
    -------
    list
        2^length words
    """
    return [code_to_word(code, length) for code in range(2 ** length)]


def write_atomic(path, data):
    """
    Write text or bytes to path through a temporary file in the same directory,
    so readers never see a partial artifact.

    Parameters
    ----------
    path: str
        Destination path

    data: str or bytes
        Content
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)

    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        if isinstance(data, (bytes, bytearray)):
            f = os.fdopen(fd, "wb")
        else:
            f = os.fdopen(fd, "w", encoding="utf-8", newline="")
        with f:
            f.write(data)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise

    logger.debug("Wrote %s", path)
