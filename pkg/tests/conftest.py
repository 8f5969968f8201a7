import pytest

from em_sequence_toolkit.models.index import SequenceIndex
from em_sequence_toolkit.models.sequence import BitSequence, generate

GOLDEN_30 = "010011010111000100001111011001"


@pytest.fixture(autouse=True)
def no_sequence_cache(monkeypatch):
    monkeypatch.delenv("EMSEQ_CACHE_DIR", raising=False)
    monkeypatch.delenv("EMSEQ_CONFIG", raising=False)


@pytest.fixture(scope="session")
def golden_seq():
    return BitSequence.from_string(GOLDEN_30)


@pytest.fixture(scope="session")
def golden_index(golden_seq):
    return SequenceIndex(golden_seq)


@pytest.fixture(scope="session")
def em_5000():
    seq, trace = generate(5000)
    return seq, trace


@pytest.fixture(scope="session")
def em_index_5000(em_5000):
    return SequenceIndex(em_5000[0])


@pytest.fixture(scope="session")
def em_index_20000():
    seq, _ = generate(20000)
    return SequenceIndex(seq)


@pytest.fixture(scope="session")
def em_index_1e5():
    # 64 bits past 10^5 so b+ lengths ending at 10^5 are not cut off.
    seq, _ = generate(10 ** 5 + 64)
    return SequenceIndex(seq)


@pytest.fixture(scope="session")
def em_index_1e6():
    seq, _ = generate(10 ** 6)
    return SequenceIndex(seq)


def brute_force_count(text, word):
    """
    Overlapping occurrence count by a plain scan.
    """
    return sum(1 for i in range(len(text) - len(word) + 1) if text[i : i + len(word)] == word)


def brute_force_lpf(text):
    """
    L_i for every 1-based position by comparing against every earlier start.
    """
    lpf = []
    for i in range(len(text)):
        best = 0
        for j in range(i):
            k = 0
            while i + k < len(text) and text[j + k] == text[i + k]:
                k += 1
            best = max(best, k)
        lpf.append(best)
    return lpf
