import pytest

from em_sequence_toolkit.evaluation.lemmas import (
    LEMMA_PATTERNS,
    check_first_two_complement,
    check_prop41,
    check_proximity_exhaustive,
    check_proximity_triangle,
    imbalance,
    pattern_text,
    prop41_gate,
    recheck_violation,
    scan_lemma,
)
from em_sequence_toolkit.models.index import SequenceIndex
from em_sequence_toolkit.models.sequence import BitSequence, generate

WORD = "0001"


def planted(blocks, tail="1111"):
    """
    A sequence whose occurrences of 0001 are exactly the planted ones.

    Each block is (separator, following bits); the separator ends in the bit
    that precedes the occurrence.
    """
    text = "".join(separator + WORD + following for separator, following in blocks) + tail
    return SequenceIndex(BitSequence.from_string(text))


def _violations_for(report, word=WORD):
    return [(v["word"], v["a1"], v["a2"]) for v in report.violations if v["word"] == word]


def test_pattern_text():

    assert pattern_text(LEMMA_PATTERNS["4.4"], 0, 0) == ["1", "01", "00", "00"]
    assert pattern_text(LEMMA_PATTERNS["4.1"], 1, 0) == ["0", "10", "11", "10", "10"]


def test_planted_lemma_44():

    index = planted([("1111", "11"), ("1111", "01"), ("1111", "00"), ("1111", "00")])
    assert index.occurrence_starts(WORD).tolist() == [5, 15, 25, 35]

    report = scan_lemma(index, "4.4", max_word_len=6)

    assert (WORD, 0, 0) in _violations_for(report)
    assert not report.passed
    violation = next(v for v in report.violations if v["word"] == WORD)
    assert violation["starts"] == [5, 15, 25, 35]
    assert violation["observed"] == ["1", "01", "00", "00"]
    assert recheck_violation(index.seq, "lemma-4.4", violation)


def test_planted_lemma_41():

    index = planted([("1111", "11"), ("1111", "00"), ("1111", "01"), ("1111", "00"), ("1111", "00")])
    report = scan_lemma(index, "4.1", max_word_len=6)

    assert (WORD, 0, 0) in _violations_for(report)
    for violation in report.violations:
        assert recheck_violation(index.seq, "lemma-4.1", violation)


def test_planted_lemma_43():

    index = planted([("1111", "01"), ("1111", "10"), ("1111", "00"), ("1111", "01"), ("1111", "01")])
    report = scan_lemma(index, "4.3", max_word_len=6)

    assert (WORD, 0, 1) in _violations_for(report)


def test_planted_lemma_42_good_word():

    index = planted([("1111", "11"), ("1110", "00"), ("1111", "10"), ("1111", "10")])
    assert index.classify_word(WORD).is_good()

    report = scan_lemma(index, "4.2", max_word_len=6)

    assert (WORD, 1, 0) in _violations_for(report)
    violation = next(v for v in report.violations if v["word"] == WORD)
    assert recheck_violation(index.seq, "lemma-4.2", violation)


def test_lemma_42_skips_bad_word():

    index = planted([("1111", "11"), ("1111", "00"), ("1111", "10"), ("1111", "10")])
    assert index.classify_word(WORD).is_bad()

    report = scan_lemma(index, "4.2", max_word_len=6)

    assert _violations_for(report) == []
    assert report.params["excluded_not_good"] >= 1


def test_planted_prop41():

    index = planted([("1111", "00"), ("1110", "10"), ("1111", "10"), ("1111", "11"), ("1111", "10")])
    report = check_prop41(index, max_word_len=6)

    violation = next(v for v in report.violations if v["word"] == WORD)
    assert violation["u"] == "01111"
    assert violation["v"] == "00010"
    assert recheck_violation(index.seq, "prop-4.1", violation)


def test_planted_first_two_complement():

    index = planted([("1111", "10"), ("1111", "10")])
    report = check_first_two_complement(index, max_word_len=6)

    violation = next(v for v in report.violations if v["word"] == WORD)
    assert violation["starts"] == [5, 15]
    assert violation["following"] == 1
    assert recheck_violation(index.seq, "first-two-complement", violation)


def test_recheck_rejects_wrong_record():

    index = planted([("1111", "11"), ("1111", "01"), ("1111", "00"), ("1111", "00")])
    violation = next(v for v in scan_lemma(index, "4.4", max_word_len=6).violations if v["word"] == WORD)

    moved = dict(violation, starts=[5, 15, 25, 36])
    assert not recheck_violation(index.seq, "lemma-4.4", moved)

    rebound = dict(violation, a1=1)
    assert not recheck_violation(index.seq, "lemma-4.4", rebound)


def test_prop41_gate():

    assert imbalance("01111") == 3
    assert imbalance("01011") == 1
    assert prop41_gate("01011", "00000")
    assert prop41_gate("00000", "01101")
    assert not prop41_gate("01111", "00010")


@pytest.mark.parametrize("lemma_id", sorted(LEMMA_PATTERNS))
def test_em_has_no_lemma_violations(em_index_20000, lemma_id):

    report = scan_lemma(em_index_20000, lemma_id, max_word_len=10)

    assert report.population > 0
    assert report.violations == []
    assert report.passed


def test_em_prop41_and_first_two(em_index_20000):

    prop41 = check_prop41(em_index_20000, max_word_len=10)
    assert prop41.population > 0
    assert prop41.passed

    first_two = check_first_two_complement(em_index_20000, max_word_len=12)
    assert first_two.population > 0
    assert first_two.passed


@pytest.mark.slow
def test_em_lemmas_at_1e5(em_index_1e5):

    for lemma_id in LEMMA_PATTERNS:
        assert scan_lemma(em_index_1e5, lemma_id, max_word_len=12, n=10 ** 5).violations == []
    assert check_prop41(em_index_1e5, max_word_len=12, n=10 ** 5).violations == []


@pytest.mark.slow
def test_em_first_two_and_triangle_at_1e5(em_index_1e5):

    first_two = check_first_two_complement(em_index_1e5, max_word_len=10, n=10 ** 5)
    assert first_two.population > 0
    assert first_two.violations == []

    triangle = check_proximity_triangle(em_index_1e5, samples=10000, rng_seed=1, max_word_len=10, n=10 ** 5)
    assert triangle.population == 10000
    assert triangle.violations == []
    assert triangle.params["asserted"] > 0


def test_insufficient_prefix(golden_index):

    report = scan_lemma(golden_index, "4.1", max_word_len=8, n=10)

    assert report.population == 0
    assert report.passed
    assert any("insufficient" in note for note in report.notes)


def test_scan_arguments(golden_index):

    with pytest.raises(ValueError):
        scan_lemma(golden_index, "4.5", max_word_len=3)

    with pytest.raises(ValueError):
        scan_lemma(golden_index, "4.1", max_word_len=0)


def test_proximity_triangle_on_em(em_index_5000):

    report = check_proximity_triangle(em_index_5000, samples=500, rng_seed=7)

    assert report.population == 500
    assert report.violations == []
    assert 0 < report.params["asserted"] <= 500

    again = check_proximity_triangle(em_index_5000, samples=500, rng_seed=7)
    assert again.to_json() == report.to_json()


def test_proximity_exhaustive():

    seq, _ = generate(200)
    index = SequenceIndex(seq)
    report = check_proximity_exhaustive(index, "01")

    m = index.count_occurrences("01")
    assert report.population == m * (m - 1) * (m - 2) // 2
    assert report.violations == []
