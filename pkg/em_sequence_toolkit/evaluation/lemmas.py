"""
Scanners for the forbidden following-bit patterns of the first occurrences of
a word, the two-gate balance condition on Good words, the proximity
min-property and the first-two-complement property.

Every violation record carries the word and occurrence starts so it can be
re-checked against the raw bits with recheck_violation().
"""

import itertools
import logging

import numpy as np

from em_sequence_toolkit.evaluation.verdict import VerdictReport
from em_sequence_toolkit.models.measures import Occurrence
from em_sequence_toolkit.utils import code_to_word

logger = logging.getLogger(__name__)

# Following-bit patterns of the first occurrences. Per occurrence: first char
# is the next bit ("A" = a1, "a" = complement of a1), the optional second char
# is the bit after it ("B" = a2, "b" = complement of a2).
LEMMA_PATTERNS = {
    "4.1": ("a", "AB", "Ab", "AB", "AB"),
    "4.2": ("Ab", "a", "AB", "AB"),
    "4.3": ("AB", "a", "Ab", "AB", "AB"),
    "4.4": ("a", "Ab", "AB", "AB"),
}
GOOD_ONLY_LEMMAS = ("4.2",)
PROP41_OCCURRENCES = 5


def _expected_bit(token, a1, a2):
    if token == "A":
        return a1
    if token == "a":
        return 1 - a1
    if token == "B":
        return a2
    return 1 - a2


def pattern_text(pattern, a1, a2):
    """
    A pattern with its variables bound, e.g. ("a", "AB") with a1=0, a2=1 -> ["1", "01"].
    """
    return ["".join(str(_expected_bit(token, a1, a2)) for token in tokens) for tokens in pattern]


def _following_bits(bits, starts, length):
    """
    The one and two bits after each occurrence, starts 1-based.
    """
    follow1 = bits[starts + length - 1].astype(np.int64)
    follow2 = bits[starts + length].astype(np.int64)
    return follow1, follow2


def _good_mask(bits, starts):
    """
    Good words by the bits before their first two occurrences; Boundary is excluded.
    """
    first, second = starts[:, 0], starts[:, 1]
    interior = first >= 2
    good = np.zeros(first.size, dtype=bool)
    good[interior] = bits[first[interior] - 2] != bits[second[interior] - 2]
    return good


def scan_lemma(index, lemma_id, max_word_len, n=None):
    """
    Look for the forbidden pattern of one lemma among the first occurrences of
    every word up to max_word_len.

    Parameters
    ----------
    index: SequenceIndex

    lemma_id: str
        "4.1", "4.2", "4.3" or "4.4"

    max_word_len: int

    n: int
        Prefix length, defaults to the indexed length

    Returns
    -------
    VerdictReport
    """
    if lemma_id not in LEMMA_PATTERNS:
        raise ValueError("Unknown lemma {!r}, expected one of {}".format(lemma_id, sorted(LEMMA_PATTERNS)))
    if max_word_len < 1:
        raise ValueError("max_word_len must be positive")

    n = index._check_bound(n)
    pattern = LEMMA_PATTERNS[lemma_id]
    quota = len(pattern)
    bits = index.seq.to_array()

    report = VerdictReport("lemma-{}".format(lemma_id), params={"max_word_len": max_word_len, "n": n})
    excluded_not_good = 0

    for length in range(1, max_word_len + 1):
        codes, counts, starts = index.first_occurrence_table(length, n, k=quota, following=2)
        eligible = counts >= quota
        if lemma_id in GOOD_ONLY_LEMMAS:
            good = _good_mask(bits, starts)
            excluded_not_good += int(np.count_nonzero(eligible & ~good))
            eligible &= good
        if not np.any(eligible):
            continue

        codes, starts = codes[eligible], starts[eligible]
        report.population += int(codes.size)
        follow1, follow2 = _following_bits(bits, starts, length)

        for a1, a2 in itertools.product((0, 1), repeat=2):
            matches = np.ones(codes.size, dtype=bool)
            for j, tokens in enumerate(pattern):
                matches &= follow1[:, j] == _expected_bit(tokens[0], a1, a2)
                if len(tokens) == 2:
                    matches &= follow2[:, j] == _expected_bit(tokens[1], a1, a2)

            for row in np.flatnonzero(matches):
                report.add_violation(
                    {
                        "word": code_to_word(codes[row], length),
                        "starts": starts[row].tolist(),
                        "a1": a1,
                        "a2": a2,
                        "observed": [
                            "{}{}".format(follow1[row, j], follow2[row, j])[: len(tokens)]
                            for j, tokens in enumerate(pattern)
                        ],
                        "pattern": pattern_text(pattern, a1, a2),
                    }
                )

    if lemma_id in GOOD_ONLY_LEMMAS:
        report.params["excluded_not_good"] = excluded_not_good

    _warn_if_empty(report, quota)

    return report


def _warn_if_empty(report, quota):

    if report.population == 0:
        logger.warning(
            "%s: no word reaches %d fully followed occurrences in the prefix", report.check_id, quota
        )
        report.add_note("insufficient prefix: no word reaches the occurrence quota")


def imbalance(bits):
    """
    |#0 - #1| of a bit string.
    """
    ones = sum(int(b) for b in bits)
    return abs(len(bits) - 2 * ones)


def prop41_gate(u, v):
    """
    True when u or v is balanced to within one.
    """
    return imbalance(u) <= 1 or imbalance(v) <= 1


def check_prop41(index, max_word_len, n=None):
    """
    For every Good word with five fully followed occurrences, u is the string
    of next bits and v of second-next bits; one of them must be balanced.

    Returns
    -------
    VerdictReport
    """
    n = index._check_bound(n)
    bits = index.seq.to_array()
    report = VerdictReport("prop-4.1", params={"max_word_len": max_word_len, "n": n})

    for length in range(1, max_word_len + 1):
        codes, counts, starts = index.first_occurrence_table(length, n, k=PROP41_OCCURRENCES, following=2)
        eligible = (counts >= PROP41_OCCURRENCES) & _good_mask(bits, starts)
        if not np.any(eligible):
            continue

        codes, starts = codes[eligible], starts[eligible]
        report.population += int(codes.size)
        follow1, follow2 = _following_bits(bits, starts, length)

        u_imbalance = np.abs(PROP41_OCCURRENCES - 2 * follow1.sum(axis=1))
        v_imbalance = np.abs(PROP41_OCCURRENCES - 2 * follow2.sum(axis=1))

        for row in np.flatnonzero((u_imbalance > 1) & (v_imbalance > 1)):
            report.add_violation(
                {
                    "word": code_to_word(codes[row], length),
                    "starts": starts[row].tolist(),
                    "u": "".join(str(b) for b in follow1[row]),
                    "v": "".join(str(b) for b in follow2[row]),
                }
            )

    _warn_if_empty(report, PROP41_OCCURRENCES)

    return report


def check_first_two_complement(index, max_word_len, n=None):
    """
    The bits following the first two occurrences of every repeated word differ.
    Words whose second occurrence is not followed by a bit inside x_1^n are skipped.

    Returns
    -------
    VerdictReport
    """
    n = index._check_bound(n)
    bits = index.seq.to_array()
    report = VerdictReport("first-two-complement", params={"max_word_len": max_word_len, "n": n})

    for length in range(1, max_word_len + 1):
        codes, counts, starts = index.first_occurrence_table(length, n, k=2, following=1)
        eligible = counts >= 2
        if not np.any(eligible):
            continue

        codes, starts = codes[eligible], starts[eligible]
        report.population += int(codes.size)
        follow = bits[starts + length - 1]

        for row in np.flatnonzero(follow[:, 0] == follow[:, 1]):
            report.add_violation(
                {
                    "word": code_to_word(codes[row], length),
                    "starts": starts[row].tolist(),
                    "following": int(follow[row, 0]),
                }
            )

    _warn_if_empty(report, 2)

    return report


def _triangle_holds(p_xy, p_xz, p_yz):
    return p_xy == p_xz or p_yz == min(p_xy, p_xz)


def check_proximity_triangle(index, samples, rng_seed, max_word_len=8, n=None):
    """
    Sample triples of distinct occurrences of random words and check that when
    p(X,Y) != p(X,Z), p(Y,Z) = min(p(X,Y), p(X,Z)).

    Words are drawn by picking a random length up to max_word_len and a random
    position; words with fewer than three occurrences are redrawn.

    Returns
    -------
    VerdictReport
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    n = index._check_bound(n)

    rng = np.random.default_rng(rng_seed)
    text = index.seq.to_string()
    report = VerdictReport(
        "proximity-triangle",
        params={"samples": samples, "rng_seed": rng_seed, "max_word_len": max_word_len, "n": n},
    )

    starts_cache = dict()
    asserted = 0
    attempts = 0
    max_attempts = 20 * samples

    while report.population < samples and attempts < max_attempts:
        attempts += 1
        length = int(rng.integers(1, max_word_len + 1))
        if length > n:
            continue
        position = int(rng.integers(1, n - length + 2))
        word = text[position - 1 : position - 1 + length]

        starts = starts_cache.get(word)
        if starts is None:
            starts = index.occurrence_starts(word, n)
            starts_cache[word] = starts
        if starts.size < 3:
            continue

        chosen = rng.choice(starts.size, size=3, replace=False)
        x, y, z = (Occurrence(word, int(starts[c])) for c in chosen)
        report.population += 1

        p_xy, p_xz, p_yz = index.proximity(x, y), index.proximity(x, z), index.proximity(y, z)
        if p_xy == p_xz:
            continue
        asserted += 1

        if not _triangle_holds(p_xy, p_xz, p_yz):
            report.add_violation(
                {"word": word, "starts": [x.start, y.start, z.start], "p_xy": p_xy, "p_xz": p_xz, "p_yz": p_yz}
            )

    report.params["asserted"] = asserted
    if report.population < samples:
        logger.warning("proximity-triangle: only %d of %d triples could be drawn", report.population, samples)
        report.add_note("sampled {} of {} requested triples".format(report.population, samples))

    return report


def check_proximity_exhaustive(index, word, n=None):
    """
    Check the min-property on every triple of occurrences of one word, every
    member taking the role of X.

    Returns
    -------
    VerdictReport
    """
    n = index._check_bound(n)
    starts = index.occurrence_starts(word, n).tolist()
    occurrences = [Occurrence(word, s) for s in starts]
    report = VerdictReport("proximity-exhaustive", params={"word": word, "n": n})

    m = len(occurrences)
    proximity = np.zeros((m, m), dtype=np.int64)
    for a in range(m):
        for b in range(a + 1, m):
            proximity[a, b] = proximity[b, a] = index.proximity(occurrences[a], occurrences[b])

    for x, y, z in itertools.permutations(range(m), 3):
        if y > z:
            continue
        report.population += 1
        p_xy, p_xz, p_yz = proximity[x, y], proximity[x, z], proximity[y, z]
        if not _triangle_holds(p_xy, p_xz, p_yz):
            report.add_violation(
                {
                    "word": word,
                    "starts": [starts[x], starts[y], starts[z]],
                    "p_xy": int(p_xy),
                    "p_xz": int(p_xz),
                    "p_yz": int(p_yz),
                }
            )

    return report


def _first_occurrences(text, word, count, n):
    """
    Plain left-to-right scan for the first count starts of word ending within n.
    """
    starts = []
    position = text.find(word)
    while position >= 0 and len(starts) < count and position + len(word) <= n:
        starts.append(position + 1)
        position = text.find(word, position + 1)
    return starts


def _longest_common_suffix(text, a, b):
    p = 0
    while p < min(a, b) - 1 and text[a - 2 - p] == text[b - 2 - p]:
        p += 1
    return p


def recheck_violation(seq, check_id, violation, n=None):
    """
    Re-validate a violation record against the raw bits by an independent scan.

    Parameters
    ----------
    seq: BitSequence

    check_id: str
        The check that produced the record

    violation: dict

    n: int
        The prefix length the check ran with

    Returns
    -------
    bool
        True when the raw bits confirm the violation
    """
    text = seq.to_string()
    n = len(text) if n is None else n
    word = violation["word"]
    starts = list(violation["starts"])
    length = len(word)

    if check_id.startswith("proximity"):
        x, y, z = starts
        if any(text[s - 1 : s - 1 + length] != word for s in starts):
            return False
        p_xy = _longest_common_suffix(text, x, y)
        p_xz = _longest_common_suffix(text, x, z)
        p_yz = _longest_common_suffix(text, y, z)
        return not _triangle_holds(p_xy, p_xz, p_yz)

    # Occurrence based checks count only occurrences followed inside x_1^n.
    following = 1 if check_id == "first-two-complement" else 2
    if _first_occurrences(text, word, len(starts), n - following) != starts:
        return False

    after = [text[s - 1 + length : s - 1 + length + following] for s in starts]

    if check_id == "first-two-complement":
        return after[0] == after[1]

    preceding = (text[starts[0] - 2], text[starts[1] - 2]) if starts[0] >= 2 else None
    is_good = preceding is not None and preceding[0] != preceding[1]

    if check_id == "prop-4.1":
        u = "".join(bits[0] for bits in after)
        v = "".join(bits[1] for bits in after)
        return is_good and not prop41_gate(u, v)

    lemma_id = check_id.split("-", 1)[1]
    if lemma_id in GOOD_ONLY_LEMMAS and not is_good:
        return False
    expected = pattern_text(LEMMA_PATTERNS[lemma_id], violation["a1"], violation["a2"])

    return all(bits.startswith(pattern) for bits, pattern in zip(after, expected))
