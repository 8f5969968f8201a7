"""
Read-only occurrence queries over a frozen prefix: counts, occurrence lists,
b+(i) / L_i, alpha(n), good/bad classification and proximity.

All structures are built lazily, once per SequenceIndex, and never change
afterwards, so an index may be shared by any number of readers.
"""

import bisect
import logging

import numpy as np
import pandas as pd

from em_sequence_toolkit.errors import PositionRangeError
from em_sequence_toolkit.models.measures import MatchView, Occurrence, WordCategory, WordClass
from em_sequence_toolkit.models.sequence import replay_trace
from em_sequence_toolkit.utils import MAX_PACKED_WORD_LEN, code_to_word, timing, validate_word

logger = logging.getLogger(__name__)

# Dense per-word tables are limited to 2^24 entries.
MAX_DENSE_WORD_LEN = 24


@timing
def build_suffix_array(bits):
    """
    Suffix array by prefix doubling over numpy ranks.

    Parameters
    ----------
    bits: np.array
        Symbols, 0-based

    Returns
    -------
    np.array
        Start positions (0-based) of the suffixes in lexicographic order
    """
    n = len(bits)
    if n == 0:
        return np.zeros(0, dtype=np.int64)

    rank = np.asarray(bits, dtype=np.int64)
    sa = np.argsort(rank, kind="stable")

    k = 1
    while True:
        sorted_rank = rank[sa]
        boundaries = np.concatenate([[0], (sorted_rank[1:] != sorted_rank[:-1]).astype(np.int64)])
        if k > 1:
            sorted_second = second[sa]
            boundaries[1:] |= (sorted_second[1:] != sorted_second[:-1]).astype(np.int64)
        new_rank = np.empty(n, dtype=np.int64)
        new_rank[sa] = np.cumsum(boundaries)
        rank = new_rank

        if rank[sa[-1]] == n - 1 or k >= n:
            break

        # Suffixes shorter than k sort before longer ones sharing their prefix.
        second = np.full(n, -1, dtype=np.int64)
        second[: n - k] = rank[k:]
        sa = np.lexsort((second, rank))
        k *= 2

    return sa


@timing
def build_lcp_array(text, sa):
    """
    Kasai LCP. Entry r is the longest common prefix of suffixes sa[r - 1] and
    sa[r]; entry 0 is 0.
    """
    n = len(text)
    sa_list = sa.tolist()
    rank = [0] * n
    for r, p in enumerate(sa_list):
        rank[p] = r

    lcp = [0] * n
    h = 0
    for i in range(n):
        r = rank[i]
        if r == 0:
            h = 0
            continue
        j = sa_list[r - 1]
        while i + h < n and j + h < n and text[i + h] == text[j + h]:
            h += 1
        lcp[r] = h
        if h > 0:
            h -= 1

    return np.array(lcp, dtype=np.int64)


def _nearest_smaller_lcp(sa_list, lcp_list, ranks):
    """
    For each rank, lcp with the nearest rank (in the given iteration order)
    whose suffix starts earlier, 0 if none.

    lcp_list[r] must hold the lcp between the rank visited before r and r.
    """
    result = [0] * len(sa_list)
    stack = []
    link = [0] * len(sa_list)

    for r in ranks:
        cur = lcp_list[r]
        pos = sa_list[r]
        while stack and sa_list[stack[-1]] > pos:
            top = stack.pop()
            if link[top] < cur:
                cur = link[top]
        if stack:
            result[r] = cur
            link[r] = cur
        else:
            link[r] = 0
        stack.append(r)

    return result


@timing
def build_lpf_array(sa, lcp):
    """
    Longest previous factor: for every position, the longest word starting
    there that also starts at some earlier position.
    """
    n = len(sa)
    sa_list = sa.tolist()
    lcp_list = lcp.tolist()

    left = _nearest_smaller_lcp(sa_list, lcp_list, range(n))

    # Walking right to left the lcp to the previously visited rank r + 1 is lcp[r + 1].
    shifted = lcp_list[1:] + [0]
    right = _nearest_smaller_lcp(sa_list, shifted, range(n - 1, -1, -1))

    lpf = np.zeros(n, dtype=np.int64)
    lpf[sa] = np.maximum(np.array(left, dtype=np.int64), np.array(right, dtype=np.int64))

    return lpf


class SequenceIndex(object):
    """
    Static index over a BitSequence.
    """

    def __init__(self, seq):
        """
        Parameters
        ----------
        seq: BitSequence
        """
        self.seq = seq
        self.length = len(seq)
        self._bits = seq.to_array()
        self._text = seq.to_string().encode("ascii")

        self._sa = None
        self._lcp = None
        self._lpf = None
        self._z = None
        self._trace = None
        self._codes_cache = None

    # ----- construction -----

    def get_suffix_array(self):
        if self._sa is None:
            self._sa = build_suffix_array(self._bits)
        return self._sa

    def get_lcp_array(self):
        if self._lcp is None:
            self._lcp = build_lcp_array(self._text, self.get_suffix_array())
        return self._lcp

    def longest_previous_factor(self):
        """
        L_i for i = 1..|seq| (entry i - 1).

        Returns
        -------
        np.array
        """
        if self._lpf is None:
            self._lpf = build_lpf_array(self.get_suffix_array(), self.get_lcp_array())
        return self._lpf

    def z_array(self):
        """
        Entry i - 1 is the length of the longest common prefix of the sequence
        and its suffix starting at i (the full length for i = 1).
        """
        if self._z is None:
            sa = self.get_suffix_array()
            lcp = self.get_lcp_array()
            n = self.length

            rank0 = int(np.flatnonzero(sa == 0)[0])
            z_by_rank = np.zeros(n, dtype=np.int64)
            z_by_rank[rank0] = n
            if rank0 + 1 < n:
                z_by_rank[rank0 + 1 :] = np.minimum.accumulate(lcp[rank0 + 1 :])
            if rank0 > 0:
                z_by_rank[:rank0] = np.minimum.accumulate(lcp[1 : rank0 + 1][::-1])[::-1]

            z = np.zeros(n, dtype=np.int64)
            z[sa] = z_by_rank
            self._z = z
        return self._z

    def get_trace(self):
        """
        The matching trace of the indexed bits, replayed once.
        """
        if self._trace is None:
            self._trace = replay_trace(self.seq)
        return self._trace

    # ----- validation helpers -----

    def _check_bound(self, n):

        if n is None:
            return self.length
        if not 0 <= n <= self.length:
            raise PositionRangeError("Prefix length {} outside 0..{}".format(n, self.length))
        return n

    def _sa_range(self, word):
        """
        Ranks [lo, hi) of the suffixes starting with word.
        """
        sa = self.get_suffix_array()
        pattern = word.encode("ascii")
        m = len(pattern)
        text = self._text

        lo = bisect.bisect_left(sa, pattern, key=lambda p: text[p : p + m])
        hi = bisect.bisect_right(sa, pattern, lo=lo, key=lambda p: text[p : p + m])

        return lo, hi

    def _starts(self, word):
        """
        Sorted 1-based starts of all occurrences of word.
        """
        lo, hi = self._sa_range(word)
        return np.sort(self.get_suffix_array()[lo:hi]) + 1

    # ----- occurrence queries -----

    def count_occurrences(self, word, k=1, n=None):
        """
        Number of occurrences of word fully inside positions k..n, overlaps included.

        Parameters
        ----------
        word: str

        k: int
            First allowed start, 1-based

        n: int
            Last allowed end, defaults to the sequence length

        Returns
        -------
        int
        """
        validate_word(word)
        n = self.length if n is None else n
        if not 1 <= k <= n <= self.length:
            raise PositionRangeError("Invalid range k={} n={} for length {}".format(k, n, self.length))

        starts = self._starts(word)
        ends = starts + len(word) - 1

        return int(np.count_nonzero((starts >= k) & (ends <= n)))

    def occurrence_starts(self, word, n=None):
        """
        Sorted 1-based starts of the occurrences of word inside x_1^n.

        Returns
        -------
        np.array
        """
        validate_word(word)
        n = self._check_bound(n)

        starts = self._starts(word)
        return starts[starts + len(word) - 1 <= n]

    def occurrences_of(self, word, limit=None, n=None):
        """
        First limit occurrences of word in x_1^n in start order.

        Returns
        -------
        list
            Occurrence objects
        """
        if limit is not None and limit < 1:
            raise ValueError("limit must be positive")

        starts = self.occurrence_starts(word, n)
        if limit is not None:
            starts = starts[:limit]

        return [Occurrence(word, int(s)) for s in starts]

    def b_plus(self, i):
        """
        Get b+(i).

        Parameters
        ----------
        i: int
            1-based start position

        Returns
        -------
        MatchView
        """
        if not 1 <= i <= self.length:
            raise PositionRangeError("Position {} outside 1..{}".format(i, self.length))

        length = int(self.longest_previous_factor()[i - 1])
        word = self._text[i - 1 : i - 1 + length].decode("ascii")

        return MatchView(i, word, truncated=(i + length - 1 == self.length))

    def alpha(self, n=None):
        """
        Maximum matchlength over the steps emitting positions up to n.
        """
        n = self._check_bound(n)
        if n <= 3:
            return 0

        trace = self.get_trace()
        return int(np.max(np.asarray(trace.match_lens[: n - 3], dtype=np.int64)))

    def is_em_sequence(self):
        """
        Whether every bit after the seed complements the bit following its
        selected earlier occurrence.
        """
        if self.length < 3 or self._text[:3] != b"010":
            return False

        trace = self.get_trace()
        source_ends = np.asarray(trace.source_ends, dtype=np.int64)
        if np.any(source_ends == 0):
            return False

        return bool(np.all(self._bits[3:] == 1 - self._bits[source_ends]))

    def classify_word(self, word, n=None):
        """
        Good/bad classification by the bits before the first two occurrences.

        Returns
        -------
        WordClass
        """
        validate_word(word)
        occurrences = self.occurrences_of(word, limit=2, n=n)

        return self._classify_starts(word, [occ.start for occ in occurrences])

    def _classify_starts(self, word, starts):

        if len(starts) < 2:
            return WordClass(word, WordCategory.UNDETERMINED)

        first, second = starts[0], starts[1]
        if first == 1:
            return WordClass(word, WordCategory.BOUNDARY, (None, int(self._bits[second - 2])))

        preceding = (int(self._bits[first - 2]), int(self._bits[second - 2]))
        category = WordCategory.GOOD if preceding[0] != preceding[1] else WordCategory.BAD

        return WordClass(word, category, preceding)

    def proximity(self, occ_a, occ_b):
        """
        Length of the longest common suffix of the prefixes preceding two
        occurrences.

        Parameters
        ----------
        occ_a, occ_b: Occurrence

        Returns
        -------
        int
        """
        a, b = sorted((occ_a.start, occ_b.start))
        if a == b:
            logger.warning("Proximity of identical placements at %d is degenerate", a)
            return a - 1

        text = self._text
        p = 0
        # Compare backwards from the bits just before each start.
        while p < a - 1 and text[a - 2 - p] == text[b - 2 - p]:
            p += 1

        return p

    # ----- per-length tables -----

    def word_codes(self, length, n=None):
        """
        Packed codes of every length-l window of x_1^n, first bit most significant.

        Returns
        -------
        np.array
            n - l + 1 int64 codes, window starting at position i is entry i - 1
        """
        n = self._check_bound(n)
        if not 1 <= length <= MAX_PACKED_WORD_LEN:
            raise ValueError("Word length {} outside 1..{}".format(length, MAX_PACKED_WORD_LEN))

        count = self.length - length + 1
        if count <= 0:
            return np.zeros(0, dtype=np.int64)

        if self._codes_cache is not None and self._codes_cache[0] == length:
            codes = self._codes_cache[1]
        else:
            bits = self._bits.astype(np.int64)
            if self._codes_cache is not None and self._codes_cache[0] == length - 1:
                prev = self._codes_cache[1]
                codes = (prev[:count] << 1) | bits[length - 1 :]
            else:
                codes = np.zeros(count, dtype=np.int64)
                for k in range(length):
                    codes = (codes << 1) | bits[k : k + count]
            self._codes_cache = (length, codes)

        return codes[: max(n - length + 1, 0)]

    def word_counts(self, length, n=None):
        """
        Dense table of N_n(w) for all words of a length, indexed by word code.
        """
        if length > MAX_DENSE_WORD_LEN:
            raise ValueError("Dense tables are limited to word length {}".format(MAX_DENSE_WORD_LEN))

        return np.bincount(self.word_codes(length, n), minlength=2 ** length)

    def first_occurrence_table(self, length, n=None, k=2, following=0):
        """
        The first k occurrence starts of every word of a length.

        Parameters
        ----------
        length: int

        n: int
            Prefix bound

        k: int
            Occurrences kept per word

        following: int
            Number of bits that must follow an occurrence inside x_1^n

        Returns
        -------
        (np.array, np.array, np.array)
            Word codes present, their occurrence counts, and a (words, k) table
            of 1-based starts with 0 where a word has fewer than k occurrences
        """
        n = self._check_bound(n)
        codes = self.word_codes(length, max(n - following, 0))
        if codes.size == 0:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros((0, k), dtype=np.int64)

        order = np.argsort(codes, kind="stable")
        unique_codes, first_index, counts = np.unique(codes[order], return_index=True, return_counts=True)

        starts = np.zeros((unique_codes.size, k), dtype=np.int64)
        for j in range(k):
            present = counts > j
            starts[present, j] = order[first_index[present] + j] + 1

        return unique_codes, counts, starts

    def classify_all(self, length, n=None):
        """
        Classify every word of a length that occurs in x_1^n.

        Returns
        -------
        list
            WordClass objects in word order
        """
        codes, counts, starts = self.first_occurrence_table(length, n, k=2)

        classes = []
        for code, first, second in zip(codes.tolist(), starts[:, 0].tolist(), starts[:, 1].tolist()):
            word = code_to_word(code, length)
            classes.append(self._classify_starts(word, [s for s in (first, second) if s > 0]))

        return classes

    def bad_counts_by_length(self, n=None):
        """
        Number of Bad words of each length, for all lengths with a repeated word.

        Returns
        -------
        dict
            length -> count of Bad words
        """
        n = self._check_bound(n)
        bits = self._bits
        result = dict()

        for length in range(1, MAX_PACKED_WORD_LEN + 1):
            codes, counts, starts = self.first_occurrence_table(length, n, k=2)
            repeated = counts >= 2
            if not np.any(repeated):
                break

            first = starts[repeated, 0]
            second = starts[repeated, 1]
            interior = first >= 2
            bad = bits[first[interior] - 2] == bits[second[interior] - 2]
            result[length] = int(np.count_nonzero(bad))

        return result

    def bad_word_count(self, n=None):
        """
        B_n: the number of Bad words in x_1^n.
        """
        return sum(self.bad_counts_by_length(n).values())

    def initial_recurrences(self):
        """
        i_k, the start of the second occurrence of x_1^k, for every k realized
        in the indexed bits.

        Returns
        -------
        pd.DataFrame
            Columns k, i_k, ratio (i_k / 2^(k/2)), L_at_i_k
        """
        z = self.z_array()
        if self.length < 2:
            return pd.DataFrame(columns=["k", "i_k", "ratio", "L_at_i_k"])

        later = z[1:]
        running_max = np.maximum.accumulate(later)
        max_k = int(running_max[-1])

        k = np.arange(1, max_k + 1, dtype=np.int64)
        i_k = np.searchsorted(running_max, k, side="left") + 2
        lpf = self.longest_previous_factor()

        df = pd.DataFrame(
            {
                "k": k,
                "i_k": i_k,
                "ratio": i_k / np.power(2.0, k / 2.0),
                "L_at_i_k": lpf[i_k - 1],
            }
        )
        return df

    # ----- exports -----

    def occurrences_df(self, words, limit=None, n=None):
        """
        Occurrence list as a dataframe with columns word, start, end.
        """
        rows = []
        for word in words:
            for occ in self.occurrences_of(word, limit=limit, n=n):
                rows.append({"word": occ.word, "start": occ.start, "end": occ.end})

        return pd.DataFrame(rows, columns=["word", "start", "end"])

    def classification_df(self, length, n=None):
        """
        Classification of every occurring word of a length, columns word, class, pre1, pre2.
        """
        rows = []
        for word_class in self.classify_all(length, n):
            pre1, pre2 = word_class.first_two_preceding or (None, None)
            rows.append({"word": word_class.word, "class": word_class.category.value, "pre1": pre1, "pre2": pre2})

        df = pd.DataFrame(rows, columns=["word", "class", "pre1", "pre2"])
        df["pre1"] = df["pre1"].astype("Int64")
        df["pre2"] = df["pre2"].astype("Int64")

        return df
