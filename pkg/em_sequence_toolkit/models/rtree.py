"""
R_n, the set of words occurring at least twice in x_1^n, and the tree T_n in
which reading edge labels from a vertex up to the root spells its word.

The parent of a word w is w with its first bit removed; the children of w are
0w and 1w. The root is the empty word and is not counted as a vertex of T_n.
"""

import json
import logging
from collections import OrderedDict

import numpy as np
import pandas as pd

from em_sequence_toolkit.errors import EmptyWordError
from em_sequence_toolkit.models.index import SequenceIndex
from em_sequence_toolkit.utils import MAX_PACKED_WORD_LEN, code_to_word, timing, validate_word

logger = logging.getLogger(__name__)

PAIR_SUFFIXES = ("00", "01", "10", "11")
CORE_EXCESS_FACTOR = 7

ZETA_REALIZATION = (
    "zeta_n = {Z : Z00, Z01, Z10, Z11 in R_n}; zeta_n is closed under suffixes so its core zeta_n* is the "
    "subtree of T_n on those words, root included; gamma = |zeta_n*|; j_xy = |T_n(xy)| - gamma"
)
VERTEX_COUNT_NOTE = "T_n vertex counts exclude the root"


class RnSet(object):
    """
    Words occurring at least twice in x_1^n, stored per length as sorted codes.
    """

    def __init__(self, n, codes_by_length, alpha=None, x=None, bad_word_count=None):
        """
        Parameters
        ----------
        n: int
            Prefix length

        codes_by_length: dict
            length -> sorted np.array of word codes

        alpha: int
            alpha(n)

        x: int or None
            Largest 0-based index with x + L_x - 1 <= n, None when undeterminable

        bad_word_count: int
            B_n
        """
        self.n = n
        self.codes_by_length = codes_by_length
        self.alpha = alpha
        self.x = x
        self.bad_word_count = bad_word_count
        self._words = None

    @property
    def max_length(self):
        return max(self.codes_by_length) if self.codes_by_length else 0

    @property
    def words(self):
        """
        The words as a set of strings.
        """
        if self._words is None:
            self._words = set(self.iter_words())
        return self._words

    def iter_words(self):
        """
        Words by length, then lexicographically.
        """
        for length in sorted(self.codes_by_length):
            for code in self.codes_by_length[length].tolist():
                yield code_to_word(code, length)

    def ending_counts(self):
        """
        Number of words ending in 0 and in 1.

        Returns
        -------
        dict
            {0: count, 1: count}
        """
        ones = sum(int(np.count_nonzero(codes & 1)) for codes in self.codes_by_length.values())
        return {0: len(self) - ones, 1: ones}

    def count_with_suffix(self, suffix):
        """
        |R_n(x)|: number of words ending with suffix.
        """
        validate_word(suffix)
        k = len(suffix)
        target = int(suffix, 2)
        mask = (1 << k) - 1

        return sum(
            int(np.count_nonzero((codes & mask) == target))
            for length, codes in self.codes_by_length.items()
            if length >= k
        )

    def count_min_length(self, length):
        """
        Number of words of at least a length.
        """
        return sum(codes.size for word_len, codes in self.codes_by_length.items() if word_len >= length)

    @property
    def identity_holds(self):
        """
        Whether |R_n| = x - 1, None when x could not be determined.
        """
        if self.x is None:
            return None
        return len(self) == self.x - 1

    def __contains__(self, word):
        if not word or word.strip("01"):
            return False
        codes = self.codes_by_length.get(len(word))
        if codes is None:
            return False
        code = int(word, 2)
        pos = int(np.searchsorted(codes, code))
        return pos < codes.size and int(codes[pos]) == code

    def __len__(self):
        return int(sum(codes.size for codes in self.codes_by_length.values()))

    def __iter__(self):
        return self.iter_words()

    def __repr__(self):
        return "RnSet(n={}, |R_n|={}, alpha={}, x={})".format(self.n, len(self), self.alpha, self.x)


@timing
def build_rn(source, n=None):
    """
    Build R_n exactly from per-length word frequencies.

    Parameters
    ----------
    source: SequenceIndex or BitSequence

    n: int
        Prefix length, defaults to the whole sequence

    Returns
    -------
    RnSet
    """
    index = source if isinstance(source, SequenceIndex) else SequenceIndex(source)
    n = index.length if n is None else n
    index._check_bound(n)

    codes_by_length = dict()
    for length in range(1, MAX_PACKED_WORD_LEN + 1):
        codes = index.word_codes(length, n)
        if codes.size < 2:
            break
        unique_codes, counts = np.unique(codes, return_counts=True)
        repeated = unique_codes[counts >= 2]
        if repeated.size == 0:
            break
        codes_by_length[length] = repeated

    x = _prefix_index_x(index, n)
    rn = RnSet(n, codes_by_length, alpha=index.alpha(n), x=x, bad_word_count=index.bad_word_count(n))

    if x is not None and n >= 2 and not rn.identity_holds:
        logger.warning("|R_n| = %d but x - 1 = %d at n=%d", len(rn), x - 1, n)

    return rn


def _prefix_index_x(index, n):
    """
    The largest 0-based index x with x + L_x - 1 <= n.
    """
    if n == index.length:
        logger.warning(
            "b+ lengths near position %d run into the end of the indexed bits; x is undetermined. "
            "Index a longer sequence to cross-check |R_n|.",
            n,
        )
        return None

    lpf = index.longest_previous_factor()
    positions = np.arange(1, index.length + 1, dtype=np.int64)
    ends = positions + lpf - 1
    fitting = int(np.count_nonzero(ends <= n))

    return fitting - 1


class StrandDecomposition(object):
    """
    Maximal chains of unary vertices of T_n.
    """

    def __init__(self, heads, edge_counts, strand_of):
        """
        Parameters
        ----------
        heads: list
            Topmost word of each strand, sorted

        edge_counts: list
            Edges of each strand (one per unary vertex in the chain)

        strand_of: dict
            word -> strand id for unary vertices
        """
        self.heads = heads
        self.edge_counts = edge_counts
        self.strand_of = strand_of

    @property
    def strand_count(self):
        return len(self.heads)

    def histogram(self):
        """
        Strand edge count -> number of strands, ordered by edge count.
        """
        counts = OrderedDict()
        for edges in sorted(self.edge_counts):
            counts[edges] = counts.get(edges, 0) + 1
        return counts

    def long_strand_count(self):
        """
        Strands with more than 2 edges.
        """
        return sum(1 for edges in self.edge_counts if edges > 2)

    def excess_edges(self):
        """
        Edges beyond the first 2 of every strand.
        """
        return sum(max(0, edges - 2) for edges in self.edge_counts)

    def __repr__(self):
        return "{} strands, excess edges {}".format(self.strand_count, self.excess_edges())


class TnTree(object):
    """
    Trie over R_n read from vertex to root.
    """

    def __init__(self, rn):
        """
        Parameters
        ----------
        rn: RnSet
        """
        self.rn = rn
        self.n = rn.n
        self._vertices = set(rn.words)
        self._vertices.add("")
        self._subtree_sizes = None
        self._strands = None

    def has_vertex(self, word):
        return word in self._vertices

    def vertices(self):
        """
        All vertices including the root, word-lexicographic.
        """
        return sorted(self._vertices)

    def vertex_count(self):
        """
        Non-root vertex count, equal to |R_n|.
        """
        return len(self._vertices) - 1

    def children(self, word):
        """
        Children in edge label order 0, 1.
        """
        return [bit + word for bit in "01" if bit + word in self._vertices]

    def parent(self, word):
        if word == "":
            return None
        return word[1:]

    def is_balanced(self, word):
        """
        Both one-bit left extensions present.
        """
        return len(self.children(word)) == 2

    def is_unary(self, word):
        return len(self.children(word)) == 1

    def in_core(self, word):
        """
        Member of the balanced core T_n*: both one-bit right extensions in R_n.
        """
        return (word + "0") in self._vertices and (word + "1") in self._vertices

    def subtree_sizes(self):
        """
        Non-root vertices below and including each vertex; the root maps to |R_n|.
        """
        if self._subtree_sizes is None:
            sizes = dict()
            for word in sorted(self._vertices, key=len, reverse=True):
                size = 0 if word == "" else 1
                for child in self.children(word):
                    size += sizes[child]
                sizes[word] = size
            self._subtree_sizes = sizes
        return self._subtree_sizes

    def get_strands(self):
        if self._strands is None:
            self._strands = strands(self)
        return self._strands

    def get_vertices_df(self):
        """
        One row per vertex, root first.

        Returns
        -------
        pd.DataFrame
        """
        sizes = self.subtree_sizes()
        strand_of = self.get_strands().strand_of
        zeta = zeta_words(self)

        rows = []
        for word in self.vertices():
            rows.append(
                {
                    "word": word,
                    "depth": len(word),
                    "parent": self.parent(word),
                    "edge_label": word[0] if word else None,
                    "children": len(self.children(word)),
                    "balanced": self.is_balanced(word),
                    "core": self.in_core(word),
                    "strand_id": strand_of.get(word),
                    "in_zeta_core": word in zeta,
                    "subtree_size": sizes[word],
                }
            )

        df = pd.DataFrame(rows)
        df["strand_id"] = df["strand_id"].astype("Int64")
        return df

    def __repr__(self):
        return "TnTree(n={}, vertices={})".format(self.n, self.vertex_count())


def build_tn(rn):
    """
    Build T_n from R_n.

    Returns
    -------
    TnTree
    """
    tree = TnTree(rn)
    assert tree.vertex_count() == len(rn)

    return tree


def subtree_count(tree, suffix):
    """
    |T_n(x)|: the number of R_n words ending with suffix.
    """
    if not suffix:
        raise EmptyWordError("Subtree counts need a nonempty suffix.")
    validate_word(suffix)

    if not tree.has_vertex(suffix):
        return 0

    return tree.subtree_sizes()[suffix]


def strands(tree):
    """
    Decompose the unary vertices of T_n, root included, into maximal chains.

    Returns
    -------
    StrandDecomposition
    """
    heads = []
    edge_counts = []
    strand_of = dict()

    for word in tree.vertices():
        if not tree.is_unary(word):
            continue
        parent = tree.parent(word)
        if parent is not None and tree.is_unary(parent):
            continue

        strand_id = len(heads)
        heads.append(word)
        edges = 0
        current = word
        while tree.is_unary(current):
            strand_of[current] = strand_id
            edges += 1
            current = tree.children(current)[0]
        edge_counts.append(edges)

    return StrandDecomposition(heads, edge_counts, strand_of)


def zeta_words(tree):
    """
    zeta_n: words Z with Z00, Z01, Z10, Z11 all in R_n. Includes the root
    when 00, 01, 10 and 11 all repeat.
    """
    return set(
        word for word in tree.vertices() if all(tree.has_vertex(word + pair) for pair in PAIR_SUFFIXES)
    )


class TreeStats(object):
    """
    zeta_n accounting of a tree.
    """

    def __init__(self, n, gamma, leaves, unary, j, tn_sizes, strand_histogram, bad_word_count):

        self.n = n
        self.gamma = gamma
        self.leaves = leaves
        self.unary = unary
        self.j = j
        self.tn_sizes = tn_sizes
        self.strand_histogram = strand_histogram
        self.bad_word_count = bad_word_count

    def core_excess(self):
        """
        max(0, j_xy - 7 gamma) per pair suffix.
        """
        return OrderedDict((xy, max(0, self.j[xy] - CORE_EXCESS_FACTOR * self.gamma)) for xy in PAIR_SUFFIXES)

    def gamma_identity_holds(self):
        if self.gamma == 0:
            return True
        return self.gamma == 2 * self.leaves + self.unary - 1

    def to_dict(self):

        return OrderedDict(
            [
                ("n", self.n),
                ("gamma", self.gamma),
                ("leaves", self.leaves),
                ("unary", self.unary),
                ("j", OrderedDict((xy, self.j[xy]) for xy in PAIR_SUFFIXES)),
                ("strand_histogram", OrderedDict((str(k), v) for k, v in self.strand_histogram.items())),
                ("bad_word_count", self.bad_word_count),
                ("tn_sizes", OrderedDict((xy, self.tn_sizes[xy]) for xy in PAIR_SUFFIXES)),
                ("core_excess", self.core_excess()),
                (
                    "metadata",
                    OrderedDict([("zeta_realization", ZETA_REALIZATION), ("vertex_count", VERTEX_COUNT_NOTE)]),
                ),
            ]
        )

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def __repr__(self):
        return "gamma={} L={} U={} j={}".format(self.gamma, self.leaves, self.unary, dict(self.j))


def zeta_stats(tree):
    """
    gamma_n, the leaf and unary counts of zeta_n*, and j_xy per pair suffix.

    Returns
    -------
    TreeStats
    """
    zeta = zeta_words(tree)

    leaves, unary = 0, 0
    for word in zeta:
        inside = sum(1 for bit in "01" if bit + word in zeta)
        if inside == 0:
            leaves += 1
        elif inside == 1:
            unary += 1

    gamma = len(zeta)
    if gamma:
        assert gamma == 2 * leaves + unary - 1

    tn_sizes = OrderedDict((xy, subtree_count(tree, xy)) for xy in PAIR_SUFFIXES)
    j = OrderedDict((xy, tn_sizes[xy] - gamma) for xy in PAIR_SUFFIXES)

    return TreeStats(
        n=tree.n,
        gamma=gamma,
        leaves=leaves,
        unary=unary,
        j=j,
        tn_sizes=tn_sizes,
        strand_histogram=tree.get_strands().histogram(),
        bad_word_count=tree.rn.bad_word_count,
    )


def tree_shares(tree):
    """
    |T_n(xy)| as a share of the four pair subtrees together.
    """
    sizes = OrderedDict((xy, subtree_count(tree, xy)) for xy in PAIR_SUFFIXES)
    total = sum(sizes.values())

    return OrderedDict((xy, (size / total if total else 0.0)) for xy, size in sizes.items())


def rn_words_df(index, rn):
    """
    R_n words with their class and ending bit, columns word, length, class, ending_bit.

    Parameters
    ----------
    index: SequenceIndex
        Index the set was built from

    rn: RnSet

    Returns
    -------
    pd.DataFrame
    """
    rows = []
    for length in sorted(rn.codes_by_length):
        for word_class in index.classify_all(length, rn.n):
            if word_class.word in rn:
                rows.append(
                    {
                        "word": word_class.word,
                        "length": length,
                        "class": word_class.category.value,
                        "ending_bit": int(word_class.word[-1]),
                    }
                )

    return pd.DataFrame(rows, columns=["word", "length", "class", "ending_bit"])
