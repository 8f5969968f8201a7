"""
Classes structures for the records produced while generating and analyzing
the sequence: step traces, word occurrences, word classes and b+ views.
"""

from array import array
from enum import Enum

import numpy as np
import pandas as pd


class StepTrace(object):
    """
    Record of one generation step: the bit emitted at position t and the
    matched suffix it was derived from.
    """

    __slots__ = ("t", "match_len", "source_end", "emitted")

    def __init__(self, t, match_len, source_end, emitted):
        """
        Parameters
        ----------
        t: int
            1-based position of the emitted bit, t >= 4

        match_len: int
            Length L of the longest suffix of x_1^{t-1} seen earlier

        source_end: int
            End position of the last earlier occurrence of that suffix, 0 if none

        emitted: int
            The bit at position t
        """
        self.t = t
        self.match_len = match_len
        self.source_end = source_end
        self.emitted = emitted

    @property
    def match_start(self):
        return self.t - self.match_len

    def __eq__(self, other):
        if not isinstance(other, StepTrace):
            return NotImplemented

        return (self.t, self.match_len, self.source_end, self.emitted) == (
            other.t,
            other.match_len,
            other.source_end,
            other.emitted,
        )

    def __repr__(self):

        return "t={} L={} start={} src_end={} bit={}".format(
            self.t, self.match_len, self.match_start, self.source_end, self.emitted
        )


class TraceLog(object):
    """
    Columnar storage of step traces. Behaves like a list of StepTrace for
    steps first_step, first_step + 1, ...
    """

    COLUMNS = ["t", "match_start", "match_len", "source_end", "emitted"]

    def __init__(self, first_step=4, match_lens=None, source_ends=None, emitted=None):

        self.first_step = first_step
        self.match_lens = array("q", match_lens if match_lens is not None else [])
        self.source_ends = array("q", source_ends if source_ends is not None else [])
        self.emitted = array("b", emitted if emitted is not None else [])

    def append(self, match_len, source_end, emitted):

        self.match_lens.append(match_len)
        self.source_ends.append(source_end)
        self.emitted.append(emitted)

    def __len__(self):
        return len(self.match_lens)

    def __getitem__(self, item):

        if isinstance(item, slice):
            start, stop, step = item.indices(len(self))
            if step != 1:
                raise ValueError("Trace slices must be contiguous.")

            return TraceLog(
                first_step=self.first_step + start,
                match_lens=self.match_lens[start:stop],
                source_ends=self.source_ends[start:stop],
                emitted=self.emitted[start:stop],
            )

        if item < 0:
            item += len(self)
        if not 0 <= item < len(self):
            raise IndexError("Trace index out of range")

        return StepTrace(
            t=self.first_step + item,
            match_len=self.match_lens[item],
            source_end=self.source_ends[item],
            emitted=self.emitted[item],
        )

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def __eq__(self, other):
        if not isinstance(other, TraceLog):
            return NotImplemented

        return (
            self.first_step == other.first_step
            and self.match_lens == other.match_lens
            and self.source_ends == other.source_ends
            and self.emitted == other.emitted
        )

    def step(self, t):
        """
        Get the trace of the step that emitted position t.
        """
        return self[t - self.first_step]

    def alpha_series(self):
        """
        Running maximum of the matchlength, entry k is alpha(first_step + k).

        Returns
        -------
        np.array
        """
        if len(self) == 0:
            return np.zeros(0, dtype=np.int64)

        return np.maximum.accumulate(np.array(self.match_lens, dtype=np.int64))

    def get_results_df(self):
        """
        Get the trace as a dataframe with the trace CSV columns.

        Returns
        -------
        pd.DataFrame
        """
        match_len = np.array(self.match_lens, dtype=np.int64)
        t = np.arange(self.first_step, self.first_step + len(self), dtype=np.int64)

        df = pd.DataFrame(
            {
                "t": t,
                "match_start": t - match_len,
                "match_len": match_len,
                "source_end": np.array(self.source_ends, dtype=np.int64),
                "emitted": np.array(self.emitted, dtype=np.int64),
            },
            columns=self.COLUMNS,
        )
        return df

    def __repr__(self):

        return "TraceLog(steps {}..{})".format(self.first_step, self.first_step + len(self) - 1)


class Occurrence(object):
    """
    One placement of a word in the sequence, 1-based and inclusive.
    """

    __slots__ = ("word", "start", "end")

    def __init__(self, word, start):

        self.word = word
        self.start = start
        self.end = start + len(word) - 1

    def __eq__(self, other):
        if not isinstance(other, Occurrence):
            return NotImplemented
        return (self.word, self.start) == (other.word, other.start)

    def __hash__(self):
        return hash((self.word, self.start))

    def __repr__(self):

        return "{}@{}..{}".format(self.word, self.start, self.end)


class WordCategory(Enum):
    """
    Classification by the bits preceding the first two occurrences.
    """

    GOOD = "Good"
    BAD = "Bad"
    BOUNDARY = "Boundary"
    UNDETERMINED = "Undetermined"


class WordClass(object):
    """
    Good/bad classification of a word over a prefix.
    """

    def __init__(self, word, category, first_two_preceding=None):
        """
        Parameters
        ----------
        word: str

        category: WordCategory

        first_two_preceding: tuple or None
            Bits preceding the first two occurrences, None entries where undefined
        """
        self.word = word
        self.category = category
        self.first_two_preceding = first_two_preceding

    def is_good(self):
        return self.category is WordCategory.GOOD

    def is_bad(self):
        return self.category is WordCategory.BAD

    def __repr__(self):

        return "{} {}".format(self.word, self.category.value)


class MatchView(object):
    """
    b+(i): the longest word starting at i whose occurrence at i is at least its
    second one.
    """

    def __init__(self, i, b_plus, truncated=False):
        """
        Parameters
        ----------
        i: int
            1-based start position

        b_plus: str
            The word, "" for the empty word

        truncated: bool
            True when the word runs into the end of the stored sequence, so its
            maximality could not be confirmed
        """
        self.i = i
        self.b_plus = b_plus
        self.truncated = truncated

    @property
    def L_i(self):
        return len(self.b_plus)

    def __repr__(self):

        return "b+({}) = {} (L={}{})".format(
            self.i, self.b_plus or "λ", self.L_i, ", truncated" if self.truncated else ""
        )
