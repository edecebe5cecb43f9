"""Admissible words, cylinder geometry and full intervals.

A word is admissible when every suffix is lexicographically at most the
same-length prefix of the expansion of 1.  All shifts including the whole
word are checked, so a word whose first digit exceeds the first digit of
the expansion of 1 is rejected.

The longest suffix of a word that is also a prefix of the expansion of 1
drives everything here: it decides admissibility digit by digit, gives k*
and hence the exact cylinder length.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field
from typing import Sequence

from .errors import BudgetExceeded, NotAdmissible, PrecisionExhausted
from .expansion import Word, check_alphabet, expansion_of_one, format_word, word_value
from .reals import Beta, BetaNumber, Enclosure, Ordering, certified_compare, certified_sign

DEFAULT_ENUM_CAP = 16


class Fullness(str, enum.Enum):
    FULL = "Full"
    NOT_FULL = "NotFull"
    UNKNOWN = "Unknown"


def lex_compare(a: Sequence[int], b: Sequence[int], n: int | None = None) -> Ordering:
    """Lexicographic order on the first n symbols (all symbols if n is None).

    When one word is a proper prefix of the other, the shorter one is Less.
    """
    if n is not None:
        a, b = a[:n], b[:n]
    for x, y in zip(a, b):
        if x != y:
            return Ordering.LESS if x < y else Ordering.GREATER
    if len(a) == len(b):
        return Ordering.EQUAL
    return Ordering.LESS if len(a) < len(b) else Ordering.GREATER


class SuffixMatcher:
    """Tracks the longest suffix that is a prefix of the expansion of 1.

    Feeding digit ``a`` in state ``s`` is legal iff ``a <= e*_{s+1}``.  Only
    the longest matching suffix needs checking: shorter matches are borders
    of e*|s, and self-admissibility of e* makes their next digit at least
    e*_{s+1}.
    """

    def __init__(self, beta: Beta, depth: int):
        self.beta = beta
        self.ones: Word = ()
        self.fail: list[int] = [0]
        self.extend(depth)

    def extend(self, depth: int) -> None:
        if depth + 1 <= len(self.ones):
            return
        ones = expansion_of_one(self.beta, max(depth + 1, 2 * len(self.ones)))
        fail = self.fail
        for i in range(len(fail), len(ones)):
            k = fail[i - 1]
            while k and ones[i] != ones[k]:
                k = fail[k - 1]
            fail.append(k + 1 if ones[i] == ones[k] else 0)
        self.ones = ones

    def step(self, state: int, digit: int) -> int | None:
        """Next state, or None when the digit breaks admissibility."""
        if state + 1 > len(self.ones):
            self.extend(state + 1)
        top = self.ones[state]
        if digit > top:
            return None
        if digit == top:
            return state + 1
        s = state
        while s:
            s = self.fail[s - 1]
            if self.ones[s] == digit:
                return s + 1
        return 1 if self.ones[0] == digit else 0

    def run(self, word: Sequence[int], state: int = 0) -> int | None:
        for position, d in enumerate(word):
            state = self.step(state, d)
            if state is None:
                return None
        return state

    def states(self, word: Sequence[int]) -> list[int]:
        """State after each prefix; raises NotAdmissible at the first bad digit."""
        self.extend(len(word))
        out, state = [], 0
        for position, d in enumerate(word, start=1):
            state = self.step(state, d)
            if state is None:
                raise NotAdmissible(f"word fails the lexicographic test at position {position}",
                                    word=format_word(word))
            out.append(state)
        return out


def _matcher(beta: Beta, depth: int) -> SuffixMatcher:
    with beta._lock:
        m = beta.cache.get("matcher")
        if m is None:
            m = beta.cache["matcher"] = SuffixMatcher(beta, max(depth, 16))
        else:
            m.extend(depth)
        return m


def is_admissible(beta: Beta, w: Sequence[int]) -> bool:
    w = check_alphabet(beta, w)
    return _matcher(beta, len(w)).run(w) is not None


def is_admissible_bruteforce(beta: Beta, w: Sequence[int]) -> bool:
    """Direct check of sigma^i w <= e*|(n-i) for 0 <= i < n."""
    w = check_alphabet(beta, w)
    ones = expansion_of_one(beta, len(w))
    return all(lex_compare(w[i:], ones[:len(w) - i]) <= 0 for i in range(len(w)))


@dataclass
class LanguageSlice:
    n: int
    words: list[Word]
    count: int = field(init=False)

    def __post_init__(self):
        self.count = len(self.words)


def enumerate_words(beta: Beta, n: int, cap: int = DEFAULT_ENUM_CAP) -> LanguageSlice:
    """All admissible words of length n in lexicographic order (prefix-pruned DFS)."""
    if n < 1:
        raise ValueError("n must be positive")
    if n > cap:
        raise BudgetExceeded(f"n={n} exceeds the enumeration cap {cap}")
    m = _matcher(beta, n)
    alphabet = range(beta.alphabet_size)
    words: list[Word] = []

    def walk(prefix: list[int], state: int) -> None:
        if len(prefix) == n:
            words.append(tuple(prefix))
            return
        for d in alphabet:
            nxt = m.step(state, d)
            if nxt is None:
                break
            prefix.append(d)
            walk(prefix, nxt)
            prefix.pop()

    walk([], 0)
    return LanguageSlice(n, words)


def k_star(beta: Beta, w: Sequence[int]) -> int:
    """Least k with (w_{k+1}, ..., w_n) equal to the first n-k digits of e*."""
    w = check_alphabet(beta, w)
    if not is_admissible(beta, w):
        raise NotAdmissible("k* is defined for admissible words only", word=format_word(w))
    n = len(w)
    ones = expansion_of_one(beta, n)
    for k in range(n + 1):
        if w[k:] == ones[:n - k]:
            return k
    return n


def length_from_kstar(beta: Beta, n: int, k: int) -> BetaNumber:
    """beta^-k (1 - value(e*|(n-k))): the cylinder length for a word with k* = k."""
    m = n - k
    return (1 - word_value(beta, expansion_of_one(beta, m))).shift(-k)


def decide_equal(a, b) -> bool | None:
    """True/False when certified, None when the budget cannot tell."""
    diff = a - b
    if isinstance(diff, BetaNumber) and diff.is_zero():
        return True
    if isinstance(diff, BetaNumber) and diff.beta.exact:
        return False
    try:
        return certified_sign(diff) == 0
    except PrecisionExhausted:
        return None


@dataclass
class CylinderInfo:
    word: Word
    left: BetaNumber
    right: BetaNumber
    length: BetaNumber
    k_star: int
    fullness: Fullness

    @property
    def n(self) -> int:
        return len(self.word)

    def enclosures(self, bits: int = 64) -> dict[str, Enclosure]:
        return {"left": self.left.enclosure(bits), "right": self.right.enclosure(bits),
                "length": self.length.enclosure(bits)}

    def row(self, bits: int = 64) -> dict:
        enc = self.enclosures(bits)
        return {"word": format_word(self.word),
                "left_lo": enc["left"].lo, "left_hi": enc["left"].hi,
                "len_lo": enc["length"].lo, "len_hi": enc["length"].hi,
                "k_star": self.k_star, "full": self.fullness.value}


def fullness_of(beta: Beta, length: BetaNumber, n: int) -> Fullness:
    verdict = decide_equal(length, beta.power(-n))
    if verdict is None:
        return Fullness.UNKNOWN
    return Fullness.FULL if verdict else Fullness.NOT_FULL


def cylinder(beta: Beta, w: Sequence[int]) -> CylinderInfo:
    """Exact geometry of I(w) = (left, left + length]."""
    w = check_alphabet(beta, w)
    k = k_star(beta, w)
    n = len(w)
    left = word_value(beta, w)
    length = length_from_kstar(beta, n, k)
    return CylinderInfo(w, left, left + length, length, k, fullness_of(beta, length, n))


@dataclass
class PartitionEntry:
    word: Word
    left: BetaNumber
    length: BetaNumber


def partition_oracle(beta: Beta, n: int, cap: int = DEFAULT_ENUM_CAP) -> list[PartitionEntry]:
    """Cylinder lengths as gaps between consecutive left endpoints.

    Words are sorted by the value of their left endpoint, not by lex order,
    and nothing here uses k* or the length formula.
    """
    words = enumerate_words(beta, n, cap).words
    lefts = {w: word_value(beta, w) for w in words}
    order = sorted(words, key=functools.cmp_to_key(lambda a, b: int(certified_compare(lefts[a], lefts[b]))))
    out = []
    for i, w in enumerate(order):
        nxt = lefts[order[i + 1]] if i + 1 < len(order) else beta.one
        out.append(PartitionEntry(w, lefts[w], nxt - lefts[w]))
    return out


# --------------------------------------------------------------------------
# full-interval laws


@dataclass
class FullnessReport:
    beta: str
    n_max: int
    m_max: int
    checked: dict[str, int] = field(default_factory=dict)
    violations: list[dict] = field(default_factory=list)
    beyond_depth: int = 0
    undecided: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {"beta": self.beta, "n_max": self.n_max, "m_max": self.m_max, "checked": self.checked,
                "violations": self.violations, "beyond_depth": self.beyond_depth,
                "undecided": self.undecided, "ok": self.ok}


def _mismatch_depth(beta: Beta, m: int, limit: int) -> int | None:
    """First j with e*_{m+j} != e*_j, searched up to ``limit``."""
    ones = expansion_of_one(beta, m + limit)
    for j in range(limit):
        if ones[m + j] != ones[j]:
            return j + 1
    return None


def fullness_laws_check(beta: Beta, n_max: int = 6, m_max: int = 4) -> FullnessReport:
    """Exhaustive small-scale check of the four full-interval laws.

    law 1: full(w) iff w can be followed by every admissible word.  The
        full side is checked for all continuations up to length m_max; for
        a non-full word the shortest blocked continuation has a computable
        length j, and a witness is required whenever j <= m_max.
    law 2: lowering the last digit of an admissible word gives a full cylinder.
    law 3: |I(w w')| = |I(w)| |I(w')| for full w.
    law 4: I(w, 0^(Gamma_n + 1)) and I(e*|n, 0^(t_n + 1)) are full.
    """
    from .expansion import zero_runs

    report = FullnessReport(beta.spec, n_max, m_max)
    counts = {"law1": 0, "law2": 0, "law3": 0, "law4": 0}
    m = _matcher(beta, n_max + m_max + 8)
    tails = {j: enumerate_words(beta, j).words for j in range(1, m_max + 1)}
    tail_len = {w: cylinder(beta, w).length for ws in tails.values() for w in ws}
    ts = zero_runs(beta, n_max)
    gammas = [max(ts[:i]) for i in range(1, n_max + 1)]

    def violation(law: str, word, detail: str) -> None:
        report.violations.append({"law": law, "word": format_word(word), "detail": detail})

    def check_full(law: str, word) -> None:
        verdict = fullness_of(beta, cylinder(beta, word).length, len(word))
        counts[law] += 1
        if verdict is Fullness.UNKNOWN:
            report.undecided += 1
        elif verdict is not Fullness.FULL:
            violation(law, word, "cylinder is not full")

    for n in range(1, n_max + 1):
        for w in enumerate_words(beta, n).words:
            info = cylinder(beta, w)
            state = m.run(w)
            # law 1
            counts["law1"] += 1
            blocked = None
            for j in range(1, m_max + 1):
                for tail in tails[j]:
                    if m.run(tail, state) is None:
                        blocked = tail
                        break
                if blocked:
                    break
            if info.fullness is Fullness.FULL and blocked is not None:
                violation("law1", w, f"full but followed by inadmissible {format_word(blocked)}")
            elif info.fullness is Fullness.NOT_FULL and blocked is None:
                depth = _mismatch_depth(beta, n - info.k_star, m_max + 64)
                if depth is not None and depth <= m_max:
                    violation("law1", w, "not full but every continuation is admissible")
                else:
                    report.beyond_depth += 1
            elif info.fullness is Fullness.UNKNOWN:
                report.undecided += 1
            # law 2
            for d in range(w[-1]):
                check_full("law2", w[:-1] + (d,))
            # law 3
            if info.fullness is Fullness.FULL:
                for j in range(1, m_max + 1):
                    for tail in tails[j]:
                        counts["law3"] += 1
                        joined = cylinder(beta, w + tail).length
                        same = decide_equal(joined, info.length * tail_len[tail])
                        if same is None:
                            report.undecided += 1
                        elif not same:
                            violation("law3", w + tail, "length is not multiplicative")
            # law 4
            check_full("law4", w + (0,) * (gammas[n - 1] + 1))
        ones = expansion_of_one(beta, n)
        check_full("law4", ones + (0,) * (ts[n - 1] + 1))
    report.checked = counts
    return report
