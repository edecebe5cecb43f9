"""Digits under T(x) = beta*x - ceil(beta*x) + 1 on (0, 1], and the expansion of 1.

Words are plain tuples of ints.  For exact bases the orbit is iterated in
Q(beta); for series bases it is iterated with dyadic intervals at a working
precision that is doubled until every ceiling is certified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from .errors import BudgetExceeded, DomainError, InvalidBetaSpec, NotSelfAdmissible, PrecisionExhausted
from .reals import (
    DEFAULT_BUDGET,
    Beta,
    BetaNumber,
    Enclosure,
    _ceil_div,
    _ceil_shift,
    _pow_ceil,
    _pow_floor,
    mpz,
    algebraic_beta,
    bits_for,
    certified_ceil,
    certified_sign,
    parse_rational,
    series_beta,
)

Word = tuple[int, ...]

ZERO_RUN_BUDGET = 10_000


def parse_word(text: str) -> Word:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(tok) for tok in text.replace(" ", "").split(","))
    except ValueError as exc:
        raise ValueError(f"malformed word {text!r}; expected comma-separated digits") from exc


def format_word(word: Sequence[int]) -> str:
    return ",".join(str(d) for d in word)


def check_alphabet(beta: Beta, word: Sequence[int]) -> Word:
    word = tuple(int(d) for d in word)
    for d in word:
        if not 0 <= d < beta.alphabet_size:
            raise ValueError(f"digit {d} outside alphabet 0..{beta.alphabet_size - 1}")
    return word


# --------------------------------------------------------------------------
# digit sequences defining an expansion of 1


class DigitSource:
    """An infinite digit sequence: a listed head plus a tail rule.

    ``tail`` is ``"repeat"`` (the last ``period`` listed digits repeat
    forever), ``"doubling-runs"`` (after the head, the last nonzero digit
    recurs with zero runs doubling from the head's trailing run) or
    ``"none"`` for a purely finite listing.
    """

    def __init__(self, head: Sequence[int], tail: str = "none", period: int = 0, name: str = ""):
        self.head = tuple(int(d) for d in head)
        self.tail = tail
        self.period = period
        self.name = name
        if any(d < 0 for d in self.head):
            raise InvalidBetaSpec("digits must be nonnegative")
        if tail == "repeat":
            if not 1 <= period <= len(self.head):
                raise InvalidBetaSpec(f"repeat period {period} not in 1..{len(self.head)}")
        elif tail == "doubling-runs":
            nonzero = [i for i, d in enumerate(self.head) if d]
            if not nonzero or nonzero[-1] == len(self.head) - 1:
                raise InvalidBetaSpec("doubling-runs needs a head ending in a zero run")
            self._lead = self.head[nonzero[-1]]
            self._run = len(self.head) - 1 - nonzero[-1]
        elif tail != "none":
            raise InvalidBetaSpec(f"unknown tail rule {tail!r}")
        self._digits = list(self.head)
        self._next_run = 0 if tail != "doubling-runs" else 2 * self._run

    @classmethod
    def periodic(cls, block: Sequence[int], prefix: Sequence[int] = ()) -> "DigitSource":
        block = tuple(block)
        return cls(tuple(prefix) + block, "repeat", len(block))

    @classmethod
    def doubling_runs(cls) -> "DigitSource":
        """1, 0, 1, 0^2, 1, 0^4, 1, 0^8, ..."""
        return cls((1, 0), "doubling-runs", name="doubling-runs")

    @property
    def infinite(self) -> bool:
        return self.tail != "none"

    def prefix(self, n: int) -> Word:
        if n > len(self._digits):
            if self.tail == "none":
                raise BudgetExceeded(f"finite digit sequence has only {len(self.head)} digits")
            if self.tail == "repeat":
                start = len(self.head) - self.period
                block = self.head[start:]
                while len(self._digits) < n:
                    self._digits.extend(block)
            else:
                while len(self._digits) < n:
                    self._digits.append(self._lead)
                    self._digits.extend([0] * self._next_run)
                    self._next_run *= 2
        return tuple(self._digits[:n])

    def describe(self) -> str:
        if self.tail == "repeat":
            return f"{format_word(self.head)};repeat:{self.period}"
        if self.tail == "doubling-runs":
            return f"{format_word(self.head)};rule:doubling-runs"
        return format_word(self.head)


def parse_dseq(text: str, name: str = "") -> DigitSource:
    """Parse the dseq text format: comma-separated digit lines plus an optional footer."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln.replace(" ", "").replace("\t", "") for ln in lines if ln]
    tail, period = "none", 0
    if lines and ":" in lines[-1]:
        key, _, value = lines.pop().partition(":")
        if key == "repeat":
            try:
                period = int(value)
            except ValueError as exc:
                raise InvalidBetaSpec(f"bad repeat period {value!r}") from exc
            tail = "repeat"
        elif key == "rule" and value == "doubling-runs":
            tail = "doubling-runs"
        else:
            raise InvalidBetaSpec(f"unknown dseq footer {key}:{value}")
    digits: list[int] = []
    for ln in lines:
        for tok in ln.split(","):
            if tok == "":
                continue
            if not tok.isdigit():
                raise InvalidBetaSpec(f"bad digit {tok!r} in dseq")
            digits.append(int(tok))
    if not digits:
        raise InvalidBetaSpec("empty dseq")
    return DigitSource(digits, tail, period, name=name)


def load_dseq(path: str | Path) -> DigitSource:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InvalidBetaSpec(f"cannot read dseq file {path}: {exc}") from exc
    return parse_dseq(text, name=path.name)


# --------------------------------------------------------------------------
# the map and its digits


def _as_number(beta: Beta, x) -> BetaNumber:
    if isinstance(x, str):
        x = parse_rational(x)
    if isinstance(x, (int, Fraction)):
        return beta.const(x)
    if isinstance(x, BetaNumber):
        return x
    raise TypeError(f"unsupported point type {type(x).__name__}")


def _check_domain(x: BetaNumber) -> None:
    if certified_sign(x) <= 0 or certified_sign(x - 1) > 0:
        raise DomainError("x must lie in (0, 1]")


def step_T(beta: Beta, x) -> BetaNumber:
    """One application of T: beta*x - ceil(beta*x) + 1."""
    x = _as_number(beta, x)
    _check_domain(x)
    y = x.shift(1)
    return y - certified_ceil(y) + 1


def orbit(beta: Beta, x, n: int, greedy: bool = False) -> tuple[Word, list[BetaNumber]]:
    """Digits and exact orbit points T^0 x, ..., T^n x.

    With ``greedy=True`` the floor map on [0, 1) is used instead, as a cross
    check; the two agree except at points with a finite greedy expansion.
    """
    x = _as_number(beta, x)
    if greedy:
        if certified_sign(x) < 0 or certified_sign(x - 1) >= 0:
            raise DomainError("greedy expansion needs x in [0, 1)")
    else:
        _check_domain(x)
    out, points = [], [x]
    for _ in range(n):
        y = x.shift(1)
        if greedy:
            c = -certified_ceil(-y)
            out.append(c)
            x = y - c
        else:
            c = certified_ceil(y)
            out.append(c - 1)
            x = y - c + 1
        points.append(x)
    return tuple(out), points


ORBIT_KEEP_BITS = 192


class _IntervalOrbit:
    """Interval iteration of T from a rational point, for series bases.

    The orbit is extended in place at the current working precision; when
    a digit cannot be certified it restarts from scratch at double the
    precision.  Point m is stored compactly as
    [lo[m] << shift[m], hi[m] << shift[m]] / 2^prec.
    """

    def __init__(self, beta: Beta, x: Fraction):
        self.beta = beta
        self.x = x
        self.prec = 0
        self.digits: list[int] = []
        self._log2b = math.log2(beta.approx()) + 1e-9

    def _reset(self, prec: int) -> None:
        x = self.x
        self.prec = prec = min(prec, self.beta.budget)
        self._k = mpz(self.beta.floor_scaled(prec))
        self._y = (mpz((x.numerator << prec) // x.denominator),
                   mpz(_ceil_div(x.numerator << prec, x.denominator)))
        self.digits, self.lo, self.hi, self.shift = [], [], [], []
        self._keep(*self._y)

    def _keep(self, lo, hi) -> None:
        sh = max(0, lo.bit_length() - ORBIT_KEEP_BITS)
        self.lo.append(int(lo >> sh))
        self.hi.append(int(-((-hi) >> sh)))
        self.shift.append(sh)

    def _run(self, n: int) -> int | None:
        """Extend to n digits; return the ambiguous integer on failure."""
        prec, k = self.prec, self._k
        one = mpz(1) << prec
        ylo, yhi = self._y
        digits = self.digits
        try:
            while len(digits) < n:
                zlo = (k * ylo) >> prec
                zhi = _ceil_shift((k + 1) * yhi, prec)
                c = _ceil_shift(zhi, prec)
                base = (c - 1) << prec
                if zlo <= base:
                    return int(c - 1)
                digits.append(int(c - 1))
                ylo, yhi = max(zlo - base, 0), min(zhi - base, one)
                self._keep(ylo, yhi)
            return None
        finally:
            self._y = (ylo, yhi)

    def extend(self, n: int) -> None:
        if not self.prec:
            self._reset(int(n * self._log2b) + 96)
        while len(self.digits) < n:
            failed = self._run(n)
            if failed is None:
                return
            if self.prec >= self.beta.budget:
                raise PrecisionExhausted(
                    f"digit {len(self.digits) + 1} undecided at {self.prec} bits", ambiguous=failed)
            self._reset(max(2 * self.prec, int(n * self._log2b) + 96))

    def point(self, m: int) -> Enclosure:
        den = 1 << self.prec
        return Enclosure(Fraction(self.lo[m] << self.shift[m], den),
                         Fraction(self.hi[m] << self.shift[m], den))


def _interval_orbit(beta: Beta, x: Fraction, n: int) -> _IntervalOrbit:
    """Digits of rational x under T with interval iteration (series bases)."""
    orb = _IntervalOrbit(beta, x)
    orb.extend(n)
    return orb


def digits(beta: Beta, x, n: int, greedy: bool = False) -> Word:
    """The first n digits of x in (0, 1]."""
    if n < 1:
        raise ValueError("n must be positive")
    if isinstance(x, str):
        x = parse_rational(x)
    if isinstance(x, (int, Fraction)) and not 0 < x <= 1 and not greedy:
        raise DomainError("x must lie in (0, 1]")
    if beta.exact or greedy or not isinstance(x, (int, Fraction)):
        return orbit(beta, x, n, greedy)[0]
    return tuple(_interval_orbit(beta, Fraction(x), n).digits)


class DigitStream:
    """A lazily extended digit sequence with a description of its origin."""

    def __init__(self, fill: Callable[[int], Sequence[int]], origin: str, value=None):
        self._fill = fill
        self.origin = origin
        self.value = value
        self._cache: Word = ()

    def prefix(self, n: int) -> Word:
        if n > len(self._cache):
            self._cache = tuple(self._fill(max(n, 2 * len(self._cache))))
        return self._cache[:n]

    def __repr__(self):
        return f"DigitStream({self.origin})"


def point_stream(beta: Beta, x) -> DigitStream:
    x = parse_rational(x) if isinstance(x, str) else x
    return DigitStream(lambda n: digits(beta, x, n), f"point x={x}", value=x)


def one_stream(beta: Beta) -> DigitStream:
    return DigitStream(lambda n: expansion_of_one(beta, n), "expansion of 1", value=Fraction(1))


# --------------------------------------------------------------------------
# the expansion of 1, with cached orbit


def _one_cache(beta: Beta, n: int) -> dict:
    """Ensure at least n digits of the expansion of 1 are cached."""
    with beta._lock:
        cache = beta.cache.setdefault("one", {"digits": [], "orbit": None})
        have = len(cache["digits"])
        if have >= n:
            return cache
        target = max(n, 16)
        if beta.exact:
            if cache["orbit"] is None:
                cache["orbit"] = [beta.one]
            x = cache["orbit"][-1]
            for _ in range(target - have):
                y = x.shift(1)
                c = certified_ceil(y)
                cache["digits"].append(c - 1)
                x = y - c + 1
                cache["orbit"].append(x)
        else:
            if cache["orbit"] is None:
                cache["orbit"] = _IntervalOrbit(beta, Fraction(1))
            orb = cache["orbit"]
            orb.extend(target)
            cache["digits"] = orb.digits
        return cache


def expansion_of_one(beta: Beta, n: int) -> Word:
    """(e*_1, ..., e*_n): the digits of 1 itself."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return tuple(_one_cache(beta, n)["digits"][:n])


def one_orbit_point(beta: Beta, m: int) -> BetaNumber | Enclosure:
    """T^m(1): exact for exact bases, an enclosure for series bases."""
    cache = _one_cache(beta, m + 1)
    if beta.exact:
        return cache["orbit"][m]
    orb = cache["orbit"]
    return orb.point(m)


def one_orbit_enclosure(beta: Beta, m: int, rel_bits: int = 128,
                        run_budget: int = 1 << 20) -> Enclosure:
    """T^m(1) = sum_{j>=1} e*_{m+j} beta^-j to relative width about 2^-rel_bits.

    The sum runs over nonzero digits only, with a geometric tail bound, so
    long zero runs cost nothing; used when the stored orbit is too coarse.
    """
    t = zero_run_t(beta, m, run_budget) if m else 0
    log2b = math.log2(beta.approx())
    J = t + 1 + int(rel_bits / log2b) + 8
    ones = expansion_of_one(beta, m + J)
    q = rel_bits + int((t + 1) * log2b) + J.bit_length() + 32
    p = min(q + 8, beta.budget)
    k = beta.floor_scaled(p)
    u_lo = mpz((1 << (p + q)) // (k + 1))
    u_hi = mpz(_ceil_div(1 << (p + q), k))
    one = mpz(1) << q
    acc_lo = acc_hi = mpz(0)
    p_lo = p_hi = one
    prev = 0
    for j in range(1, J + 1):
        d = ones[m + j - 1]
        if d:
            p_lo = (p_lo * _pow_floor(u_lo, j - prev, q)) >> q
            p_hi = _ceil_shift(p_hi * _pow_ceil(u_hi, j - prev, q), q)
            acc_lo += d * p_lo
            acc_hi += d * p_hi
            prev = j
    power = _ceil_shift(p_hi * _pow_ceil(u_hi, J + 1 - prev, q), q)
    tail = _ceil_div((beta.alphabet_size - 1) * power * (1 << q), int(one - u_hi))
    return Enclosure(Fraction(int(acc_lo), 1 << q), Fraction(int(acc_hi + tail), 1 << q))


def zero_run_t(beta: Beta, n: int, budget: int = ZERO_RUN_BUDGET) -> int:
    """Length of the zero run right after position n in the expansion of 1."""
    if n < 1:
        raise ValueError("n must be positive")
    scanned = n
    chunk = 64
    while True:
        upto = min(n + budget + 1, scanned + chunk)
        ones = expansion_of_one(beta, upto)
        for i in range(n, upto):
            if ones[i] != 0:
                return i - n
        if upto >= n + budget + 1:
            raise BudgetExceeded(f"no nonzero digit within {budget} digits after position {n}")
        scanned = upto
        chunk *= 2


def zero_runs(beta: Beta, upto: int, budget: int = ZERO_RUN_BUDGET) -> list[int]:
    """[t_1, ..., t_upto] (index 0 holds t_1), computed in one backward pass."""
    if upto < 1:
        return []
    last = zero_run_t(beta, upto, budget)
    ones = expansion_of_one(beta, upto + last + 1)
    out = [0] * upto
    run = last
    for n in range(upto, 0, -1):
        out[n - 1] = run
        run = run + 1 if ones[n - 1] == 0 else 0
    return out


@dataclass
class ZeroRunTable:
    """t_n and Gamma_n for n <= N, with the finite-N sample of lambda."""

    records: list[tuple[int, int, int]]
    lambda_hat: Fraction
    lambda_hat_at: int
    note: str = ("lambda_hat = max_{n<=N} Gamma_n/n is a finite-N lower sample of "
                 "limsup Gamma_n/n; no upper certificate is available at finite N")
    gamma_ratio: list[Fraction] = field(default_factory=list)


def zero_run_table(beta: Beta, N: int, budget: int = ZERO_RUN_BUDGET) -> ZeroRunTable:
    if N < 1:
        raise ValueError("N must be positive")
    ts = zero_runs(beta, N, budget)
    records, ratios = [], []
    gamma = 0
    best, best_at = Fraction(-1), 0
    for n, t in enumerate(ts, start=1):
        gamma = max(gamma, t)
        records.append((n, t, gamma))
        ratio = Fraction(gamma, n)
        ratios.append(ratio)
        if ratio > best:
            best, best_at = ratio, n
    return ZeroRunTable(records, best, best_at, gamma_ratio=ratios)


# --------------------------------------------------------------------------
# word values


def word_value(beta: Beta, w: Sequence[int]) -> BetaNumber:
    """sum w_i beta^-i, exact in Q(beta)."""
    w = check_alphabet(beta, w)
    if not w:
        return beta.zero
    return BetaNumber(beta, tuple(reversed(w)), -len(w))


def word_value_enclosure(beta: Beta, w: Sequence[int], bits: int = 64) -> Enclosure:
    """Fast enclosure of sum w_i beta^-i for long words (width about 2^-bits)."""
    if not w:
        return Enclosure.exact(0)
    if beta.rational is not None or len(w) <= 48:
        return word_value(beta, w).enclosure(bits)
    q = bits + 2 * len(w).bit_length() + 16
    while True:
        p = min(q + 8, beta.budget)
        k = beta.floor_scaled(p)
        one = 1 << q
        u_lo = (1 << (p + q)) // (k + 1)
        u_hi = _ceil_div(1 << (p + q), k)
        lo = hi = 0
        for d in reversed(w):
            lo = ((lo + d * one) * u_lo) >> q
            hi = _ceil_shift((hi + d * one) * u_hi, q)
        enc = Enclosure(Fraction(lo, one), Fraction(hi, one))
        if enc.width <= Fraction(1, 1 << bits) or p >= beta.budget:
            return enc
        q *= 2


# --------------------------------------------------------------------------
# the inverse problem


def _lex_cmp(a: Sequence[int], b: Sequence[int]) -> int:
    for x, y in zip(a, b):
        if x != y:
            return -1 if x < y else 1
    return 0


def check_self_admissible(source: DigitSource, depth: int = 256) -> None:
    """Raise NotSelfAdmissible if some shift sigma^k d exceeds d (1 <= k <= depth)."""
    if source.tail == "repeat":
        pre = len(source.head) - source.period
        depth = min(depth, pre + source.period)
        window = pre + 2 * source.period + depth
    else:
        window = 2 * depth + 64
    d = source.prefix(depth + window)
    for k in range(1, depth + 1):
        if _lex_cmp(d[k:k + window], d[:window]) > 0:
            raise NotSelfAdmissible(f"shift by {k} exceeds the sequence lexicographically", shift=k)


def _periodic_polynomial(source: DigitSource) -> list[int]:
    """Integer polynomial (ascending) whose root > 1 satisfies 1 = sum d_i x^-i."""
    a = len(source.head) - source.period
    p = source.period
    A, B = source.head[:a], source.head[a:]
    poly = [0] * (a + p + 1)
    poly[a + p] += 1
    poly[a] -= 1
    for i, ai in enumerate(A, start=1):  # -(x^p - 1) * ai x^(a-i)
        poly[a - i + p] -= ai
        poly[a - i] += ai
    for j, bj in enumerate(B, start=1):
        poly[p - j] -= bj
    return poly


def beta_from_one_expansion(source: DigitSource, eps: Fraction = Fraction(1, 1 << 16), *,
                            spec: str | None = None, budget: int = DEFAULT_BUDGET,
                            check_depth: int = 256, round_trip_depth: int = 32) -> Beta:
    """The base whose expansion of 1 is ``source``.

    Eventually periodic sequences yield an algebraic base (exact arithmetic);
    other infinite sequences yield a series base bracketed by tail bounds.
    """
    if not source.infinite:
        raise InvalidBetaSpec("an expansion of 1 is infinite; add a repeat: or rule: footer")
    head = source.prefix(1)
    if head[0] < 1:
        raise InvalidBetaSpec("the first digit of an expansion of 1 must be >= 1")
    if source.tail == "repeat" and not any(source.head[-source.period:]):
        raise InvalidBetaSpec("sequence is eventually zero")
    check_self_admissible(source, check_depth)
    spec = spec or f"dseq:{source.name or source.describe()}"
    if source.tail == "repeat":
        poly = _periodic_polynomial(source)
        lo = max(1, head[0])
        beta = algebraic_beta(poly, lo, head[0] + 1, spec=spec, budget=budget)
        beta.kind = "algebraic" if beta.rational is None else "rational"
    else:
        beta = series_beta(source.prefix, spec, budget=budget)
    beta.one_source = source
    beta.enclosure_bits(min(budget, bits_for(eps)))
    n = min(round_trip_depth, 32)
    if expansion_of_one(beta, n) != source.prefix(n):
        raise NotSelfAdmissible("sequence is not the expansion of 1 of its own root")
    return beta
