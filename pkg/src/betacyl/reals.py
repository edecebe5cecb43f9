"""Certified real arithmetic over a base beta > 1.

A base comes in one of three kinds:

* ``rational``: a ``dec:`` literal, handled with exact Fractions;
* ``algebraic``: a root of an integer polynomial, with arithmetic in
  Q(beta) reduced modulo the minimal polynomial, so structural equality
  is numeric equality;
* ``series``: defined by a digit sequence d with 1 = sum d_i beta^-i.
  Only enclosures are available, and decisions are made by refinement.

Every real quantity is a :class:`BetaNumber`, a Laurent polynomial in beta
with rational coefficients.  Enclosures of beta itself are canonical dyadic
cells ``[k/2^p, (k+1)/2^p]``, which makes refinements nested and
reproducible bit for bit.
"""

from __future__ import annotations

import enum
import math
import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, Union

from .errors import BudgetExceeded, InvalidBetaSpec, PrecisionExhausted

try:
    from gmpy2 import mpz
except ImportError:  # pragma: no cover
    mpz = int

DEFAULT_BUDGET = 4096

Rational = Union[int, Fraction]

_DECIMAL_RE = re.compile(r"^(\d+(\.\d*)?|\.\d+)$")


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def parse_rational(text: str) -> Fraction:
    """Parse ``p/q``, an integer or a decimal literal into an exact Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidBetaSpec(f"not a rational number: {text!r}") from exc


def bits_for(eps: Rational) -> int:
    """Smallest p >= 0 with 2**-p <= eps."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if eps >= 1:
        return 0
    p = max(0, eps.denominator.bit_length() - eps.numerator.bit_length() - 1)
    while Fraction(1, 1 << p) > eps:
        p += 1
    return p


def _floor_div(a: int, b: int) -> int:
    return a // b


def _ceil_shift(a: int, q: int) -> int:
    """ceil(a / 2**q) without a general long division."""
    return -((-a) >> q)


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _round_out(lo: Fraction, hi: Fraction, grid: int) -> tuple[Fraction, Fraction]:
    """Round an interval outward onto the dyadic grid 2**-grid."""
    scale = 1 << grid
    if lo.denominator != 1 and lo.denominator.bit_length() > grid + 1:
        lo = Fraction(_floor_div(lo.numerator * scale, lo.denominator), scale)
    if hi.denominator != 1 and hi.denominator.bit_length() > grid + 1:
        hi = Fraction(_ceil_div(hi.numerator * scale, hi.denominator), scale)
    return lo, hi


@dataclass(frozen=True)
class Enclosure:
    """A rational interval ``[lo, hi]`` certified to contain a real value."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, value: Rational) -> "Enclosure":
        return cls(Fraction(value), Fraction(value))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def contains(self, value: Rational) -> bool:
        return self.lo <= value <= self.hi

    def intersects(self, other: "Enclosure") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def subset_of(self, other: "Enclosure") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def __add__(self, other):
        other = _as_enclosure(other)
        return Enclosure(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return Enclosure(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-_as_enclosure(other))

    def __rsub__(self, other):
        return _as_enclosure(other) - self

    def __mul__(self, other):
        other = _as_enclosure(other)
        products = [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi]
        return Enclosure(min(products), max(products))

    __rmul__ = __mul__

    def __str__(self):
        return f"[{float(self.lo):.17g}, {float(self.hi):.17g}]"


def _as_enclosure(value) -> Enclosure:
    if isinstance(value, Enclosure):
        return value
    if isinstance(value, (int, Fraction)):
        return Enclosure.exact(value)
    raise TypeError(f"cannot use {type(value).__name__} as an enclosure")


# --------------------------------------------------------------------------
# polynomial helpers (coefficient lists in ascending order)


def _poly_eval_sign(int_coeffs: Sequence[int], c: Fraction) -> int:
    """Sign of an integer polynomial at a rational point, exactly."""
    num, den = c.numerator, c.denominator
    d = len(int_coeffs) - 1
    acc = 0
    for i in range(d, -1, -1):
        acc = acc * num + int_coeffs[i] * den ** (d - i)
    return (acc > 0) - (acc < 0)


def _horner_scaled(coeffs: Sequence[int], k: int, q: int) -> int:
    """Return sum C_i k^i 2^(q(D-i)), i.e. P(k/2^q) * 2^(qD)."""
    d = len(coeffs) - 1
    acc = 0
    for i in range(d, -1, -1):
        acc = acc * k + (coeffs[i] << (q * (d - i)))
    return acc


def _minimal_polynomial(coeffs: Sequence[int], lo: Fraction, hi: Fraction) -> list[int]:
    """Primitive integer minimal polynomial of the unique root in [lo, hi]."""
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed(coeffs)), x, domain="QQ")
    _, factors = poly.factor_list()
    roots_in = []
    for factor, _mult in factors:
        count = factor.count_roots(sympy.Rational(lo.numerator, lo.denominator),
                                   sympy.Rational(hi.numerator, hi.denominator))
        if count:
            roots_in.append((factor, count))
    total = sum(count for _, count in roots_in)
    if total != 1:
        raise InvalidBetaSpec(f"interval [{lo}, {hi}] contains {total} distinct roots, expected exactly 1")
    factor = roots_in[0][0]
    rat = [sympy.Rational(c) for c in reversed(factor.all_coeffs())]
    den = sympy.ilcm(*[c.q for c in rat]) if len(rat) > 1 else rat[0].q
    ints = [int(c * den) for c in rat]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    ints = [c // g for c in ints]
    if ints[-1] < 0:
        ints = [-c for c in ints]
    return ints


# --------------------------------------------------------------------------
# series-defined roots


def _pow_floor(u: int, e: int, q: int) -> int:
    """Lower bound for (u/2^q)^e, scaled by 2^q (u >= 0)."""
    result = mpz(1) << q
    base = mpz(u)
    while e:
        if e & 1:
            result = (result * base) >> q
        e >>= 1
        if e:
            base = (base * base) >> q
    return result


def _pow_ceil(u: int, e: int, q: int) -> int:
    """Upper bound for (u/2^q)^e, scaled by 2^q (u >= 0)."""
    result = mpz(1) << q
    base = mpz(u)
    while e:
        if e & 1:
            result = _ceil_shift(result * base, q)
        e >>= 1
        if e:
            base = _ceil_shift(base * base, q)
    return result


class _SeriesRoot:
    """Certified location of the root of 1 = sum d_i x^-i.

    Sums are taken over the nonzero digits only, jumping over zero runs by
    binary powering, so sparse sequences cost little at any precision.
    """

    def __init__(self, prefix: Callable[[int], Sequence[int]], max_digit: int):
        self.prefix = prefix
        self.max_digit = max_digit

    def _terms(self, n: int) -> list[tuple[int, int]]:
        return [(i, d) for i, d in enumerate(self.prefix(n), start=1) if d]

    def _bounds(self, c: Fraction, q: int) -> int | None:
        """+1 if c < root, -1 if c > root, None if undecided at precision q."""
        if c <= 1:
            return 1
        num, den = c.numerator, c.denominator
        one = mpz(1) << q
        u_lo = mpz((den << q) // num)
        u_hi = mpz(_ceil_div(den << q, num))
        log2c = math.log2(num) - math.log2(den)
        n_terms = int((q + 8) / log2c) + 2
        acc_lo = acc_hi = mpz(0)
        p_lo = p_hi = one
        prev = 0
        for i, d in self._terms(n_terms):
            p_lo = (p_lo * _pow_floor(u_lo, i - prev, q)) >> q
            p_hi = _ceil_shift(p_hi * _pow_ceil(u_hi, i - prev, q), q)
            acc_lo += d * p_lo
            acc_hi += d * p_hi
            prev = i
        if acc_lo > one:
            return 1
        power = _ceil_shift(p_hi * _pow_ceil(u_hi, n_terms + 1 - prev, q), q)
        tail = _ceil_div(self.max_digit * power * num, num - den)
        if acc_hi + tail < one:
            return -1
        return None

    def below(self, c: Fraction, budget: int, start: int = 64) -> bool:
        q = max(start, c.denominator.bit_length() + 32)
        while True:
            verdict = self._bounds(c, q)
            if verdict is not None:
                return verdict > 0
            if q >= 2 * budget + 64:
                raise PrecisionExhausted(f"cannot separate {float(c)} from the series root")
            q = min(2 * q, 2 * budget + 64)

    def approx_inverse(self, q: int) -> int:
        """Newton approximation of u = 1/root, scaled by 2**q."""
        digits = self.prefix(64)
        lo, hi = 1.0 / (self.max_digit + 1), 1.0
        for _ in range(80):
            mid = (lo + hi) / 2
            val = sum(d * mid ** (i + 1) for i, d in enumerate(digits))
            lo, hi = (lo, mid) if val > 1 else (mid, hi)
        prec = 48
        u = mpz(int(lo * (1 << prec)))
        log2u = -math.log2(lo)
        while True:
            delta = self._newton_step(u, prec, log2u)
            u -= delta
            if prec >= q and abs(delta) <= 4:
                return int(u >> (prec - q))
            if prec < q:
                new_prec = min(2 * prec, q + 32)
                u <<= new_prec - prec
                prec = new_prec

    def _newton_step(self, u, prec: int, log2u: float):
        n_terms = int((prec + 16) / log2u) + 2
        one = mpz(1) << prec
        p, dpu = -one, mpz(0)
        pw, prev = one, 0
        for i, d in self._terms(n_terms):
            pw = (pw * _pow_floor(u, i - prev, prec)) >> prec
            p += d * pw
            dpu += i * d * pw
            prev = i
        dp = (dpu << prec) // u
        return (p << prec) // dp if dp else 0


# --------------------------------------------------------------------------
# the base


class Beta:
    """A certified base beta > 1.

    Construct through :func:`make_beta`, :func:`rational_beta`,
    :func:`algebraic_beta` or :func:`series_beta`.  Values are immutable;
    the caches only ever grow and are filled under a lock.
    """

    def __init__(self, spec: str, kind: str, *, budget: int = DEFAULT_BUDGET):
        self.spec = spec
        self.kind = kind
        self.budget = budget
        self.rational: Fraction | None = None
        self.minpoly: list[int] | None = None  # primitive integer, ascending
        self.isolating: tuple[Fraction, Fraction] | None = None
        self._modulus: list[Fraction] | None = None  # monic, ascending
        self._series: _SeriesRoot | None = None
        self.one_source = None  # digit provider when built from an expansion of 1
        self._floor: tuple[int, int] | None = None  # (level p, floor(beta * 2^p))
        self._inv_powers: list[BetaNumber] = []
        self._lock = threading.RLock()
        self.cache: dict = {}
        self.alphabet_size = 0

    # -- identity ---------------------------------------------------------

    def __repr__(self):
        return f"Beta({self.spec!r}, kind={self.kind}, ~{self.approx():.12g})"

    @property
    def exact(self) -> bool:
        return self.kind != "series"

    def approx(self) -> float:
        if self.rational is not None:
            return float(self.rational)
        p = max(self._floor[0] if self._floor else 0, 60)
        return float(Fraction(self.floor_scaled(min(p, self.budget)), 1 << min(p, self.budget)))

    # -- canonical enclosures --------------------------------------------

    def _below(self, c: Fraction) -> bool:
        """Certified test c < beta (beta is irrational or series-defined)."""
        if self._series is not None:
            return self._series.below(c, self.budget)
        lo, hi = self.isolating
        if c < lo:
            return True
        if c >= hi:
            return False
        s = _poly_eval_sign(self.minpoly, c)
        if s == 0:
            raise AssertionError("rational point on an irreducible minimal polynomial")
        return s == self._sign_lo

    def floor_scaled(self, p: int) -> int:
        """floor(beta * 2**p), certified."""
        if self.rational is not None:
            return math.floor(self.rational * (1 << p))
        if p > self.budget:
            raise BudgetExceeded(f"beta refinement to 2^-{p} exceeds budget of {self.budget} bits")
        with self._lock:
            if self._floor is not None and p <= self._floor[0]:
                level, k = self._floor
                return k >> (level - p)
            if self._series is not None:
                k = self._series_floor(p)
            else:
                if self._floor is None:
                    k = math.floor(self.isolating[0])
                    while self._below(Fraction(k + 1)):
                        k += 1
                    self._floor = (0, k)
                level, k = self._floor
                for lev in range(level + 1, p + 1):
                    cand = 2 * k + 1
                    k = cand if self._below(Fraction(cand, 1 << lev)) else 2 * k
            self._floor = (p, k)
            return k

    def _series_floor(self, p: int) -> int:
        u = self._series.approx_inverse(p + 32)
        k = (1 << (2 * p + 32)) // max(u, 1)
        for _ in range(64):
            if not self._below(Fraction(k, 1 << p)):
                k -= 1
            elif self._below(Fraction(k + 1, 1 << p)):
                k += 1
            else:
                return k
        raise PrecisionExhausted("series root approximation failed to converge")

    def enclosure_bits(self, p: int) -> Enclosure:
        if self.rational is not None:
            return Enclosure.exact(self.rational)
        k = self.floor_scaled(p)
        return Enclosure(Fraction(k, 1 << p), Fraction(k + 1, 1 << p))

    # -- ring structure ---------------------------------------------------

    def number(self, coeffs: Sequence[Rational] = (), low: int = 0) -> "BetaNumber":
        return BetaNumber(self, coeffs, low)

    def const(self, value: Rational) -> "BetaNumber":
        return BetaNumber(self, (Fraction(value),), 0)

    @property
    def zero(self) -> "BetaNumber":
        return BetaNumber(self, (), 0)

    @property
    def one(self) -> "BetaNumber":
        return self.const(1)

    @property
    def gen(self) -> "BetaNumber":
        return BetaNumber(self, (1,), 1)

    def power(self, e: int) -> "BetaNumber":
        """beta**e for any integer e."""
        return BetaNumber(self, (1,), e)

    def _normalize(self, coeffs: list[Fraction], low: int) -> tuple[tuple[Fraction, ...], int]:
        if self._modulus is None:
            start = 0
            while start < len(coeffs) and coeffs[start] == 0:
                start += 1
            end = len(coeffs)
            while end > start and coeffs[end - 1] == 0:
                end -= 1
            if start == end:
                return (), 0
            return tuple(coeffs[start:end]), low + start
        if low > 0:
            coeffs = [Fraction(0)] * low + list(coeffs)
            low = 0
        reduced = self._reduce(coeffs)
        if low < 0:
            result = BetaNumber._raw(self, reduced, 0)
            result = result * self._inverse_power(-low)
            return result.coeffs, 0
        return reduced, 0

    def _reduce(self, coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
        mod = self._modulus
        d = len(mod) - 1
        work = list(coeffs)
        for i in range(len(work) - 1, d - 1, -1):
            c = work[i]
            if c:
                for j in range(d):
                    work[i - d + j] -= c * mod[j]
            work[i] = Fraction(0)
        work = work[:d]
        while work and work[-1] == 0:
            work.pop()
        return tuple(Fraction(c) for c in work)

    def _inverse_power(self, e: int) -> "BetaNumber":
        with self._lock:
            if not self._inv_powers:
                mod = self._modulus
                c0 = mod[0]
                inv = [-c / c0 for c in mod[1:]]
                self._inv_powers.append(self.one)
                self._inv_powers.append(BetaNumber._raw(self, self._reduce(inv), 0))
            while len(self._inv_powers) <= min(e, 64):
                self._inv_powers.append(self._inv_powers[-1] * self._inv_powers[1])
        if e < len(self._inv_powers):
            return self._inv_powers[e]
        half = self._inverse_power(e // 2)
        result = half * half
        return result * self._inv_powers[1] if e % 2 else result

    def describe(self) -> dict:
        out = {"spec": self.spec, "kind": self.kind, "alphabet_size": self.alphabet_size,
               "approx": self.approx()}
        if self.minpoly is not None:
            out["minimal_polynomial"] = list(self.minpoly)
        return out


class BetaNumber:
    """An exact element of Q[beta, 1/beta]: ``beta**low * sum c_i beta**i``.

    For rational and algebraic bases elements are reduced modulo the
    minimal polynomial, so ``is_zero`` decides numeric equality.  For series
    bases structural zero implies numeric zero, but not conversely.
    """

    __slots__ = ("beta", "coeffs", "low")

    def __init__(self, beta: Beta, coeffs: Sequence[Rational] = (), low: int = 0):
        self.beta = beta
        self.coeffs, self.low = beta._normalize([Fraction(c) for c in coeffs], low)

    @classmethod
    def _raw(cls, beta: Beta, coeffs: tuple, low: int) -> "BetaNumber":
        obj = cls.__new__(cls)
        obj.beta, obj.coeffs, obj.low = beta, coeffs, low
        return obj

    # -- structure --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def rational_value(self) -> Fraction | None:
        """The value when this element is a rational constant, else None."""
        if not self.coeffs:
            return Fraction(0)
        if len(self.coeffs) == 1 and self.low == 0:
            return self.coeffs[0]
        return None

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.beta.const(other)
        if not isinstance(other, BetaNumber):
            return NotImplemented
        return self.beta is other.beta and self.coeffs == other.coeffs and self.low == other.low

    def __hash__(self):
        return hash((id(self.beta), self.coeffs, self.low))

    def __repr__(self):
        terms = " + ".join(f"{c}*b^{i + self.low}" for i, c in enumerate(self.coeffs) if c)
        return f"BetaNumber({terms or '0'})"

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> "BetaNumber":
        if isinstance(other, BetaNumber):
            if other.beta is not self.beta:
                raise ValueError("cannot combine numbers over different bases")
            return other
        if isinstance(other, (int, Fraction)):
            return self.beta.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.coeffs:
            return self
        if not self.coeffs:
            return other
        low = min(self.low, other.low)
        high = max(self.low + len(self.coeffs), other.low + len(other.coeffs))
        acc = [Fraction(0)] * (high - low)
        for i, c in enumerate(self.coeffs):
            acc[i + self.low - low] += c
        for i, c in enumerate(other.coeffs):
            acc[i + other.low - low] += c
        return BetaNumber(self.beta, acc, low)

    __radd__ = __add__

    def __neg__(self):
        return BetaNumber._raw(self.beta, tuple(-c for c in self.coeffs), self.low)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return self.beta.zero
            return BetaNumber._raw(self.beta, tuple(c * other for c in self.coeffs), self.low)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.coeffs or not other.coeffs:
            return self.beta.zero
        acc = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    acc[i + j] += a * b
        return BetaNumber(self.beta, acc, self.low + other.low)

    __rmul__ = __mul__

    def shift(self, e: int) -> "BetaNumber":
        """Multiply by beta**e."""
        if self.beta._modulus is None:
            return BetaNumber._raw(self.beta, self.coeffs, self.low + e) if self.coeffs else self
        return self * self.beta.power(e)

    # -- evaluation -------------------------------------------------------

    def _eval(self, q: int) -> tuple[Fraction, Fraction]:
        """Enclosure computed from the level-q dyadic cell of beta."""
        value = self.rational_value()
        if value is not None:
            return value, value
        beta = self.beta
        if beta.rational is not None:
            b = beta.rational
            exact = sum((c * b ** (i + self.low) for i, c in enumerate(self.coeffs)), Fraction(0))
            return exact, exact
        k = beta.floor_scaled(q)
        den = 1
        for c in self.coeffs:
            den = den * c.denominator // math.gcd(den, c.denominator)
        ints = [int(c * den) for c in self.coeffs]
        pos = [c if c > 0 else 0 for c in ints]
        neg = [-c if c < 0 else 0 for c in ints]
        d = len(ints) - 1
        scale = den << (q * d)
        p_lo = Fraction(_horner_scaled(pos, k, q) - _horner_scaled(neg, k + 1, q), scale)
        p_hi = Fraction(_horner_scaled(pos, k + 1, q) - _horner_scaled(neg, k, q), scale)
        e = self.low
        if e == 0:
            return p_lo, p_hi
        if e > 0:
            f_lo = Fraction(k ** e, 1 << (q * e))
            f_hi = Fraction((k + 1) ** e, 1 << (q * e))
        else:
            f_lo = Fraction(1 << (q * -e), (k + 1) ** -e)
            f_hi = Fraction(1 << (q * -e), k ** -e)
        if p_lo >= 0:
            return p_lo * f_lo, p_hi * f_hi
        if p_hi <= 0:
            return p_lo * f_hi, p_hi * f_lo
        return p_lo * f_hi, p_hi * f_hi

    def _levels(self, start: int):
        budget = self.beta.budget
        q = start
        while q < budget:
            yield q
            q *= 2
        yield budget

    def enclosure(self, bits: int = 64) -> Enclosure:
        """Enclosure of width at most 2**-bits."""
        value = self.rational_value()
        if value is not None or self.beta.rational is not None:
            lo, hi = self._eval(0)
            return Enclosure(lo, hi)
        target = Fraction(1, 1 << bits)
        span = len(self.coeffs) + abs(self.low)
        for q in self._levels(bits + 16 + 2 * span):
            lo, hi = self._eval(q)
            if hi - lo <= target / 2:
                lo, hi = _round_out(lo, hi, bits + 2)
                return Enclosure(lo, hi)
        raise BudgetExceeded(f"cannot reach width 2^-{bits} within {self.beta.budget} bits of beta")

    def sign(self) -> int:
        value = self.rational_value()
        if value is not None:
            return (value > 0) - (value < 0)
        if self.beta.rational is not None:
            lo, _ = self._eval(0)
            return (lo > 0) - (lo < 0)
        try:
            for q in self._levels(32):
                lo, hi = self._eval(q)
                if lo > 0:
                    return 1
                if hi < 0:
                    return -1
        except BudgetExceeded:
            pass
        raise PrecisionExhausted("sign undecided within the refinement budget")

    def __float__(self):
        return float(self.enclosure(60).mid)


# --------------------------------------------------------------------------
# constructors


def rational_beta(value: Rational, spec: str | None = None, budget: int = DEFAULT_BUDGET) -> Beta:
    value = Fraction(value)
    if value <= 1:
        raise InvalidBetaSpec(f"beta must exceed 1, got {value}")
    beta = Beta(spec or f"dec:{value}", "rational", budget=budget)
    beta.rational = value
    beta._modulus = [-value, Fraction(1)]
    beta.alphabet_size = math.ceil(value)
    return beta


def algebraic_beta(coeffs: Sequence[int], lo: Rational, hi: Rational, spec: str | None = None,
                   budget: int = DEFAULT_BUDGET) -> Beta:
    """The unique root in ``[lo, hi]`` of sum coeffs[i] x**i."""
    coeffs = [int(c) for c in coeffs]
    lo, hi = Fraction(lo), Fraction(hi)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) < 2:
        raise InvalidBetaSpec("polynomial must have degree >= 1")
    if lo > hi:
        raise InvalidBetaSpec(f"empty isolating interval [{lo}, {hi}]")
    spec = spec or "poly:" + ",".join(map(str, coeffs)) + f"@[{lo},{hi}]"
    s_lo, s_hi = _poly_eval_sign(coeffs, lo), _poly_eval_sign(coeffs, hi)
    if s_lo * s_hi > 0:
        raise InvalidBetaSpec(f"no sign change on [{lo}, {hi}]")
    minpoly = _minimal_polynomial(coeffs, lo, hi)
    if len(minpoly) == 2:
        root = Fraction(-minpoly[0], minpoly[1])
        beta = rational_beta(root, spec, budget)
        beta.minpoly = minpoly
        return beta
    if hi <= 1:
        raise InvalidBetaSpec("beta must exceed 1")
    beta = Beta(spec, "algebraic", budget=budget)
    beta.minpoly = minpoly
    beta.isolating = (lo, hi)
    beta._sign_lo = _poly_eval_sign(minpoly, lo)
    lead = Fraction(minpoly[-1])
    beta._modulus = [Fraction(c) / lead for c in minpoly]
    if not beta._below(Fraction(1)):
        raise InvalidBetaSpec("beta must exceed 1")
    beta.alphabet_size = beta.floor_scaled(0) + 1
    return beta


def series_beta(prefix: Callable[[int], Sequence[int]], spec: str, budget: int = DEFAULT_BUDGET) -> Beta:
    """Root of 1 = sum d_i beta^-i for a digit provider ``prefix(n) -> d_1..d_n``.

    The caller is responsible for checking that d is a valid expansion of 1
    (see :func:`betacyl.expansion.beta_from_one_expansion`).
    """
    head = list(prefix(1))
    if not head or head[0] < 1:
        raise InvalidBetaSpec("first digit of an expansion of 1 must be >= 1")
    beta = Beta(spec, "series", budget=budget)
    beta._series = _SeriesRoot(prefix, head[0])
    floor = beta.floor_scaled(0)
    if floor < 1 or not beta._below(Fraction(1)):
        raise InvalidBetaSpec("beta must exceed 1")
    beta.alphabet_size = floor + 1
    return beta


_POLY_RE = re.compile(r"^poly:(?P<coeffs>[-+0-9,\s]+)@\[(?P<lo>[^,\]]+),(?P<hi>[^\]]+)\]$")


def make_beta(spec: str, budget: int = DEFAULT_BUDGET) -> Beta:
    """Build a base from the textual grammar ``dec:`` / ``poly:`` / ``dseq:``."""
    spec = spec.strip()
    if spec.startswith("dec:"):
        literal = spec[4:].strip()
        if not _DECIMAL_RE.match(literal):
            raise InvalidBetaSpec(f"malformed decimal literal {literal!r}")
        return rational_beta(Fraction(literal), spec, budget)
    if spec.startswith("poly:"):
        match = _POLY_RE.match(spec.replace(" ", ""))
        if not match:
            raise InvalidBetaSpec(f"malformed polynomial spec {spec!r}")
        try:
            coeffs = [int(c) for c in match["coeffs"].split(",")]
        except ValueError as exc:
            raise InvalidBetaSpec(f"polynomial coefficients must be integers: {spec!r}") from exc
        return algebraic_beta(coeffs, parse_rational(match["lo"]), parse_rational(match["hi"]), spec, budget)
    if spec.startswith("dseq:"):
        from .expansion import beta_from_one_expansion, load_dseq

        source = load_dseq(spec[5:].strip())
        return beta_from_one_expansion(source, spec=spec, budget=budget)
    raise InvalidBetaSpec(f"unknown beta spec {spec!r}; expected dec:, poly: or dseq:")


# --------------------------------------------------------------------------
# certified decisions


def _common(a, b) -> tuple[BetaNumber | Fraction, BetaNumber | Fraction]:
    if isinstance(a, Beta):
        a = a.gen
    if isinstance(b, Beta):
        b = b.gen
    if isinstance(a, int):
        a = Fraction(a)
    if isinstance(b, int):
        b = Fraction(b)
    return a, b


def refine(x, eps: Rational) -> Enclosure:
    """Enclosure of width <= eps of a Beta, BetaNumber or rational."""
    bits = bits_for(eps)
    if isinstance(x, Beta):
        return x.enclosure_bits(bits)
    if isinstance(x, (int, Fraction)):
        return Enclosure.exact(x)
    if isinstance(x, BetaNumber):
        return x.enclosure(bits)
    if isinstance(x, Enclosure):
        if x.width <= eps:
            return x
        raise BudgetExceeded("a bare enclosure cannot be refined")
    raise TypeError(f"cannot refine {type(x).__name__}")


def certified_sign(x) -> int:
    x, _ = _common(x, 0)
    if isinstance(x, Fraction):
        return (x > 0) - (x < 0)
    if isinstance(x, Enclosure):
        if x.lo > 0:
            return 1
        if x.hi < 0:
            return -1
        if x.is_exact:
            return 0
        raise PrecisionExhausted("enclosure contains zero")
    return x.sign()


def certified_compare(a, b) -> Ordering:
    a, b = _common(a, b)
    if isinstance(a, Enclosure) or isinstance(b, Enclosure):
        diff = _as_enclosure(a) - _as_enclosure(b)
        return Ordering(certified_sign(diff))
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return Ordering((a > b) - (a < b))
    if isinstance(a, Fraction):
        a = b.beta.const(a)
    diff = a - b
    if diff.is_zero():
        return Ordering.EQUAL
    return Ordering(diff.sign())


def certified_ceil(v) -> int:
    """The least integer >= v, decided without guessing at ties."""
    v, _ = _common(v, 0)
    if isinstance(v, Fraction):
        return math.ceil(v)
    if isinstance(v, Enclosure):
        c = math.ceil(v.hi)
        if v.lo > c - 1:
            return c
        raise PrecisionExhausted("enclosure straddles an integer", ambiguous=math.ceil(v.lo))
    value = v.rational_value()
    if value is not None:
        return math.ceil(value)
    tested: set[int] = set()
    ambiguous = None
    try:
        for q in v._levels(32):
            lo, hi = v._eval(q)
            c = math.ceil(hi)
            if lo > c - 1:
                return c
            ambiguous = math.ceil(lo)
            if ambiguous not in tested:
                tested.add(ambiguous)
                if (v - ambiguous).is_zero():
                    return ambiguous
    except BudgetExceeded:
        pass
    raise PrecisionExhausted(f"ceiling undecided near {ambiguous}", ambiguous=ambiguous)
