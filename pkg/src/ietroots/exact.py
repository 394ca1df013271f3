"""Exact real numbers as rational vectors over a declared ℚ-basis.

A value is a rational combination ``c0*1 + c1*e1 + ...`` of basis elements
that are assumed linearly independent over ℚ.  Under that assumption a value
is zero exactly when every coefficient is zero, and any other sign can be
certified by refining interval enclosures of the basis elements.

Only additive operations and rational scaling are provided; products of two
irrational values are never needed by the algorithms in this package.
"""

from __future__ import annotations

import contextlib
import contextvars
import decimal
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

from .errors import (
    BasisMismatch,
    DuplicateRadicand,
    MissingUnit,
    NonPositiveRadicand,
    NonSquarefreeRadicand,
    PerfectSquareRadicand,
    PrecisionExhausted,
)

Rational = Union[int, Fraction]

DEFAULT_PRECISION_BITS = 4096
_START_BITS = 64

_precision_budget = contextvars.ContextVar("precision_budget", default=DEFAULT_PRECISION_BITS)
_bits_tracker = contextvars.ContextVar("bits_tracker", default=None)


@contextlib.contextmanager
def precision_budget(bits: int):
    """Temporarily change the default refinement cap used by :func:`real_sign`."""
    if bits < _START_BITS:
        raise ValueError(f"precision budget must be at least {_START_BITS} bits")
    token = _precision_budget.set(int(bits))
    try:
        yield
    finally:
        _precision_budget.reset(token)


class BitsTracker:
    """Records the largest precision any sign determination needed."""

    def __init__(self):
        self.max_bits = 0

    def record(self, bits):
        if bits > self.max_bits:
            self.max_bits = bits


@contextlib.contextmanager
def track_precision():
    tracker = BitsTracker()
    token = _bits_tracker.set(tracker)
    try:
        yield tracker
    finally:
        _bits_tracker.reset(token)


# ---------------------------------------------------------------------------
# basis elements

@dataclass(frozen=True)
class Unit:
    """The real number 1."""

    kind = "unit"

    def label(self):
        return "1"


@dataclass(frozen=True)
class Sqrt:
    """sqrt(radicand) for a squarefree integer radicand > 1."""

    radicand: int
    kind = "sqrt"

    def label(self):
        return f"√{self.radicand}"


@dataclass(frozen=True)
class DecimalApprox:
    """A real known only through ``|x - approx| <= err``; independence is trusted."""

    approx: Fraction
    err: Fraction
    kind = "decimal"

    def __post_init__(self):
        object.__setattr__(self, "approx", Fraction(self.approx))
        object.__setattr__(self, "err", Fraction(self.err))
        if self.err < 0:
            raise ValueError("decimal error bound must be non-negative")

    def label(self):
        return f"≈{float(self.approx):.6g}"


BasisElement = Union[Unit, Sqrt, DecimalApprox]


def squarefree_part(n: int) -> tuple[int, int]:
    """Write ``n = k**2 * s`` with ``s`` squarefree; return ``(k, s)``."""
    if n <= 0:
        raise ValueError("n must be positive")
    k, s = 1, 1
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        k *= p ** (e // 2)
        if e % 2:
            s *= p
        p += 1 if p == 2 else 2
    return k, s * n


def _coerce_element(desc) -> BasisElement:
    if isinstance(desc, (Unit, Sqrt, DecimalApprox)):
        return desc
    if isinstance(desc, str):
        desc = (desc,)
    if isinstance(desc, dict):
        kind = desc.get("kind")
        if kind == "unit":
            return Unit()
        if kind == "sqrt":
            return _make_sqrt(desc["radicand"])
        if kind == "decimal":
            return DecimalApprox(Fraction(desc["approx"]), Fraction(desc["err"]))
        raise ValueError(f"unknown basis element kind {kind!r}")
    kind, *args = desc
    if kind in ("unit", "1", 1):
        return Unit()
    if kind == "sqrt":
        return _make_sqrt(*args)
    if kind == "decimal":
        return DecimalApprox(Fraction(args[0]), Fraction(args[1]))
    raise ValueError(f"unknown basis element descriptor {desc!r}")


def _make_sqrt(radicand) -> Sqrt:
    r = Fraction(radicand)
    if r <= 0:
        raise NonPositiveRadicand(f"radicand {r} is not positive")
    # sqrt(p/q) = sqrt(p*q)/q, so the squarefree kernel of p*q decides everything
    k, s = squarefree_part(r.numerator * r.denominator)
    if s == 1:
        raise PerfectSquareRadicand(f"sqrt({r}) is rational")
    if r != s:
        scale = Fraction(k, r.denominator)
        raise NonSquarefreeRadicand(
            f"sqrt({r}) = {scale}*sqrt({s}); declare SQRT({s}) and scale the coefficient")
    return Sqrt(s)


@dataclass(frozen=True)
class BasisSpec:
    """An ordered ℚ-basis; element 0 is always the unit."""

    elements: tuple

    def __post_init__(self):
        elems = tuple(self.elements)
        object.__setattr__(self, "elements", elems)
        if not elems or not isinstance(elems[0], Unit):
            raise MissingUnit("the first basis element must be UNIT")
        seen = set()
        for e in elems[1:]:
            if isinstance(e, Unit):
                raise DuplicateRadicand("UNIT may only appear at index 0")
            if isinstance(e, Sqrt):
                if e.radicand in seen:
                    raise DuplicateRadicand(f"radicand {e.radicand} declared twice")
                seen.add(e.radicand)

    def __len__(self):
        return len(self.elements)

    @property
    def dimension(self):
        return len(self.elements)

    def zero(self) -> "ExactReal":
        return ExactReal(self, (0,) * len(self))

    def one(self) -> "ExactReal":
        return self.rational(1)

    def rational(self, q: Rational) -> "ExactReal":
        return ExactReal(self, (q,) + (0,) * (len(self) - 1))

    def real(self, *coeffs) -> "ExactReal":
        return ExactReal(self, coeffs)

    def element(self, i: int) -> "ExactReal":
        c = [0] * len(self)
        c[i] = 1
        return ExactReal(self, c)

    def sqrt(self, radicand: int) -> "ExactReal":
        """The basis vector for sqrt(radicand)."""
        for i, e in enumerate(self.elements):
            if isinstance(e, Sqrt) and e.radicand == radicand:
                return self.element(i)
        raise KeyError(f"sqrt({radicand}) is not in the basis")


def basis_create(descriptors: Iterable) -> BasisSpec:
    """Build a normalized basis from element objects, tuples or JSON-style dicts.

    >>> basis_create(["unit", ("sqrt", 2)]).dimension
    2
    """
    elems = tuple(_coerce_element(d) for d in descriptors)
    if not elems:
        raise MissingUnit("a basis needs at least the UNIT element")
    return BasisSpec(elems)


def sqrt_basis(*radicands: int) -> BasisSpec:
    return basis_create([Unit()] + [("sqrt", r) for r in radicands])


# ---------------------------------------------------------------------------
# enclosures and sign determination

@lru_cache(maxsize=4096)
def _element_enclosure(elem: BasisElement, bits: int) -> tuple[int, int]:
    """Integers ``lo <= elem * 2**bits <= hi``."""
    if isinstance(elem, Unit):
        v = 1 << bits
        return v, v
    if isinstance(elem, Sqrt):
        s = math.isqrt(elem.radicand << (2 * bits))
        return s, s + 1
    scale = 1 << bits
    lo = (elem.approx - elem.err) * scale
    hi = (elem.approx + elem.err) * scale
    return math.floor(lo), math.ceil(hi)


def _scaled_coeffs(coeffs: Sequence[Fraction]) -> tuple[list[int], int]:
    den = 1
    for c in coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    return [c.numerator * (den // c.denominator) for c in coeffs], den


def _enclose(elements, ints, bits) -> tuple[int, int]:
    lo = hi = 0
    for a, e in zip(ints, elements):
        if a == 0:
            continue
        elo, ehi = _element_enclosure(e, bits)
        if a > 0:
            lo += a * elo
            hi += a * ehi
        else:
            lo += a * ehi
            hi += a * elo
    return lo, hi


@lru_cache(maxsize=1 << 16)
def _sign(elements, coeffs, budget) -> tuple[int, int]:
    if not any(coeffs[1:]):
        c = coeffs[0]
        return (c > 0) - (c < 0), 0
    ints, _ = _scaled_coeffs(coeffs)
    bits = _START_BITS
    while True:
        lo, hi = _enclose(elements, ints, bits)
        if lo > 0:
            return 1, bits
        if hi < 0:
            return -1, bits
        if bits >= budget:
            raise PrecisionExhausted(
                f"could not separate value from 0 within {budget} bits; "
                "the declared decimal error bounds are too coarse")
        bits = min(2 * bits, budget)


def real_sign(a: "ExactReal", precision_budget: int | None = None) -> int:
    """Exact sign of ``a``: -1, 0 or +1."""
    budget = precision_budget if precision_budget is not None else _precision_budget.get()
    if not any(a.coeffs):
        return 0
    s, bits = _sign(a.basis.elements, a.coeffs, budget)
    tracker = _bits_tracker.get()
    if tracker is not None:
        tracker.record(bits)
    return s


def _interval(a: "ExactReal", bits: int) -> tuple[Fraction, Fraction]:
    ints, den = _scaled_coeffs(a.coeffs)
    lo, hi = _enclose(a.basis.elements, ints, bits)
    scale = den << bits
    return Fraction(lo, scale), Fraction(hi, scale)


def real_mod(a: "ExactReal", L: "ExactReal",
             precision_budget: int | None = None) -> tuple["ExactReal", int]:
    """Return ``(r, k)`` with ``a = r + k*L`` and ``0 <= r < L``."""
    a._check(L)
    if real_sign(L, precision_budget) <= 0:
        raise ValueError("modulus must be positive")
    budget = precision_budget if precision_budget is not None else _precision_budget.get()
    q = a.ratio(L)
    if q is not None:
        k = math.floor(q)
        return a - L * k, k
    bits = _START_BITS
    while True:
        alo, ahi = _interval(a, bits)
        llo, lhi = _interval(L, bits)
        if llo > 0:
            cands = (alo / llo, alo / lhi, ahi / llo, ahi / lhi)
            k_lo, k_hi = math.floor(min(cands)), math.floor(max(cands))
            if k_hi - k_lo <= 1:
                for k in range(k_lo, k_hi + 1):
                    r = a - L * k
                    if real_sign(r, budget) >= 0 and real_sign(L - r, budget) > 0:
                        return r, k
        if bits >= budget:
            raise PrecisionExhausted(f"could not reduce modulo within {budget} bits")
        bits = min(2 * bits, budget)


# ---------------------------------------------------------------------------
# the value type

class ExactReal:
    """Immutable rational coefficient vector over a :class:`BasisSpec`."""

    __slots__ = ("basis", "coeffs", "_hash", "_box")

    def __init__(self, basis: BasisSpec, coeffs: Iterable[Rational]):
        coeffs = tuple(c if type(c) is Fraction else Fraction(c) for c in coeffs)
        if len(coeffs) != len(basis):
            raise BasisMismatch(
                f"{len(coeffs)} coefficients given for a basis of dimension {len(basis)}")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "_hash", None)
        object.__setattr__(self, "_box", None)

    def __setattr__(self, name, value):
        raise AttributeError("ExactReal is immutable")

    @classmethod
    def _raw(cls, basis, coeffs):
        obj = object.__new__(cls)
        object.__setattr__(obj, "basis", basis)
        object.__setattr__(obj, "coeffs", coeffs)
        object.__setattr__(obj, "_hash", None)
        object.__setattr__(obj, "_box", None)
        return obj

    def _check(self, other: "ExactReal"):
        if other.basis is not self.basis and other.basis != self.basis:
            raise BasisMismatch("values live over different bases")

    def _coerce(self, other) -> "ExactReal":
        if isinstance(other, ExactReal):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.basis.rational(other)
        return NotImplemented

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ExactReal._raw(self.basis, tuple(x + y for x, y in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ExactReal._raw(self.basis, tuple(x - y for x, y in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return ExactReal._raw(self.basis, tuple(-x for x in self.coeffs))

    def __mul__(self, q):
        if not isinstance(q, (int, Fraction)):
            return NotImplemented
        q = Fraction(q)
        return ExactReal._raw(self.basis, tuple(x * q for x in self.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, q):
        if not isinstance(q, (int, Fraction)):
            return NotImplemented
        return self * (1 / Fraction(q))

    # comparison -----------------------------------------------------------
    def sign(self) -> int:
        return real_sign(self)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, ExactReal):
            return self.coeffs == other.coeffs and (
                self.basis is other.basis or self.basis == other.basis)
        if isinstance(other, (int, Fraction)):
            return self.coeffs[0] == other and not any(self.coeffs[1:])
        return NotImplemented

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(self.coeffs) if any(self.coeffs[1:]) else hash(self.coeffs[0])
            object.__setattr__(self, "_hash", h)
        return h

    def _bounds(self) -> tuple[int, int]:
        """Integers ``lo <= self * 2**64 <= hi``, computed once."""
        box = self._box
        if box is None:
            ints, den = _scaled_coeffs(self.coeffs)
            lo, hi = _enclose(self.basis.elements, ints, _START_BITS)
            box = (lo // den, -(-hi // den))
            object.__setattr__(self, "_box", box)
        return box

    def _cmp(self, other) -> int:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.coeffs == other.coeffs:
            return 0
        # cheap separation by cached enclosures before the exact sign test
        alo, ahi = self._bounds()
        blo, bhi = other._bounds()
        if ahi < blo:
            return -1
        if bhi < alo:
            return 1
        return real_sign(self - other)

    def __lt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return c if c is NotImplemented else c >= 0

    # misc -----------------------------------------------------------------
    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def ratio(self, other: "ExactReal") -> Fraction | None:
        """The rational ``q`` with ``self == q*other``, or None if there is none."""
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("ratio to the zero vector")
        q = None
        for x, y in zip(self.coeffs, other.coeffs):
            if y == 0:
                if x != 0:
                    return None
                continue
            r = x / y
            if q is None:
                q = r
            elif r != q:
                return None
        return q

    def mod(self, L: "ExactReal") -> "ExactReal":
        return real_mod(self, L)[0]

    def enclosure(self, bits: int = _START_BITS) -> tuple[Fraction, Fraction]:
        return _interval(self, bits)

    def approx(self, digits: int = 20) -> str:
        """Decimal string approximating the value (display only)."""
        lo, hi = _interval(self, int(digits * 3.33) + 16)
        mid = (lo + hi) / 2
        with decimal.localcontext() as ctx:
            ctx.prec = digits
            return str(decimal.Decimal(mid.numerator) / decimal.Decimal(mid.denominator))

    def __float__(self):
        lo, hi = _interval(self, 64)
        return float((lo + hi) / 2)

    def __repr__(self):
        return f"ExactReal({', '.join(str(c) for c in self.coeffs)})"

    def __str__(self):
        terms = []
        for c, e in zip(self.coeffs, self.basis.elements):
            if c == 0:
                continue
            label = e.label()
            if label == "1":
                terms.append(str(c))
            elif c == 1:
                terms.append(label)
            elif c == -1:
                terms.append("-" + label)
            else:
                terms.append(f"{c}*{label}")
        if not terms:
            return "0"
        return " + ".join(terms).replace("+ -", "- ")


def real_add(a: ExactReal, b: ExactReal) -> ExactReal:
    return a + b


def real_neg(a: ExactReal) -> ExactReal:
    return -a


def real_scale(q: Rational, a: ExactReal) -> ExactReal:
    return a * q


def coefficient_rows(values: Sequence[ExactReal]) -> list[list[Fraction]]:
    return [list(v.coeffs) for v in values]
