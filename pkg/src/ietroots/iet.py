"""Interval exchange transformations on ``[0, L)`` and their group structure.

Permutations are in one-line notation, 1-based: ``perm[j-1]`` is the position
(counted from the left) at which the ``j``-th interval lands.  So ``(3, 2, 1)``
reverses three intervals and ``(2, 1)`` with lengths ``(L - a, a)`` is the
rotation ``x -> x + a (mod L)``.

Two IETs compare equal when they are the same map, which by uniqueness of the
separating presentation means equal domain and equal canonical data.
"""

from __future__ import annotations

import enum
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import (
    BasisMismatch,
    DomainMismatch,
    IrrationalRescale,
    LengthSumMismatch,
    NonPositiveLength,
    NotABijection,
    OutOfDomain,
)
from .exact import ExactReal, real_sign
from .linalg import mat_rank


# ---------------------------------------------------------------------------
# permutations

def check_permutation(perm: Sequence[int]) -> tuple[int, ...]:
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(1, len(perm) + 1)):
        raise NotABijection(f"{perm} is not a permutation of 1..{len(perm)}")
    return perm


def perm_inverse(perm: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for i, p in enumerate(perm, start=1):
        inv[p - 1] = i
    return tuple(inv)


def is_separating(perm: Sequence[int]) -> bool:
    return all(perm[i + 1] != perm[i] + 1 for i in range(len(perm) - 1))


def is_irreducible(perm: Sequence[int]) -> bool:
    """No proper initial block ``{1..k}`` is mapped to itself."""
    top = 0
    for k, p in enumerate(perm[:-1], start=1):
        top = max(top, p)
        if top == k:
            return False
    return True


# ---------------------------------------------------------------------------

class IET:
    """A bijection of ``[0, L)`` translating ``m`` consecutive intervals."""

    def __init__(self, perm: Sequence[int], lengths: Sequence[ExactReal],
                 L: ExactReal | None = None):
        perm = check_permutation(perm)
        lengths = tuple(lengths)
        if len(lengths) != len(perm) or not lengths:
            raise NotABijection("need one length per permuted interval")
        basis = lengths[0].basis
        for lam in lengths:
            lam._check(lengths[0])
            if real_sign(lam) <= 0:
                raise NonPositiveLength(f"interval length {lam} is not positive")
        total = lengths[0]
        for lam in lengths[1:]:
            total = total + lam
        if L is None:
            L = total
        elif L.basis != basis:
            raise BasisMismatch("domain length and interval lengths use different bases")
        elif total != L:
            raise LengthSumMismatch(f"lengths sum to {total}, domain length is {L}")
        self.perm = perm
        self.lengths = lengths
        self.L = L

    # basic data -----------------------------------------------------------
    @property
    def basis(self):
        return self.L.basis

    @property
    def m(self) -> int:
        return len(self.perm)

    @cached_property
    def breakpoints(self) -> tuple[ExactReal, ...]:
        pts = [self.L.basis.zero()]
        for lam in self.lengths:
            pts.append(pts[-1] + lam)
        return tuple(pts)

    @cached_property
    def image_starts(self) -> tuple[ExactReal, ...]:
        inv = perm_inverse(self.perm)
        starts = [None] * self.m
        pos = self.L.basis.zero()
        for j in inv:
            starts[j - 1] = pos
            pos = pos + self.lengths[j - 1]
        return tuple(starts)

    @cached_property
    def offsets(self) -> tuple[ExactReal, ...]:
        """Translation amount on each interval."""
        return tuple(t - s for s, t in zip(self.breakpoints, self.image_starts))

    def cells(self) -> list[tuple[ExactReal, ExactReal, ExactReal]]:
        """``(start, length, image_start)`` for each interval."""
        return list(zip(self.breakpoints, self.lengths, self.image_starts))

    # evaluation -----------------------------------------------------------
    def locate(self, x: ExactReal) -> int:
        """0-based index of the interval containing ``x``."""
        if real_sign(x) < 0 or not x < self.L:
            raise OutOfDomain(f"{x} is outside [0, {self.L})")
        return bisect_right(self.breakpoints, x, 1, self.m) - 1

    def __call__(self, x: ExactReal) -> ExactReal:
        return x + self.offsets[self.locate(x)]

    def evaluate(self, x: ExactReal) -> ExactReal:
        return self(x)

    def evaluate_inv(self, y: ExactReal) -> ExactReal:
        return self.inverse(y)

    @cached_property
    def inverse(self) -> "IET":
        inv = perm_inverse(self.perm)
        T = IET(inv, [self.lengths[j - 1] for j in inv], self.L)
        T.__dict__["inverse"] = self
        return T

    # canonical form -------------------------------------------------------
    @cached_property
    def canonical_form(self) -> "CanonicalIET":
        return _canonicalize(self)

    @property
    def canonical(self) -> "IET":
        return self.canonical_form.iet

    def is_identity(self) -> bool:
        return self.canonical.m == 1

    def __eq__(self, other):
        if not isinstance(other, IET):
            return NotImplemented
        if self.L != other.L:
            return False
        a, b = self.canonical, other.canonical
        return a.perm == b.perm and a.lengths == b.lengths

    def __hash__(self):
        c = self.canonical
        return hash((c.perm, c.lengths))

    def same_presentation(self, other: "IET") -> bool:
        return (self.perm, self.lengths, self.L) == (other.perm, other.lengths, other.L)

    def __repr__(self):
        lam = ", ".join(str(x) for x in self.lengths)
        return f"IET(perm={self.perm}, lengths=[{lam}], L={self.L})"

    # group operations as methods -----------------------------------------
    def __mul__(self, other: "IET") -> "IET":
        return compose(self, other)

    def __pow__(self, n: int) -> "IET":
        return power(self, n)


@dataclass(frozen=True)
class CanonicalIET:
    """Separating presentation plus, for each original interval, the merged index."""

    iet: IET
    merge_map: tuple[int, ...]


def _canonicalize(T: IET) -> CanonicalIET:
    perm, lengths = list(T.perm), list(T.lengths)
    merge_map = list(range(T.m))
    while not is_separating(perm):
        group_of = []
        new_lengths, keys = [], []
        for i, p in enumerate(perm):
            if i == 0 or p != perm[i - 1] + 1:
                keys.append(p)
                new_lengths.append(lengths[i])
            else:
                new_lengths[-1] = new_lengths[-1] + lengths[i]
            group_of.append(len(keys) - 1)
        order = sorted(range(len(keys)), key=keys.__getitem__)
        rank = {g: r + 1 for r, g in enumerate(order)}
        perm = [rank[g] for g in range(len(keys))]
        lengths = new_lengths
        merge_map = [group_of[g] for g in merge_map]
    if len(perm) == T.m:
        return CanonicalIET(T, tuple(merge_map))
    C = IET(perm, lengths, T.L)
    C.__dict__["canonical_form"] = CanonicalIET(C, tuple(range(C.m)))
    return CanonicalIET(C, tuple(merge_map))


def canonicalize(T: IET) -> CanonicalIET:
    return T.canonical_form


# ---------------------------------------------------------------------------
# constructors

def iet_new(perm: Sequence[int], lengths: Sequence[ExactReal],
            L: ExactReal | None = None) -> IET:
    return IET(perm, lengths, L)


def identity(L: ExactReal) -> IET:
    return IET((1,), (L,), L)


def rotation(alpha: ExactReal, L: ExactReal | None = None) -> IET:
    """``x -> x + alpha (mod L)`` for ``0 <= alpha < L``."""
    if L is None:
        L = alpha.basis.one()
    if real_sign(alpha) < 0 or not alpha < L:
        raise ValueError(f"rotation amount {alpha} is not in [0, {L})")
    if alpha.is_zero():
        return identity(L)
    return IET((2, 1), (L - alpha, alpha), L)


def from_translations(L: ExactReal,
                      cells: Iterable[tuple[ExactReal, ExactReal, ExactReal]]) -> IET:
    """The IET sending each ``[start, start+length)`` to ``[target, target+length)``.

    The sources and the targets must each tile ``[0, L)``.
    """
    cells = sorted(cells, key=lambda c: c[0])
    _check_tiling(L, [(s, n) for s, n, _ in cells], "source")
    order = sorted(range(len(cells)), key=lambda k: cells[k][2])
    _check_tiling(L, [(cells[k][2], cells[k][1]) for k in order], "target")
    perm = [0] * len(cells)
    for rank, k in enumerate(order, start=1):
        perm[k] = rank
    return IET(perm, [n for _, n, _ in cells], L)


def _check_tiling(L, pieces, what):
    pos = L.basis.zero()
    for start, length in pieces:
        if real_sign(length) <= 0:
            raise NonPositiveLength(f"{what} piece of length {length}")
        if start != pos:
            raise NotABijection(f"{what} pieces do not tile the domain at {pos}")
        pos = pos + length
    if pos != L:
        raise NotABijection(f"{what} pieces cover [0, {pos}) instead of [0, {L})")


# ---------------------------------------------------------------------------
# group operations

def _check_compatible(S: IET, T: IET):
    if S.basis != T.basis:
        raise BasisMismatch("IETs are defined over different bases")
    if S.L != T.L:
        raise DomainMismatch(f"domain lengths differ: {S.L} vs {T.L}")


def compose(S: IET, T: IET) -> IET:
    """The map ``x -> S(T(x))``, in canonical form."""
    _check_compatible(S, T)
    cuts = set(T.breakpoints[:-1])
    inner = S.breakpoints[1:-1]
    for lo, lam, w in zip(T.image_starts, T.lengths, T.offsets):
        hi = lo + lam
        for b in inner[bisect_right(inner, lo):bisect_left(inner, hi)]:
            cuts.add(b - w)
    cuts = sorted(cuts)
    cells = []
    for k, c in enumerate(cuts):
        end = cuts[k + 1] if k + 1 < len(cuts) else T.L
        y = T(c)
        cells.append((c, end - c, S(y)))
    return from_translations(T.L, cells).canonical


def invert(T: IET) -> IET:
    return T.inverse


def power(T: IET, n: int) -> IET:
    """``T`` composed with itself ``n`` times (``n`` may be negative)."""
    if n < 0:
        T, n = T.inverse, -n
    result = identity(T.L)
    base = T.canonical
    while n:
        if n & 1:
            result = compose(base, result)
        n >>= 1
        if n:
            base = compose(base, base)
    return result


def conjugate(g: IET, T: IET) -> IET:
    """``g T g^-1``."""
    return compose(g, compose(T, g.inverse))


# ---------------------------------------------------------------------------
# invariants

def discontinuities(T: IET) -> tuple[ExactReal, ...]:
    return T.canonical.breakpoints[1:-1]


def rank(T: IET) -> int:
    """Dimension of the ℚ-span of the canonical interval lengths."""
    return mat_rank([v.coeffs for v in T.canonical.lengths])


def is_rotation_type(T: IET) -> bool:
    return T.canonical.m <= 2


class Keane(enum.Enum):
    YES = "YES"
    UNKNOWN = "UNKNOWN"


def keane_minimal_sufficient(T: IET) -> Keane:
    """YES when the canonical permutation is irreducible and the lengths are independent."""
    C = T.canonical
    if C.m >= 2 and is_irreducible(C.perm) and rank(C) == C.m:
        return Keane.YES
    return Keane.UNKNOWN


def rescale(T: IET, newL: ExactReal) -> IET:
    """Scale ``T`` to ``[0, newL)``; only rational scale factors are expressible."""
    if real_sign(newL) <= 0:
        raise ValueError("new domain length must be positive")
    q = newL.ratio(T.L)
    if q is None:
        raise IrrationalRescale(f"{newL} / {T.L} is not rational")
    if q == 1:
        return T
    return IET(T.perm, [lam * q for lam in T.lengths], newL)

