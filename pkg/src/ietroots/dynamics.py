"""Orbits, chains of discontinuities, first return maps and towers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .errors import (
    BadInterval,
    BudgetExceeded,
    Cancelled,
    HeightMismatch,
    LevelsDoNotTile,
    NotCandidate,
    NotMinimal,
    PeriodicSeed,
    TruncatedChains,
    VerificationFailed,
)
from .exact import ExactReal, real_sign
from .iet import IET, compose, discontinuities, from_translations
from .linalg import AffineSolutionSet, integer_points, solve_affine

DEFAULT_MAX_ITER = 100_000


def _check_cancel(cancel):
    if cancel is not None and cancel.is_set():
        raise Cancelled("iteration cancelled")


def orbit(T: IET, x: ExactReal, start: int, stop: int, cancel=None) -> list[ExactReal]:
    """``[T^start(x), ..., T^stop(x)]``."""
    if start > stop:
        raise ValueError("start must not exceed stop")
    T.locate(x)
    step = T if start >= 0 else T.inverse
    y = x
    for _ in range(abs(start)):
        _check_cancel(cancel)
        y = step(y)
    out = [y]
    for _ in range(stop - start):
        _check_cancel(cancel)
        y = T(y)
        out.append(y)
    return out


# ---------------------------------------------------------------------------
# chains

@dataclass(frozen=True)
class ChainSet:
    """Maximal chains through ``D(T) ∪ {0}``.

    ``complete`` is False when two or more chains were found and some chain
    end exhausted the budget, so a longer search might still join chains.
    A single chain cannot be extended without closing a periodic orbit.
    """

    chains: tuple
    budget_used: int
    complete: bool

    @property
    def count(self) -> int:
        return len(self.chains)

    @property
    def points(self) -> list[ExactReal]:
        return [x for chain in self.chains for x in chain]

    @property
    def status(self) -> str:
        return "OK" if self.complete else "INCONCLUSIVE"


def maximal_chains(T: IET, max_iter: int = DEFAULT_MAX_ITER, cancel=None) -> ChainSet:
    C = T.canonical
    zero = C.L.basis.zero()
    if C.m == 1:
        return ChainSet(((zero,),), 0, True)
    seeds = [zero, *discontinuities(C)]
    seedset = set(seeds)
    links = {}
    used = 0
    # advance all seeds in lockstep; once every seed but one has a link, the
    # last chain end cannot be extended without closing a periodic orbit
    active = {s: (s, []) for s in seeds}
    for _ in range(max_iter):
        if len(links) == len(seeds) - 1:
            break
        for s, (x, path) in list(active.items()):
            _check_cancel(cancel)
            x = C(x)
            used += 1
            if x in seedset:
                if x == s:
                    raise PeriodicSeed(f"seed {s} is periodic")
                links[s] = (x, path)
                del active[s]
            else:
                path.append(x)
                active[s] = (x, path)
    targets = {t for t, _ in links.values()}
    chains = []
    covered = 0
    for s in seeds:
        if s in targets:
            continue
        chain = [s]
        covered += 1
        while s in links:
            s, path = links[s]
            chain.extend(path)
            chain.append(s)
            covered += 1
        chains.append(tuple(chain))
    if covered < len(seeds):
        raise PeriodicSeed("the seeds lie on a periodic orbit")
    return ChainSet(tuple(chains), used, len(chains) == 1)


def induction_interval(T: IET, chains: ChainSet) -> tuple[ExactReal, ExactReal]:
    """The leftmost cell ``[0, b)`` of the partition cut out by the chain points."""
    if not chains.complete:
        raise TruncatedChains("chains were truncated by the iteration budget")
    positive = [x for x in chains.points if not x.is_zero()]
    zero = T.L.basis.zero()
    return zero, (min(positive) if positive else T.L)


# ---------------------------------------------------------------------------
# first return

class Level(NamedTuple):
    piece: int
    height: int
    start: ExactReal
    length: ExactReal


@dataclass(frozen=True)
class ReturnSystem:
    """First return data of ``T`` to ``J = [a, b)``.

    ``induced`` acts on ``[0, b - a)``; its intervals are the pieces in order.
    ``levels`` lists ``T^j(J_i)`` for ``0 <= j < return_times[i]``.
    """

    interval: tuple
    pieces: tuple
    return_times: tuple
    images: tuple
    induced: IET
    levels: tuple
    budget_used: int
    L: ExactReal

    @property
    def tiles(self) -> bool:
        total = self.L.basis.zero()
        for (_, length), t in zip(self.pieces, self.return_times):
            total = total + length * t
        return total == self.L


def satisfies_return_hypothesis(T: IET, J: Sequence[ExactReal]) -> bool:
    """True when no discontinuity of ``T`` lies strictly inside ``J``."""
    a, b = J
    return not any(a < d < b for d in discontinuities(T))


def first_return(T: IET, J: Sequence[ExactReal], max_iter: int = DEFAULT_MAX_ITER,
                 cancel=None) -> ReturnSystem:
    """First return map of ``T`` to ``J = [a, b)``.

    ``J`` may contain discontinuities; they simply become piece boundaries.
    """
    a, b = J
    C = T.canonical
    if real_sign(a) < 0 or not a < b or b > C.L:
        raise BadInterval(f"[{a}, {b}) is not a subinterval of [0, {C.L})")
    D = discontinuities(C)
    special = set(D) | {a, b}
    used = 0

    # backward from each target until the orbit enters (a, b); discontinuities
    # inside J are cut points themselves
    P = {d for d in D if a < d < b}
    Cinv = C.inverse
    for t in sorted(special):
        if not t < C.L:
            continue
        y = t
        for _ in range(max_iter):
            _check_cancel(cancel)
            y = Cinv(y)
            used += 1
            if a < y < b:
                P.add(y)
                break
            if y in special:
                break
        else:
            raise BudgetExceeded(f"backward orbit of {t} did not enter J within {max_iter} steps")

    cuts = [a, *sorted(P), b]
    pieces, times, images, levels, cells = [], [], [], [], []
    for i in range(len(cuts) - 1):
        c, length = cuts[i], cuts[i + 1] - cuts[i]
        x = c
        piece_levels = [Level(i, 0, c, length)]
        for j in range(1, max_iter + 1):
            _check_cancel(cancel)
            k = C.locate(x)
            if x + length > C.breakpoints[k + 1]:
                raise VerificationFailed(f"T^{j} is not a translation on piece {i}")
            x = x + C.offsets[k]
            used += 1
            if a <= x < b:
                if x + length > b:
                    raise VerificationFailed(f"piece {i} returns only partially into J")
                break
            if not (x + length <= a or x >= b):
                raise VerificationFailed(f"level {j} of piece {i} straddles J")
            piece_levels.append(Level(i, j, x, length))
        else:
            raise BudgetExceeded(f"piece {i} did not return within {max_iter} steps")
        pieces.append((c, length))
        times.append(j)
        images.append((x, length))
        levels.extend(piece_levels)
        cells.append((c - a, length, x - a))

    induced = from_translations(b - a, cells)
    return ReturnSystem((a, b), tuple(pieces), tuple(times), tuple(images), induced,
                        tuple(levels), used, C.L)


def check_return_system(T: IET, rs: ReturnSystem) -> dict[str, bool]:
    """Re-derive the first return properties independently of :func:`first_return`.

    Translation on each piece is checked with the composed powers ``T^j``.
    """
    a, b = rs.interval
    result = {}
    powers = [None, T.canonical]
    for _ in range(2, max(rs.return_times) + 1):
        powers.append(compose(T, powers[-1]))
    ok = True
    for (c, length), mi, (img, _) in zip(rs.pieces, rs.return_times, rs.images):
        for j in range(1, mi + 1):
            Tj = powers[j]
            if any(c < d < c + length for d in discontinuities(Tj)):
                ok = False
        if powers[mi](c) != img:
            ok = False
    result["translation"] = ok

    def outside_J(start, length):
        return start + length <= a or start >= b

    result["avoids_J"] = all(outside_J(lv.start, lv.length) for lv in rs.levels if lv.height > 0)
    result["returns_into_J"] = all(a <= s and s + n <= b for s, n in rs.images)
    imgs = sorted(rs.images, key=lambda p: p[0])
    result["images_disjoint"] = all(
        imgs[k][0] + imgs[k][1] <= imgs[k + 1][0] for k in range(len(imgs) - 1))
    pos = T.L.basis.zero()
    tiles = True
    for lv in sorted(rs.levels, key=lambda lv: lv.start):
        if lv.start != pos:
            tiles = False
            break
        pos = pos + lv.length
    result["tiles"] = tiles and pos == T.L
    return result


# ---------------------------------------------------------------------------
# towers

@dataclass(frozen=True, eq=False)
class TowerShape:
    """Row-major layout of a tower: ``positions[(i, j)]`` is where level ``j`` of
    column ``i`` starts (both 0-based; level 0 is the base)."""

    base: IET
    heights: tuple
    positions: dict
    L: ExactReal

    def level(self, i: int, j: int) -> tuple[ExactReal, ExactReal]:
        return self.positions[(i, j)], self.base.lengths[i]

    @property
    def layout(self) -> list[tuple[int, int]]:
        return sorted(self.positions, key=lambda ij: (ij[1], ij[0]))


def tower_build(base: IET, heights: Sequence[int]) -> tuple[IET, TowerShape]:
    heights = tuple(int(h) for h in heights)
    if len(heights) != base.m:
        raise HeightMismatch(f"{len(heights)} heights for {base.m} base intervals")
    if any(h < 1 for h in heights):
        raise HeightMismatch("heights must be positive")
    positions = {}
    pos = base.L.basis.zero()
    for j in range(max(heights)):
        for i, h in enumerate(heights):
            if h > j:
                positions[(i, j)] = pos
                pos = pos + base.lengths[i]
    cells = []
    for (i, j), start in positions.items():
        if j + 1 < heights[i]:
            target = positions[(i, j + 1)]
        else:
            target = base.image_starts[i]
        cells.append((start, base.lengths[i], target))
    tower = from_translations(pos, cells)
    return tower, TowerShape(base, heights, positions, pos)


class TowerConjugacy(NamedTuple):
    """``g`` with ``g∘T = S∘g`` where ``S`` is the tower over the induced map."""

    g: IET
    tower: IET
    shape: TowerShape


def tower_conjugator(T: IET, rs: ReturnSystem) -> TowerConjugacy:
    if not rs.tiles:
        raise LevelsDoNotTile("the levels of the return system do not cover the domain")
    S, shape = tower_build(rs.induced, rs.return_times)
    cells = [(lv.start, lv.length, shape.positions[(lv.piece, lv.height)]) for lv in rs.levels]
    g = from_translations(T.L, cells)
    if compose(g, T) != compose(S, g):
        raise VerificationFailed("tower conjugacy g∘T = S∘g does not hold")
    return TowerConjugacy(g, S, shape)


# ---------------------------------------------------------------------------
# exact decisions for 3-IETs

def _three_iet_data(T: IET):
    C = T.canonical
    if C.m != 3 or C.perm != (3, 2, 1):
        raise NotCandidate(f"canonical form has permutation {C.perm}, not (3, 2, 1)")
    l1, _, l3 = C.lengths
    return l1 - l3, C.L - l3, l1


def minimal_3iet(T: IET) -> bool:
    """True iff ``(λ1 - λ3) / (L - λ3)`` is irrational."""
    u, w, _ = _three_iet_data(T)
    s = solve_affine([[c] for c in w.coeffs], u.coeffs, nvars=1)
    return s.kind == "EMPTY"


@dataclass(frozen=True)
class IdocResult:
    holds: bool
    solution: AffineSolutionSet
    witness: tuple | None = None


def idoc_3iet(T: IET) -> IdocResult:
    """Decide the infinite distinct orbit condition of a minimal (3,2,1) 3-IET.

    It fails exactly when ``n*(λ1 - λ3) = λ1 + m*(L - λ3)`` for integers n, m.
    """
    if not minimal_3iet(T):
        raise NotMinimal("the 3-IET is not minimal")
    u, w, v = _three_iet_data(T)
    A = [[uk, -wk] for uk, wk in zip(u.coeffs, w.coeffs)]
    s = solve_affine(A, v.coeffs, nvars=2)
    pt = integer_points(s)
    if pt is None:
        return IdocResult(True, s)
    n, m = pt
    if u * n != v + w * m:
        raise VerificationFailed(f"witness {pt} does not satisfy the orbit identity")
    return IdocResult(False, s, pt)
