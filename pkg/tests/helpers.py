"""Random instance generators and brute-force oracles shared by the tests.

The oracles deliberately avoid the library's own algorithms: rank by minors,
IDOC by exhaustive search, composition by pointwise evaluation.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from ietroots.exact import ExactReal, real_mod, sqrt_basis
from ietroots.iet import IET

B2 = sqrt_basis(2)
B23 = sqrt_basis(2, 3)


def random_real(rng: random.Random, basis, lo, hi, den=12, span=3) -> ExactReal:
    """Rejection-sample a value in (lo, hi) with small rational coefficients."""
    while True:
        coeffs = [Fraction(rng.randint(-span * den, span * den), den) for _ in basis.elements]
        if not any(coeffs[1:]):
            continue
        x = ExactReal(basis, coeffs)
        if lo < x < hi:
            return x


def random_321(rng: random.Random, basis) -> IET:
    """A (3,2,1) 3-IET on [0, 1) with irrational lengths."""
    while True:
        l1 = random_real(rng, basis, Fraction(1, 20), Fraction(9, 20))
        l3 = random_real(rng, basis, Fraction(1, 20), Fraction(9, 20))
        l2 = basis.one() - l1 - l3
        if l2 > 0 and l1 != l3:
            return IET((3, 2, 1), (l1, l2, l3))


def random_point(rng: random.Random, L: ExactReal) -> ExactReal:
    x = ExactReal(L.basis, [Fraction(rng.randint(-400, 400), rng.randint(1, 60))
                            for _ in L.basis.elements])
    return real_mod(x, L)[0]


def random_iet(rng: random.Random, basis, m: int) -> IET:
    """An m-IET on [0, 1) with a random permutation and irrational cut points."""
    one = basis.one()
    while True:
        cuts = sorted({random_real(rng, basis, 0, 1) for _ in range(m - 1)})
        if len(cuts) == m - 1:
            break
    pts = [basis.zero(), *cuts, one]
    lengths = [b - a for a, b in zip(pts, pts[1:])]
    perm = list(range(1, m + 1))
    rng.shuffle(perm)
    return IET(perm, lengths, one)


# ---------------------------------------------------------------------------
# oracles

def _det(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    # Laplace expansion along the first row
    return sum((-1) ** j * M[0][j] * _det([row[:j] + row[j + 1:] for row in M[1:]])
               for j in range(n) if M[0][j])


def rank_by_minors(M) -> int:
    """Largest k with a nonzero k x k minor."""
    rows, cols = len(M), len(M[0]) if M else 0
    for k in range(min(rows, cols), 0, -1):
        for r in itertools.combinations(range(rows), k):
            for c in itertools.combinations(range(cols), k):
                if _det([[Fraction(M[i][j]) for j in c] for i in r]):
                    return k
    return 0


def idoc_fails_brute(T: IET, box: int = 500):
    """Search ``|n|, |m| <= box`` for ``n*(l1 - l3) == l1 + m*(L - l3)``.

    Returns the first witness or None.  Each ``n`` fixes ``m`` through one
    nonzero coordinate of ``L - l3``; the identity is then checked exactly.
    """
    l1, _, l3 = T.lengths
    u, w, v = l1 - l3, T.L - l3, l1
    k = next(i for i, c in enumerate(w.coeffs) if c)
    for n in range(-box, box + 1):
        q = (u.coeffs[k] * n - v.coeffs[k]) / w.coeffs[k]
        if q.denominator != 1 or abs(q) > box:
            continue
        m = int(q)
        if u * n == v + w * m:
            return n, m
    return None


def sqrt2_bounds(bits: int = 40) -> tuple[Fraction, Fraction]:
    """Bisection enclosure of sqrt(2)."""
    lo, hi = Fraction(1), Fraction(2)
    for _ in range(bits):
        mid = (lo + hi) / 2
        if mid * mid < 2:
            lo = mid
        else:
            hi = mid
    return lo, hi


def same_orbit_segments(T: IET, points, steps: int):
    """Union-find grouping of ``points`` joined by forward orbits of at most ``steps``."""
    points = list(points)
    parent = list(range(len(points)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    index = {p: i for i, p in enumerate(points)}
    for i, p in enumerate(points):
        x = p
        for _ in range(steps):
            x = T(x)
            j = index.get(x)
            if j is not None:
                parent[find(j)] = find(i)
                break
    groups = {}
    for i in range(len(points)):
        groups.setdefault(find(i), []).append(points[i])
    return list(groups.values())
