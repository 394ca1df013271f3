"""Roots of interval exchanges: construction, tower classification, obstructions."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from .dynamics import (
    DEFAULT_MAX_ITER,
    TowerShape,
    first_return,
    idoc_3iet,
    induction_interval,
    maximal_chains,
    minimal_3iet,
    tower_build,
    tower_conjugator,
)
from .errors import (
    BudgetExceeded,
    DependentParameters,
    EqualHeights,
    NoMinimalityEvidence,
    NotARotationBase,
    NotCandidate,
    NotMinimalBase,
    VerificationFailed,
)
from .exact import ExactReal, real_mod
from .iet import (
    IET,
    Keane,
    compose,
    from_translations,
    identity,
    keane_minimal_sufficient,
    power,
    rank,
    rotation,
)
from .linalg import mat_rank


# ---------------------------------------------------------------------------
# certificates

@dataclass(frozen=True)
class RootCertificate:
    """``power(S, n) == T``, checked when the certificate is built."""

    S: IET
    n: int
    T: IET
    verified: bool = True

    @classmethod
    def build(cls, S: IET, n: int, T: IET) -> "RootCertificate":
        if n < 2:
            raise ValueError("a root certificate needs n >= 2")
        if power(S, n) != T:
            raise VerificationFailed(f"S^{n} differs from T")
        return cls(S, n, T, True)

    def check(self) -> bool:
        return power(self.S, self.n) == self.T


@dataclass(frozen=True)
class NoRootCertificate:
    """Why ``T`` has no root of any order ``n >= 2``.

    ``reason`` is ``"idoc_holds"`` or ``"rank_bound"``; ``data`` holds the
    quantities a verifier recomputes.
    """

    reason: str
    data: dict = field(default_factory=dict)


@dataclass(frozen=True)
class Inconclusive:
    budget: str
    message: str


class _Inapplicable:
    def __repr__(self):
        return "INAPPLICABLE"


INAPPLICABLE = _Inapplicable()


class Evidence(enum.Enum):
    KEANE = "keane"
    THREE_IET = "three_iet"
    ASSERTED = "asserted"


# ---------------------------------------------------------------------------
# small building blocks

def rotation_amount(R: IET) -> ExactReal:
    """``a`` such that ``R(x) = x + a (mod L)``; R must be of rotation type."""
    C = R.canonical
    if C.m == 1:
        return C.L.basis.zero()
    if C.m != 2:
        raise NotARotationBase(f"{C.m}-IET is not a rotation")
    return C.lengths[1]


def _level_rotation(Lb: ExactReal, blocks: int, i: int, beta: ExactReal) -> IET:
    """Rotation by ``beta`` on block ``i`` of ``[0, blocks*Lb)``, identity elsewhere."""
    cells = []
    for k in range(blocks):
        start = Lb * k
        if k != i or beta.is_zero():
            cells.append((start, Lb, start))
        else:
            cells.append((start, Lb - beta, start + beta))
            cells.append((start + Lb - beta, beta, start))
    return from_translations(Lb * blocks, cells)


def _cyclic_shift(Lb: ExactReal, blocks: int) -> IET:
    """Moves block ``k`` onto block ``k+1``, the last block onto the first."""
    return from_translations(
        Lb * blocks, [(Lb * k, Lb, Lb * ((k + 1) % blocks)) for k in range(blocks)])


def _shift_times_rotations(Lb: ExactReal, betas: Sequence[ExactReal]) -> IET:
    blocks = len(betas)
    S = _cyclic_shift(Lb, blocks)
    for i, beta in enumerate(betas):
        S = compose(S, _level_rotation(Lb, blocks, i, beta))
    return S


def _solve_congruences(rhs: Sequence[ExactReal], modulus: ExactReal) -> list[ExactReal]:
    """Solve ``beta_i + sum(beta) ≡ rhs_i (mod modulus)`` with entries in [0, modulus)."""
    d = len(rhs)
    total = rhs[0]
    for r in rhs[1:]:
        total = total + r
    # (I + ones)^-1 = I - ones/(d+1)
    shift = total / (d + 1)
    betas = [real_mod(r - shift, modulus)[0] for r in rhs]
    bsum = betas[0]
    for b in betas[1:]:
        bsum = bsum + b
    for b, r in zip(betas, rhs):
        q = (bsum + b - r).ratio(modulus)
        if q is None or q.denominator != 1:
            raise VerificationFailed("congruence system not satisfied")
    return betas


def solve_root_system(d: int, alpha: ExactReal, modulus: ExactReal | None = None) -> list[ExactReal]:
    """``beta`` with ``beta_i + sum(beta) ≡ 0`` for ``i < d`` and ``≡ alpha`` for ``i = d``."""
    if d < 1:
        raise ValueError("d must be at least 1")
    if modulus is None:
        modulus = alpha.basis.one()
    zero = alpha.basis.zero()
    return _solve_congruences([zero] * (d - 1) + [alpha], modulus)


# ---------------------------------------------------------------------------
# towers over rotations

def _check_rotation_base(base: IET):
    if base.m != 2 or base.perm != (2, 1):
        raise NotARotationBase("the base must be a 2-interval rotation with permutation (2, 1)")


def tower_reduce_step(shape: TowerShape) -> tuple[TowerShape, IET, bool]:
    """One subtractive Euclid step on a tower of type ``(m1, m2)`` over a rotation.

    Returns ``(new_shape, h, inverted)`` where ``h ∘ T^e = S ∘ h`` with
    ``S`` the tower described by ``new_shape`` and ``e = -1`` if inverted.
    """
    base = shape.base
    _check_rotation_base(base)
    m1, m2 = shape.heights
    if m1 == m2:
        raise EqualHeights(f"type ({m1}, {m2}) is already of constant height")
    l1, l2 = base.lengths
    T, Tshape = tower_build(base, (m1, m2))
    tpos = Tshape.positions

    if m2 > m1 and m2 - m1 >= m1:
        new_base, heights, inverted = (l1 + l2, l2), (m1, m2 - m1), False
    elif m2 > m1:
        new_base, heights, inverted = (l2, l1 + l2), (m2 - m1, m1), True
    elif m1 - m2 >= m2:
        new_base, heights, inverted = (l1, l1 + l2), (m1 - m2, m2), False
    else:
        new_base, heights, inverted = (l1 + l2, l1), (m2, m1 - m2), True
    S, Sshape = tower_build(IET((2, 1), new_base), heights)
    spos = Sshape.positions

    # (start in S, length, start in T): g translates the S piece onto the T piece
    pairs = []
    if m2 > m1 and not inverted:
        for j in range(m1):
            pairs.append((spos[(0, j)], l2, tpos[(1, m2 - m1 + j)]))
            pairs.append((spos[(0, j)] + l2, l1, tpos[(0, j)]))
        for j in range(m2 - m1):
            pairs.append((spos[(1, j)], l2, tpos[(1, j)]))
    elif m2 > m1:
        for j in range(m2 - m1):
            pairs.append((spos[(0, j)], l2, tpos[(1, m2 - 1 - j)]))
        for j in range(m1):
            pairs.append((spos[(1, j)], l1, tpos[(0, m1 - 1 - j)]))
            pairs.append((spos[(1, j)] + l1, l2, tpos[(1, m1 - 1 - j)]))
    elif not inverted:
        for j in range(m2):
            pairs.append((spos[(1, j)] + l2, l1, tpos[(0, m1 - m2 + j)]))
            pairs.append((spos[(1, j)], l2, tpos[(1, j)]))
        for j in range(m1 - m2):
            pairs.append((spos[(0, j)], l1, tpos[(0, j)]))
    else:
        for j in range(m1 - m2):
            pairs.append((spos[(1, j)], l1, tpos[(0, m1 - 1 - j)]))
        for j in range(m2):
            pairs.append((spos[(0, j)] + l1, l2, tpos[(1, m2 - 1 - j)]))
            pairs.append((spos[(0, j)], l1, tpos[(0, m2 - 1 - j)]))

    h = from_translations(T.L, [(t, n, s) for s, n, t in pairs])
    source = T.inverse if inverted else T
    if compose(h, source) != compose(S, h):
        raise VerificationFailed(f"reduction step from type ({m1}, {m2}) is not a conjugacy")
    return Sshape, h, inverted


@dataclass(frozen=True)
class TowerForm:
    """``g^-1 ∘ model ∘ g`` equals ``T`` (or ``T^-1`` when ``inverted``)."""

    kind: str
    d: int
    base: IET
    model: IET
    g: IET
    inverted: bool
    shape: TowerShape

    @property
    def alpha(self) -> ExactReal:
        return rotation_amount(self.base)

    def check(self, T: IET) -> bool:
        target = T.inverse if self.inverted else T
        return compose(self.g.inverse, compose(self.model, self.g)) == target


ROTATION = "rotation"
CONSTANT_HEIGHT = "constant_height"


def tower_classify(shape: TowerShape) -> TowerForm:
    """Reduce a tower of type ``(m, n)`` over a minimal rotation along Euclid's algorithm."""
    base = shape.base
    _check_rotation_base(base)
    if base.lengths[1].ratio(base.L) is not None:
        raise NotMinimalBase("the base rotation amount is a rational multiple of its length")
    T, _ = tower_build(base, shape.heights)
    g = identity(T.L)
    inverted = False
    current = shape
    while current.heights[0] != current.heights[1]:
        current, h, step_inverted = tower_reduce_step(current)
        g = compose(h, g)
        inverted ^= step_inverted
    d = current.heights[0]
    model, model_shape = tower_build(current.base, current.heights)
    form = TowerForm(ROTATION if d == 1 else CONSTANT_HEIGHT, d, current.base, model, g,
                     inverted, model_shape)
    if not form.check(T):
        raise VerificationFailed("accumulated tower conjugacy does not hold")
    return form


# ---------------------------------------------------------------------------
# root constructions

def rotation_root(alpha: ExactReal, n: int, L: ExactReal | None = None) -> RootCertificate:
    """``rot(alpha/n)`` is an n-th root of ``rot(alpha)`` on ``[0, L)``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if L is None:
        L = alpha.basis.one()
    return RootCertificate.build(rotation(alpha / n, L), n, rotation(alpha, L))


def build_root_of_constant_tower(d: int, base: IET, T: IET | None = None) -> RootCertificate:
    """An explicit (d+1)-th root of the constant height ``d`` tower over ``base``.

    Levels keep the base length ``Lb`` and the congruences are taken modulo
    ``Lb``, so no rescaling is needed.
    """
    _check_rotation_base(base)
    tower, _ = tower_build(base, (d, d))
    if T is None:
        T = tower
    elif T != tower:
        raise ValueError("T is not the standard constant height tower over the base")
    Lb = base.L
    betas = solve_root_system(d, rotation_amount(base), Lb)
    S = _shift_times_rotations(Lb, betas)
    return RootCertificate.build(S, d + 1, T)


def example_family(m: int, alphas: Sequence[ExactReal]) -> tuple[IET, IET, int]:
    """A minimal m-IET of rank ``1 + m//2`` together with a root of it.

    Returns ``(T, S, N)`` with ``S^N == T``.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    n = m // 2
    alphas = list(alphas)
    if len(alphas) != n:
        raise ValueError(f"m = {m} needs {n} parameters, got {len(alphas)}")
    basis = alphas[0].basis
    one = basis.one()
    if mat_rank([one.coeffs] + [a.coeffs for a in alphas]) != n + 1:
        raise DependentParameters("1 and the parameters must be linearly independent over Q")
    alphas = [real_mod(a, one)[0] for a in alphas]
    rhs = alphas if m % 2 == 0 else alphas + [basis.zero()]
    blocks = len(rhs)
    T = _shift_times_rotations(one, rhs)
    S = _shift_times_rotations(one, _solve_congruences(rhs, one))
    N = blocks + 1
    RootCertificate.build(S, N, T)
    if T.canonical.m != m or rank(T) != 1 + m // 2:
        raise VerificationFailed(f"family member is not an {m}-IET of rank {1 + m // 2}")
    return T, S, N


# ---------------------------------------------------------------------------
# obstructions and the 3-IET pipeline

def rank_obstruction(T: IET, evidence) -> NoRootCertificate | _Inapplicable:
    """Apply the rank bound ``rank(T) <= 1 + floor(m/2)`` for IETs with roots."""
    if evidence is None:
        raise NoMinimalityEvidence("the rank bound needs evidence that T is minimal")
    evidence = Evidence(evidence)
    if evidence is Evidence.KEANE and keane_minimal_sufficient(T) is not Keane.YES:
        raise NoMinimalityEvidence("Keane's criterion does not apply to T")
    if evidence is Evidence.THREE_IET:
        try:
            ok = minimal_3iet(T)
        except NotCandidate as exc:
            raise NoMinimalityEvidence(str(exc)) from exc
        if not ok:
            raise NoMinimalityEvidence("T is a non-minimal 3-IET")
    C = T.canonical
    r, bound = rank(C), 1 + C.m // 2
    if r > bound:
        return NoRootCertificate("rank_bound", {"rank": r, "m": C.m, "bound": bound,
                                                "evidence": evidence.value})
    return INAPPLICABLE


@dataclass(frozen=True)
class RootPipeline:
    """Intermediate objects of :func:`find_root_3iet` for inspection."""

    chains: object
    return_system: object
    tower: object
    form: TowerForm


def find_root_3iet(T: IET, max_iter: int = DEFAULT_MAX_ITER, trace: list | None = None):
    """Root of a minimal (3,2,1) 3-IET, or a certificate that none exists.

    Returns a :class:`RootCertificate`, a :class:`NoRootCertificate` or
    :class:`Inconclusive` when an iteration budget runs out.
    """
    C = T.canonical
    if C.m != 3 or C.perm != (3, 2, 1):
        raise NotCandidate(f"canonical permutation {C.perm} is not (3, 2, 1)")
    if not minimal_3iet(C):
        raise NotCandidate("the 3-IET is not minimal")
    idoc = idoc_3iet(C)
    if idoc.holds:
        point = idoc.solution.point
        return NoRootCertificate("idoc_holds", {
            "solution": None if point is None else [str(x) for x in point],
            "directions": [[str(x) for x in d] for d in idoc.solution.directions],
        })

    chains = maximal_chains(C, max_iter)
    if not chains.complete:
        return Inconclusive("max_iter", f"{chains.count} chains after {chains.budget_used} steps")
    J = induction_interval(C, chains)
    try:
        rs = first_return(C, J, max_iter)
    except BudgetExceeded as exc:
        return Inconclusive(exc.budget, str(exc))
    conj = tower_conjugator(C, rs)
    form = tower_classify(conj.shape)
    if form.kind == ROTATION:
        root = rotation_root(form.alpha, 2, form.base.L)
    else:
        root = build_root_of_constant_tower(form.d, form.base, form.model)
    G = compose(form.g, conj.g)
    S = compose(G.inverse, compose(root.S, G))
    if form.inverted:
        S = S.inverse
    if trace is not None:
        trace.append(RootPipeline(chains, rs, conj, form))
    return RootCertificate.build(S, root.n, T)
