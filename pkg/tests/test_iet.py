import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import B2, B23, random_iet, random_point
from ietroots.errors import (
    BasisMismatch,
    DomainMismatch,
    IrrationalRescale,
    LengthSumMismatch,
    NonPositiveLength,
    NotABijection,
    OutOfDomain,
)
from ietroots.iet import (
    IET,
    Keane,
    canonicalize,
    compose,
    conjugate,
    discontinuities,
    from_translations,
    identity,
    invert,
    is_irreducible,
    is_rotation_type,
    is_separating,
    keane_minimal_sufficient,
    power,
    rank,
    rescale,
    rotation,
)

ONE, S2 = B2.one(), B2.sqrt(2)
ALPHA = S2 - 1
ROT = IET((2, 1), (ONE - ALPHA, ALPHA))
T321 = IET((3, 2, 1), (ALPHA, ALPHA, 3 - S2 * 2))


def test_rotation_offsets_and_values():
    assert ROT.offsets == (ALPHA, ALPHA - 1)
    assert ROT(ONE * 0) == ALPHA
    assert ROT(ONE - ALPHA) == 0
    assert ROT == rotation(ALPHA)


def test_offsets_follow_the_displayed_formula():
    # w_j = -sum_{i<j} l_i + sum_{pi(i) < pi(j)} l_i
    T = IET((3, 1, 4, 2), (ONE / 5, ALPHA / 2, ONE / 7, ONE - ONE / 5 - ALPHA / 2 - ONE / 7))
    for j in range(4):
        before = sum((T.lengths[i] for i in range(j)), ONE * 0)
        below = sum((T.lengths[i] for i in range(4) if T.perm[i] < T.perm[j]), ONE * 0)
        assert T.offsets[j] == below - before


def test_constructor_errors():
    with pytest.raises(LengthSumMismatch):
        IET((2, 1), (ONE / 2, ONE / 3), ONE)
    with pytest.raises(NonPositiveLength):
        IET((2, 1), (ONE, ONE * 0))
    with pytest.raises(NotABijection):
        IET((1, 1), (ONE / 2, ONE / 2))
    with pytest.raises(BasisMismatch):
        IET((1,), (ONE,), B23.one())


def test_identity_and_inverse_values():
    e = identity(ONE)
    assert e(ALPHA) == ALPHA
    assert e.is_identity()
    assert ROT.evaluate_inv(ROT.evaluate(ALPHA / 3)) == ALPHA / 3
    with pytest.raises(OutOfDomain):
        ROT(ONE)
    with pytest.raises(OutOfDomain):
        ROT(-ALPHA)


def test_invert():
    assert invert(ROT) == rotation(ONE - ALPHA)
    assert invert(invert(T321)) == T321
    assert invert(identity(ONE)) == identity(ONE)
    S = IET((2, 3, 1), (ALPHA / 2, ONE / 2, ONE / 2 - ALPHA / 2))
    assert invert(compose(S, T321)) == compose(invert(T321), invert(S))


def test_compose_rotations():
    a2 = ONE / 3
    R = compose(rotation(ALPHA), rotation(a2))
    assert R == rotation(ALPHA + a2)
    assert compose(T321, invert(T321)).canonical.m == 1
    for x in (ONE * 0, ALPHA, ONE / 2):
        assert R(x) == rotation(ALPHA)(rotation(a2)(x))


def test_compose_errors():
    with pytest.raises(DomainMismatch):
        compose(ROT, identity(ONE * 2))
    with pytest.raises(BasisMismatch):
        compose(ROT, identity(B23.one()))


def test_power():
    assert power(ROT, 2) == rotation(ALPHA * 2)
    assert power(ROT, 0) == identity(ONE)
    assert power(ROT, -1) == invert(ROT)
    assert power(T321, 7) == compose(power(T321, 3), power(T321, 4))
    assert ROT ** 3 == ROT * ROT * ROT


def test_canonicalize():
    a, b, c = ALPHA / 2, ONE / 3, ONE * 2 / 3 - ALPHA / 2
    cf = canonicalize(IET((2, 3, 1), (a, b, c)))
    assert cf.iet.perm == (2, 1)
    assert cf.iet.lengths == (a + b, c)
    assert cf.merge_map == (0, 0, 1)
    assert T321.canonical.same_presentation(T321)
    e3 = IET((1, 2, 3), (a, b, c))
    assert e3.canonical.m == 1 and e3 == identity(ONE)


def test_canonical_form_is_unique_for_equal_maps():
    split = IET((3, 4, 1, 2), (ONE / 4, ONE / 4, ONE / 4, ONE / 4))
    assert split.canonical.same_presentation(rotation(ONE / 2).canonical)
    assert hash(split) == hash(rotation(ONE / 2))


def test_predicates():
    assert not is_separating((3, 1, 2))
    assert is_separating((3, 2, 1))
    assert not is_irreducible((2, 1, 3))
    assert is_irreducible((3, 2, 1))
    assert not is_rotation_type(T321)
    assert is_rotation_type(ROT)
    assert is_rotation_type(identity(ONE))


def test_discontinuities():
    assert discontinuities(ROT) == (ONE - ALPHA,)
    assert discontinuities(identity(ONE)) == ()
    assert discontinuities(T321) == (ALPHA, ALPHA * 2)


def test_rank():
    assert rank(T321) == 2
    assert rank(ROT) == 2
    assert rank(rotation(ONE / 3)) == 1
    assert rank(identity(ONE)) == 1


def test_keane():
    s2, s3, one = B23.sqrt(2), B23.sqrt(3), B23.one()
    raw = [one, s2 - 1, s3 - 1]
    total = sum(raw[1:], raw[0])
    # lengths proportional to (1, sqrt2 - 1, sqrt3 - 1) up to a rational factor
    T = IET((3, 2, 1), raw, total)
    assert keane_minimal_sufficient(T) is Keane.YES
    assert keane_minimal_sufficient(identity(one)) is Keane.UNKNOWN
    assert keane_minimal_sufficient(T321) is Keane.UNKNOWN


def test_rescale():
    T = IET((3, 2, 1), (ONE, ALPHA, ONE * 2 - ALPHA))
    R = rescale(T, ONE)
    assert R.lengths == tuple(x / 3 for x in T.lengths)
    assert rescale(T, T.L) is T
    assert rank(R) == rank(T)
    with pytest.raises(IrrationalRescale):
        rescale(ROT, S2)


def test_from_translations_checks_tiling():
    with pytest.raises(NotABijection):
        from_translations(ONE, [(ONE * 0, ONE / 2, ONE * 0), (ONE / 2, ONE / 2, ONE / 4)])
    with pytest.raises(NotABijection):
        from_translations(ONE, [(ONE * 0, ONE / 2, ONE / 2)])


def test_conjugate():
    g = IET((2, 3, 1), (ALPHA / 2, ONE / 2, ONE / 2 - ALPHA / 2))
    C = conjugate(g, T321)
    assert compose(C, g) == compose(g, T321)
    assert power(C, 5) == conjugate(g, power(T321, 5))


@pytest.mark.parametrize("seed", range(6))
def test_images_tile_the_domain(seed):
    T = random_iet(random.Random(seed), B23, 3 + seed % 3)
    cells = sorted(zip(T.image_starts, T.lengths), key=lambda c: c[0])
    pos = T.L * 0
    for start, length in cells:
        assert start == pos
        pos = pos + length
    assert pos == T.L


@pytest.mark.parametrize("seed", range(6))
def test_canonical_form_agrees_pointwise(seed):
    rng = random.Random(100 + seed)
    T = random_iet(rng, B23, 2 + seed)
    C = T.canonical
    assert C.canonical.same_presentation(C)
    midpoints = [a + (b - a) / 2 for a, b in zip(C.breakpoints, C.breakpoints[1:])]
    points = midpoints + [random_point(rng, T.L) for _ in range(100)]
    for x in points:
        assert T(x) == C(x)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(2, 5), st.integers(2, 5))
def test_compose_matches_pointwise(seed, m1, m2):
    rng = random.Random(seed)
    S, T = random_iet(rng, B23, m1), random_iet(rng, B23, m2)
    ST = compose(S, T)
    cuts = set(T.breakpoints[:-1]) | {T.inverse(b) for b in S.breakpoints[1:-1]}
    assert set(ST.breakpoints[:-1]) <= cuts
    for _ in range(20):
        x = random_point(rng, S.L)
        assert ST(x) == S(T(x))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_group_laws(seed):
    rng = random.Random(seed)
    a, b, c = (random_iet(rng, B2, rng.randint(1, 4)) for _ in range(3))
    e = identity(a.L)
    assert compose(compose(a, b), c) == compose(a, compose(b, c))
    assert compose(a, e) == a == compose(e, a)
    assert compose(a, invert(a)) == e


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_rank_invariant_under_identity(seed):
    T = random_iet(random.Random(seed), B23, 4)
    assert rank(compose(T, identity(T.L))) == rank(T)
    assert rank(rescale(T, T.L * Fraction(3, 2))) == rank(T)
