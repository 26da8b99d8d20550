"""Formal deformations, the coboundary complex, and point cohomology."""

import random
from fractions import Fraction

import pytest

from falgebroid.algebroid import Section, check_f_algebroid
from falgebroid.constructions import FiniteAlgebra, fm2_algebra, load_fixture
from falgebroid.deformation import (
    FormalDeformation,
    MultiDer,
    as_prelie,
    check_n_deformation,
    cohomology_point,
    d_def,
    d_def_eval,
    d_def_sigma_eval,
    equivalence_check,
    extend,
    obstruction,
    semiclassical_limit,
)
from falgebroid.errors import (
    ArityMismatch,
    BaseNotPoint,
    NotADeformation,
    ObstructionNonzero,
    ShapeError,
)
from falgebroid.linalg import nullspace, rank as mat_rank
from falgebroid.ring import Poly, RatFunc, VectorField


# -- the truncated polynomial algebra example ------------------------------


def truncated_poly_algebra(order=4):
    """Basis u^0..u^{order-1}, product truncates at u^order."""
    F = Fraction
    r = order
    prod = [
        [[F(1) if i + j == k else F(0) for j in range(r)] for i in range(r)]
        for k in range(r)
    ]
    identity = [F(1)] + [F(0)] * (r - 1)
    return FiniteAlgebra(dim=r, product=prod, identity=identity)


def euler_weight(A, sec):
    """The derivation u d/du: u^k maps to k u^k."""
    return Section(
        tuple(RatFunc.const(0, k) * c for k, c in enumerate(sec.components))
    )


def mu1_euler(A):
    return MultiDer.build(
        2, A.rank, 0, lambda idx: A.multiply(A.basis(idx[0]), euler_weight(A, A.basis(idx[1])))
    )


def test_first_order_deformation_checks():
    A = truncated_poly_algebra().to_presentation()
    deform = FormalDeformation(A, [mu1_euler(A)])
    assert check_n_deformation(deform).overall


def test_order_two_with_zero_mu2():
    A = truncated_poly_algebra().to_presentation()
    deform = FormalDeformation(A, [mu1_euler(A), MultiDer.zero(2, A.rank, 0)])
    assert check_n_deformation(deform).overall


def test_semiclassical_limit_bracket_oracle():
    A = truncated_poly_algebra().to_presentation()
    deform = FormalDeformation(A, [mu1_euler(A)])
    limit = semiclassical_limit(deform)
    mu1 = deform.mus[0]
    for i in range(A.rank):
        for j in range(A.rank):
            x, y = A.basis(i), A.basis(j)
            # hand formula: [x, y] = x.D(y) - y.D(x)
            expected = A.multiply(x, euler_weight(A, y)) - A.multiply(y, euler_weight(A, x))
            assert limit.bracket_of(x, y) == expected
    assert check_f_algebroid(limit).overall


def test_obstruction_vanishes_and_zero_extension():
    A = truncated_poly_algebra().to_presentation()
    deform = FormalDeformation(A, [mu1_euler(A)])
    theta = obstruction(deform)
    assert theta.is_zero()
    extended = extend(deform, MultiDer.zero(2, A.rank, 0))
    assert extended.order == 2
    assert check_n_deformation(extended).overall


def test_invalid_second_order_cochain_rejected():
    A = truncated_poly_algebra().to_presentation()
    # mu2(x, y) = x . D^2(y) / 2 does not satisfy the order-2 condition
    def d2(sec):
        return euler_weight(A, euler_weight(A, sec))

    half = RatFunc.const(0, Fraction(1, 2))
    mu2 = MultiDer.build(
        2, A.rank, 0, lambda idx: A.multiply(A.basis(idx[0]), d2(A.basis(idx[1]))).scale_fn(half)
    )
    deform = FormalDeformation(A, [mu1_euler(A), mu2])
    assert not check_n_deformation(deform).overall
    with pytest.raises(NotADeformation):
        semiclassical_limit(deform)


def test_nonzero_coboundary_blocks_zero_psi_obstruction_match():
    A = truncated_poly_algebra().to_presentation()
    deform = FormalDeformation(A, [mu1_euler(A)])
    # Theta_1 = 0, so any psi that is not closed mismatches
    psi = MultiDer.zero(2, A.rank, 0)
    D = dict(psi.D)
    D[(1, 1)] = A.basis(1)
    psi = MultiDer(2, A.rank, 0, D, psi.sigma)
    assert not d_def(as_prelie(A), psi).is_zero()
    with pytest.raises(ObstructionNonzero):
        extend(deform, psi)


# -- multiderivation semantics ---------------------------------------------


def rand_poly(rng, nvars, deg=2):
    terms = {}
    for _ in range(3):
        exps = tuple(rng.randint(0, deg) for _ in range(nvars))
        terms[exps] = Fraction(rng.randint(-3, 3))
    return RatFunc(Poly.from_terms(nvars, terms))


def rand_section(rng, r, nv):
    return Section([rand_poly(rng, nv) for _ in range(r)])


def rand_vf(rng, nv):
    return VectorField([rand_poly(rng, nv) for _ in range(nv)])


def rand_multider(rng, degree, r, nv):
    return MultiDer.build(
        degree,
        r,
        nv,
        lambda idx: rand_section(rng, r, nv),
        lambda idx: rand_vf(rng, nv),
    )


def test_multider_leibniz_rule():
    rng = random.Random(5)
    A = load_fixture("TR2")
    md = rand_multider(rng, 2, 2, 2)
    X = rand_section(rng, 2, 2)
    Y = rand_section(rng, 2, 2)
    f = rand_poly(rng, 2)
    lhs = md.eval([X, Y.scale_fn(f)])
    rhs = md.eval([X, Y]).scale_fn(f) + Y.scale_fn(md.sigma_eval([X]).apply(f))
    assert lhs == rhs
    # function-linearity in the leading slot
    assert md.eval([X.scale_fn(f), Y]) == md.eval([X, Y]).scale_fn(f)
    with pytest.raises(ArityMismatch):
        md.eval([X])


def test_coboundary_consistency_on_prelie_fixtures():
    rng = random.Random(11)
    for name in ("TR", "SS2"):
        A = load_fixture(name)
        r, nv = A.rank, A.n
        for degree in (1, 2):
            md = rand_multider(rng, degree, r, nv)
            d1 = d_def(A, md)
            args = [A.scaled_basis(0, i % r) for i in range(degree + 1)]
            assert d1.eval(args) == d_def_eval(A, md, args)
            assert (
                d1.sigma_eval(args[:-1]) - d_def_sigma_eval(A, md, args[:-1])
            ).is_zero()


def test_d_squared_zero_on_prelie_fixtures():
    rng = random.Random(13)
    for name in ("TR", "SS2"):
        A = load_fixture(name)
        for degree in (1, 2):
            md = rand_multider(rng, degree, A.rank, A.n)
            assert d_def(A, d_def(A, md)).is_zero()


def test_d_squared_zero_100_seeded_over_fm2():
    A = as_prelie(fm2_algebra().to_presentation())
    rng = random.Random(2026)
    for _ in range(50):
        for degree in (1, 2):
            md = rand_multider(rng, degree, A.rank, 0)
            assert d_def(A, d_def(A, md)).is_zero()


def test_seeded_valid_one_deformations_have_closed_obstruction():
    base = fm2_algebra().to_presentation()
    P = as_prelie(base)
    rng = random.Random(99)
    reps = cohomology_point(fm2_algebra(), 2).representatives
    for _ in range(25):
        # a generic 2-cocycle: coboundary plus a combination of representatives
        phi = rand_multider(rng, 1, base.rank, 0)
        mu1 = d_def(P, phi)
        for rep in reps:
            mu1 = mu1 + rep.scale(Fraction(rng.randint(-2, 2)))
        deform = FormalDeformation(base, [mu1])
        assert check_n_deformation(deform).overall
        theta = obstruction(deform, verify=False)
        assert d_def(P, theta).is_zero()


# -- cohomology over a point -----------------------------------------------


def test_cohomology_dimensions_consistent_with_raw_linear_algebra():
    from falgebroid.deformation import _d_matrix

    alg = fm2_algebra()
    A = as_prelie(alg.to_presentation())
    zero, one = Fraction(0), Fraction(1)
    res = cohomology_point(alg, 2)
    d1 = _d_matrix(A, 1)
    d2 = _d_matrix(A, 2)
    assert res.coboundary_dim == mat_rank(d1, zero, one)
    assert res.cocycle_dim == len(nullspace(d2, zero, one))
    assert res.dim == res.cocycle_dim - res.coboundary_dim
    assert len(res.representatives) == res.dim
    for rep in res.representatives:
        assert d_def(A, rep).is_zero()  # 2-closed


def test_cohomology_degree_three():
    alg = fm2_algebra()
    res = cohomology_point(alg, 3)
    assert res.dim == res.cocycle_dim - res.coboundary_dim
    assert res.dim >= 0
    with pytest.raises(ShapeError):
        cohomology_point(alg, 4)


def test_equivalence_separates_coboundary_shifts():
    alg = fm2_algebra()
    base = alg.to_presentation()
    P = as_prelie(base)
    rng = random.Random(3)

    def rnd_phi():
        return MultiDer.build(
            1,
            base.rank,
            0,
            lambda idx: Section(
                [RatFunc.const(0, Fraction(rng.randint(-2, 2))) for _ in range(base.rank)]
            ),
        )

    mu1 = d_def(P, rnd_phi())
    phi = rnd_phi()
    shifted = mu1 - d_def(P, phi)
    report = equivalence_check(base, mu1, shifted)
    assert report.overall
    assert equivalence_check(base, mu1, shifted, phi=phi).overall
    reps = cohomology_point(alg, 2).representatives
    inequivalent = mu1 + reps[0]
    report = equivalence_check(base, mu1, inequivalent)
    assert not report.overall
    assert any(c.law == "coboundary-solve" for c in report.failures())


def test_equivalence_over_base_needs_witness():
    A = load_fixture("SS2")
    md = MultiDer.zero(2, A.rank, A.n)
    with pytest.raises(BaseNotPoint):
        equivalence_check(A, md, md)
    # with an explicit witness the check runs over any base
    assert equivalence_check(A, md, md, phi=MultiDer.zero(1, A.rank, A.n)).overall
