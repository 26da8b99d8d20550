"""Structure-law checks: fixtures pass, mutants fail with witnesses."""

from fractions import Fraction

import pytest

from falgebroid.algebroid import (
    AlgebroidPresentation,
    Phi,
    Psi,
    Section,
    check_anchor_leibniz,
    check_comm_assoc,
    check_f_algebroid,
    check_lie_algebroid,
    check_pre_f,
    check_pre_lie_algebroid,
    check_prelie_com,
    find_identity,
    sub_adjacent,
    tensors_equal,
)
from falgebroid.constructions import FiniteAlgebra, load_fixture
from falgebroid.errors import MissingStructure, ShapeError
from falgebroid.ring import RatFunc


def _mutate_tensor(tensor, k, i, j, value):
    out = [[list(row) for row in mat] for mat in tensor]
    out[k][i][j] = value
    return out


@pytest.mark.parametrize(
    "name,checker",
    [
        ("FM2", check_f_algebroid),
        ("ACT2", check_f_algebroid),
        ("SS1", check_f_algebroid),
        ("SS2", check_f_algebroid),
        ("SS3", check_f_algebroid),
        ("SS1", check_prelie_com),
        ("SS2", check_prelie_com),
        ("SS3", check_prelie_com),
        ("TR", check_prelie_com),
        ("TR2", check_prelie_com),
        ("DN2_2", check_prelie_com),
        ("POISSON_SEED", check_f_algebroid),
    ],
)
def test_fixture_laws(name, checker):
    report = checker(load_fixture(name))
    assert report.overall, report.summary()


def test_mutant_product_breaks_symmetry_and_associativity():
    A = load_fixture("SS2")
    u1 = RatFunc.var(2, 0)
    bad = A.with_structures(product=_mutate_tensor(A.product, 0, 0, 1, u1))
    report = check_comm_assoc(bad)
    assert not report.overall
    laws = {c.law for c in report.failures()}
    assert "product-symmetry" in laws
    # every failure carries a witness expression
    assert all(c.witness for c in report.failures())


def test_mutant_bracket_breaks_antisymmetry():
    A = load_fixture("SS2")
    one = RatFunc.one(2)
    bad = A.with_structures(bracket=_mutate_tensor(A.bracket, 0, 0, 0, one))
    report = check_lie_algebroid(bad)
    assert not report.overall
    assert any(c.law == "bracket-antisymmetry" for c in report.failures())


def test_mutant_jacobi_failure_over_point():
    F = Fraction
    r = 3
    # antisymmetric bracket with [e1,e2]=e3, [e1,e3]=e1, [e2,e3]=0 fails
    # Jacobi: the cyclic sum on (e1,e2,e3) leaves [e2,-e1] = e3
    b = [[[F(0)] * r for _ in range(r)] for _ in range(r)]
    for k, i, j in ((2, 0, 1), (0, 0, 2)):
        b[k][i][j] = F(1)
        b[k][j][i] = F(-1)
    prod = [[[F(0)] * r for _ in range(r)] for _ in range(r)]
    alg = FiniteAlgebra(dim=r, product=prod, bracket=b)
    report = check_lie_algebroid(alg.to_presentation())
    assert not report.overall
    assert any(c.law == "jacobi" for c in report.failures())


def test_anchor_matters_for_jacobi():
    # TR carries bracket terms only through the anchor; replacing the anchor
    # by 1 instead of u changes nothing (still a Lie algebroid), but an
    # anchor that is not a homomorphism for the bracket fails the f-scaled
    # Jacobi sweep. Build rank 2 over one variable with [E1,E2] = E2 and an
    # anchor that cannot anchor that bracket.
    n, r = 1, 2
    zero, one = RatFunc.zero(n), RatFunc.one(n)
    u = RatFunc.var(n, 0)
    bracket = [[[zero, zero], [zero, zero]], [[zero, one], [-one, zero]]]
    product = [[[one, zero], [zero, zero]], [[zero, one], [one, zero]]]
    A = AlgebroidPresentation(
        base_vars=["u"],
        rank=r,
        product=product,
        bracket=bracket,
        anchor=[[u], [u]],
    )
    report = check_lie_algebroid(A)
    assert not report.overall
    # the defect only appears on variable-scaled arguments
    basis_only = [c for c in report.failures() if "*" not in c.instance]
    assert not basis_only


def test_hertling_manin_mutant():
    A = load_fixture("SS2")
    u2 = RatFunc.var(2, 1)
    bad = A.with_structures(bracket=_mutate_tensor(A.bracket, 0, 0, 1, u2))
    # restore antisymmetry so only the compatibility law can fail
    t = _mutate_tensor(bad.bracket, 0, 1, 0, -u2)
    bad = bad.with_structures(bracket=t)
    report = check_f_algebroid(bad)
    assert not report.overall
    assert any(c.law == "hertling-manin" for c in report.failures())


def test_phi_tensoriality_on_ss2():
    A = load_fixture("SS2")
    basis = [A.basis(i) for i in range(A.rank)]
    for m in range(A.n):
        f = A.var_fn(m)
        for X in basis:
            for Y in basis:
                for Z in basis:
                    for W in basis:
                        base = Phi(A, X, Y, Z, W).scale_fn(f)
                        assert Phi(A, X.scale_fn(f), Y, Z, W) - base == Section.zero(2, 2)
                        assert Phi(A, X, Y, Z.scale_fn(f), W) - base == Section.zero(2, 2)


def test_psi_vanishes_on_prelie_com_fixture():
    A = load_fixture("TR2")
    basis = [A.basis(i) for i in range(A.rank)]
    for X in basis:
        for Y in basis:
            for Z in basis:
                assert Psi(A, X, Y, Z).is_zero()


def test_find_identity():
    A = load_fixture("SS2")
    e = find_identity(A)
    assert e is not None and all(c == RatFunc.one(2) for c in e.components)
    FM2 = load_fixture("FM2")
    e = find_identity(FM2)
    assert e is not None
    assert e.components[0] == RatFunc.one(0) and e.components[1] == RatFunc.zero(0)
    # a nil product has no identity
    zero = RatFunc.zero(0)
    nil = AlgebroidPresentation(base_vars=[], rank=1, product=[[[zero]]])
    assert find_identity(nil) is None


def test_sub_adjacent_bracket_is_prelie_commutator():
    for name in ("TR", "TR2", "DN2_2"):
        A = load_fixture(name)
        B = sub_adjacent(A)
        r = A.rank
        expected = [
            [
                [A.prelie[k][i][j] - A.prelie[k][j][i] for j in range(r)]
                for i in range(r)
            ]
            for k in range(r)
        ]
        assert tensors_equal(B.bracket, expected)
        assert check_lie_algebroid(B).overall


def test_pre_lie_checker_passes_and_missing_structure():
    A = load_fixture("TR")
    assert check_pre_lie_algebroid(A).overall
    assert check_pre_f(A).overall
    no_prelie = load_fixture("FM2")
    with pytest.raises(MissingStructure):
        no_prelie.prelie_of(no_prelie.basis(0), no_prelie.basis(1))


def test_anchor_leibniz_regression():
    for name in ("SS2", "TR", "ACT2"):
        A = load_fixture(name)
        assert check_anchor_leibniz(A).overall


def test_shape_validation():
    zero = RatFunc.zero(1)
    with pytest.raises(ShapeError):
        AlgebroidPresentation(base_vars=["u"], rank=2, product=[[[zero]]])
    with pytest.raises(ShapeError):
        AlgebroidPresentation(base_vars=["u"], rank=0, product=[])


def test_identity_consequences():
    A = load_fixture("SS2")
    e = A.identity
    for i in range(A.rank):
        assert A.multiply(e, A.basis(i)) == A.basis(i)
    # identity times arbitrary section with function coefficients
    X = Section([RatFunc.var(2, 0) ** 2, RatFunc.var(2, 1) + RatFunc.one(2)])
    assert A.multiply(e, X) == X
