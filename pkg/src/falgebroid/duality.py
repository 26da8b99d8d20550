"""Eventual identities, duality and Nijenhuis deformations.

An eventual identity generates a second compatible product X·Y·ℰ; the
map sending a structure to its dual is an involution once the inverse
section and the square of the inverse are taken as new identity data.
Nijenhuis operators deform each structure into another of the same
kind; both mechanisms produce the same product when N is multiplication
by an eventual identity.
"""

from __future__ import annotations

from dataclasses import dataclass

from .algebroid import AlgebroidPresentation, Section
from .errors import MissingStructure, NotEventual, NotNijenhuis, ShapeError
from .linalg import invert
from .report import Report
from .ring import RatFunc


class BundleMap:
    """Endomorphism of the frame module, given by an r x r matrix.

    matrix[k][j] is the E_k-component of the image of E_j.
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        self.matrix = [list(row) for row in matrix]
        r = len(self.matrix)
        if any(len(row) != r for row in self.matrix):
            raise ShapeError("bundle map matrix must be square")

    @staticmethod
    def identity(rank: int, nvars: int) -> "BundleMap":
        one = RatFunc.one(nvars)
        zero = RatFunc.zero(nvars)
        return BundleMap([[one if k == j else zero for j in range(rank)] for k in range(rank)])

    @property
    def rank(self) -> int:
        return len(self.matrix)

    def apply(self, X: Section) -> Section:
        if X.rank != self.rank:
            raise ShapeError("section rank mismatch")
        nvars = X.components[0].nvars
        out = []
        for k in range(self.rank):
            acc = RatFunc.zero(nvars)
            for j, xj in enumerate(X.components):
                if not xj.is_zero():
                    acc = acc + self.matrix[k][j] * xj
            out.append(acc)
        return Section(out)

    def compose(self, other: "BundleMap") -> "BundleMap":
        """Matrix product self ∘ other."""
        r = self.rank
        nvars = self.matrix[0][0].nvars
        zero = RatFunc.zero(nvars)
        out = [[zero for _ in range(r)] for _ in range(r)]
        for k in range(r):
            for j in range(r):
                acc = zero
                for t in range(r):
                    acc = acc + self.matrix[k][t] * other.matrix[t][j]
                out[k][j] = acc
        return BundleMap(out)

    def __eq__(self, other) -> bool:
        return isinstance(other, BundleMap) and self.matrix == other.matrix


@dataclass
class DualityCertificate:
    original: AlgebroidPresentation
    ev_identity: Section
    inverse: Section
    dual: AlgebroidPresentation
    e_dagger: Section


def _require_identity(A: AlgebroidPresentation) -> Section:
    if A.identity is None:
        raise MissingStructure("identity")
    return A.identity


def is_pseudo_eventual_identity(A: AlgebroidPresentation, E: Section) -> Report:
    """Check P_ℰ(X,Y) = [e,ℰ]·X·Y on basis pairs.

    With ℰ fixed, both sides are function-bilinear in (X,Y), so the
    frame pairs span all cases.
    """
    e = _require_identity(A)
    report = Report("pseudo-eventual identity")
    factor = A.bracket_of(e, E)
    for i in range(A.rank):
        Ei = A.basis(i)
        lhs_i = A.multiply(factor, Ei)
        for j in range(A.rank):
            Ej = A.basis(j)
            res = A.p_tensor(E, Ei, Ej) - A.multiply(lhs_i, Ej)
            report.add(
                "pseudo-eventual-identity",
                f"({A.basis_name(i)},{A.basis_name(j)})",
                res.is_zero(),
                A.fmt(res),
            )
    return report


def is_pre_f_eventual_identity(A: AlgebroidPresentation, E: Section) -> Report:
    """Check the two pre-F eventual-identity relations on basis pairs.

    Psi(ℰ,X,Y) = -(ℰ*e)·X·Y, and (X*ℰ)·Y symmetric in X,Y. For a
    PreLie-Com structure the first relation is automatic, but checking
    it costs little and guards mutated inputs.
    """
    e = _require_identity(A)
    report = Report("pre-F eventual identity")
    factor = A.prelie_of(E, e)
    for i in range(A.rank):
        Ei = A.basis(i)
        fi = A.multiply(factor, Ei)
        pi = A.prelie_of(Ei, E)
        for j in range(A.rank):
            Ej = A.basis(j)
            res1 = A.psi(E, Ei, Ej) + A.multiply(fi, Ej)
            report.add(
                "psi-eventual-relation",
                f"({A.basis_name(i)},{A.basis_name(j)})",
                res1.is_zero(),
                A.fmt(res1),
            )
            res2 = A.multiply(pi, Ej) - A.multiply(A.prelie_of(Ej, E), Ei)
            report.add(
                "prelie-eventual-symmetry",
                f"({A.basis_name(i)},{A.basis_name(j)})",
                res2.is_zero(),
                A.fmt(res2),
            )
    return report


def multiplication_matrix(A: AlgebroidPresentation, E: Section) -> BundleMap:
    """Matrix of left multiplication by E in the frame."""
    r, n = A.rank, A.n
    matrix = []
    for k in range(r):
        row = []
        for j in range(r):
            acc = RatFunc.zero(n)
            for i, ei in enumerate(E.components):
                if not ei.is_zero():
                    acc = acc + ei * A.product[k][i][j]
            row.append(acc)
        matrix.append(row)
    return BundleMap(matrix)


def invert_section(A: AlgebroidPresentation, E: Section) -> Section:
    """Section ℰ^{-1} with ℰ·ℰ^{-1} = e; NotInvertible if none exists."""
    e = _require_identity(A)
    n = A.n
    M = multiplication_matrix(A, E).matrix
    Minv = invert(M, RatFunc.zero(n), RatFunc.one(n))
    out = []
    for k in range(A.rank):
        acc = RatFunc.zero(n)
        for j in range(A.rank):
            acc = acc + Minv[k][j] * e.components[j]
        out.append(acc)
    return Section(out)


def _dual_product(A: AlgebroidPresentation, E: Section):
    r = A.rank
    tensor = []
    cols = [[A.multiply(A.multiply(A.basis(i), A.basis(j)), E) for j in range(r)] for i in range(r)]
    for k in range(r):
        tensor.append([[cols[i][j].components[k] for j in range(r)] for i in range(r)])
    return tensor


def dubrovin_dual(A: AlgebroidPresentation, E: Section) -> DualityCertificate:
    """Dual presentation with product X·Y·ℰ, same bracket and anchor."""
    report = is_pseudo_eventual_identity(A, E)
    if not report.overall:
        fail = report.failures()[0]
        raise NotEventual(f"{fail.instance}: {fail.witness}")
    inverse = invert_section(A, E)
    dual = A.with_structures(product=_dual_product(A, E), identity=inverse)
    e_dagger = A.multiply(inverse, inverse)
    return DualityCertificate(A, E, dual=dual, inverse=inverse, e_dagger=e_dagger)


def pre_f_dual(A: AlgebroidPresentation, E: Section) -> DualityCertificate:
    """Pre-F dual: keeps the pre-Lie operation and anchor, swaps the product."""
    report = is_pre_f_eventual_identity(A, E)
    if not report.overall:
        fail = report.failures()[0]
        raise NotEventual(f"{fail.instance}: {fail.witness}")
    inverse = invert_section(A, E)
    dual = A.with_structures(product=_dual_product(A, E), identity=inverse)
    e_dagger = A.multiply(inverse, inverse)
    return DualityCertificate(A, E, dual=dual, inverse=inverse, e_dagger=e_dagger)


def verify_certificate(cert: DualityCertificate, pre_f: bool = False) -> Report:
    """Involution and identity laws for a duality certificate."""
    A, dual = cert.original, cert.dual
    report = Report("duality certificate")
    res = A.multiply(cert.ev_identity, cert.inverse) - _require_identity(A)
    report.add("inverse-law", "ev·inverse = e", res.is_zero(), A.fmt(res))
    res = cert.e_dagger - A.multiply(cert.inverse, cert.inverse)
    report.add("e-dagger-law", "e† = inverse²", res.is_zero(), A.fmt(res))

    from .algebroid import find_identity, tensors_equal

    found = find_identity(dual)
    ok = found is not None and (found - cert.inverse).is_zero()
    report.add(
        "dual-identity",
        "find_identity(dual) = inverse",
        ok,
        None if ok else (dual.fmt(found) if found is not None else "none"),
    )
    checker = is_pre_f_eventual_identity if pre_f else is_pseudo_eventual_identity
    back = checker(dual, cert.e_dagger)
    report.add("e-dagger-eventual", "e† eventual on dual", back.overall,
               None if back.overall else back.failures()[0].witness)
    double = _dual_product(dual, cert.e_dagger)
    report.add(
        "involution",
        "dual twice at e† = original product",
        tensors_equal(double, A.product),
        None,
    )
    return report


def ev_identity_closure(A: AlgebroidPresentation, E1: Section, E2: Section, mode: str | None = None) -> Report:
    """Products (and brackets, in the F case) of eventual identities stay eventual."""
    if mode is None:
        mode = "pre_f" if A.bracket is None else "f"
    if mode not in ("f", "pre_f"):
        raise ShapeError(f"unknown closure mode {mode!r}")
    checker = is_pseudo_eventual_identity if mode == "f" else is_pre_f_eventual_identity
    report = Report("eventual identity closure")
    for name, E in (("E1", E1), ("E2", E2)):
        sub = checker(A, E)
        report.add("premise", f"{name} eventual", sub.overall,
                   None if sub.overall else sub.failures()[0].witness)
    if not report.overall:
        fail = report.failures()[0]
        raise NotEventual(f"{fail.instance}: {fail.witness}")
    prod = A.multiply(E1, E2)
    sub = checker(A, prod)
    report.add("product-closure", f"E1·E2 = [{A.fmt(prod)}]", sub.overall,
               None if sub.overall else sub.failures()[0].witness)
    if mode == "f":
        br = A.bracket_of(E1, E2)
        sub = checker(A, br)
        report.add("bracket-closure", f"[E1,E2] = [{A.fmt(br)}]", sub.overall,
                   None if sub.overall else sub.failures()[0].witness)
    return report


# -- Nijenhuis operators --------------------------------------------------

_MODES = ("comm", "lie", "prelie", "f", "pre_f")


def _torsion_pairs(A: AlgebroidPresentation, differential: bool):
    from .algebroid import _basis_args, _scaled_args

    basis = _basis_args(A)
    firsts = basis + _scaled_args(A) if differential else basis
    seconds = basis + _scaled_args(A) if differential else basis
    return firsts, seconds


def _check_torsion(A: AlgebroidPresentation, N: BundleMap, op, law: str, report: Report, differential: bool):
    firsts, seconds = _torsion_pairs(A, differential)
    for ni, X in firsts:
        NX = N.apply(X)
        for nj, Y in seconds:
            NY = N.apply(Y)
            res = op(NX, NY) - N.apply(op(NX, Y) + op(X, NY) - N.apply(op(X, Y)))
            report.add(law, f"({ni},{nj})", res.is_zero(), A.fmt(res))


def is_nijenhuis(A: AlgebroidPresentation, N: BundleMap, on: str) -> Report:
    """Torsion identity for the requested mode.

    The commutative case is tensorial, so basis pairs suffice; bracket
    and pre-Lie torsion are differential and also run with arguments
    scaled by each base variable.
    """
    if on not in _MODES:
        raise ShapeError(f"unknown Nijenhuis mode {on!r}")
    if N.rank != A.rank:
        raise ShapeError("bundle map rank mismatch")
    report = Report(f"Nijenhuis operator ({on})")
    if on in ("comm", "f", "pre_f"):
        _check_torsion(A, N, A.multiply, "nijenhuis-comm", report, differential=False)
    if on in ("lie", "f"):
        if A.bracket is None:
            raise MissingStructure("bracket")
        _check_torsion(A, N, A.bracket_of, "nijenhuis-lie", report, differential=True)
    if on in ("prelie", "pre_f"):
        if A.prelie is None:
            raise MissingStructure("prelie")
        _check_torsion(A, N, A.prelie_of, "nijenhuis-prelie", report, differential=True)
    return report


def _deformed_tensor(A: AlgebroidPresentation, N: BundleMap, op):
    r = A.rank
    vals = []
    for i in range(r):
        Ei = A.basis(i)
        NEi = N.apply(Ei)
        row = []
        for j in range(r):
            Ej = A.basis(j)
            NEj = N.apply(Ej)
            row.append(op(NEi, Ej) + op(Ei, NEj) - N.apply(op(Ei, Ej)))
        vals.append(row)
    return [[[vals[i][j].components[k] for j in range(r)] for i in range(r)] for k in range(r)]


def deform_by_nijenhuis(A: AlgebroidPresentation, N: BundleMap, on: str | None = None) -> AlgebroidPresentation:
    """Deformed presentation with structures twisted by N and anchor a∘N."""
    if on is None:
        if A.bracket is not None:
            on = "f"
        elif A.prelie is not None:
            on = "pre_f"
        else:
            on = "comm"
    report = is_nijenhuis(A, N, on)
    if not report.overall:
        fail = report.failures()[0]
        raise NotNijenhuis(f"{fail.law} {fail.instance}: {fail.witness}")

    product = _deformed_tensor(A, N, A.multiply)
    bracket = None
    prelie = None
    if on in ("lie", "f") and A.bracket is not None:
        bracket = _deformed_tensor(A, N, A.bracket_of)
    if on in ("prelie", "pre_f") and A.prelie is not None:
        prelie = _deformed_tensor(A, N, A.prelie_of)
    anchor = None
    if A.anchor is not None:
        n = A.n
        anchor = []
        for i in range(A.rank):
            row = [RatFunc.zero(n) for _ in range(n)]
            for k in range(A.rank):
                coeff = N.matrix[k][i]
                if not coeff.is_zero():
                    for mu in range(n):
                        row[mu] = row[mu] + coeff * A.anchor[k][mu]
            anchor.append(row)
    return AlgebroidPresentation(
        base_vars=A.base_vars,
        rank=A.rank,
        product=product,
        bracket=bracket,
        prelie=prelie,
        anchor=anchor,
        identity=None,
    )


def nijenhuis_from_eventual(A: AlgebroidPresentation, E: Section) -> BundleMap:
    """Multiplication by a verified eventual identity, as a bundle map."""
    if A.bracket is not None:
        report = is_pseudo_eventual_identity(A, E)
    else:
        report = is_pre_f_eventual_identity(A, E)
    if not report.overall:
        fail = report.failures()[0]
        raise NotEventual(f"{fail.instance}: {fail.witness}")
    return multiplication_matrix(A, E)
