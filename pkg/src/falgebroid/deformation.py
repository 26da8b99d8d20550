"""Deformation complex of pre-Lie algebroids and formal deformations.

Cochains are multiderivations: multilinear in all but the last slot,
with a vector-field-valued symbol governing a Leibniz rule in the last
slot. The coboundary uses the pre-Lie operation and its commutator
bracket. A commutative associative algebroid is treated as a pre-Lie
algebroid with zero anchor, which makes the coboundary of any cochain
have vanishing symbol; the anchor data of a deformation therefore lives
entirely in the symbols of the deforming cochains.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct

from .algebroid import AlgebroidPresentation, Section
from .constructions import FiniteAlgebra
from .errors import (
    ArityMismatch,
    BaseNotPoint,
    FalgError,
    MissingStructure,
    NotADeformation,
    ObstructionNonzero,
    ShapeError,
)
from .linalg import independent_from, nullspace, rank as mat_rank, solve
from .report import Report
from .ring import RatFunc, VectorField, vf_bracket


class MultiDer:
    """Multiderivation of fixed degree in a fixed frame.

    D maps every index tuple of length ``degree`` to a Section; sigma
    maps every index tuple of length ``degree - 1`` to a VectorField.
    Antisymmetry in the leading slots is the caller's responsibility
    when building by hand; the derived constructors preserve it.
    """

    __slots__ = ("degree", "rank", "nvars", "D", "sigma")

    def __init__(self, degree: int, rank: int, nvars: int, D: dict, sigma: dict):
        if degree < 1:
            raise ShapeError("multiderivation degree must be >= 1")
        self.degree = degree
        self.rank = rank
        self.nvars = nvars
        self.D = D
        self.sigma = sigma

    @staticmethod
    def zero(degree: int, rank: int, nvars: int) -> "MultiDer":
        zs = Section.zero(rank, nvars)
        zv = VectorField.zero(nvars)
        D = {idx: zs for idx in iproduct(range(rank), repeat=degree)}
        sigma = {idx: zv for idx in iproduct(range(rank), repeat=degree - 1)}
        return MultiDer(degree, rank, nvars, D, sigma)

    @staticmethod
    def build(degree: int, rank: int, nvars: int, d_fn, sigma_fn=None) -> "MultiDer":
        """Construct from functions on index tuples."""
        D = {idx: d_fn(idx) for idx in iproduct(range(rank), repeat=degree)}
        zv = VectorField.zero(nvars)
        sigma = {
            idx: (sigma_fn(idx) if sigma_fn is not None else zv)
            for idx in iproduct(range(rank), repeat=degree - 1)
        }
        return MultiDer(degree, rank, nvars, D, sigma)

    def is_zero(self) -> bool:
        return all(s.is_zero() for s in self.D.values()) and all(
            v.is_zero() for v in self.sigma.values()
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MultiDer)
            and self.degree == other.degree
            and self.D == other.D
            and self.sigma == other.sigma
        )

    def __add__(self, other: "MultiDer") -> "MultiDer":
        if self.degree != other.degree:
            raise ArityMismatch("degree mismatch")
        return MultiDer(
            self.degree,
            self.rank,
            self.nvars,
            {idx: s + other.D[idx] for idx, s in self.D.items()},
            {idx: v + other.sigma[idx] for idx, v in self.sigma.items()},
        )

    def __sub__(self, other: "MultiDer") -> "MultiDer":
        if self.degree != other.degree:
            raise ArityMismatch("degree mismatch")
        return MultiDer(
            self.degree,
            self.rank,
            self.nvars,
            {idx: s - other.D[idx] for idx, s in self.D.items()},
            {idx: v - other.sigma[idx] for idx, v in self.sigma.items()},
        )

    def scale(self, c) -> "MultiDer":
        f = RatFunc.const(self.nvars, c)
        return MultiDer(
            self.degree,
            self.rank,
            self.nvars,
            {idx: s.scale_fn(f) for idx, s in self.D.items()},
            {idx: v.scale_fn(f) for idx, v in self.sigma.items()},
        )

    def _lead_terms(self, lead: list[Section]):
        """Nonzero coefficient products over leading index tuples."""
        terms = [((), RatFunc.one(self.nvars))]
        for s in lead:
            new = []
            for idx, w in terms:
                for i, c in enumerate(s.components):
                    if not c.is_zero():
                        new.append((idx + (i,), w * c))
            terms = new
        return terms

    def eval(self, args: list[Section]) -> Section:
        """Multilinear in the leading slots, sigma-Leibniz in the last."""
        if len(args) != self.degree:
            raise ArityMismatch(f"expected {self.degree} arguments, got {len(args)}")
        last = args[-1]
        out = [RatFunc.zero(self.nvars) for _ in range(self.rank)]
        for idx, w in self._lead_terms(list(args[:-1])):
            for i, c in enumerate(last.components):
                if c.is_zero():
                    continue
                sec = self.D[idx + (i,)]
                wc = w * c
                for k, v in enumerate(sec.components):
                    if not v.is_zero():
                        out[k] = out[k] + wc * v
            vf = self.sigma[idx]
            if not vf.is_zero():
                for k in range(self.rank):
                    d = vf.apply(last.components[k])
                    if not d.is_zero():
                        out[k] = out[k] + w * d
        return Section(out)

    def sigma_eval(self, args: list[Section]) -> VectorField:
        """Function-multilinear extension of the symbol."""
        if len(args) != self.degree - 1:
            raise ArityMismatch(f"symbol expects {self.degree - 1} arguments")
        out = VectorField.zero(self.nvars)
        for idx, w in self._lead_terms(list(args)):
            vf = self.sigma[idx]
            if not vf.is_zero():
                out = out + vf.scale_fn(w)
        return out


def multider_eval(omega: MultiDer, args: list[Section]) -> Section:
    return omega.eval(list(args))


def as_prelie(A: AlgebroidPresentation) -> AlgebroidPresentation:
    """View a commutative associative algebroid as pre-Lie with zero anchor."""
    if A.prelie is not None:
        return A
    zero = RatFunc.zero(A.n)
    return A.with_structures(
        prelie=A.product, anchor=[[zero] * A.n for _ in range(A.rank)]
    )


def _prelie_bracket(A: AlgebroidPresentation, X: Section, Y: Section) -> Section:
    return A.prelie_of(X, Y) - A.prelie_of(Y, X)


def d_def_eval(A: AlgebroidPresentation, omega: MultiDer, args: list[Section]) -> Section:
    """The coboundary formula evaluated directly on n+1 section arguments."""
    n = omega.degree
    if len(args) != n + 1:
        raise ArityMismatch(f"expected {n + 1} arguments")
    last = args[n]
    total = Section.zero(omega.rank, omega.nvars)
    for i in range(1, n + 1):
        sgn = 1 if i % 2 == 1 else -1
        rest = args[:i - 1] + args[i:]
        head = args[:i - 1] + args[i:n]
        t1 = A.prelie_of(args[i - 1], omega.eval(rest))
        t2 = A.prelie_of(omega.eval(head + [args[i - 1]]), last)
        t3 = omega.eval(head + [A.prelie_of(args[i - 1], last)])
        term = t1 + t2 - t3
        total = total + term if sgn == 1 else total - term
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            sgn = 1 if (i + j) % 2 == 0 else -1
            others = [args[t] for t in range(n + 1) if t not in (i - 1, j - 1)]
            term = omega.eval([_prelie_bracket(A, args[i - 1], args[j - 1])] + others)
            total = total + term if sgn == 1 else total - term
    return total


def d_def_sigma_eval(A: AlgebroidPresentation, omega: MultiDer, args: list[Section]) -> VectorField:
    """Symbol of the coboundary evaluated on n section arguments."""
    n = omega.degree
    if len(args) != n:
        raise ArityMismatch(f"symbol expects {n} arguments")
    total = VectorField.zero(omega.nvars)
    for i in range(1, n + 1):
        sgn = 1 if i % 2 == 1 else -1
        rest = args[:i - 1] + args[i:]
        t1 = vf_bracket(A.anchor_of(args[i - 1]), omega.sigma_eval(rest))
        t2 = A.anchor_of(omega.eval(rest + [args[i - 1]]))
        term = t1 + t2
        total = total + term if sgn == 1 else total - term
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            sgn = 1 if (i + j) % 2 == 0 else -1
            others = [args[t] for t in range(n) if t not in (i - 1, j - 1)]
            term = omega.sigma_eval([_prelie_bracket(A, args[i - 1], args[j - 1])] + others)
            total = total + term if sgn == 1 else total - term
    return total


def d_def(A: AlgebroidPresentation, omega: MultiDer) -> MultiDer:
    """Coboundary of a cochain on a pre-Lie algebroid presentation."""
    if A.prelie is None:
        raise MissingStructure("prelie")
    r, nv = omega.rank, omega.nvars
    basis = [A.basis(i) for i in range(r)]
    return MultiDer.build(
        omega.degree + 1,
        r,
        nv,
        lambda idx: d_def_eval(A, omega, [basis[i] for i in idx]),
        lambda idx: d_def_sigma_eval(A, omega, [basis[i] for i in idx]),
    )


# -- formal deformations --------------------------------------------------


@dataclass
class FormalDeformation:
    """Deformation of a commutative associative algebroid, stored to finite order.

    ``mus`` lists the degree-2 cochains mu_1..mu_n; mu_0 is the base
    product with zero symbol. ``formal`` asserts that all higher
    cochains vanish, which strengthens the order conditions checked.
    """

    base: AlgebroidPresentation
    mus: list[MultiDer] = field(default_factory=list)
    formal: bool = False

    @property
    def order(self) -> int:
        return len(self.mus)

    def mu(self, k: int) -> MultiDer | None:
        """The degree-2 cochain at order k, or None beyond the stored order."""
        if k == 0:
            return self.mu0()
        if k <= self.order:
            return self.mus[k - 1]
        return None

    def mu0(self) -> MultiDer:
        A = self.base
        return MultiDer.build(
            2, A.rank, A.n, lambda idx: A.multiply(A.basis(idx[0]), A.basis(idx[1]))
        )

    def __post_init__(self):
        for m in self.mus:
            if m.degree != 2 or m.rank != self.base.rank or m.nvars != self.base.n:
                raise ShapeError("deformation cochains must be degree-2 in the base frame")


def _order_k_residual(deform: FormalDeformation, k: int, X: Section, Y: Section, Z: Section) -> Section:
    """Order-k associator-symmetry residual of the deformed product."""
    A = deform.base
    total = Section.zero(A.rank, A.n)
    for i in range(k + 1):
        mi = deform.mu(i)
        mj = deform.mu(k - i)
        if mi is None or mj is None:
            continue
        term = (
            mi.eval([mj.eval([X, Y]), Z])
            - mi.eval([X, mj.eval([Y, Z])])
            - mi.eval([mj.eval([Y, X]), Z])
            + mi.eval([Y, mj.eval([X, Z])])
        )
        total = total + term
    return total


def check_n_deformation(deform: FormalDeformation) -> Report:
    """Order-by-order pre-Lie conditions for the deformed product.

    Checked on basis triples and, over a positive-dimensional base, on
    triples with each slot scaled by each base variable; the scaled
    instances exercise the symbol (anchor) compatibilities. With the
    formal flag, orders up to 2n are checked since all higher cochains
    vanish and conditions beyond 2n are then vacuous.
    """
    A = deform.base
    report = Report(f"pre-Lie {deform.order}-deformation")
    top = 2 * deform.order if deform.formal else deform.order
    basis = [(A.basis_name(i), A.basis(i)) for i in range(A.rank)]
    scaled = [
        (f"{A.base_vars[m]}*{A.basis_name(i)}", A.scaled_basis(m, i))
        for m in range(A.n)
        for i in range(A.rank)
    ]
    for k in range(top + 1):
        triples = [(basis, basis, basis)]
        if A.n > 0:
            triples += [(scaled, basis, basis), (basis, scaled, basis), (basis, basis, scaled)]
        for args1, args2, args3 in triples:
            for ni, X in args1:
                for nj, Y in args2:
                    for nk, Z in args3:
                        res = _order_k_residual(deform, k, X, Y, Z)
                        report.add(
                            "pre-lie-rule",
                            f"order {k} ({ni},{nj},{nk})",
                            res.is_zero(),
                            A.fmt(res),
                        )
    return report


def semiclassical_limit(deform: FormalDeformation) -> AlgebroidPresentation:
    """Structure extracted from the first-order cochain.

    The bracket is the commutator of mu_1 and the anchor is its symbol;
    the result carries the undeformed product.
    """
    if deform.order < 1:
        raise NotADeformation("semi-classical limit needs order >= 1")
    check = check_n_deformation(deform)
    if not check.overall:
        fail = check.failures()[0]
        raise NotADeformation(f"{fail.instance}: {fail.witness}")
    A = deform.base
    mu1 = deform.mus[0]
    r = A.rank
    vals = [
        [mu1.eval([A.basis(i), A.basis(j)]) - mu1.eval([A.basis(j), A.basis(i)]) for j in range(r)]
        for i in range(r)
    ]
    bracket = [[[vals[i][j].components[k] for j in range(r)] for i in range(r)] for k in range(r)]
    anchor = [list(mu1.sigma[(i,)].comps) for i in range(r)]
    return AlgebroidPresentation(
        base_vars=A.base_vars,
        rank=r,
        product=A.product,
        bracket=bracket,
        anchor=anchor,
        identity=A.identity,
    )


def obstruction(deform: FormalDeformation, verify: bool = True) -> MultiDer:
    """Degree-3 obstruction cochain to extending past the stored order.

    When ``verify`` is set, asserts that the obstruction is closed for
    the coboundary of the base viewed as pre-Lie.
    """
    A = deform.base
    n = deform.order
    r = A.rank
    basis = [A.basis(i) for i in range(r)]

    def theta_val(X: Section, Y: Section, Z: Section) -> Section:
        total = Section.zero(r, A.n)
        for i in range(1, n + 1):
            j = n + 1 - i
            if j < 1 or j > n:
                continue
            mi, mj = deform.mus[i - 1], deform.mus[j - 1]
            total = total + (
                mi.eval([mj.eval([X, Y]), Z])
                - mi.eval([X, mj.eval([Y, Z])])
                - mi.eval([mj.eval([Y, X]), Z])
                + mi.eval([Y, mj.eval([X, Z])])
            )
        return total

    def theta_sigma(X: Section, Y: Section) -> VectorField:
        total = VectorField.zero(A.n)
        for i in range(1, n + 1):
            j = n + 1 - i
            if j < 1 or j > n:
                continue
            mi, mj = deform.mus[i - 1], deform.mus[j - 1]
            total = total + mi.sigma_eval([mj.eval([X, Y]) - mj.eval([Y, X])])
            total = total - vf_bracket(mi.sigma_eval([X]), mj.sigma_eval([Y]))
        return total

    theta = MultiDer.build(
        3,
        r,
        A.n,
        lambda idx: theta_val(basis[idx[0]], basis[idx[1]], basis[idx[2]]),
        lambda idx: theta_sigma(basis[idx[0]], basis[idx[1]]),
    )
    if verify:
        closed = d_def(as_prelie(A), theta)
        if not closed.is_zero():
            raise FalgError("obstruction cochain is not closed; deformation data invalid")
    return theta


def extend(deform: FormalDeformation, psi: MultiDer) -> FormalDeformation:
    """Extend one order using psi as the next cochain.

    Succeeds exactly when the obstruction equals the coboundary of psi,
    including the symbol part: the coboundary over a commutative base
    has zero symbol, so the obstruction's symbol must vanish outright.
    """
    if psi.degree != 2:
        raise ShapeError("extension cochain must have degree 2")
    A = deform.base
    theta = obstruction(deform, verify=False)
    residual = theta - d_def(as_prelie(A), psi)
    if not residual.is_zero():
        bad = next(
            (A.fmt(s) for s in residual.D.values() if not s.is_zero()),
            next((v.format(A.base_vars) for v in residual.sigma.values() if not v.is_zero()), "0"),
        )
        raise ObstructionNonzero(bad)
    extended = FormalDeformation(A, deform.mus + [psi], formal=deform.formal)
    check = check_n_deformation(extended)
    if not check.overall:
        fail = check.failures()[0]
        raise NotADeformation(f"{fail.instance}: {fail.witness}")
    return extended


# -- cohomology over a point ----------------------------------------------


def _der_index_tuples(r: int, degree: int):
    """Coordinate index tuples: strictly increasing leading slots, free last slot and output."""
    if degree == 1:
        heads = [()]
    else:
        heads = []

        def rec(start, depth, acc):
            if depth == 0:
                heads.append(tuple(acc))
                return
            for t in range(start, r):
                rec(t + 1, depth - 1, acc + [t])

        rec(0, degree - 1, [])
    return [(head, last, k) for head in heads for last in range(r) for k in range(r)]


def _basis_multider(r: int, degree: int, head, last: int, k: int) -> MultiDer:
    """Point cochain supported on one antisymmetry orbit."""
    zero = Section.zero(r, 0)
    md = MultiDer.zero(degree, r, 0)
    D = dict(md.D)
    if degree == 1:
        D[(last,)] = Section.basis(r, 0, k)
    else:
        for perm, sign in _signed_permutations(head):
            cur = D[perm + (last,)]
            delta = Section.basis(r, 0, k)
            if sign < 0:
                delta = -delta
            D[perm + (last,)] = cur + delta
    return MultiDer(degree, r, 0, D, md.sigma)


def _signed_permutations(head):
    from itertools import permutations

    base = list(head)
    out = []
    for perm in permutations(range(len(base))):
        inv = sum(1 for a in range(len(perm)) for b in range(a + 1, len(perm)) if perm[a] > perm[b])
        out.append((tuple(base[p] for p in perm), -1 if inv % 2 else 1))
    return out


def _coords(md: MultiDer, r: int, degree: int) -> list[Fraction]:
    vec = []
    for head, last, k in _der_index_tuples(r, degree):
        c = md.D[head + (last,)].components[k]
        vec.append(c.num.constant_value() / c.den.constant_value())
    return vec


def _d_matrix(A: AlgebroidPresentation, degree: int) -> list[list[Fraction]]:
    """Matrix of the coboundary from degree to degree+1, in coordinate columns."""
    r = A.rank
    src = _der_index_tuples(r, degree)
    dst = _der_index_tuples(r, degree + 1)
    cols = []
    for head, last, k in src:
        md = _basis_multider(r, degree, head, last, k)
        cols.append(_coords(d_def(A, md), r, degree + 1))
    return [[cols[j][i] for j in range(len(src))] for i in range(len(dst))]


@dataclass
class CohomologyResult:
    degree: int
    dim: int
    cocycle_dim: int
    coboundary_dim: int
    representatives: list[MultiDer]


def _vector_to_multider(vec, r: int, degree: int) -> MultiDer:
    md = MultiDer.zero(degree, r, 0)
    for coeff, (head, last, k) in zip(vec, _der_index_tuples(r, degree)):
        if coeff == 0:
            continue
        md = md + _basis_multider(r, degree, head, last, k).scale(coeff)
    return md


def cohomology_point(algebra: FiniteAlgebra, degree: int) -> CohomologyResult:
    """Deformation cohomology of an algebra over a point by rank-nullity."""
    if degree not in (2, 3):
        raise ShapeError("cohomology degree must be 2 or 3")
    A = as_prelie(algebra.to_presentation())
    if A.n != 0:
        raise BaseNotPoint("cohomology solver works over a point only")
    r = A.rank
    zero, one = Fraction(0), Fraction(1)
    d_in = _d_matrix(A, degree - 1)
    d_out = _d_matrix(A, degree)
    # composition must vanish: rows of d_out times columns of d_in
    ncols = len(d_in[0]) if d_in else 0
    for i in range(len(d_out)):
        for j in range(ncols):
            acc = zero
            for t in range(len(d_in)):
                acc += d_out[i][t] * d_in[t][j]
            if acc != 0:
                raise FalgError("coboundary composition is nonzero; internal error")
    image_dim = mat_rank(d_in, zero, one) if d_in and d_in[0] else 0
    src_dim = len(_der_index_tuples(r, degree))
    if d_out:
        kernel = nullspace(d_out, zero, one)
    else:
        # the target space is zero-dimensional, so every cochain is closed
        kernel = [[one if i == j else zero for i in range(src_dim)] for j in range(src_dim)]
    cocycle_dim = len(kernel)
    image_cols = []
    if d_in and d_in[0]:
        ncols_in = len(d_in[0])
        image_cols = [[d_in[i][j] for i in range(len(d_in))] for j in range(ncols_in)]
    reps_vecs = independent_from(image_cols, kernel, zero, one)
    reps = [_vector_to_multider(v, r, degree) for v in reps_vecs]
    return CohomologyResult(
        degree=degree,
        dim=cocycle_dim - image_dim,
        cocycle_dim=cocycle_dim,
        coboundary_dim=image_dim,
        representatives=reps,
    )


def equivalence_check(
    A: AlgebroidPresentation,
    mu1: MultiDer,
    mu1_prime: MultiDer,
    phi: MultiDer | None = None,
) -> Report:
    """Decide whether two infinitesimal deformations differ by a coboundary.

    With a witness phi, verifies mu1 - mu1' = d phi directly. Without
    one, solves the linear system over a point. The symbol condition is
    checked independently since coboundaries over a commutative base
    carry no symbol.
    """
    P = as_prelie(A)
    report = Report("deformation equivalence")
    for name, m in (("mu1", mu1), ("mu1'", mu1_prime)):
        closed = d_def(P, m)
        ok = closed.is_zero()
        report.add("cocycle", name, ok, None if ok else "coboundary of candidate is nonzero")
    sig_ok = all(
        (mu1.sigma[idx] - mu1_prime.sigma[idx]).is_zero() for idx in mu1.sigma
    )
    report.add(
        "symbol-match",
        "sigma(mu1) = sigma(mu1')",
        sig_ok,
        None if sig_ok else "symbols differ",
    )
    diff = mu1 - mu1_prime
    if phi is not None:
        residual = diff - d_def(P, phi)
        ok = residual.is_zero()
        witness = None
        if not ok:
            witness = next(A.fmt(s) for s in residual.D.values() if not s.is_zero())
        report.add("coboundary-witness", "mu1 - mu1' = d(phi)", ok, witness)
        return report
    if A.n != 0:
        raise BaseNotPoint("solving for an equivalence needs a point base; supply phi")
    r = A.rank
    zero, one = Fraction(0), Fraction(1)
    d1 = _d_matrix(P, 1)
    target = _coords(diff, r, 2)
    sol = solve(d1, target, zero, one)
    ok = sol is not None
    witness = None
    if not ok:
        nz = next((A.fmt(s) for s in diff.D.values() if not s.is_zero()), "0")
        witness = nz
    report.add("coboundary-solve", "mu1 - mu1' in image of d", ok, witness)
    return report
