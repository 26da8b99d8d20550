"""Algebroid presentations and structure verification.

A presentation fixes a global frame E_1..E_r over a polynomial base with
variables u^1..u^n. The product, bracket and pre-Lie operation are given
by structure tensors of rational functions; evaluation on general
sections expands the Leibniz rules through the anchor, so differential
identities can be verified exactly on symbolic arguments.
"""

from __future__ import annotations

from .errors import MissingStructure, ShapeError
from .linalg import solve
from .report import Report
from .ring import RatFunc, VectorField

Tensor = list  # rank x rank x rank nested lists of RatFunc, output-index major


class Section:
    """Element of the free module spanned by the frame, r components."""

    __slots__ = ("components",)

    def __init__(self, components):
        self.components = tuple(components)

    @staticmethod
    def zero(rank: int, nvars: int) -> "Section":
        return Section(RatFunc.zero(nvars) for _ in range(rank))

    @staticmethod
    def basis(rank: int, nvars: int, i: int) -> "Section":
        return Section(
            RatFunc.const(nvars, 1) if j == i else RatFunc.zero(nvars) for j in range(rank)
        )

    @property
    def rank(self) -> int:
        return len(self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __eq__(self, other) -> bool:
        return isinstance(other, Section) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __add__(self, other: "Section") -> "Section":
        return Section(a + b for a, b in zip(self.components, other.components))

    def __sub__(self, other: "Section") -> "Section":
        return Section(a - b for a, b in zip(self.components, other.components))

    def __neg__(self) -> "Section":
        return Section(-a for a in self.components)

    def scale_fn(self, f: RatFunc) -> "Section":
        return Section(f * a for a in self.components)

    def format(self, names: list[str]) -> str:
        return ", ".join(c.format(names) for c in self.components)

    def __repr__(self):
        return f"Section({list(self.components)!r})"


def _index_tensor(tensor: Tensor, rank: int) -> dict:
    """Sparse lookup (i, j) -> list of (k, coefficient) with nonzero entries."""
    index: dict[tuple[int, int], list] = {}
    for k in range(rank):
        for i in range(rank):
            for j in range(rank):
                val = tensor[k][i][j]
                if not val.is_zero():
                    index.setdefault((i, j), []).append((k, val))
    return index


class AlgebroidPresentation:
    """Structure tensors of an algebroid in a fixed global frame.

    ``product``, ``bracket`` and ``prelie`` are rank³ nested lists with
    the output index first: product[k][i][j] is the E_k-component of
    E_i·E_j. ``anchor`` is a list of rank rows, row i holding the
    components of the vector field a(E_i). A zero-dimensional base
    (no variables) encodes an algebra over a point.
    """

    def __init__(self, base_vars, rank, product, bracket=None, prelie=None, anchor=None, identity=None):
        self.base_vars = list(base_vars)
        self.rank = rank
        self.product = product
        self.bracket = bracket
        self.prelie = prelie
        self.anchor = anchor
        self.identity = identity
        self._check_shapes()
        self._product_index = None
        self._bracket_index = None
        self._prelie_index = None
        self._anchor_vfs = None

    @property
    def n(self) -> int:
        return len(self.base_vars)

    def _check_shapes(self):
        r, n = self.rank, self.n
        if r < 1:
            raise ShapeError("rank must be at least 1")
        for name, tensor in (("product", self.product), ("bracket", self.bracket), ("prelie", self.prelie)):
            if tensor is None:
                continue
            if len(tensor) != r or any(len(m) != r or any(len(row) != r for row in m) for m in tensor):
                raise ShapeError(f"{name} tensor must be {r}x{r}x{r}")
        if self.anchor is not None:
            if len(self.anchor) != r or any(len(row) != n for row in self.anchor):
                raise ShapeError(f"anchor must be {r}x{n}")
        if self.identity is not None and self.identity.rank != r:
            raise ShapeError("identity section has wrong rank")

    def validate(self):
        """Check the mathematical invariants of the stored tensors."""
        r = self.rank
        for k in range(r):
            for i in range(r):
                for j in range(i):
                    if self.product[k][i][j] != self.product[k][j][i]:
                        raise ShapeError(f"product not symmetric at k={k}, i={i}, j={j}")
        if self.bracket is not None:
            for k in range(r):
                for i in range(r):
                    for j in range(i + 1):
                        if self.bracket[k][i][j] != -self.bracket[k][j][i]:
                            raise ShapeError(f"bracket not antisymmetric at k={k}, i={i}, j={j}")
        if self.bracket is not None and self.prelie is not None:
            for k in range(r):
                for i in range(r):
                    for j in range(r):
                        if self.bracket[k][i][j] != self.prelie[k][i][j] - self.prelie[k][j][i]:
                            raise ShapeError(f"bracket disagrees with prelie commutator at k={k}, i={i}, j={j}")
        if self.n == 0 and self.anchor is not None:
            pass  # anchor over a point is an r x 0 matrix, vacuously zero
        if self.identity is not None:
            for i in range(r):
                if self.multiply(self.identity, self.basis(i)) != self.basis(i):
                    raise ShapeError(f"declared identity does not fix E_{i + 1}")
        return self

    # -- frames and sections ------------------------------------------

    def basis(self, i: int) -> Section:
        return Section.basis(self.rank, self.n, i)

    def zero_section(self) -> Section:
        return Section.zero(self.rank, self.n)

    def var_fn(self, m: int) -> RatFunc:
        return RatFunc.var(self.n, m)

    def scaled_basis(self, m: int, i: int) -> Section:
        """Section u^m · E_i, the spanning test argument for differential laws."""
        return self.basis(i).scale_fn(self.var_fn(m))

    def anchor_vf(self, i: int) -> VectorField:
        if self._anchor_vfs is None:
            if self.anchor is None:
                self._anchor_vfs = [VectorField.zero(self.n) for _ in range(self.rank)]
            else:
                self._anchor_vfs = [VectorField(row) for row in self.anchor]
        return self._anchor_vfs[i]

    def anchor_of(self, X: Section) -> VectorField:
        out = VectorField.zero(self.n)
        for i, xi in enumerate(X.components):
            if not xi.is_zero():
                out = out + self.anchor_vf(i).scale_fn(xi)
        return out

    # -- evaluation ----------------------------------------------------

    def _contract(self, index: dict, X: Section, Y: Section) -> list[RatFunc]:
        out = [RatFunc.zero(self.n) for _ in range(self.rank)]
        for i, xi in enumerate(X.components):
            if xi.is_zero():
                continue
            for j, yj in enumerate(Y.components):
                if yj.is_zero():
                    continue
                entries = index.get((i, j))
                if not entries:
                    continue
                w = xi * yj
                for k, val in entries:
                    out[k] = out[k] + w * val
        return out

    def multiply(self, X: Section, Y: Section) -> Section:
        if X.rank != self.rank or Y.rank != self.rank:
            raise ShapeError("section rank mismatch")
        if self._product_index is None:
            self._product_index = _index_tensor(self.product, self.rank)
        return Section(self._contract(self._product_index, X, Y))

    def _derivation_terms(self, X: Section, Y: Section) -> list[RatFunc]:
        """Components of sum_i X^i a(E_i)(Y^k) E_k."""
        out = [RatFunc.zero(self.n) for _ in range(self.rank)]
        if self.n == 0:
            return out
        for i, xi in enumerate(X.components):
            if xi.is_zero():
                continue
            a_i = self.anchor_vf(i)
            if a_i.is_zero():
                continue
            for k in range(self.rank):
                d = a_i.apply(Y.components[k])
                if not d.is_zero():
                    out[k] = out[k] + xi * d
        return out

    def bracket_of(self, X: Section, Y: Section) -> Section:
        if self.bracket is None:
            raise MissingStructure("bracket")
        if self.n > 0 and self.anchor is None:
            raise MissingStructure("anchor")
        if self._bracket_index is None:
            self._bracket_index = _index_tensor(self.bracket, self.rank)
        out = self._contract(self._bracket_index, X, Y)
        plus = self._derivation_terms(X, Y)
        minus = self._derivation_terms(Y, X)
        return Section(a + p - m for a, p, m in zip(out, plus, minus))

    def prelie_of(self, X: Section, Y: Section) -> Section:
        if self.prelie is None:
            raise MissingStructure("prelie")
        if self.n > 0 and self.anchor is None:
            raise MissingStructure("anchor")
        if self._prelie_index is None:
            self._prelie_index = _index_tensor(self.prelie, self.rank)
        out = self._contract(self._prelie_index, X, Y)
        plus = self._derivation_terms(X, Y)
        return Section(a + p for a, p in zip(out, plus))

    # -- derived tensors ------------------------------------------------

    def p_tensor(self, X: Section, Y: Section, Z: Section) -> Section:
        """P_X(Y,Z) = [X, Y·Z] - [X,Y]·Z - Y·[X,Z]."""
        return (
            self.bracket_of(X, self.multiply(Y, Z))
            - self.multiply(self.bracket_of(X, Y), Z)
            - self.multiply(Y, self.bracket_of(X, Z))
        )

    def phi(self, X: Section, Y: Section, Z: Section, W: Section) -> Section:
        """Failure of the Hertling-Manin relation, a (4,1) tensor."""
        return (
            self.p_tensor(self.multiply(X, Y), Z, W)
            - self.multiply(X, self.p_tensor(Y, Z, W))
            - self.multiply(Y, self.p_tensor(X, Z, W))
        )

    def psi(self, X: Section, Y: Section, Z: Section) -> Section:
        """Psi(X,Y,Z) = X*(Y·Z) - (X*Y)·Z - Y·(X*Z), a (3,1) tensor."""
        return (
            self.prelie_of(X, self.multiply(Y, Z))
            - self.multiply(self.prelie_of(X, Y), Z)
            - self.multiply(Y, self.prelie_of(X, Z))
        )

    def prelie_associator(self, X: Section, Y: Section, Z: Section) -> Section:
        return self.prelie_of(self.prelie_of(X, Y), Z) - self.prelie_of(X, self.prelie_of(Y, Z))

    def jacobiator(self, X: Section, Y: Section, Z: Section) -> Section:
        return (
            self.bracket_of(self.bracket_of(X, Y), Z)
            + self.bracket_of(self.bracket_of(Y, Z), X)
            + self.bracket_of(self.bracket_of(Z, X), Y)
        )

    # -- helpers ---------------------------------------------------------

    def fmt(self, s: Section) -> str:
        return s.format(self.base_vars)

    def with_structures(self, product=None, bracket=None, prelie=None, anchor=None, identity=None) -> "AlgebroidPresentation":
        """Copy with selected tensors replaced."""
        return AlgebroidPresentation(
            base_vars=self.base_vars,
            rank=self.rank,
            product=self.product if product is None else product,
            bracket=self.bracket if bracket is None else bracket,
            prelie=self.prelie if prelie is None else prelie,
            anchor=self.anchor if anchor is None else anchor,
            identity=self.identity if identity is None else identity,
        )

    def basis_name(self, i: int) -> str:
        return f"E{i + 1}"


def multiply(A: AlgebroidPresentation, X: Section, Y: Section) -> Section:
    return A.multiply(X, Y)


def bracket(A: AlgebroidPresentation, X: Section, Y: Section) -> Section:
    return A.bracket_of(X, Y)


def prelie(A: AlgebroidPresentation, X: Section, Y: Section) -> Section:
    return A.prelie_of(X, Y)


def P_tensor(A: AlgebroidPresentation, X: Section, Y: Section, Z: Section) -> Section:
    return A.p_tensor(X, Y, Z)


def Phi(A, X, Y, Z, W) -> Section:
    return A.phi(X, Y, Z, W)


def Psi(A, X, Y, Z) -> Section:
    return A.psi(X, Y, Z)


def tensors_equal(t1: Tensor, t2: Tensor) -> bool:
    return all(
        c1 == c2
        for m1, m2 in zip(t1, t2)
        for r1, r2 in zip(m1, m2)
        for c1, c2 in zip(r1, r2)
    )


# -- checkers ------------------------------------------------------------


def _basis_args(A: AlgebroidPresentation):
    """Basis sections labelled by name."""
    return [(A.basis_name(i), A.basis(i)) for i in range(A.rank)]


def _scaled_args(A: AlgebroidPresentation):
    """Basis sections scaled by each base variable, the differential test set."""
    out = []
    for m in range(A.n):
        name = A.base_vars[m]
        for i in range(A.rank):
            out.append((f"{name}*{A.basis_name(i)}", A.scaled_basis(m, i)))
    return out


def check_comm_assoc(A: AlgebroidPresentation) -> Report:
    """Commutativity and associativity of the product on the frame."""
    report = Report("commutative associative algebroid")
    r = A.rank
    for i in range(r):
        for j in range(i + 1, r):
            ok = all(A.product[k][i][j] == A.product[k][j][i] for k in range(r))
            witness = None
            if not ok:
                diff = A.multiply(A.basis(i), A.basis(j)) - A.multiply(A.basis(j), A.basis(i))
                witness = A.fmt(diff)
            report.add("product-symmetry", f"({A.basis_name(i)},{A.basis_name(j)})", ok, witness)
    basis = _basis_args(A)
    for ni, X in basis:
        for nj, Y in basis:
            XY = A.multiply(X, Y)
            for nk, Z in basis:
                res = A.multiply(XY, Z) - A.multiply(X, A.multiply(Y, Z))
                report.add("associativity", f"({ni},{nj},{nk})", res.is_zero(), A.fmt(res))
    return report


def check_lie_algebroid(A: AlgebroidPresentation) -> Report:
    """Antisymmetry and Jacobi, including variable-scaled arguments.

    Scaling the first slot by each base variable makes the Jacobi sweep
    sensitive to anchor inconsistencies: the scaled residual picks up
    (a([Y,Z]) - [a(Y),a(Z)])(f)·X on top of f times the basis residual.
    """
    if A.bracket is None:
        raise MissingStructure("bracket")
    if A.n > 0 and A.anchor is None:
        raise MissingStructure("anchor")
    report = Report("Lie algebroid")
    r = A.rank
    for i in range(r):
        for j in range(i, r):
            ok = all(A.bracket[k][i][j] == -A.bracket[k][j][i] for k in range(r))
            witness = None
            if not ok:
                diff = A.bracket_of(A.basis(i), A.basis(j)) + A.bracket_of(A.basis(j), A.basis(i))
                witness = A.fmt(diff)
            report.add("bracket-antisymmetry", f"({A.basis_name(i)},{A.basis_name(j)})", ok, witness)
    basis = _basis_args(A)
    firsts = basis + _scaled_args(A)
    for ni, X in firsts:
        for nj, Y in basis:
            for nk, Z in basis:
                res = A.jacobiator(X, Y, Z)
                report.add("jacobi", f"({ni},{nj},{nk})", res.is_zero(), A.fmt(res))
    return report


def check_f_algebroid(A: AlgebroidPresentation) -> Report:
    """Commutative associative + Lie algebroid + Hertling-Manin on the frame.

    Basis quadruples suffice for the Hertling-Manin part because the
    failure tensor Phi is a (4,1) tensor field.
    """
    report = Report("F-algebroid")
    report.extend_from(check_comm_assoc(A))
    report.extend_from(check_lie_algebroid(A))
    basis = _basis_args(A)
    for ni, X in basis:
        for nj, Y in basis:
            for nk, Z in basis:
                for nl, W in basis:
                    res = A.phi(X, Y, Z, W)
                    report.add("hertling-manin", f"({ni},{nj},{nk},{nl})", res.is_zero(), A.fmt(res))
    return report


def check_pre_lie_algebroid(A: AlgebroidPresentation) -> Report:
    """Symmetry of the associator in its first two slots.

    Besides basis triples, each slot is scaled by each base variable in
    turn. First- and second-slot scalings exercise the two Leibniz rules;
    the third-slot scaling exposes any mismatch between the anchor and
    the sub-adjacent bracket, since the scaled residual contains
    ([a(X),a(Y)] - a(X*Y - Y*X))(f)·Z.
    """
    if A.prelie is None:
        raise MissingStructure("prelie")
    if A.n > 0 and A.anchor is None:
        raise MissingStructure("anchor")
    report = Report("pre-Lie algebroid")
    basis = _basis_args(A)

    def sweep(args1, args2, args3):
        for ni, X in args1:
            for nj, Y in args2:
                for nk, Z in args3:
                    res = A.prelie_associator(X, Y, Z) - A.prelie_associator(Y, X, Z)
                    report.add("pre-lie-symmetry", f"({ni},{nj},{nk})", res.is_zero(), A.fmt(res))

    sweep(basis, basis, basis)
    scaled = _scaled_args(A)
    sweep(scaled, basis, basis)
    sweep(basis, scaled, basis)
    sweep(basis, basis, scaled)
    return report


def _psi_sweep(A: AlgebroidPresentation, report: Report, require_zero: bool):
    basis = _basis_args(A)
    for ni, X in basis:
        for nj, Y in basis:
            for nk, Z in basis:
                if require_zero:
                    res = A.psi(X, Y, Z)
                    report.add("psi-vanishing", f"({ni},{nj},{nk})", res.is_zero(), A.fmt(res))
                else:
                    res = A.psi(X, Y, Z) - A.psi(Y, X, Z)
                    report.add("psi-symmetry", f"({ni},{nj},{nk})", res.is_zero(), A.fmt(res))


def check_pre_f(A: AlgebroidPresentation) -> Report:
    """Pre-F structure: product laws, pre-Lie laws and Psi symmetric in X,Y."""
    report = Report("pre-F-algebroid")
    report.extend_from(check_comm_assoc(A))
    report.extend_from(check_pre_lie_algebroid(A))
    _psi_sweep(A, report, require_zero=False)
    return report


def check_prelie_com(A: AlgebroidPresentation) -> Report:
    """PreLie-Com structure: product laws, pre-Lie laws and Psi = 0."""
    report = Report("PreLie-Com algebroid")
    report.extend_from(check_comm_assoc(A))
    report.extend_from(check_pre_lie_algebroid(A))
    _psi_sweep(A, report, require_zero=True)
    return report


def sub_adjacent(A: AlgebroidPresentation) -> AlgebroidPresentation:
    """Fill in the bracket as the commutator of the pre-Lie operation."""
    if A.prelie is None:
        raise MissingStructure("prelie")
    r = A.rank
    b = [[[A.prelie[k][i][j] - A.prelie[k][j][i] for j in range(r)] for i in range(r)] for k in range(r)]
    return A.with_structures(bracket=b)


def find_identity(A: AlgebroidPresentation):
    """Solve e·E_i = E_i for a section e; None when no identity exists."""
    r, n = A.rank, A.n
    rows = []
    rhs = []
    zero = RatFunc.zero(n)
    one = RatFunc.const(n, 1)
    for i in range(r):
        for k in range(r):
            rows.append([A.product[k][j][i] for j in range(r)])
            rhs.append(one if i == k else zero)
    sol = solve(rows, rhs, zero, one)
    if sol is None:
        return None
    return Section(sol)


def check_anchor_leibniz(A: AlgebroidPresentation) -> Report:
    """Regression: bracket(E_i, f·E_j) = f·bracket(E_i,E_j) + a(E_i)(f)·E_j.

    Holds by construction of the evaluator; kept as a guard against
    regressions in the Leibniz expansion.
    """
    report = Report("anchor Leibniz rule")
    for m in range(A.n):
        f = A.var_fn(m)
        for i in range(A.rank):
            for j in range(A.rank):
                lhs = A.bracket_of(A.basis(i), A.scaled_basis(m, j))
                rhs = A.bracket_of(A.basis(i), A.basis(j)).scale_fn(f) + A.basis(j).scale_fn(
                    A.anchor_vf(i).apply(f)
                )
                res = lhs - rhs
                report.add(
                    "leibniz",
                    f"({A.basis_name(i)},{A.base_vars[m]}*{A.basis_name(j)})",
                    res.is_zero(),
                    A.fmt(res),
                )
    return report
