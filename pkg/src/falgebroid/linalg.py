"""Exact linear algebra over any field whose elements support +, -, *, /.

Used with Fraction entries for finite dimensional cohomology and with
RatFunc entries for identity sections and section inversion.
"""

from __future__ import annotations

from .errors import NotInvertible


def _is_zero(x) -> bool:
    z = getattr(x, "is_zero", None)
    if z is not None:
        return z()
    return x == 0


def rref(matrix: list[list], zero, one) -> tuple[list[list], list[int]]:
    """Reduced row echelon form. Returns (rows, pivot column indices)."""
    rows = [list(r) for r in matrix]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, nrows):
            if not _is_zero(rows[i][c]):
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = one / rows[r][c]
        rows[r] = [inv * x for x in rows[r]]
        for i in range(nrows):
            if i != r and not _is_zero(rows[i][c]):
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


def rank(matrix: list[list], zero, one) -> int:
    if not matrix:
        return 0
    return len(rref(matrix, zero, one)[1])


def solve(matrix: list[list], rhs: list, zero, one) -> list | None:
    """One solution of M x = rhs, or None if the system is inconsistent."""
    nrows = len(matrix)
    ncols = len(matrix[0]) if nrows else 0
    aug = [list(matrix[i]) + [rhs[i]] for i in range(nrows)]
    rows, pivots = rref(aug, zero, one)
    if ncols in pivots:
        return None
    sol = [zero] * ncols
    for r, c in enumerate(pivots):
        sol[c] = rows[r][ncols]
    return sol


def nullspace(matrix: list[list], zero, one) -> list[list]:
    """Basis of the kernel of M, as a list of column vectors."""
    nrows = len(matrix)
    ncols = len(matrix[0]) if nrows else 0
    if nrows == 0:
        return [[one if i == j else zero for i in range(ncols)] for j in range(ncols)]
    rows, pivots = rref(matrix, zero, one)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [zero] * ncols
        vec[f] = one
        for r, c in enumerate(pivots):
            vec[c] = zero - rows[r][f]
        basis.append(vec)
    return basis


def invert(matrix: list[list], zero, one) -> list[list]:
    """Inverse of a square matrix, raising NotInvertible when singular."""
    n = len(matrix)
    aug = [list(matrix[i]) + [one if j == i else zero for j in range(n)] for i in range(n)]
    rows, pivots = rref(aug, zero, one)
    if pivots != list(range(n)):
        raise NotInvertible("matrix is singular")
    return [row[n:] for row in rows]


def independent_from(span_vectors: list[list], candidates: list[list], zero, one) -> list[list]:
    """Select candidates that extend the span of the given vectors, greedily."""
    current = [list(v) for v in span_vectors]
    base_rank = rank(current, zero, one) if current else 0
    chosen = []
    for cand in candidates:
        trial = current + [list(cand)]
        if rank(trial, zero, one) > base_rank:
            current = trial
            base_rank += 1
            chosen.append(cand)
    return chosen
