"""Exact elimination over Q_p with explicit precision accounting.

Pivots are chosen as the entry of minimal valuation in the remaining
submatrix (the p-adic analogue of full pivoting), so every elimination
factor is a p-adic integer and precision degrades no faster than the
ledger predicts.  An entry is treated as zero only when it is
zero-to-precision; if such a zero-decision rests on fewer than
``min_margin`` vanishing digits the computation aborts with
PrecisionExhausted instead of guessing a rank.
"""

from __future__ import annotations

from dataclasses import dataclass

from .context import DEFAULT_SLACK
from .errors import PrecisionExhausted
from .scalar import PadicScalar


@dataclass
class Elimination:
    """Row echelon data for a PadicScalar matrix."""

    rows: list  # worked matrix (row echelon, possibly reduced)
    pivots: list  # [(row, col)] in elimination order
    margin: int | None  # smallest confidence gap behind any rank decision
    nrows: int
    ncols: int

    @property
    def rank(self) -> int:
        return len(self.pivots)


def _min_margin_update(margin, value):
    return value if margin is None else min(margin, value)


def eliminate(mat, pivot_cols=None, reduce_above=False, min_margin=DEFAULT_SLACK):
    """Gaussian elimination with minimal-valuation pivoting.

    pivot_cols restricts the pivot search (used to solve augmented systems);
    reduce_above additionally clears pivot columns upwards and normalises
    pivots to 1, yielding a reduced echelon form.
    """
    work = [list(row) for row in mat]
    nrows = len(work)
    ncols = len(work[0]) if nrows else 0
    if pivot_cols is None:
        pivot_cols = ncols
    free_rows = list(range(nrows))
    free_cols = list(range(pivot_cols))
    pivots = []
    margin = None

    while free_rows and free_cols:
        best = None
        for i in free_rows:
            for j in free_cols:
                e = work[i][j]
                if e.is_zero:
                    continue
                key = (e.v, i, j)
                if best is None or key < best[0]:
                    best = (key, i, j)
        if best is None:
            break
        _, pi, pj = best
        pivot = work[pi][pj]
        margin = _min_margin_update(margin, pivot.prec - pivot.v)
        pivots.append((pi, pj))
        targets = [i for i in free_rows if i != pi]
        if reduce_above:
            targets += [i for (i, _) in pivots[:-1]]
        for i in targets:
            a = work[i][pj]
            if a.is_zero:
                continue
            f = a / pivot
            work[i] = [x - f * y for x, y in zip(work[i], work[pi])]
        if reduce_above:
            pinv = pivot.inv()
            work[pi] = [pinv * x for x in work[pi]]
        free_rows.remove(pi)
        free_cols.remove(pj)

    # every remaining candidate entry vanished to precision; record how
    # confidently, and refuse to decide on thin evidence
    for i in free_rows:
        for j in free_cols:
            e = work[i][j]
            if not e.is_zero:  # unreachable unless the loop broke early
                raise AssertionError("nonzero entry left after elimination")
            margin = _min_margin_update(margin, e.prec)
            if e.prec < min_margin:
                raise PrecisionExhausted(
                    "rank decision at (%d,%d) rests on a value vanishing only "
                    "mod p^%d (< required margin %d); raise the working "
                    "precision" % (i, j, e.prec, min_margin)
                )
    return Elimination(work, pivots, margin, nrows, ncols)


def rank_with_margin(mat, min_margin=DEFAULT_SLACK):
    if not mat or not mat[0]:
        return 0, None
    e = eliminate(mat, min_margin=min_margin)
    return e.rank, e.margin


def kernel_basis(mat, min_margin=DEFAULT_SLACK):
    """Basis of {x : mat @ x = 0} (right kernel), via reduced echelon form."""
    if not mat:
        return []
    ncols = len(mat[0])
    e = eliminate(mat, reduce_above=True, min_margin=min_margin)
    pivot_of_col = {j: i for (i, j) in e.pivots}
    free = [j for j in range(ncols) if j not in pivot_of_col]
    basis = []
    for f in free:
        vec = [None] * ncols
        for j in range(ncols):
            if j == f:
                vec[j] = _one_like(mat[0][0])
            elif j in pivot_of_col:
                vec[j] = -e.rows[pivot_of_col[j]][f]
            else:
                vec[j] = _zero_like(mat[0][0])
        basis.append(vec)
    return basis


def solve(mat, rhs_cols, min_margin=DEFAULT_SLACK):
    """Solve mat @ X = rhs for each right-hand-side column; returns the
    solution columns, or None if the system is inconsistent to precision.

    mat: m x n rows of PadicScalar; rhs_cols: list of length-m columns.
    """
    m = len(mat)
    n = len(mat[0]) if m else 0
    aug = [list(mat[i]) + [col[i] for col in rhs_cols] for i in range(m)]
    e = eliminate(aug, pivot_cols=n, reduce_above=True, min_margin=min_margin)
    pivot_of_col = {j: i for (i, j) in e.pivots}
    pivot_rows = {i for (i, _) in e.pivots}
    # consistency: non-pivot rows must have vanishing right-hand sides
    for i in range(m):
        if i in pivot_rows:
            continue
        for k in range(len(rhs_cols)):
            entry = e.rows[i][n + k]
            if not entry.is_zero:
                return None
            if entry.prec < min_margin:
                raise PrecisionExhausted(
                    "consistency of a linear system decided on %d digits "
                    "(< %d)" % (entry.prec, min_margin)
                )
    sols = []
    for k in range(len(rhs_cols)):
        x = []
        for j in range(n):
            if j in pivot_of_col:
                x.append(e.rows[pivot_of_col[j]][n + k])
            else:
                x.append(_zero_like(mat[0][0]))
        sols.append(x)
    return sols


def invert(mat, min_margin=DEFAULT_SLACK):
    """Matrix inverse via RREF on the identity-augmented system; None when
    the matrix is singular to precision."""
    n = len(mat)
    ident_cols = []
    for j in range(n):
        col = []
        for i in range(n):
            col.append(_one_like(mat[0][0]) if i == j else _zero_like(mat[0][0]))
        ident_cols.append(col)
    sols = solve(mat, ident_cols, min_margin=min_margin)
    if sols is None:
        return None
    return [[sols[j][i] for j in range(n)] for i in range(n)]


def _one_like(s: PadicScalar) -> PadicScalar:
    return PadicScalar.from_int(s.ctx, 1)


def _zero_like(s: PadicScalar) -> PadicScalar:
    return PadicScalar.zero(s.ctx)
