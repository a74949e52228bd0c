"""Exact dense linear algebra over the Gaussian rationals."""

import logging
import math
from enum import Enum
from typing import List, NamedTuple, Optional, Sequence, Tuple

from app.errors import DimensionError, SingularError
from app.models.matrix import Matrix, scaled_row
from app.models.scalar import GaussianRational, ONE, ZERO

logger = logging.getLogger(__name__)


class ArithKind(str, Enum):
    """Binary matrix operations offered by `arith`."""

    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    SCALE = "scale"


class RowEchelon(NamedTuple):
    """Result of `rref`."""

    reduced: Matrix
    pivot_columns: Tuple[int, ...]
    rank: int


def arith(
    a: Matrix,
    b: Optional[Matrix],
    kind: ArithKind,
    scalar: Optional[GaussianRational] = None
) -> Matrix:
    """
    Exact add / sub / mul of two matrices, or scaling of `a` by `scalar`.

    Raises:
        DimensionError: If the shapes do not fit the operation
    """
    if kind is ArithKind.SCALE:
        if scalar is None:
            raise ValueError("scale needs a scalar")
        return a.scale(scalar)
    if b is None:
        raise ValueError(f"{kind.value} needs two matrices")
    if kind is ArithKind.ADD:
        return a + b
    if kind is ArithKind.SUB:
        return a - b
    return a @ b


def conj_transpose(a: Matrix) -> Matrix:
    return a.conj_transpose()


def rref(a: Matrix) -> RowEchelon:
    """
    Reduced row echelon form by exact Gauss-Jordan elimination.

    The pivot in each column is the top-most nonzero entry at or below the
    current pivot row.
    """
    rows: List[List[GaussianRational]] = [list(r) for r in a.row_tuples()]
    n_rows, n_cols = a.shape
    pivots: List[int] = []
    piv_r = 0
    for piv_c in range(n_cols):
        if piv_r == n_rows:
            break
        for i_row in range(piv_r, n_rows):
            if not rows[i_row][piv_c].is_zero():
                break
        else:
            continue
        if i_row != piv_r:
            rows[piv_r], rows[i_row] = rows[i_row], rows[piv_r]
        pivot_row = rows[piv_r]
        p = pivot_row[piv_c]
        if p != ONE:
            pivot_row = [x / p for x in pivot_row]
            rows[piv_r] = pivot_row
        for r in range(n_rows):
            if r == piv_r:
                continue
            f = rows[r][piv_c]
            if f.is_zero():
                continue
            rows[r] = [
                x if y.is_zero() else x - f * y
                for x, y in zip(rows[r], pivot_row)
            ]
        pivots.append(piv_c)
        piv_r += 1
    reduced = Matrix._trusted([tuple(r) for r in rows])
    return RowEchelon(reduced, tuple(pivots), len(pivots))


def _primitive(row: List[Tuple[int, int]]) -> List[Tuple[int, int]]:
    g = math.gcd(*(c for pair in row for c in pair))
    if g <= 1:
        return row
    return [(re // g, im // g) for re, im in row]


def rank(a: Matrix) -> int:
    """
    Exact rank.

    Uses fraction-free elimination on Gaussian-integer rows (each row is first
    scaled to clear denominators, and divided by its integer content after
    every update). Agrees with `rref(a).rank`.
    """
    rows = [scaled_row(r)[1] for r in a.row_tuples()]
    n_rows, n_cols = a.shape
    r = 0
    for col in range(n_cols):
        if r == n_rows:
            break
        pivot = None
        for i in range(r, n_rows):
            if rows[i][col] != (0, 0):
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pr, pi = rows[r][col]
        pivot_row = rows[r]
        for i in range(r + 1, n_rows):
            fr, fi = rows[i][col]
            if fr == 0 and fi == 0:
                continue
            # row_i <- p * row_i - f * row_r
            rows[i] = _primitive([
                (pr * xr - pi * xi - fr * yr + fi * yi, pr * xi + pi * xr - fr * yi - fi * yr)
                for (xr, xi), (yr, yi) in zip(rows[i], pivot_row)
            ])
        r += 1
    return r


def inverse(a: Matrix) -> Matrix:
    """
    Exact inverse by Gauss-Jordan elimination on [A | I].

    Raises:
        DimensionError: If `a` is not square
        SingularError: If `a` is singular
    """
    if not a.is_square:
        raise DimensionError(f"cannot invert a {a.rows}x{a.cols} matrix")
    n = a.rows
    rows = [
        list(row) + [ONE if i == j else ZERO for j in range(n)]
        for i, row in enumerate(a.row_tuples())
    ]
    for col in range(n):
        for i_row in range(col, n):
            if not rows[i_row][col].is_zero():
                break
        else:
            raise SingularError(f"matrix of order {n} is singular")
        if i_row != col:
            rows[col], rows[i_row] = rows[i_row], rows[col]
        p = rows[col][col]
        pivot_row = [x / p for x in rows[col]] if p != ONE else rows[col]
        rows[col] = pivot_row
        for r in range(n):
            if r == col:
                continue
            f = rows[r][col]
            if f.is_zero():
                continue
            rows[r] = [x if y.is_zero() else x - f * y for x, y in zip(rows[r], pivot_row)]
    return Matrix._trusted([tuple(row[n:]) for row in rows])


def full_rank_factorization(a: Matrix) -> Optional[Tuple[Matrix, Matrix]]:
    """
    Factor A = F G with F the pivot columns of A and G the nonzero rows of rref(A).

    Returns:
        (F, G) with F of full column rank and G of full row rank, or None for
        the zero matrix
    """
    echelon = rref(a)
    if echelon.rank == 0:
        return None
    f = a.select_columns(echelon.pivot_columns)
    g = echelon.reduced.select_rows(range(echelon.rank))
    return f, g


def euclidean_pinv(a: Matrix) -> Matrix:
    """Usual Moore-Penrose inverse: G*(GG*)^-1 (F*F)^-1 F* from A = FG."""
    factors = full_rank_factorization(a)
    if factors is None:
        return Matrix.zeros(a.cols, a.rows)
    f, g = factors
    f_h = f.conj_transpose()
    g_h = g.conj_transpose()
    return g_h @ inverse(g @ g_h) @ inverse(f_h @ f) @ f_h


def block_assemble(layout: Sequence[Sequence[Optional[Matrix]]]) -> Matrix:
    """
    Concatenate a grid of blocks into one matrix.

    `None` stands for a zero block whose height and width are taken from the
    other blocks of its block row and block column.

    Raises:
        DimensionError: On ragged grids, inconsistent block sizes, or a block
            row / column made only of `None`
    """
    if not layout or not layout[0]:
        raise DimensionError("empty block layout")
    n_block_cols = len(layout[0])
    if any(len(block_row) != n_block_cols for block_row in layout):
        raise DimensionError("ragged block layout")

    heights: List[Optional[int]] = [None] * len(layout)
    widths: List[Optional[int]] = [None] * n_block_cols
    for bi, block_row in enumerate(layout):
        for bj, block in enumerate(block_row):
            if block is None:
                continue
            if heights[bi] is None:
                heights[bi] = block.rows
            elif heights[bi] != block.rows:
                raise DimensionError(f"block row {bi} has inconsistent heights")
            if widths[bj] is None:
                widths[bj] = block.cols
            elif widths[bj] != block.cols:
                raise DimensionError(f"block column {bj} has inconsistent widths")
    if None in heights or None in widths:
        raise DimensionError("a block row or column has no sized block")

    out = []
    for bi, block_row in enumerate(layout):
        for i in range(heights[bi]):
            row: List[GaussianRational] = []
            for bj, block in enumerate(block_row):
                if block is None:
                    row.extend([ZERO] * widths[bj])
                else:
                    row.extend(block.row(i))
            out.append(tuple(row))
    return Matrix._trusted(out)


def hstack(*blocks: Matrix) -> Matrix:
    return block_assemble([list(blocks)])


def vstack(*blocks: Matrix) -> Matrix:
    return block_assemble([[b] for b in blocks])


def range_contains(y: Matrix, x: Matrix) -> bool:
    """True iff R(x) is contained in R(y)."""
    if y.rows != x.rows:
        raise DimensionError(f"range test needs equal row counts, got {y.rows} and {x.rows}")
    return rank(hstack(y, x)) == rank(y)


def solve_exists(y: Matrix, x: Matrix) -> bool:
    """Whether Y Z = X has an exact solution Z, read off rref of [Y | X]."""
    if y.rows != x.rows:
        raise DimensionError(f"system needs equal row counts, got {y.rows} and {x.rows}")
    echelon = rref(hstack(y, x))
    return all(c < y.cols for c in echelon.pivot_columns)


def index(a: Matrix) -> int:
    """Least p >= 1 with rank(A^p) == rank(A^(p+1))."""
    if not a.is_square:
        raise DimensionError(f"index needs a square matrix, got {a.rows}x{a.cols}")
    p = 1
    power = a
    current = rank(power)
    while True:
        power = power @ a
        following = rank(power)
        if following == current:
            return p
        p += 1
        current = following
