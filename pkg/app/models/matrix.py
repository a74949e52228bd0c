"""Dense immutable matrices over the Gaussian rationals."""

import math
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Sequence, Tuple

from pydantic_core import core_schema

from app.errors import DimensionError, ParseError
from app.models.scalar import GaussianRational, Scalar, ZERO, ONE

Row = Tuple[GaussianRational, ...]


def scaled_row(row: Sequence[GaussianRational]) -> Tuple[int, List[Tuple[int, int]]]:
    """Clear denominators: returns (d, [(re * d, im * d)]) with d the lcm of all denominators."""
    d = math.lcm(*(x.re.denominator for x in row), *(x.im.denominator for x in row))
    return d, [
        (x.re.numerator * (d // x.re.denominator), x.im.numerator * (d // x.im.denominator))
        for x in row
    ]


class Matrix:
    """
    Dense row-major matrix of GaussianRational entries.

    Matrices are immutable and always have at least one row and one column.
    All arithmetic is exact.
    """

    __slots__ = ("_rows", "_cols", "_data")

    def __init__(self, grid: Sequence[Sequence[Any]]):
        rows = len(grid)
        if rows == 0:
            raise DimensionError("matrix must have at least one row")
        cols = len(grid[0])
        if cols == 0:
            raise DimensionError("matrix must have at least one column")
        data = []
        for i, row in enumerate(grid):
            if len(row) != cols:
                raise DimensionError(f"row {i} has {len(row)} entries, expected {cols}")
            data.append(tuple(GaussianRational.coerce(x) for x in row))
        self._init(rows, cols, tuple(data))

    def _init(self, rows: int, cols: int, data: Tuple[Row, ...]) -> None:
        object.__setattr__(self, "_rows", rows)
        object.__setattr__(self, "_cols", cols)
        object.__setattr__(self, "_data", data)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    def __reduce__(self):
        return (Matrix, (self._data,))

    @classmethod
    def _trusted(cls, data: Sequence[Row]) -> "Matrix":
        """Wrap rows that are already tuples of GaussianRational."""
        matrix = cls.__new__(cls)
        matrix._init(len(data), len(data[0]), tuple(data))
        return matrix

    # Construction

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        if rows < 1 or cols < 1:
            raise DimensionError(f"invalid shape {rows}x{cols}")
        return cls._trusted([(ZERO,) * cols for _ in range(rows)])

    @classmethod
    def identity(cls, order: int) -> "Matrix":
        if order < 1:
            raise DimensionError(f"invalid order {order}")
        return cls._trusted(
            [tuple(ONE if i == j else ZERO for j in range(order)) for i in range(order)]
        )

    @classmethod
    def diagonal(cls, values: Iterable[Scalar]) -> "Matrix":
        values = [GaussianRational.coerce(v) for v in values]
        n = len(values)
        if n == 0:
            raise DimensionError("diagonal needs at least one entry")
        return cls._trusted(
            [tuple(values[i] if i == j else ZERO for j in range(n)) for i in range(n)]
        )

    # Shape and access

    @property
    def rows(self) -> int:
        return self._rows

    @property
    def cols(self) -> int:
        return self._cols

    @property
    def shape(self) -> Tuple[int, int]:
        return (self._rows, self._cols)

    @property
    def is_square(self) -> bool:
        return self._rows == self._cols

    def row(self, i: int) -> Row:
        return self._data[i]

    def column(self, j: int) -> Row:
        return tuple(row[j] for row in self._data)

    def row_tuples(self) -> Tuple[Row, ...]:
        return self._data

    def __getitem__(self, index: Tuple[int, int]) -> GaussianRational:
        i, j = index
        return self._data[i][j]

    def select_rows(self, indices: Sequence[int]) -> "Matrix":
        if not indices:
            raise DimensionError("cannot select zero rows")
        return Matrix._trusted([self._data[i] for i in indices])

    def select_columns(self, indices: Sequence[int]) -> "Matrix":
        if not indices:
            raise DimensionError("cannot select zero columns")
        return Matrix._trusted([tuple(row[j] for j in indices) for row in self._data])

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self._data for x in row)

    # Arithmetic

    def _check_same_shape(self, other: "Matrix", op: str) -> None:
        if self.shape != other.shape:
            raise DimensionError(
                f"cannot {op} {self._rows}x{self._cols} and {other._rows}x{other._cols}"
            )

    def __add__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        self._check_same_shape(other, "add")
        return Matrix._trusted(
            [tuple(x + y for x, y in zip(r, s)) for r, s in zip(self._data, other._data)]
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        self._check_same_shape(other, "subtract")
        return Matrix._trusted(
            [tuple(x - y for x, y in zip(r, s)) for r, s in zip(self._data, other._data)]
        )

    def __neg__(self) -> "Matrix":
        return Matrix._trusted([tuple(-x for x in row) for row in self._data])

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        if self._cols != other._rows:
            raise DimensionError(
                f"cannot multiply {self._rows}x{self._cols} by {other._rows}x{other._cols}"
            )
        # Dot products run over Gaussian integers; each row and column is
        # scaled by the lcm of its denominators and the scale is divided out once.
        left = [scaled_row(row) for row in self._data]
        right = [scaled_row(other.column(j)) for j in range(other._cols)]
        out = []
        for d_row, row in left:
            out_row = []
            for d_col, col in right:
                re = im = 0
                for (xr, xi), (yr, yi) in zip(row, col):
                    if xi == 0 and yi == 0:
                        re += xr * yr
                    else:
                        re += xr * yr - xi * yi
                        im += xr * yi + xi * yr
                denom = d_row * d_col
                out_row.append(GaussianRational(Fraction(re, denom), Fraction(im, denom)))
            out.append(tuple(out_row))
        return Matrix._trusted(out)

    def scale(self, c: Scalar) -> "Matrix":
        c = GaussianRational.coerce(c)
        return Matrix._trusted([tuple(c * x for x in row) for row in self._data])

    def conj_transpose(self) -> "Matrix":
        return Matrix._trusted(
            [tuple(row[j].conjugate() for row in self._data) for j in range(self._cols)]
        )

    @property
    def H(self) -> "Matrix":
        """Complex conjugate transpose."""
        return self.conj_transpose()

    # Comparison

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self) -> int:
        return hash((self._rows, self._cols, self._data))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in row) + "]" for row in self._data)
        return f"Matrix([{body}])"

    # Exact JSON codec

    def to_json(self) -> Dict[str, Any]:
        """Serialize as {"rows", "cols", "data"} with entries in lowest terms."""
        return {
            "rows": self._rows,
            "cols": self._cols,
            "data": [[x.to_json() for x in row] for row in self._data],
        }

    @classmethod
    def from_json(cls, payload: Any, field: str = "matrix") -> "Matrix":
        """
        Parse the exact matrix JSON format.

        Args:
            payload: Decoded JSON object
            field: Field path prefix used in error messages

        Returns:
            The parsed Matrix

        Raises:
            ParseError: If any field is missing or malformed
        """
        if not isinstance(payload, dict):
            raise ParseError(field, "expected an object with rows, cols and data")
        rows = payload.get("rows")
        cols = payload.get("cols")
        data = payload.get("data")
        for name, value in (("rows", rows), ("cols", cols)):
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ParseError(f"{field}.{name}", f"expected a positive integer, got {value!r}")
        if not isinstance(data, list) or len(data) != rows:
            raise ParseError(f"{field}.data", f"expected {rows} rows")
        grid: List[Row] = []
        for i, row in enumerate(data):
            if not isinstance(row, list) or len(row) != cols:
                raise ParseError(f"{field}.data[{i}]", f"expected {cols} entries")
            grid.append(
                tuple(
                    GaussianRational.from_json(entry, f"{field}.data[{i}][{j}]")
                    for j, entry in enumerate(row)
                )
            )
        return cls._trusted(grid)

    @classmethod
    def __get_pydantic_core_schema__(cls, source_type, handler):
        return core_schema.no_info_plain_validator_function(
            _validate_matrix,
            serialization=core_schema.plain_serializer_function_ser_schema(
                lambda m: m.to_json()
            ),
        )


def _validate_matrix(value: Any) -> Matrix:
    if isinstance(value, Matrix):
        return value
    return Matrix.from_json(value)


def matrix(rows: Sequence[Sequence[Any]]) -> Matrix:
    """Build a Matrix from nested lists of ints, Fractions, strings or [re, im] pairs."""
    grid = []
    for row in rows:
        out = []
        for x in row:
            if isinstance(x, (str, list)):
                out.append(GaussianRational.from_json(x))
            elif isinstance(x, tuple):
                out.append(GaussianRational(Fraction(x[0]), Fraction(x[1])))
            else:
                out.append(GaussianRational.coerce(x))
        grid.append(out)
    return Matrix(grid)
