"""Exact matrices over K, Smith Normal Form over the valuation ring, characteristic
polynomials and Newton polygons."""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable, List, Optional, Sequence, Tuple

from .errors import (
    DimensionMismatchError, FieldMismatchError, NonSquareError, SingularMatrixError, ZeroPolynomialError,
)
from .valued_scalar import (
    INFINITY, ExtValuation, FieldDescriptor, ValuedScalar, is_integral, power_of_uniformizer, valuation,
)

logger = logging.getLogger(__name__)

Vector = Tuple[ValuedScalar, ...]


def vector(descriptor: FieldDescriptor, values: Iterable[Any]) -> Vector:
    return tuple(descriptor.scalar(value) for value in values)


def zero_vector(descriptor: FieldDescriptor, length: int) -> Vector:
    return tuple(descriptor.zero for _ in range(length))


def _check_lengths(u: Sequence, v: Sequence) -> None:
    if len(u) != len(v):
        raise DimensionMismatchError(f"Vector lengths differ: {len(u)} and {len(v)}")


def dot(u: Sequence[ValuedScalar], v: Sequence[ValuedScalar], descriptor: FieldDescriptor) -> ValuedScalar:
    _check_lengths(u, v)
    total = descriptor.zero
    for a, b in zip(u, v):
        total = total + a * b
    return total


def vector_add(u: Sequence[ValuedScalar], v: Sequence[ValuedScalar]) -> Vector:
    _check_lengths(u, v)
    return tuple(a + b for a, b in zip(u, v))


def vector_sub(u: Sequence[ValuedScalar], v: Sequence[ValuedScalar]) -> Vector:
    _check_lengths(u, v)
    return tuple(a - b for a, b in zip(u, v))


def vector_scale(c: ValuedScalar, u: Sequence[ValuedScalar]) -> Vector:
    return tuple(c * a for a in u)


@dataclass(frozen=True)
class Matrix:
    """Immutable row-major matrix over one field descriptor"""
    descriptor: FieldDescriptor
    rows: int
    cols: int
    entries: Tuple[Tuple[ValuedScalar, ...], ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionMismatchError("Matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows or any(len(row) != self.cols for row in self.entries):
            raise DimensionMismatchError(f"Entries do not form a {self.rows}x{self.cols} grid")
        for row in self.entries:
            for entry in row:
                if not isinstance(entry, ValuedScalar) or entry.descriptor != self.descriptor:
                    raise FieldMismatchError(f"Matrix entry {entry!r} is not a scalar of {self.descriptor}")

    # Constructors

    @classmethod
    def from_rows(cls, descriptor: FieldDescriptor, rows: Sequence[Sequence[Any]], cols: Optional[int] = None) -> "Matrix":
        grid = tuple(tuple(descriptor.scalar(value) for value in row) for row in rows)
        if cols is None:
            cols = len(grid[0]) if grid else 0
        return cls(descriptor, len(grid), cols, grid)

    @classmethod
    def zeros(cls, descriptor: FieldDescriptor, rows: int, cols: int) -> "Matrix":
        zero = descriptor.zero
        return cls(descriptor, rows, cols, tuple(tuple(zero for _ in range(cols)) for _ in range(rows)))

    @classmethod
    def identity(cls, descriptor: FieldDescriptor, size: int) -> "Matrix":
        return cls.diagonal(descriptor, [descriptor.one] * size)

    @classmethod
    def diagonal(cls, descriptor: FieldDescriptor, values: Sequence[Any],
                 rows: Optional[int] = None, cols: Optional[int] = None) -> "Matrix":
        values = [descriptor.scalar(value) for value in values]
        rows = len(values) if rows is None else rows
        cols = len(values) if cols is None else cols
        if len(values) > min(rows, cols):
            raise DimensionMismatchError("Too many diagonal values for the requested shape")
        grid = [[descriptor.zero] * cols for _ in range(rows)]
        for i, value in enumerate(values):
            grid[i][i] = value
        return cls(descriptor, rows, cols, tuple(tuple(row) for row in grid))

    @classmethod
    def from_columns(cls, descriptor: FieldDescriptor, columns: Sequence[Sequence[ValuedScalar]], rows: int) -> "Matrix":
        grid = tuple(tuple(column[i] for column in columns) for i in range(rows))
        return cls(descriptor, rows, len(columns), grid)

    @classmethod
    def block_diagonal(cls, descriptor: FieldDescriptor, blocks: Sequence["Matrix"]) -> "Matrix":
        rows = sum(block.rows for block in blocks)
        cols = sum(block.cols for block in blocks)
        grid = [[descriptor.zero] * cols for _ in range(rows)]
        r0 = c0 = 0
        for block in blocks:
            if block.descriptor != descriptor:
                raise FieldMismatchError("Blocks live over different fields")
            for i, row in enumerate(block.entries):
                grid[r0 + i][c0:c0 + block.cols] = row
            r0 += block.rows
            c0 += block.cols
        return cls(descriptor, rows, cols, tuple(tuple(row) for row in grid))

    @staticmethod
    def hstack(*matrices: "Matrix") -> "Matrix":
        first = matrices[0]
        if any(m.rows != first.rows for m in matrices):
            raise DimensionMismatchError("hstack needs equal row counts")
        grid = tuple(sum((m.entries[i] for m in matrices), ()) for i in range(first.rows))
        return Matrix(first.descriptor, first.rows, sum(m.cols for m in matrices), grid)

    @staticmethod
    def vstack(*matrices: "Matrix") -> "Matrix":
        first = matrices[0]
        if any(m.cols != first.cols for m in matrices):
            raise DimensionMismatchError("vstack needs equal column counts")
        grid = sum((m.entries for m in matrices), ())
        return Matrix(first.descriptor, sum(m.rows for m in matrices), first.cols, grid)

    # Access

    def __getitem__(self, index: Tuple[int, int]) -> ValuedScalar:
        i, j = index
        return self.entries[i][j]

    def row(self, i: int) -> Vector:
        return self.entries[i]

    def column_vector(self, j: int) -> Vector:
        return tuple(row[j] for row in self.entries)

    def submatrix(self, row_indices: Sequence[int], col_indices: Sequence[int]) -> "Matrix":
        grid = tuple(tuple(self.entries[i][j] for j in col_indices) for i in row_indices)
        return Matrix(self.descriptor, len(row_indices), len(col_indices), grid)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def is_zero(self) -> bool:
        return all(entry.is_zero for row in self.entries for entry in row)

    @property
    def is_integral(self) -> bool:
        return all(is_integral(entry) for row in self.entries for entry in row)

    # Arithmetic

    def _same_field(self, other: "Matrix") -> None:
        if other.descriptor != self.descriptor:
            raise FieldMismatchError(f"Cannot combine matrices over {self.descriptor} and {other.descriptor}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_field(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatchError(f"Cannot add {self.rows}x{self.cols} and {other.rows}x{other.cols}")
        grid = tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries))
        return Matrix(self.descriptor, self.rows, self.cols, grid)

    def __neg__(self) -> "Matrix":
        return self.scale(-self.descriptor.one)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self + (-other)

    def scale(self, c: Any) -> "Matrix":
        c = self.descriptor.scalar(c)
        grid = tuple(tuple(c * entry for entry in row) for row in self.entries)
        return Matrix(self.descriptor, self.rows, self.cols, grid)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        self._same_field(other)
        if self.cols != other.rows:
            raise DimensionMismatchError(f"Cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        columns = [other.column_vector(j) for j in range(other.cols)]
        grid = tuple(
            tuple(dot(row, column, self.descriptor) for column in columns)
            for row in self.entries
        )
        return Matrix(self.descriptor, self.rows, other.cols, grid)

    def apply(self, x: Sequence[ValuedScalar]) -> Vector:
        """Matrix-vector product"""
        if len(x) != self.cols:
            raise DimensionMismatchError(f"Vector of length {len(x)} does not fit {self.rows}x{self.cols}")
        return tuple(dot(row, x, self.descriptor) for row in self.entries)

    def transpose(self) -> "Matrix":
        grid = tuple(self.column_vector(j) for j in range(self.cols))
        return Matrix(self.descriptor, self.cols, self.rows, grid)

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(str(e) for e in row) + "]" for row in self.entries) + "]"


def determinant(M: Matrix) -> ValuedScalar:
    """Fraction-free Bareiss elimination"""
    if not M.is_square:
        raise NonSquareError(f"Determinant of a {M.rows}x{M.cols} matrix")
    n = M.rows
    descriptor = M.descriptor
    if n == 0:
        return descriptor.one
    a = [list(row) for row in M.entries]
    sign = descriptor.one
    previous = descriptor.one
    for k in range(n - 1):
        if a[k][k].is_zero:
            swap = next((i for i in range(k + 1, n) if not a[i][k].is_zero), None)
            if swap is None:
                return descriptor.zero
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / previous
        previous = a[k][k]
    return sign * a[n - 1][n - 1]


def _row_reduce(rows: List[List[ValuedScalar]], limit: int) -> Tuple[List[List[ValuedScalar]], List[int]]:
    """Reduced row echelon form over the first ``limit`` columns"""
    rows = [list(row) for row in rows]
    pivots: List[int] = []
    r = 0
    for c in range(limit):
        if r == len(rows):
            break
        pivot = next((i for i in range(r, len(rows)) if not rows[i][c].is_zero), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inverse = rows[r][c].inverse()
        rows[r] = [x * inverse for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not rows[i][c].is_zero:
                factor = rows[i][c]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


def rank(M: Matrix) -> int:
    return len(_row_reduce([list(row) for row in M.entries], M.cols)[1])


def inverse(M: Matrix) -> Matrix:
    if not M.is_square:
        raise NonSquareError(f"Inverse of a {M.rows}x{M.cols} matrix")
    n = M.rows
    augmented = Matrix.hstack(M, Matrix.identity(M.descriptor, n)) if n else M
    reduced, pivots = _row_reduce([list(row) for row in augmented.entries], n)
    if len(pivots) < n:
        raise SingularMatrixError("Matrix is singular")
    return Matrix(M.descriptor, n, n, tuple(tuple(row[n:]) for row in reduced))


def kernel_basis(M: Matrix) -> Matrix:
    """Columns spanning {x : Mx = 0}"""
    n = M.cols
    descriptor = M.descriptor
    reduced, pivots = _row_reduce([list(row) for row in M.entries], n)
    free = [c for c in range(n) if c not in pivots]
    columns = []
    for f in free:
        x = [descriptor.zero] * n
        x[f] = descriptor.one
        for k, c in enumerate(pivots):
            x[c] = -reduced[k][f]
        columns.append(x)
    return Matrix.from_columns(descriptor, columns, n)


def solve_affine(M: Matrix, rhs: Sequence[ValuedScalar]) -> Optional[Vector]:
    """Some x with Mx = rhs, or None when the system is inconsistent"""
    if len(rhs) != M.rows:
        raise DimensionMismatchError(f"Right-hand side of length {len(rhs)} for {M.rows} equations")
    n = M.cols
    descriptor = M.descriptor
    rows = [list(row) + [descriptor.scalar(b)] for row, b in zip(M.entries, rhs)]
    reduced, pivots = _row_reduce(rows, n)
    if any(not row[n].is_zero for row in reduced[len(pivots):]):
        return None
    x = [descriptor.zero] * n
    for k, c in enumerate(pivots):
        x[c] = reduced[k][n]
    return tuple(x)


@dataclass(frozen=True)
class SNFDecomposition:
    """Q M P^-1 = S with Q, P unimodular over the valuation ring"""
    Q: Matrix
    S: Matrix
    P: Matrix
    invariant_exponents: Tuple[int, ...]
    Q_inv: Matrix
    P_inv: Matrix

    @property
    def rank(self) -> int:
        return len(self.invariant_exponents)

    @property
    def diagonal(self) -> Vector:
        """s_1, ..., s_min(m, n), zeros past the rank"""
        return tuple(self.S[i, i] for i in range(min(self.S.rows, self.S.cols)))


class _SNFWorkspace:
    """Mutable elimination state keeping Q M P_inv = S and the inverse pairs in sync"""

    def __init__(self, M: Matrix):
        descriptor = M.descriptor
        self.S = [list(row) for row in M.entries]
        self.Q = [list(row) for row in Matrix.identity(descriptor, M.rows).entries]
        self.Q_inv = [list(row) for row in Matrix.identity(descriptor, M.rows).entries]
        self.P = [list(row) for row in Matrix.identity(descriptor, M.cols).entries]
        self.P_inv = [list(row) for row in Matrix.identity(descriptor, M.cols).entries]

    @staticmethod
    def _swap_columns(grid, i, j):
        for row in grid:
            row[i], row[j] = row[j], row[i]

    def swap_rows(self, i: int, j: int) -> None:
        if i == j:
            return
        for grid in (self.S, self.Q):
            grid[i], grid[j] = grid[j], grid[i]
        self._swap_columns(self.Q_inv, i, j)

    def swap_cols(self, i: int, j: int) -> None:
        if i == j:
            return
        self._swap_columns(self.S, i, j)
        self._swap_columns(self.P_inv, i, j)
        self.P[i], self.P[j] = self.P[j], self.P[i]

    def add_row(self, target: int, source: int, factor: ValuedScalar) -> None:
        for grid in (self.S, self.Q):
            grid[target] = [x + factor * y for x, y in zip(grid[target], grid[source])]
        for row in self.Q_inv:
            row[source] = row[source] - factor * row[target]

    def add_col(self, target: int, source: int, factor: ValuedScalar) -> None:
        for grid in (self.S, self.P_inv):
            for row in grid:
                row[target] = row[target] + factor * row[source]
        self.P[source] = [x - factor * y for x, y in zip(self.P[source], self.P[target])]

    def scale_row(self, i: int, unit: ValuedScalar) -> None:
        for grid in (self.S, self.Q):
            grid[i] = [unit * x for x in grid[i]]
        inverse_unit = unit.inverse()
        for row in self.Q_inv:
            row[i] = row[i] * inverse_unit


def smith_normal_form(M: Matrix) -> SNFDecomposition:
    """Diagonalize M by unimodular row and column operations.

    Each step moves an entry of minimal valuation in the remaining block to the
    pivot, so every elimination multiplier is integral. The pivot is then
    normalized to an exact power of the uniformizer by a unit row scaling.
    """
    descriptor = M.descriptor
    m, n = M.rows, M.cols
    work = _SNFWorkspace(M)
    exponents: List[int] = []
    for k in range(min(m, n)):
        best = None
        for i in range(k, m):
            for j in range(k, n):
                entry = work.S[i][j]
                if entry.is_zero:
                    continue
                v = valuation(entry)
                if best is None or v < best[0]:
                    best = (v, i, j)
        if best is None:
            break
        v, i, j = best
        work.swap_rows(k, i)
        work.swap_cols(k, j)
        pivot = work.S[k][k]
        for i in range(k + 1, m):
            if not work.S[i][k].is_zero:
                work.add_row(i, k, -(work.S[i][k] / pivot))
        for j in range(k + 1, n):
            if not work.S[k][j].is_zero:
                work.add_col(j, k, -(work.S[k][j] / pivot))
        a = int(v)
        work.scale_row(k, (pivot / power_of_uniformizer(descriptor, a)).inverse())
        exponents.append(a)
    # pivots come out nondecreasing since the remaining block never drops below the last pivot
    logger.debug(f"SNF of {m}x{n} matrix: exponents {exponents}")

    def freeze(grid, rows, cols):
        return Matrix(descriptor, rows, cols, tuple(tuple(row) for row in grid))

    return SNFDecomposition(
        Q=freeze(work.Q, m, m),
        S=freeze(work.S, m, n),
        P=freeze(work.P, n, n),
        invariant_exponents=tuple(exponents),
        Q_inv=freeze(work.Q_inv, m, m),
        P_inv=freeze(work.P_inv, n, n),
    )


def min_entry_valuation(M: Matrix) -> ExtValuation:
    return min((valuation(entry) for row in M.entries for entry in row), default=INFINITY)


def faddeev_leverrier(entries: Sequence[Sequence[Any]], zero: Any, one: Any,
                      reciprocal: Callable[[int], Any]) -> List[Any]:
    """Coefficients c_0..c_d of det(T I - A), lowest degree first.

    Works over any commutative ring of characteristic 0 in which the integers
    1..d can be inverted through ``reciprocal``.
    """
    d = len(entries)
    coefficients = [zero] * (d + 1)
    coefficients[d] = one

    def multiply(X, Y):
        return [[sum((X[i][l] * Y[l][j] for l in range(d)), zero) for j in range(d)] for i in range(d)]

    product = [[zero] * d for _ in range(d)]  # A M_0 with M_0 = 0
    for k in range(1, d + 1):
        c = coefficients[d - k + 1]
        Mk = [[product[i][j] + c if i == j else product[i][j] for j in range(d)] for i in range(d)]
        product = multiply(entries, Mk)
        trace = sum((product[i][i] for i in range(d)), zero)
        coefficients[d - k] = -(trace * reciprocal(k))
    return coefficients


@dataclass(frozen=True)
class UniPolynomial:
    """Univariate polynomial over K, coefficients c_0..c_d lowest degree first"""
    descriptor: FieldDescriptor
    coefficients: Tuple[ValuedScalar, ...]

    def __post_init__(self):
        coefficients = list(self.coefficients)
        while coefficients and coefficients[-1].is_zero:
            coefficients.pop()
        object.__setattr__(self, "coefficients", tuple(coefficients))

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def degree(self) -> int:
        """-1 for the zero polynomial"""
        return len(self.coefficients) - 1

    def __call__(self, x: ValuedScalar) -> ValuedScalar:
        result = self.descriptor.zero
        for c in reversed(self.coefficients):
            result = result * x + c
        return result

    @property
    def is_integral(self) -> bool:
        return all(is_integral(c) for c in self.coefficients)

    def render(self) -> List[str]:
        return [str(c) for c in self.coefficients]

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coefficients[k]
            if c.is_zero:
                continue
            power = "" if k == 0 else ("T" if k == 1 else f"T^{k}")
            if not power:
                terms.append(str(c))
            elif c == 1:
                terms.append(power)
            else:
                terms.append(f"({c})*{power}")
        return " + ".join(terms)


def characteristic_polynomial(M: Matrix) -> UniPolynomial:
    """det(T I - M) via the Faddeev-LeVerrier recurrence"""
    if not M.is_square:
        raise NonSquareError(f"Characteristic polynomial of a {M.rows}x{M.cols} matrix")
    descriptor = M.descriptor
    coefficients = faddeev_leverrier(
        M.entries, descriptor.zero, descriptor.one,
        lambda k: descriptor.scalar(Fraction(1, k)),
    )
    return UniPolynomial(descriptor, tuple(coefficients))


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex hull of (i, val c_i); zero roots are split off first"""
    vertices: Tuple[Tuple[int, Fraction], ...]
    slopes: Tuple[Fraction, ...]
    zero_root_multiplicity: int = 0

    def root_valuations(self) -> Tuple[Fraction, ...]:
        """Valuations of the nonzero roots in an algebraic closure"""
        return tuple(-slope for slope in self.slopes)

    @property
    def max_slope(self) -> Optional[Fraction]:
        return max(self.slopes) if self.slopes else None


def _cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def newton_polygon(f: UniPolynomial) -> NewtonPolygon:
    if f.is_zero:
        raise ZeroPolynomialError("The zero polynomial has no Newton polygon")
    zero_roots = next(i for i, c in enumerate(f.coefficients) if not c.is_zero)
    points = [
        (i, Fraction(int(valuation(c))))
        for i, c in enumerate(f.coefficients) if not c.is_zero
    ]
    hull: List[Tuple[int, Fraction]] = []
    for point in points:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], point) <= 0:
            hull.pop()
        hull.append(point)
    slopes: List[Fraction] = []
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        slopes.extend([Fraction(y1 - y0) / (x1 - x0)] * (x1 - x0))
    return NewtonPolygon(tuple(hull), tuple(slopes), zero_roots)


def check_vector(x: Sequence[Any], length: int, descriptor: FieldDescriptor) -> Vector:
    """Coerce a point to a vector of the given length"""
    if len(x) != length:
        raise DimensionMismatchError(f"Expected a point of dimension {length}, got {len(x)}")
    return tuple(descriptor.scalar(value) for value in x)
