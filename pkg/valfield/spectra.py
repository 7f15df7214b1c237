"""The positive semidefinite cone over K and spectrahedra.

A square matrix over K is PSD when all of its eigenvalues, taken in an algebraic
closure, have nonnegative valuation. That happens exactly when its characteristic
polynomial has integral coefficients, which is the test used here.
"""
import logging
from dataclasses import dataclass
from typing import Any, Callable, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ
from sympy.polys.rings import ring

from .errors import DimensionMismatchError, FieldMismatchError, InvalidBoundsError
from .exact_linalg import (
    Matrix, UniPolynomial, Vector, characteristic_polynomial, check_vector, faddeev_leverrier, newton_polygon,
)
from .oracle import SampleGrid, sample_scalars, set_differs_from_every_ball
from .polyhedron import Polyhedron, contains
from .valued_scalar import FieldDescriptor, ValuedScalar, is_integral, power_of_uniformizer, valuation

logger = logging.getLogger(__name__)


def is_psd(M: Matrix) -> bool:
    return characteristic_polynomial(M).is_integral


def psd_newton_crosscheck(M: Matrix) -> bool:
    """PSD through the Newton polygon: no slope of the characteristic polynomial is positive"""
    polygon = newton_polygon(characteristic_polynomial(M))
    return polygon.max_slope is None or polygon.max_slope <= 0


@dataclass(frozen=True)
class Pencil:
    """x -> A_0 + x_1 A_1 + ... + x_n A_n with square d x d matrices"""
    descriptor: FieldDescriptor
    size: int
    n: int
    matrices: Tuple[Matrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "matrices", tuple(self.matrices))
        if len(self.matrices) != self.n + 1:
            raise DimensionMismatchError(f"A pencil in {self.n} variables needs {self.n + 1} matrices, got {len(self.matrices)}")
        for M in self.matrices:
            if M.descriptor != self.descriptor:
                raise FieldMismatchError("Pencil matrices live over different fields")
            if M.rows != self.size or M.cols != self.size:
                raise DimensionMismatchError(f"Pencil matrix of shape {M.rows}x{M.cols}, expected {self.size}x{self.size}")

    @classmethod
    def from_matrices(cls, matrices: Sequence[Matrix]) -> "Pencil":
        first = matrices[0]
        return cls(first.descriptor, first.rows, len(matrices) - 1, tuple(matrices))

    @classmethod
    def from_polyhedron(cls, P: Polyhedron) -> "Pencil":
        """diag(l_1(x), ..., l_d(x)) for the inequality rows of P.

        The equality rows are not part of the pencil; pass them as the affine
        section (see ``equality_section``).
        """
        descriptor = P.descriptor
        matrices = [Matrix.diagonal(descriptor, P.v)]
        for k in range(P.n):
            matrices.append(Matrix.diagonal(descriptor, P.A.column_vector(k)))
        return cls(descriptor, P.d, P.n, tuple(matrices))

    def evaluate(self, x: Sequence[Any]) -> Matrix:
        x = check_vector(x, self.n, self.descriptor)
        result = self.matrices[0]
        for value, M in zip(x, self.matrices[1:]):
            result = result + M.scale(value)
        return result

    def intersect(self, other: "Pencil") -> "Pencil":
        """Block-diagonal pencil cutting out the intersection of both spectrahedra"""
        if other.n != self.n:
            raise DimensionMismatchError(f"Pencils in {self.n} and {other.n} variables")
        matrices = tuple(
            Matrix.block_diagonal(self.descriptor, [mine, theirs])
            for mine, theirs in zip(self.matrices, other.matrices)
        )
        return Pencil(self.descriptor, self.size + other.size, self.n, matrices)


def equality_section(P: Polyhedron) -> Optional[Polyhedron]:
    if not P.e:
        return None
    return Polyhedron(P.descriptor, P.n, Matrix.zeros(P.descriptor, 0, P.n), (), P.B, P.w)


def spectrahedron_contains(S: Pencil, x: Sequence[Any], section: Optional[Polyhedron] = None) -> bool:
    x = check_vector(x, S.n, S.descriptor)
    if section is not None and not contains(section, x):
        return False
    return is_psd(S.evaluate(x))


@dataclass(frozen=True)
class SemialgebraicDescription:
    """The non-leading coefficients p_0..p_{d-1} of the characteristic polynomial of A(x).

    The spectrahedron is the set where every p_i(x) is integral.
    """
    descriptor: FieldDescriptor
    n: int
    variables: Tuple[str, ...]
    coefficients: Tuple[Any, ...]

    def evaluate(self, x: Sequence[Any]) -> Vector:
        x = check_vector(x, self.n, self.descriptor)
        padded = x + tuple(self.descriptor.zero for _ in range(len(self.variables) - self.n))
        values = []
        for poly in self.coefficients:
            total = self.descriptor.zero
            for monom, coeff in poly.terms():
                term = ValuedScalar(self.descriptor, coeff)
                for value, exponent in zip(padded, monom):
                    term = term * value ** exponent
                total = total + term
            values.append(total)
        return tuple(values)

    def contains(self, x: Sequence[Any]) -> bool:
        return all(is_integral(value) for value in self.evaluate(x))

    def render(self) -> List[str]:
        return [str(poly.as_expr()).replace("**", "^") for poly in self.coefficients]


def _variable_names(descriptor: FieldDescriptor, n: int) -> Tuple[str, ...]:
    # ring generators must not share a name with the Laurent variable
    for prefix in ("x", "y"):
        names = tuple(f"{prefix}{k + 1}" for k in range(n))
        if descriptor.var not in names:
            return names


def semialgebraic_description(S: Pencil) -> SemialgebraicDescription:
    """Characteristic polynomial coefficients of the pencil, computed symbolically in x"""
    descriptor = S.descriptor
    domain = descriptor.domain
    names = _variable_names(descriptor, max(S.n, 1))
    R, *gens = ring(",".join(names), domain)

    def entry(i: int, j: int):
        poly = R.ground_new(S.matrices[0][i, j].value)
        for gen, M in zip(gens, S.matrices[1:]):
            poly = poly + gen * R.ground_new(M[i, j].value)
        return poly

    entries = [[entry(i, j) for j in range(S.size)] for i in range(S.size)]
    coefficients = faddeev_leverrier(
        entries, R.zero, R.one,
        lambda k: R.ground_new(domain.convert_from(QQ(1, k), QQ)),
    )
    logger.debug(f"Semialgebraic description of a {S.size}x{S.size} pencil in {S.n} variables")
    return SemialgebraicDescription(descriptor, S.n, names, tuple(coefficients[:-1]))


@dataclass(frozen=True)
class Diskoid:
    """{x in K : val f(x) >= radius}"""
    polynomial: UniPolynomial
    radius: int = 0

    def contains(self, x: Any) -> bool:
        descriptor = self.polynomial.descriptor
        return valuation(self.polynomial(descriptor.scalar(x))) >= self.radius


def spectrahedron_diskoids(S: Pencil) -> List[Diskoid]:
    """A spectrahedron in K as an intersection of diskoids Disk(p_i, 0)"""
    if S.n != 1:
        raise DimensionMismatchError(f"Diskoids describe spectrahedra in K, got {S.n} variables")
    description = semialgebraic_description(S)
    descriptor = S.descriptor
    diskoids = []
    for poly in description.coefficients:
        if not poly:
            continue
        degree = max(monom[0] for monom in poly.monoms())
        coefficients = [descriptor.zero] * (degree + 1)
        for monom, coeff in poly.terms():
            coefficients[monom[0]] = ValuedScalar(descriptor, coeff)
        diskoids.append(Diskoid(UniPolynomial(descriptor, tuple(coefficients))))
    return diskoids


@dataclass(frozen=True)
class Annulus:
    """{x in K : lower <= val(x) <= upper}"""
    lower: int
    upper: int

    def __post_init__(self):
        for bound in (self.lower, self.upper):
            if isinstance(bound, bool) or not isinstance(bound, int):
                raise InvalidBoundsError(f"Annulus bounds must be integers, got {bound!r}")
        if not 1 <= self.lower <= self.upper:
            raise InvalidBoundsError(f"Annulus bounds must satisfy 1 <= a <= b, got a={self.lower}, b={self.upper}")

    def contains(self, x: ValuedScalar) -> bool:
        v = valuation(x)
        return not v.is_infinite and self.lower <= int(v) <= self.upper


@dataclass(frozen=True)
class SDRepresentation:
    """Projection onto the first n coordinates of a spectrahedron in n + height variables"""
    pencil: Pencil
    n: int
    height: int

    def __post_init__(self):
        if self.pencil.n != self.n + self.height:
            raise DimensionMismatchError(f"Pencil has {self.pencil.n} variables, expected {self.n} + {self.height}")

    @property
    def degree(self) -> int:
        return self.pencil.size

    @property
    def descriptor(self) -> FieldDescriptor:
        return self.pencil.descriptor

    def contains_with_witness(self, x: Sequence[Any], y: Sequence[Any]) -> bool:
        x = check_vector(x, self.n, self.descriptor)
        y = check_vector(y, self.height, self.descriptor)
        return is_psd(self.pencil.evaluate(x + y))

    def contains(self, x: Sequence[Any], witness: Optional[Callable[[Vector], Optional[Vector]]] = None) -> bool:
        """Membership through a witness map; defaults to y = 1/x coordinatewise"""
        x = check_vector(x, self.n, self.descriptor)
        y = (witness or reciprocal_witness)(x)
        return y is not None and self.contains_with_witness(x, y)


def reciprocal_witness(x: Vector) -> Optional[Vector]:
    if any(value.is_zero for value in x):
        return None
    return tuple(value.inverse() for value in x)


def _annulus_blocks(descriptor: FieldDescriptor, annulus: Annulus) -> Tuple[Matrix, Matrix, Matrix]:
    """Constant, x and y parts of diag(pi^-a x, pi^b y, [[1/pi, -x/pi], [y/pi, -1/pi]])"""
    inv_pi = power_of_uniformizer(descriptor, -1)
    constant = Matrix.from_rows(descriptor, [
        [0, 0, 0, 0],
        [0, 0, 0, 0],
        [0, 0, inv_pi, 0],
        [0, 0, 0, -inv_pi],
    ])
    x_part = Matrix.from_rows(descriptor, [
        [power_of_uniformizer(descriptor, -annulus.lower), 0, 0, 0],
        [0, 0, 0, 0],
        [0, 0, 0, -inv_pi],
        [0, 0, 0, 0],
    ])
    y_part = Matrix.from_rows(descriptor, [
        [0, 0, 0, 0],
        [0, power_of_uniformizer(descriptor, annulus.upper), 0, 0],
        [0, 0, 0, 0],
        [0, 0, inv_pi, 0],
    ])
    return constant, x_part, y_part


def polyannulus_sdr(descriptor: FieldDescriptor, annuli: Sequence[Annulus]) -> SDRepresentation:
    """Block-diagonal representation of a product of annuli in variables (x_1..x_n, y_1..y_n)"""
    n = len(annuli)
    blocks = [_annulus_blocks(descriptor, annulus) for annulus in annuli]
    empty = Matrix.zeros(descriptor, 4, 4)

    def assemble(chosen: int, part: int) -> Matrix:
        return Matrix.block_diagonal(descriptor, [block[part] if k == chosen else empty for k, block in enumerate(blocks)])

    constant = Matrix.block_diagonal(descriptor, [block[0] for block in blocks])
    x_parts = [assemble(k, 1) for k in range(n)]
    y_parts = [assemble(k, 2) for k in range(n)]
    pencil = Pencil(descriptor, 4 * n, 2 * n, tuple([constant] + x_parts + y_parts))
    return SDRepresentation(pencil, n, n)


def annulus_sdr(descriptor: FieldDescriptor, a: int, b: int) -> SDRepresentation:
    return polyannulus_sdr(descriptor, [Annulus(a, b)])


def annulus_is_not_ball_check(descriptor: FieldDescriptor, a: int, b: int, grid=None) -> bool:
    """Sampled evidence that the annulus differs from every ball centred in it"""
    annulus = Annulus(a, b)
    grid = grid or SampleGrid.default(descriptor, k_min=a - 3, k_max=b + 3)
    samples = list(sample_scalars(grid))
    centers = [x for x in samples if annulus.contains(x)]
    return set_differs_from_every_ball(annulus.contains, centers, range(a - 2, b + 3), samples)
