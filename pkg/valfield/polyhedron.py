"""Polyhedra over K.

A polyhedron is stored in matrix form {x in K^n : Ax + v >= 0, Bx + w = 0}, where
``y >= 0`` for a vector means every coordinate is integral. Direct images are
computed constructively by factoring the map through its Smith Normal Form and
eliminating one coordinate at a time.
"""
import logging
from dataclasses import dataclass
from typing import Any, List, Optional, Sequence, Tuple

from .errors import DimensionMismatchError, EmptyPolyhedronError, FieldMismatchError
from .exact_linalg import (
    Matrix, SNFDecomposition, Vector, check_vector, inverse, kernel_basis, smith_normal_form,
    solve_affine, vector_add, vector_sub, zero_vector,
)
from .valued_scalar import (
    INFINITY, ExtValuation, FieldDescriptor, ValuedScalar, is_integral, power_of_uniformizer, valuation,
)

logger = logging.getLogger(__name__)

# An affine form (coefficients, constant) standing for <coefficients, x> + constant
Form = Tuple[Tuple[ValuedScalar, ...], ValuedScalar]


@dataclass(frozen=True)
class Polyhedron:
    """{x in K^n : A x + v >= 0, B x + w = 0}"""
    descriptor: FieldDescriptor
    n: int
    A: Matrix
    v: Vector
    B: Matrix
    w: Vector

    def __post_init__(self):
        for block in (self.A, self.B):
            if block.descriptor != self.descriptor:
                raise FieldMismatchError(f"Constraint block over {block.descriptor} in a polyhedron over {self.descriptor}")
            if block.cols != self.n:
                raise DimensionMismatchError(f"Constraint block has {block.cols} columns, ambient dimension is {self.n}")
        if len(self.v) != self.A.rows:
            raise DimensionMismatchError(f"{self.A.rows} inequality rows but {len(self.v)} constants")
        if len(self.w) != self.B.rows:
            raise DimensionMismatchError(f"{self.B.rows} equality rows but {len(self.w)} constants")
        object.__setattr__(self, "v", tuple(self.v))
        object.__setattr__(self, "w", tuple(self.w))

    @property
    def d(self) -> int:
        return self.A.rows

    @property
    def e(self) -> int:
        return self.B.rows

    @classmethod
    def from_rows(cls, descriptor: FieldDescriptor, n: int, A: Sequence[Sequence[Any]] = (), v: Sequence[Any] = (),
                  B: Sequence[Sequence[Any]] = (), w: Sequence[Any] = ()) -> "Polyhedron":
        return cls(
            descriptor, n,
            Matrix.from_rows(descriptor, A, cols=n), tuple(descriptor.scalar(x) for x in v),
            Matrix.from_rows(descriptor, B, cols=n), tuple(descriptor.scalar(x) for x in w),
        )

    @classmethod
    def inequalities(cls, A: Matrix, v: Sequence[ValuedScalar]) -> "Polyhedron":
        return cls(A.descriptor, A.cols, A, tuple(v), Matrix.zeros(A.descriptor, 0, A.cols), ())

    @classmethod
    def whole_space(cls, descriptor: FieldDescriptor, n: int) -> "Polyhedron":
        return cls.from_rows(descriptor, n)

    @classmethod
    def unit_polydisc(cls, descriptor: FieldDescriptor, n: int) -> "Polyhedron":
        return cls.inequalities(Matrix.identity(descriptor, n), zero_vector(descriptor, n))

    @classmethod
    def empty(cls, descriptor: FieldDescriptor, n: int) -> "Polyhedron":
        """The canonical empty polyhedron: the single row 0.x + 1/pi >= 0"""
        return cls(
            descriptor, n,
            Matrix.zeros(descriptor, 1, n), (power_of_uniformizer(descriptor, -1),),
            Matrix.zeros(descriptor, 0, n), (),
        )

    def product(self, other: "Polyhedron") -> "Polyhedron":
        """P x P' inside K^(n + n')"""
        return Polyhedron(
            self.descriptor, self.n + other.n,
            Matrix.block_diagonal(self.descriptor, [self.A, other.A]), self.v + other.v,
            Matrix.block_diagonal(self.descriptor, [self.B, other.B]), self.w + other.w,
        )

    def contains(self, x: Sequence[Any]) -> bool:
        return contains(self, x)


@dataclass(frozen=True)
class AffineMap:
    """x -> F x + g from K^n to K^m"""
    F: Matrix
    g: Vector

    def __post_init__(self):
        if len(self.g) != self.F.rows:
            raise DimensionMismatchError(f"Offset of length {len(self.g)} for a map into K^{self.F.rows}")
        object.__setattr__(self, "g", tuple(self.g))

    @property
    def descriptor(self) -> FieldDescriptor:
        return self.F.descriptor

    @property
    def source_dim(self) -> int:
        return self.F.cols

    @property
    def target_dim(self) -> int:
        return self.F.rows

    @classmethod
    def linear(cls, F: Matrix) -> "AffineMap":
        return cls(F, zero_vector(F.descriptor, F.rows))

    @classmethod
    def projection(cls, descriptor: FieldDescriptor, n: int, keep: int) -> "AffineMap":
        """Keep the first ``keep`` coordinates of K^n"""
        F = Matrix.hstack(Matrix.identity(descriptor, keep), Matrix.zeros(descriptor, keep, n - keep))
        return cls.linear(F)

    @classmethod
    def translation(cls, descriptor: FieldDescriptor, t: Sequence[Any]) -> "AffineMap":
        return cls(Matrix.identity(descriptor, len(t)), tuple(descriptor.scalar(x) for x in t))

    def __call__(self, x: Sequence[Any]) -> Vector:
        x = check_vector(x, self.source_dim, self.descriptor)
        return vector_add(self.F.apply(x), self.g)


BALL_EMPTY = "empty"
BALL_ALL = "all"
BALL_FINITE = "ball"


@dataclass(frozen=True)
class Ball:
    """{x : val(x - center) >= radius}; the empty set and K are separate kinds.

    An infinite radius is the single point ``center``.
    """
    descriptor: FieldDescriptor
    kind: str
    center: Optional[ValuedScalar] = None
    radius: ExtValuation = INFINITY

    @classmethod
    def empty(cls, descriptor: FieldDescriptor) -> "Ball":
        return cls(descriptor, BALL_EMPTY)

    @classmethod
    def everything(cls, descriptor: FieldDescriptor) -> "Ball":
        return cls(descriptor, BALL_ALL)

    @classmethod
    def around(cls, center: ValuedScalar, radius) -> "Ball":
        if isinstance(radius, int):
            radius = ExtValuation.finite(radius)
        return cls(center.descriptor, BALL_FINITE, center, radius)

    def contains(self, x: Any) -> bool:
        if self.kind == BALL_EMPTY:
            return False
        if self.kind == BALL_ALL:
            return True
        return valuation(self.descriptor.scalar(x) - self.center) >= self.radius

    def intersect(self, other: "Ball") -> "Ball":
        """Two balls are nested or disjoint"""
        if self.kind == BALL_EMPTY or other.kind == BALL_ALL:
            return self
        if other.kind == BALL_EMPTY or self.kind == BALL_ALL:
            return other
        small, large = (self, other) if self.radius >= other.radius else (other, self)
        return small if large.contains(small.center) else Ball.empty(self.descriptor)

    def minkowski_sum(self, other: "Ball") -> "Ball":
        if BALL_EMPTY in (self.kind, other.kind):
            return Ball.empty(self.descriptor)
        if BALL_ALL in (self.kind, other.kind):
            return Ball.everything(self.descriptor)
        return Ball.around(self.center + other.center, min(self.radius, other.radius))

    def same_set(self, other: "Ball") -> bool:
        if self.kind != other.kind:
            return False
        if self.kind != BALL_FINITE:
            return True
        return self.radius == other.radius and self.contains(other.center)

    def as_polyhedron(self) -> Polyhedron:
        descriptor = self.descriptor
        if self.kind == BALL_EMPTY:
            return Polyhedron.empty(descriptor, 1)
        if self.kind == BALL_ALL:
            return Polyhedron.whole_space(descriptor, 1)
        if self.radius.is_infinite:
            return Polyhedron.from_rows(descriptor, 1, B=[[1]], w=[-self.center])
        scale = power_of_uniformizer(descriptor, -int(self.radius))
        return Polyhedron.from_rows(descriptor, 1, A=[[scale]], v=[-(scale * self.center)])

    def __str__(self) -> str:
        if self.kind != BALL_FINITE:
            return self.kind
        return f"B({self.center}, {self.radius})"


@dataclass(frozen=True)
class PolydiscImage:
    """P = base_point + linear_part(D) where D = {z : s_i z_i + c_i >= 0 for each disc (s_i, c_i)}.

    A disc with s_i = 0 leaves z_i free.
    """
    base_point: Vector
    linear_part: Matrix
    discs: Tuple[Tuple[ValuedScalar, ValuedScalar], ...]

    @property
    def descriptor(self) -> FieldDescriptor:
        return self.linear_part.descriptor

    def disc_contains(self, z: Sequence[Any]) -> bool:
        z = check_vector(z, len(self.discs), self.descriptor)
        return all(s.is_zero or is_integral(s * zi + c) for (s, c), zi in zip(self.discs, z))

    def map_point(self, z: Sequence[Any]) -> Vector:
        z = check_vector(z, len(self.discs), self.descriptor)
        return vector_add(self.base_point, self.linear_part.apply(z))

    def disc_center(self) -> Vector:
        return tuple(self.descriptor.zero if s.is_zero else -(c / s) for s, c in self.discs)


@dataclass(frozen=True)
class EmptinessResult:
    """Truthy when the polyhedron is empty; otherwise carries a point of it"""
    empty: bool
    witness: Optional[Vector] = None

    def __bool__(self) -> bool:
        return self.empty


@dataclass(frozen=True)
class _PolydiscData:
    x0: Vector
    J: Matrix
    snf: SNFDecomposition
    constants: Vector


def contains(P: Polyhedron, x: Sequence[Any]) -> bool:
    x = check_vector(x, P.n, P.descriptor)
    if not all(is_integral(value) for value in vector_add(P.A.apply(x), P.v)):
        return False
    return all(value.is_zero for value in vector_add(P.B.apply(x), P.w))


def _polydisc_data(P: Polyhedron) -> Optional[_PolydiscData]:
    """Parametrize the equalities, then diagonalize the inequalities.

    Returns None when P is empty.
    """
    x0 = solve_affine(P.B, tuple(-value for value in P.w))
    if x0 is None:
        logger.debug("Equality block is inconsistent")
        return None
    J = kernel_basis(P.B)
    reduced = P.A @ J
    shifted = vector_add(P.A.apply(x0), P.v)
    snf = smith_normal_form(reduced)
    constants = snf.Q.apply(shifted)
    for i in range(snf.rank, P.d):
        if not is_integral(constants[i]):
            logger.debug(f"Row {i} of the diagonal system has non-integral constant {constants[i]}")
            return None
    return _PolydiscData(x0, J, snf, constants)


def _polydisc_image(data: _PolydiscData) -> PolydiscImage:
    descriptor = data.J.descriptor
    R = data.J.cols
    diagonal = data.snf.diagonal
    discs = tuple(
        (diagonal[i] if i < len(diagonal) else descriptor.zero, data.constants[i] if i < data.snf.rank else descriptor.zero)
        for i in range(R)
    )
    return PolydiscImage(data.x0, data.J @ data.snf.P_inv, discs)


def is_empty(P: Polyhedron) -> EmptinessResult:
    data = _polydisc_data(P)
    if data is None:
        return EmptinessResult(True)
    image = _polydisc_image(data)
    return EmptinessResult(False, image.map_point(image.disc_center()))


def as_polydisc_image(P: Polyhedron) -> PolydiscImage:
    data = _polydisc_data(P)
    if data is None:
        raise EmptyPolyhedronError("An empty polyhedron is not the image of a polydisc")
    return _polydisc_image(data)


def canonical_ball_form(P: Polyhedron) -> Ball:
    """Write a polyhedron in K as empty, all of K, or a single ball"""
    if P.n != 1:
        raise DimensionMismatchError(f"Ball form needs a polyhedron in K, got ambient dimension {P.n}")
    descriptor = P.descriptor
    data = _polydisc_data(P)
    if data is None:
        return Ball.empty(descriptor)
    image = _polydisc_image(data)
    center = image.base_point[0]
    radius = INFINITY
    for k, (s, c) in enumerate(image.discs):
        a = image.linear_part[0, k]
        if a.is_zero:
            continue
        if s.is_zero:
            return Ball.everything(descriptor)
        center = center - a * c / s
        radius = min(radius, valuation(a) - valuation(s))
    return Ball.around(center, radius)


def intersect(P1: Polyhedron, P2: Polyhedron) -> Polyhedron:
    if P1.n != P2.n:
        raise DimensionMismatchError(f"Cannot intersect polyhedra in K^{P1.n} and K^{P2.n}")
    return Polyhedron(
        P1.descriptor, P1.n,
        Matrix.vstack(P1.A, P2.A), P1.v + P2.v,
        Matrix.vstack(P1.B, P2.B), P1.w + P2.w,
    )


def translate(P: Polyhedron, t: Sequence[Any]) -> Polyhedron:
    """{x + t : x in P}"""
    t = check_vector(t, P.n, P.descriptor)
    return Polyhedron(
        P.descriptor, P.n,
        P.A, vector_sub(P.v, P.A.apply(t)),
        P.B, vector_sub(P.w, P.B.apply(t)),
    )


def apply_automorphism(P: Polyhedron, U: Matrix, U_inv: Optional[Matrix] = None) -> Polyhedron:
    """{U x : x in P} for invertible U"""
    if U.rows != P.n or U.cols != P.n:
        raise DimensionMismatchError(f"Automorphism of shape {U.rows}x{U.cols} on K^{P.n}")
    U_inv = inverse(U) if U_inv is None else U_inv
    return Polyhedron(P.descriptor, P.n, P.A @ U_inv, P.v, P.B @ U_inv, P.w)


def apply_diagonal(P: Polyhedron, deltas: Sequence[ValuedScalar]) -> Polyhedron:
    """{D x : x in P} for D = diag(deltas), all deltas nonzero"""
    if len(deltas) != P.n:
        raise DimensionMismatchError(f"{len(deltas)} scaling factors on K^{P.n}")
    D_inv = Matrix.diagonal(P.descriptor, [delta.inverse() for delta in deltas])
    return Polyhedron(P.descriptor, P.n, P.A @ D_inv, P.v, P.B @ D_inv, P.w)


def immerse(P: Polyhedron, m: int) -> Polyhedron:
    """{(x, 0) : x in P} inside K^m"""
    descriptor = P.descriptor
    extra = m - P.n
    if extra < 0:
        raise DimensionMismatchError(f"Cannot immerse K^{P.n} into K^{m}")
    A = Matrix.hstack(P.A, Matrix.zeros(descriptor, P.d, extra))
    B = Matrix.vstack(
        Matrix.hstack(P.B, Matrix.zeros(descriptor, P.e, extra)),
        Matrix.hstack(Matrix.zeros(descriptor, extra, P.n), Matrix.identity(descriptor, extra)),
    )
    return Polyhedron(descriptor, m, A, P.v, B, P.w + zero_vector(descriptor, extra))


def _scale_form(form: Form, c: ValuedScalar) -> Form:
    coefficients, constant = form
    return tuple(c * x for x in coefficients), c * constant


def _sub_form(left: Form, right: Form) -> Form:
    return vector_sub(left[0], right[0]), left[1] - right[1]


def _prune(P: Polyhedron) -> Polyhedron:
    """Drop constant rows, collapsing to the canonical empty polyhedron when one fails"""
    descriptor = P.descriptor
    A_rows, v = [], []
    for row, constant in zip(P.A.entries, P.v):
        if all(x.is_zero for x in row):
            if not is_integral(constant):
                return Polyhedron.empty(descriptor, P.n)
            continue
        A_rows.append(row)
        v.append(constant)
    B_rows, w = [], []
    for row, constant in zip(P.B.entries, P.w):
        if all(x.is_zero for x in row):
            if not constant.is_zero:
                return Polyhedron.empty(descriptor, P.n)
            continue
        B_rows.append(row)
        w.append(constant)
    return Polyhedron(
        descriptor, P.n,
        Matrix(descriptor, len(A_rows), P.n, tuple(A_rows)), tuple(v),
        Matrix(descriptor, len(B_rows), P.n, tuple(B_rows)), tuple(w),
    )


def project_last_coordinate(P: Polyhedron) -> Polyhedron:
    """Image of P under (x_1, ..., x_k) -> (x_1, ..., x_{k-1}).

    The first k-1 columns are diagonalized by their Smith Normal Form; rows that
    then involve only x_k are balls for x_k, and rows that involve both are
    eliminated ultrametrically against the pivot row of smallest valuation.
    """
    if P.n == 0:
        raise DimensionMismatchError("Nothing to project in K^0")
    if P.e:
        return direct_image(AffineMap.projection(P.descriptor, P.n, P.n - 1), P)
    descriptor = P.descriptor
    k, d = P.n, P.d
    head = P.A.submatrix(range(d), range(k - 1))
    snf = smith_normal_form(head)
    r = snf.rank
    a = snf.Q.apply(P.A.column_vector(k - 1))
    c = snf.Q.apply(P.v)

    forms: List[Form] = []
    for i in range(r):
        coefficients = [descriptor.zero] * (k - 1)
        coefficients[i] = snf.S[i, i]
        forms.append((tuple(coefficients), c[i]))

    ball_rows = []
    for i in range(r, d):
        if not a[i].is_zero:
            ball_rows.append(i)
        elif not is_integral(c[i]):
            logger.debug(f"Constant row {i} fails, projection is empty")
            return Polyhedron.empty(descriptor, k - 1)

    if ball_rows:
        # smallest ball: least val(a_s), ties to the last row
        star = min(ball_rows, key=lambda i: (valuation(a[i]), -i))
        center = -(c[star] / a[star])
        for i in ball_rows:
            if not is_integral(a[i] * center + c[i]):
                logger.debug(f"Balls of rows {star} and {i} are disjoint, projection is empty")
                return Polyhedron.empty(descriptor, k - 1)
        # u = a_star x_k + c_star ranges over the valuation ring
        weights = [a[i] / a[star] for i in range(r)]
        forms = [(coefficients, constant - weight * c[star]) for (coefficients, constant), weight in zip(forms, weights)]
        candidates = [i for i in range(r) if not weights[i].is_zero and valuation(weights[i]) < 0]
    else:
        weights = [a[i] for i in range(r)]
        candidates = [i for i in range(r) if not weights[i].is_zero]

    if not candidates:
        rows = forms
    else:
        pivot = min(candidates, key=lambda i: (valuation(weights[i]), i))
        logger.debug(f"Eliminating x_{k} against row {pivot} ({'bounded' if ball_rows else 'free'})")
        rows = []
        for i, form in enumerate(forms):
            if i == pivot:
                if ball_rows:
                    rows.append(_scale_form(form, weights[pivot].inverse()))
                continue
            rows.append(_sub_form(form, _scale_form(forms[pivot], weights[i] / weights[pivot])))

    coefficients = Matrix(descriptor, len(rows), k - 1, tuple(row for row, _ in rows))
    projected = Polyhedron.inequalities(coefficients @ snf.P, tuple(constant for _, constant in rows))
    return _prune(projected)


def _linear_image(F: Matrix, P: Polyhedron) -> Polyhedron:
    """F(P) for an inequality-only P, through F = Q_inv . Delta . P"""
    descriptor = P.descriptor
    m, R = F.rows, F.cols
    snf = smith_normal_form(F)
    r = snf.rank
    image = apply_automorphism(P, snf.P, snf.P_inv)
    for _ in range(R - r):
        image = project_last_coordinate(image)
    logger.debug(f"Projected K^{R} onto K^{r}")
    image = apply_diagonal(image, [snf.S[i, i] for i in range(r)])
    image = immerse(image, m)
    return apply_automorphism(image, snf.Q_inv, snf.Q)


def direct_image(f: AffineMap, P: Polyhedron) -> Polyhedron:
    """f(P) as a polyhedron in the target space"""
    if f.source_dim != P.n:
        raise DimensionMismatchError(f"Map from K^{f.source_dim} applied to a polyhedron in K^{P.n}")
    if f.descriptor != P.descriptor:
        raise FieldMismatchError("Map and polyhedron live over different fields")
    descriptor = P.descriptor
    m = f.target_dim
    if is_empty(P):
        return Polyhedron.empty(descriptor, m)
    x0 = solve_affine(P.B, tuple(-value for value in P.w))
    J = kernel_basis(P.B)
    inner = Polyhedron.inequalities(P.A @ J, vector_add(P.A.apply(x0), P.v))
    linear = f.F @ J
    offset = vector_add(f.F.apply(x0), f.g)
    logger.debug(f"Direct image: {P.n} -> {m}, equality block leaves {J.cols} free coordinates")
    image = _linear_image(linear, inner)
    return _prune(translate(image, offset))


def minkowski_sum(P1: Polyhedron, P2: Polyhedron) -> Polyhedron:
    """{s + t : s in P1, t in P2} as the image of P1 x P2 under the sum map"""
    if P1.n != P2.n:
        raise DimensionMismatchError(f"Minkowski sum of polyhedra in K^{P1.n} and K^{P2.n}")
    descriptor = P1.descriptor
    identity = Matrix.identity(descriptor, P1.n)
    return direct_image(AffineMap.linear(Matrix.hstack(identity, identity)), P1.product(P2))
