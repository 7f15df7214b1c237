"""Linear programming over K: optimize val<c, x> subject to Ax + b >= 0, Dx = e.

The solver removes the equality block by parametrizing its solution space,
diagonalizes the inequality block with the Smith Normal Form, and reads the
optimum off the diagonal problem in closed form.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional, Sequence

from .errors import DimensionMismatchError, FieldMismatchError, InconsistentEqualitiesError, ValidationError
from .exact_linalg import (
    Matrix, Vector, check_vector, dot, kernel_basis, smith_normal_form, solve_affine,
    vector_add, vector_scale, vector_sub, zero_vector,
)
from .polyhedron import Polyhedron
from .valued_scalar import INFINITY, ExtValuation, FieldDescriptor, is_integral, valuation

logger = logging.getLogger(__name__)

MINIMIZE = "min"
MAXIMIZE = "max"

REASON_EQUALITIES = "equality system inconsistent"
REASON_CONSTANTS = "constant block non-integral"


class LPStatus(str, Enum):
    INFEAS = "INFEAS"
    UNBOUND = "UNBOUND"
    FEAS = "FEAS"


@dataclass(frozen=True)
class LPInstance:
    """optimize val<c, x> subject to A x + b >= 0 and D x = e"""
    A: Matrix
    b: Vector
    c: Vector
    D: Matrix
    e: Vector
    sense: str = MINIMIZE

    def __post_init__(self):
        n = self.A.cols
        if self.D.descriptor != self.A.descriptor:
            raise FieldMismatchError("Inequality and equality blocks live over different fields")
        if self.D.cols != n or len(self.c) != n:
            raise DimensionMismatchError(f"Inconsistent number of variables: A has {n}, D has {self.D.cols}, c has {len(self.c)}")
        if len(self.b) != self.A.rows:
            raise DimensionMismatchError(f"A has {self.A.rows} rows but b has {len(self.b)} entries")
        if len(self.e) != self.D.rows:
            raise DimensionMismatchError(f"D has {self.D.rows} rows but e has {len(self.e)} entries")
        if self.sense not in (MINIMIZE, MAXIMIZE):
            raise ValidationError(f"Unknown optimization sense {self.sense!r}")
        for name in ("b", "c", "e"):
            object.__setattr__(self, name, check_vector(getattr(self, name), len(getattr(self, name)), self.descriptor))

    @classmethod
    def from_rows(cls, descriptor: FieldDescriptor, A: Sequence[Sequence[Any]], b: Sequence[Any], c: Sequence[Any],
                  D: Sequence[Sequence[Any]] = (), e: Sequence[Any] = (), sense: str = MINIMIZE) -> "LPInstance":
        n = len(c)
        return cls(
            Matrix.from_rows(descriptor, A, cols=n), tuple(descriptor.scalar(x) for x in b),
            tuple(descriptor.scalar(x) for x in c),
            Matrix.from_rows(descriptor, D, cols=n), tuple(descriptor.scalar(x) for x in e),
            sense,
        )

    @property
    def descriptor(self) -> FieldDescriptor:
        return self.A.descriptor

    @property
    def n(self) -> int:
        return self.A.cols

    def feasible_set(self) -> Polyhedron:
        return Polyhedron(self.descriptor, self.n, self.A, self.b, self.D, tuple(-x for x in self.e))

    def objective(self, x: Sequence[Any]) -> ExtValuation:
        return valuation(dot(self.c, check_vector(x, self.n, self.descriptor), self.descriptor))


@dataclass(frozen=True)
class UnboundedRay:
    """base + alpha * direction is feasible for every alpha and <c, direction> != 0"""
    base: Vector
    direction: Vector
    index: int


@dataclass(frozen=True)
class LPOutcome:
    status: LPStatus
    point: Optional[Vector] = None
    value: Optional[ExtValuation] = None
    reason: str = ""
    ray: Optional[UnboundedRay] = None


@dataclass(frozen=True)
class ReducedLP:
    """Equality-free problem over K^R with x = base + J y"""
    instance: LPInstance
    base: Vector
    J: Matrix

    def lift(self, y: Sequence[Any]) -> Vector:
        return vector_add(self.base, self.J.apply(y))

    def lift_direction(self, y: Sequence[Any]) -> Vector:
        return self.J.apply(y)


@dataclass(frozen=True)
class DiagonalLP:
    """Diagonal problem S y + b >= 0 in the coordinates y = P x"""
    S: Matrix
    b: Vector
    c: Vector
    P_inv: Matrix
    sense: str = MINIMIZE

    def lift(self, y: Sequence[Any]) -> Vector:
        return self.P_inv.apply(y)


def reduce_equalities(instance: LPInstance) -> ReducedLP:
    """Parametrize {Dx = e} as base + J y.

    When <c, .> is not constant on the solution space the base point is moved
    so that <c, base> = 0, which keeps the reduced objective exactly linear.
    """
    descriptor = instance.descriptor
    base = solve_affine(instance.D, instance.e)
    if base is None:
        raise InconsistentEqualitiesError("Dx = e has no solution")
    J = kernel_basis(instance.D)
    reduced_c = J.transpose().apply(instance.c)
    offset = dot(instance.c, base, descriptor)
    pivot = next((k for k, value in enumerate(reduced_c) if not value.is_zero), None)
    if pivot is not None and not offset.is_zero:
        base = vector_sub(base, vector_scale(offset / reduced_c[pivot], J.column_vector(pivot)))
    reduced = LPInstance(
        instance.A @ J, vector_add(instance.b, instance.A.apply(base)), reduced_c,
        Matrix.zeros(descriptor, 0, J.cols), (), instance.sense,
    )
    logger.debug(f"Reduced {instance.n} variables to {J.cols} free ones")
    return ReducedLP(reduced, base, J)


def diagonalize_lp(instance: LPInstance) -> DiagonalLP:
    if instance.D.rows:
        raise ValidationError("Diagonalization needs an instance without equalities")
    snf = smith_normal_form(instance.A)
    return DiagonalLP(
        snf.S, snf.Q.apply(instance.b), snf.P_inv.transpose().apply(instance.c), snf.P_inv, instance.sense,
    )


def _unit(descriptor: FieldDescriptor, length: int, index: int, value) -> Vector:
    y = list(zero_vector(descriptor, length))
    y[index] = value
    return tuple(y)


def solve_diagonal_lp(S: Matrix, b: Sequence[Any], c: Sequence[Any], sense: str = MINIMIZE) -> LPOutcome:
    """Closed-form optimum of val<c, y> over {y : S y + b >= 0} for S in Smith shape.

    Over the bounded coordinates the objective sweeps out lam + pi^v O with
    lam = <c, centre> and v = min val(c_i / s_i).
    """
    descriptor = S.descriptor
    d, R = S.rows, S.cols
    b = check_vector(b, d, descriptor)
    c = check_vector(c, R, descriptor)
    r = 0
    while r < min(d, R) and not S[r, r].is_zero:
        r += 1
    for i in range(r, d):
        if not is_integral(b[i]):
            logger.debug(f"Row {i} reads val({b[i]}) >= 0, infeasible")
            return LPOutcome(LPStatus.INFEAS, reason=REASON_CONSTANTS)
    centre = tuple(-(b[i] / S[i, i]) if i < r else descriptor.zero for i in range(R))
    lam = dot(c, centre, descriptor)

    free = [i for i in range(r, R) if not c[i].is_zero]
    if free:
        j = free[0]
        if sense == MINIMIZE:
            logger.debug(f"Free coordinate {j} carries cost, unbounded")
            return LPOutcome(
                LPStatus.UNBOUND, reason=f"objective valuation -> -inf along ray index {j}",
                ray=UnboundedRay(centre, _unit(descriptor, R, j, descriptor.one), j),
            )
        point = vector_add(centre, _unit(descriptor, R, j, -(lam / c[j])))
        return LPOutcome(LPStatus.FEAS, point, INFINITY)

    ratios = [(valuation(c[i] / S[i, i]), i) for i in range(r) if not c[i].is_zero]
    v = min((ratio for ratio, _ in ratios), default=INFINITY)
    val_lam = valuation(lam)
    logger.debug(f"Diagonal problem: val(lambda) = {val_lam}, v = {v}")
    if val_lam < v:
        return LPOutcome(LPStatus.FEAS, centre, val_lam)
    if v.is_infinite:
        return LPOutcome(LPStatus.FEAS, centre, INFINITY)
    j = min(i for ratio, i in ratios if ratio == v)
    if sense == MAXIMIZE:
        if lam.is_zero:
            return LPOutcome(LPStatus.FEAS, centre, INFINITY)
        return LPOutcome(LPStatus.FEAS, vector_add(centre, _unit(descriptor, R, j, -(lam / c[j]))), INFINITY)
    if val_lam == v:
        return LPOutcome(LPStatus.FEAS, centre, v)
    return LPOutcome(LPStatus.FEAS, vector_add(centre, _unit(descriptor, R, j, S[j, j].inverse())), v)


def solve_lp(instance: LPInstance) -> LPOutcome:
    try:
        reduced = reduce_equalities(instance)
    except InconsistentEqualitiesError:
        return LPOutcome(LPStatus.INFEAS, reason=REASON_EQUALITIES)
    diagonal = diagonalize_lp(reduced.instance)
    outcome = solve_diagonal_lp(diagonal.S, diagonal.b, diagonal.c, instance.sense)
    if outcome.status == LPStatus.INFEAS:
        return outcome
    if outcome.status == LPStatus.UNBOUND:
        ray = outcome.ray
        lifted = UnboundedRay(
            reduced.lift(diagonal.lift(ray.base)),
            reduced.lift_direction(diagonal.lift(ray.direction)),
            ray.index,
        )
        return LPOutcome(LPStatus.UNBOUND, reason=outcome.reason, ray=lifted)
    point = reduced.lift(diagonal.lift(outcome.point))
    return LPOutcome(LPStatus.FEAS, point, instance.objective(point))
