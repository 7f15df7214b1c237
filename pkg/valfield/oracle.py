"""Brute-force oracles used by the property tests and by ``--verify``.

Everything here is deterministic for a fixed seed: sample grids enumerate
u * pi^k for units u of a small pool and k in a valuation range, and random
generators draw from ``random.Random(seed)``.
"""
import logging
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Iterable, Iterator, List, Optional, Sequence, Tuple

from . import config
from .errors import OracleMismatchError, SizeTooLargeError, ValidationError
from .exact_linalg import (
    Matrix, SNFDecomposition, Vector, determinant, dot, vector_add, vector_scale,
)
from .linprog import MINIMIZE, LPInstance, LPOutcome, LPStatus
from .polyhedron import AffineMap, Ball, Polyhedron, as_polydisc_image, contains, is_empty
from .valued_scalar import (
    INFINITY, ExtValuation, FieldDescriptor, ValuedScalar, is_integral, power_of_uniformizer, valuation,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SampleGrid:
    """Scalars u * pi^k for u in a unit pool and k_min <= k <= k_max, plus 0"""
    descriptor: FieldDescriptor
    units: Tuple[ValuedScalar, ...]
    k_min: int
    k_max: int
    seed: int = 0

    def __post_init__(self):
        if self.k_min > self.k_max:
            raise ValidationError(f"Empty valuation range [{self.k_min}, {self.k_max}]")
        object.__setattr__(self, "units", tuple(self.units))
        for unit in self.units:
            if valuation(unit) != 0:
                raise ValidationError(f"Pool entry {unit} is not a unit")

    @classmethod
    def default(cls, descriptor: FieldDescriptor, seed: Optional[int] = None,
                k_min: Optional[int] = None, k_max: Optional[int] = None) -> "SampleGrid":
        """Grid built from the configured unit pools"""
        if descriptor.is_padic:
            pool = [int(text) for text in config.parse_unit_pool(config.SAMPLE_UNITS)]
            units = [descriptor.scalar(u) for u in pool if u % descriptor.p != 0]
        else:
            pool = config.parse_unit_pool(config.LAURENT_UNITS)
            units = [descriptor.scalar(text.replace("t", descriptor.var)) for text in pool]
            units = [u for u in units if valuation(u) == 0]
        return cls(
            descriptor, tuple(units),
            config.SAMPLE_VAL_MIN if k_min is None else k_min,
            config.SAMPLE_VAL_MAX if k_max is None else k_max,
            config.DEFAULT_SEED if seed is None else seed,
        )

    def rng(self) -> random.Random:
        return random.Random(self.seed)


def sample_scalars(grid: SampleGrid) -> Iterator[ValuedScalar]:
    """0 first, then u * pi^k by increasing k and pool order"""
    yield grid.descriptor.zero
    for k in range(grid.k_min, grid.k_max + 1):
        step = power_of_uniformizer(grid.descriptor, k)
        for unit in grid.units:
            yield unit * step


def integral_samples(grid: SampleGrid) -> List[ValuedScalar]:
    return [x for x in sample_scalars(grid) if is_integral(x)]


def random_scalar(grid: SampleGrid, rng: random.Random, zero_weight: float = 0.1) -> ValuedScalar:
    if rng.random() < zero_weight:
        return grid.descriptor.zero
    k = rng.randint(grid.k_min, grid.k_max)
    return rng.choice(grid.units) * power_of_uniformizer(grid.descriptor, k)


def random_integral_scalar(grid: SampleGrid, rng: random.Random, zero_weight: float = 0.1) -> ValuedScalar:
    if rng.random() < zero_weight:
        return grid.descriptor.zero
    k = rng.randint(0, max(grid.k_max, 0))
    return rng.choice(grid.units) * power_of_uniformizer(grid.descriptor, k)


def random_matrix(grid: SampleGrid, rng: random.Random, rows: int, cols: int, zero_weight: float = 0.1) -> Matrix:
    grid_rows = [[random_scalar(grid, rng, zero_weight) for _ in range(cols)] for _ in range(rows)]
    return Matrix.from_rows(grid.descriptor, grid_rows, cols=cols)


def random_unimodular(grid: SampleGrid, rng: random.Random, size: int, steps: Optional[int] = None) -> Matrix:
    """Product of random swaps, unit scalings and integral transvections"""
    descriptor = grid.descriptor
    U = [list(row) for row in Matrix.identity(descriptor, size).entries]
    for _ in range(steps if steps is not None else 3 * size):
        if size < 2:
            U[0] = [rng.choice(grid.units) * x for x in U[0]]
            continue
        i, j = rng.sample(range(size), 2)
        move = rng.randrange(3)
        if move == 0:
            U[i], U[j] = U[j], U[i]
        elif move == 1:
            unit = rng.choice(grid.units)
            U[i] = [unit * x for x in U[i]]
        else:
            factor = random_integral_scalar(grid, rng, zero_weight=0.0)
            U[i] = [x + factor * y for x, y in zip(U[i], U[j])]
    return Matrix.from_rows(descriptor, U, cols=size)


def random_polyhedron(grid: SampleGrid, rng: random.Random, n: int, d: int, e: int = 0) -> Polyhedron:
    A = random_matrix(grid, rng, d, n)
    v = tuple(random_scalar(grid, rng) for _ in range(d))
    B = random_matrix(grid, rng, e, n)
    w = tuple(random_scalar(grid, rng) for _ in range(e))
    return Polyhedron(grid.descriptor, n, A, v, B, w)


@dataclass(frozen=True)
class OracleReport:
    """Outcome of a brute-force cross-check"""
    name: str
    checked: int
    violations: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def agrees(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"check": self.name, "checked": self.checked, "agree": self.agrees, "violations": list(self.violations)}


def sample_polyhedron(P: Polyhedron, grid: SampleGrid, count: Optional[int] = None,
                      rng: Optional[random.Random] = None) -> List[Vector]:
    """Points of P: the disc centre, single-coordinate perturbations, then random disc points"""
    if is_empty(P):
        return []
    rng = rng or grid.rng()
    count = config.ORACLE_RANDOM_POINTS if count is None else count
    image = as_polydisc_image(P)
    descriptor = P.descriptor
    centre = image.disc_center()
    integral = integral_samples(grid)
    discs_z: List[Vector] = [centre]
    for i, (s, _) in enumerate(image.discs):
        for u in integral:
            step = u if s.is_zero else u / s
            z = list(centre)
            z[i] = z[i] + step
            discs_z.append(tuple(z))
    for _ in range(count):
        z = []
        for (s, _), c in zip(image.discs, centre):
            if s.is_zero:
                z.append(random_scalar(grid, rng))
            else:
                z.append(c + random_integral_scalar(grid, rng) / s)
        discs_z.append(tuple(z))
    points = [image.map_point(z) for z in discs_z]
    for x in points:
        if not contains(P, x):
            raise OracleMismatchError(f"Polydisc image produced a point outside the polyhedron: {x}")
    logger.debug(f"Sampled {len(points)} points of a polyhedron in K^{P.n} over {descriptor}")
    return points


def preimage_exists(f: AffineMap, P: Polyhedron, z: Sequence[Any]) -> bool:
    """Whether some x in P has f(x) = z"""
    z = tuple(P.descriptor.scalar(value) for value in z)
    fibre = Polyhedron(
        P.descriptor, P.n, P.A, P.v,
        Matrix.vstack(P.B, f.F), P.w + tuple(g - value for g, value in zip(f.g, z)),
    )
    return not is_empty(fibre)


def check_direct_image(f: AffineMap, P: Polyhedron, image: Polyhedron, grid: SampleGrid,
                       count: Optional[int] = None) -> OracleReport:
    """Sampled double inclusion between f(P) and a claimed image polyhedron"""
    violations = []
    forward = sample_polyhedron(P, grid, count)
    for x in forward:
        if not contains(image, f(x)):
            violations.append(f"f({[str(v) for v in x]}) is missing from the image")
    backward = sample_polyhedron(image, grid, count)
    for z in backward:
        if not preimage_exists(f, P, z):
            violations.append(f"{[str(v) for v in z]} has no preimage")
    if violations:
        logger.warning(f"Direct image check found {len(violations)} violations")
    return OracleReport("direct_image", len(forward) + len(backward), tuple(violations))


def check_ball_form(P: Polyhedron, ball: Ball, grid: SampleGrid) -> OracleReport:
    """Compare membership in P and in the ball on grid scalars and on shifts around the ball centre"""
    samples = list(sample_scalars(grid))
    if ball.center is not None:
        samples += [ball.center + x for x in samples]
    violations = [
        f"membership of {x} differs"
        for x in samples if contains(P, (x,)) != ball.contains(x)
    ]
    return OracleReport("ball_form", len(samples), tuple(violations))


def snf_invariants_by_minors(M: Matrix, max_size: Optional[int] = None) -> Tuple[int, ...]:
    """Invariant exponents from minimum valuations of k x k minors"""
    max_size = config.MINOR_ORACLE_MAX if max_size is None else max_size
    if M.rows > max_size or M.cols > max_size:
        raise SizeTooLargeError(f"Minor oracle is capped at {max_size}x{max_size}, got {M.rows}x{M.cols}")
    exponents: List[int] = []
    previous = 0
    for k in range(1, min(M.rows, M.cols) + 1):
        best = min(
            (valuation(determinant(M.submatrix(rows, cols)))
             for rows in combinations(range(M.rows), k)
             for cols in combinations(range(M.cols), k)),
            default=INFINITY,
        )
        if best.is_infinite:
            break
        exponents.append(int(best) - previous)
        previous = int(best)
    return tuple(exponents)


def check_snf(M: Matrix, decomposition: SNFDecomposition) -> OracleReport:
    """Reconstruction, unimodularity and shape of a Smith Normal Form"""
    descriptor = M.descriptor
    Q, S, P = decomposition.Q, decomposition.S, decomposition.P
    violations = []
    if decomposition.Q_inv @ S @ P != M:
        violations.append("Q^-1 S P does not reconstruct M")
    if Q @ M @ decomposition.P_inv != S:
        violations.append("Q M P^-1 differs from S")
    if Q @ decomposition.Q_inv != Matrix.identity(descriptor, M.rows):
        violations.append("Q_inv is not the inverse of Q")
    if P @ decomposition.P_inv != Matrix.identity(descriptor, M.cols):
        violations.append("P_inv is not the inverse of P")
    for name, T in (("Q", Q), ("P", P), ("Q_inv", decomposition.Q_inv), ("P_inv", decomposition.P_inv)):
        if not T.is_integral:
            violations.append(f"{name} has non-integral entries")
    for name, T in (("Q", Q), ("P", P)):
        if valuation(determinant(T)) != 0:
            violations.append(f"det {name} is not a unit")
    exponents = decomposition.invariant_exponents
    if list(exponents) != sorted(exponents):
        violations.append(f"exponents {exponents} are not sorted")
    expected = Matrix.diagonal(
        descriptor, [power_of_uniformizer(descriptor, a) for a in exponents], rows=M.rows, cols=M.cols,
    )
    if S != expected:
        violations.append("S is not diag(pi^a_1, ..., pi^a_r, 0)")
    checked = 1
    if max(M.rows, M.cols) <= config.MINOR_ORACLE_MAX:
        checked += 1
        minors = snf_invariants_by_minors(M)
        if minors != exponents:
            violations.append(f"minor oracle gives {minors}, decomposition gives {exponents}")
    if violations:
        logger.warning(f"SNF check failed: {violations}")
    return OracleReport("snf", checked, tuple(violations))


def lp_sampled_optimum(instance: LPInstance, grid: SampleGrid, count: Optional[int] = None) -> ExtValuation:
    """Best objective valuation over sampled feasible points (an upper bound on the minimum)"""
    descriptor = instance.descriptor
    if all(value.is_zero for value in instance.c):
        return INFINITY
    points = sample_polyhedron(instance.feasible_set(), grid, count)
    return min(
        (valuation(dot(instance.c, x, descriptor)) for x in points),
        default=INFINITY,
    )


def certify_unbounded(instance: LPInstance, outcome: LPOutcome, target: Optional[int] = None) -> Optional[Vector]:
    """A feasible point on the outcome's ray with objective valuation at most ``target``"""
    if outcome.status != LPStatus.UNBOUND or outcome.ray is None:
        return None
    target = config.UNBOUNDED_TARGET if target is None else target
    descriptor = instance.descriptor
    ray = outcome.ray
    slope = dot(instance.c, ray.direction, descriptor)
    if slope.is_zero:
        return None
    alpha = -(dot(instance.c, ray.base, descriptor) + power_of_uniformizer(descriptor, target)) / slope
    x = vector_add(ray.base, vector_scale(alpha, ray.direction))
    if not contains(instance.feasible_set(), x) or instance.objective(x) > target:
        return None
    return x


def set_differs_from_every_ball(predicate: Callable[[ValuedScalar], bool], centers: Iterable[ValuedScalar],
                                radii: Iterable[int], samples: Sequence[ValuedScalar]) -> bool:
    """True when every candidate ball B(c, r) disagrees with the predicate on some sample.

    Each ball is probed on the samples and on the samples shifted by its centre.
    """
    radii = list(radii)
    for center in centers:
        probes = list(samples) + [center + x for x in samples]
        for radius in radii:
            ball = Ball.around(center, radius)
            if all(ball.contains(x) == predicate(x) for x in probes):
                logger.debug(f"Ball {ball} matches the set on every sample")
                return False
    return True


def check_lp(instance: LPInstance, outcome: LPOutcome, grid: SampleGrid) -> OracleReport:
    """Cross-check an LP verdict against emptiness, sampling and the unbounded ray"""
    violations = []
    empty = bool(is_empty(instance.feasible_set()))
    if empty != (outcome.status == LPStatus.INFEAS):
        violations.append(f"verdict {outcome.status.value} but feasible set empty={empty}")
    elif outcome.status == LPStatus.FEAS:
        if not contains(instance.feasible_set(), outcome.point):
            violations.append("reported point is infeasible")
        if instance.objective(outcome.point) != outcome.value:
            violations.append("reported value differs from the recomputed objective")
        if instance.sense == MINIMIZE:
            sampled = lp_sampled_optimum(instance, grid)
            if sampled != outcome.value:
                violations.append(f"sampled optimum {sampled} differs from {outcome.value}")
    elif outcome.status == LPStatus.UNBOUND and certify_unbounded(instance, outcome) is None:
        violations.append("unbounded ray could not be certified")
    return OracleReport("lp", 1, tuple(violations))

