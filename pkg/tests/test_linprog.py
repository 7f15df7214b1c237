import pytest

from valfield.errors import DimensionMismatchError, FieldMismatchError, ValidationError
from valfield.exact_linalg import Matrix, dot
from valfield.linprog import (
    MAXIMIZE, REASON_CONSTANTS, REASON_EQUALITIES, LPInstance, LPStatus, diagonalize_lp, reduce_equalities,
    solve_diagonal_lp, solve_lp,
)
from valfield.oracle import (
    SampleGrid, certify_unbounded, check_lp, lp_sampled_optimum, random_matrix, random_scalar, random_unimodular,
)
from valfield.polyhedron import contains
from valfield.valued_scalar import INFINITY, FieldDescriptor, uniformizer


def random_instance(grid, rng):
    """A small random LP with up to one equality row"""
    n = rng.randint(1, 3)
    d = rng.randint(0, 3)
    e = rng.randint(0, 1)
    return LPInstance(
        random_matrix(grid, rng, d, n), tuple(random_scalar(grid, rng) for _ in range(d)),
        tuple(random_scalar(grid, rng) for _ in range(n)),
        random_matrix(grid, rng, e, n), tuple(random_scalar(grid, rng) for _ in range(e)),
    )


class TestLPInstance:
    """Test cases for LPInstance validation"""

    def test_from_rows(self, p2):
        """Test building an instance from plain rows"""
        instance = LPInstance.from_rows(p2, A=[[1, 0]], b=[0], c=[0, 1])
        assert instance.n == 2
        assert instance.D.rows == 0
        assert instance.e == ()

    def test_dimension_mismatch(self, p2):
        """Test inconsistent block sizes"""
        with pytest.raises(DimensionMismatchError):
            LPInstance.from_rows(p2, A=[[1]], b=[0, 1], c=[1])
        with pytest.raises(DimensionMismatchError):
            LPInstance.from_rows(p2, A=[[1]], b=[0], c=[1], D=[[1]], e=[])

    def test_unknown_sense(self, p2):
        """Test that only min and max are accepted"""
        with pytest.raises(ValidationError):
            LPInstance.from_rows(p2, A=[[1]], b=[0], c=[1], sense="argmin")

    def test_mixed_fields(self, p2, p3):
        """Test that the equality block must share the field"""
        with pytest.raises(FieldMismatchError):
            LPInstance(Matrix.identity(p2, 1), (p2.zero,), (p2.one,), Matrix.zeros(p3, 0, 1), ())

    def test_objective(self, p3):
        """Test the objective valuation"""
        instance = LPInstance.from_rows(p3, A=[[1, 0]], b=[0], c=[3, 1])
        assert instance.objective((p3.scalar(3), p3.zero)) == 2
        assert instance.objective((p3.one, p3.scalar(-3))) == INFINITY


class TestSolveLP:
    """Test cases for the three outcomes of solve_lp"""

    def test_inconsistent_equalities(self, p2):
        """Test that x = 0 and x = 1 together are infeasible"""
        instance = LPInstance.from_rows(p2, A=[], b=[], c=[1], D=[[1], [1]], e=[0, 1])
        outcome = solve_lp(instance)
        assert outcome.status == LPStatus.INFEAS
        assert outcome.reason == REASON_EQUALITIES

    def test_non_integral_constant(self, p2):
        """Test that a zero row with constant 1/2 is infeasible"""
        outcome = solve_lp(LPInstance.from_rows(p2, A=[[0]], b=["1/2"], c=[1]))
        assert outcome.status == LPStatus.INFEAS
        assert outcome.reason == REASON_CONSTANTS
        assert outcome.point is None

    def test_free_direction_is_unbounded(self, p2):
        """Test that an unconstrained coordinate with cost is unbounded"""
        instance = LPInstance.from_rows(p2, A=[[1, 0]], b=[0], c=[0, 1])
        outcome = solve_lp(instance)
        assert outcome.status == LPStatus.UNBOUND
        assert outcome.ray.index == 1
        assert not dot(instance.c, outcome.ray.direction, p2).is_zero
        x = certify_unbounded(instance, outcome)
        assert x is not None
        assert contains(instance.feasible_set(), x)
        assert instance.objective(x) <= -10

    def test_valuation_ring(self, p2):
        """Test min val(x) over the valuation ring"""
        outcome = solve_lp(LPInstance.from_rows(p2, A=[[1]], b=[0], c=[1]))
        assert outcome.status == LPStatus.FEAS
        assert outcome.point == (p2.one,)
        assert outcome.value == 0

    def test_boundary_case(self, p2):
        """Test that val(2x + 1) >= 0 gives minimum -1"""
        instance = LPInstance.from_rows(p2, A=[[2]], b=[1], c=[1])
        outcome = solve_lp(instance)
        assert outcome.status == LPStatus.FEAS
        assert outcome.value == -1
        assert contains(instance.feasible_set(), outcome.point)
        assert instance.objective(outcome.point) == -1

    def test_zero_objective(self, p5):
        """Test that a zero cost vector gives value infinity"""
        outcome = solve_lp(LPInstance.from_rows(p5, A=[[5, 1]], b=[0], c=[0, 0]))
        assert outcome.status == LPStatus.FEAS
        assert outcome.value == INFINITY

    def test_with_equalities(self, p3):
        """Test min val(x1) over x in O^2 with x1 + x2 = 1"""
        instance = LPInstance.from_rows(p3, A=[[1, 0], [0, 1]], b=[0, 0], c=[1, 0], D=[[1, 1]], e=[1])
        outcome = solve_lp(instance)
        assert outcome.status == LPStatus.FEAS
        assert outcome.value == 0
        assert contains(instance.feasible_set(), outcome.point)
        assert outcome.point[0] + outcome.point[1] == 1

    def test_equalities_without_inequalities(self, p2):
        """Test that an affine line with nonconstant cost is unbounded"""
        instance = LPInstance.from_rows(p2, A=[], b=[], c=[1, 0], D=[[1, 1]], e=[1])
        outcome = solve_lp(instance)
        assert outcome.status == LPStatus.UNBOUND
        assert certify_unbounded(instance, outcome) is not None


class TestMaximize:
    """Test cases for the max variant"""

    def test_zero_is_reachable(self, p2):
        """Test that max val(x) over O is infinity at x = 0"""
        outcome = solve_lp(LPInstance.from_rows(p2, A=[[1]], b=[0], c=[1], sense=MAXIMIZE))
        assert outcome.status == LPStatus.FEAS
        assert outcome.value == INFINITY
        assert outcome.point == (p2.zero,)

    def test_shifted_ball_reaches_zero(self, p2):
        """Test that -1/2 + (1/2)O contains 0"""
        instance = LPInstance.from_rows(p2, A=[[2]], b=[1], c=[1], sense=MAXIMIZE)
        outcome = solve_lp(instance)
        assert outcome.value == INFINITY
        assert contains(instance.feasible_set(), outcome.point)

    def test_constant_valuation(self, p2):
        """Test a ball on which val(x) is constant"""
        for sense in ("min", MAXIMIZE):
            outcome = solve_lp(LPInstance.from_rows(p2, A=[[1]], b=["-1/2"], c=[1], sense=sense))
            assert outcome.value == -1

    def test_free_direction_is_not_unbounded(self, p3):
        """Test that a free coordinate lets the maximum reach infinity"""
        instance = LPInstance.from_rows(p3, A=[[1, 0]], b=["1/3"], c=[1, 1], sense=MAXIMIZE)
        outcome = solve_lp(instance)
        assert outcome.status == LPStatus.FEAS
        assert outcome.value == INFINITY
        assert contains(instance.feasible_set(), outcome.point)


class TestReductions:
    """Test cases for the equality reduction and diagonalization"""

    def test_reduced_base_point(self, p2):
        """Test that the base point solves D x = e and carries zero cost"""
        instance = LPInstance.from_rows(p2, A=[], b=[], c=[1, 0], D=[[1, 1]], e=[1])
        reduced = reduce_equalities(instance)
        assert reduced.J.cols == 1
        assert dot(instance.c, reduced.base, p2).is_zero
        assert instance.D.apply(reduced.base) == (p2.one,)
        assert reduced.instance.D.rows == 0

    def test_lift_satisfies_equalities(self, p3):
        """Test that lifted points of random consistent systems solve D x = e"""
        grid = SampleGrid.default(p3, seed=8)
        rng = grid.rng()
        for _ in range(20):
            D = random_matrix(grid, rng, 1, 3, zero_weight=0.0)
            x0 = tuple(random_scalar(grid, rng) for _ in range(3))
            e = D.apply(x0)
            instance = LPInstance(Matrix.zeros(p3, 0, 3), (), tuple(random_scalar(grid, rng) for _ in range(3)), D, e)
            reduced = reduce_equalities(instance)
            y = tuple(random_scalar(grid, rng) for _ in range(reduced.J.cols))
            assert D.apply(reduced.lift(y)) == e

    def test_diagonalize_rejects_equalities(self, p2):
        """Test that diagonalization needs an equality-free instance"""
        instance = LPInstance.from_rows(p2, A=[[1]], b=[0], c=[1], D=[[1]], e=[0])
        with pytest.raises(ValidationError):
            diagonalize_lp(instance)

    def test_diagonal_closed_form(self, p2):
        """Test the diag(1, 1) case where every feasible point is optimal"""
        S = Matrix.identity(p2, 2)
        outcome = solve_diagonal_lp(S, (p2.scalar("1/2"), p2.zero), (p2.one, p2.one))
        assert outcome.status == LPStatus.FEAS
        assert outcome.value == -1
        assert outcome.point == (p2.scalar("-1/2"), p2.zero)

    def test_diagonalized_optimum_matches(self, p3):
        """Test that the diagonal problem has the same optimum on random 3 x 3 instances"""
        grid = SampleGrid.default(p3, seed=4, k_min=-2, k_max=2)
        rng = grid.rng()
        for _ in range(30):
            A = random_matrix(grid, rng, 3, 3)
            b = tuple(random_scalar(grid, rng) for _ in range(3))
            c = tuple(random_scalar(grid, rng) for _ in range(3))
            instance = LPInstance(A, b, c, Matrix.zeros(p3, 0, 3), ())
            diagonal = diagonalize_lp(instance)
            direct = solve_lp(instance)
            closed_form = solve_diagonal_lp(diagonal.S, diagonal.b, diagonal.c)
            assert direct.status == closed_form.status
            if direct.status == LPStatus.FEAS:
                assert direct.value == closed_form.value


class TestLPOracles:
    """Test cases for the LP oracles"""

    def test_sampled_optimum(self, p2):
        """Test the sampled optimum on the boundary example"""
        grid = SampleGrid.default(p2)
        assert lp_sampled_optimum(LPInstance.from_rows(p2, A=[[2]], b=[1], c=[1]), grid) == -1

    def test_sampled_optimum_zero_cost(self, p2):
        """Test that zero cost samples to infinity"""
        grid = SampleGrid.default(p2)
        assert lp_sampled_optimum(LPInstance.from_rows(p2, A=[[1]], b=[0], c=[0]), grid) == INFINITY

    def test_certify_needs_unbounded(self, p2):
        """Test that feasible outcomes are not certified"""
        instance = LPInstance.from_rows(p2, A=[[1]], b=[0], c=[1])
        assert certify_unbounded(instance, solve_lp(instance)) is None

    def test_check_lp_detects_wrong_verdict(self, p2):
        """Test that a forged infeasible verdict is flagged"""
        instance = LPInstance.from_rows(p2, A=[[1]], b=[0], c=[1])
        forged = solve_lp(LPInstance.from_rows(p2, A=[[0]], b=["1/2"], c=[1]))
        report = check_lp(instance, forged, SampleGrid.default(p2))
        assert not report.agrees

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", range(4))
    def test_random_instances_agree(self, p2, seed):
        """Test solve_lp against the oracles on 2000 small random instances"""
        grid = SampleGrid.default(p2, seed=seed, k_min=-2, k_max=2)
        rng = grid.rng()
        for _ in range(500):
            instance = random_instance(grid, rng)
            outcome = solve_lp(instance)
            report = check_lp(instance, outcome, grid)
            assert report.agrees, report.violations


class TestInvariance:
    """Test cases for transformations that must not change the optimum"""

    @pytest.mark.slow
    @pytest.mark.parametrize("field", [FieldDescriptor.padic(2), FieldDescriptor.padic(3)])
    def test_unimodular_row_change(self, field):
        """Test that U (A | b) with U unimodular keeps the outcome tag and optimum"""
        grid = SampleGrid.default(field, seed=12, k_min=-2, k_max=2)
        rng = grid.rng()
        for _ in range(300):
            instance = random_instance(grid, rng)
            if instance.A.rows == 0:
                continue
            U = random_unimodular(grid, rng, instance.A.rows)
            moved = LPInstance(U @ instance.A, U.apply(instance.b), instance.c, instance.D, instance.e)
            before, after = solve_lp(instance), solve_lp(moved)
            assert after.status == before.status
            assert after.value == before.value

    @pytest.mark.slow
    @pytest.mark.parametrize("field", [FieldDescriptor.padic(2), FieldDescriptor.padic(5)])
    def test_cost_scaling(self, field):
        """Test that a unit multiple of c keeps the optimum and pi c shifts it by one"""
        grid = SampleGrid.default(field, seed=13, k_min=-2, k_max=2)
        rng = grid.rng()
        pi = uniformizer(field)
        for _ in range(300):
            instance = random_instance(grid, rng)
            unit = rng.choice(grid.units)
            outcome = solve_lp(instance)
            for factor, shift in ((unit, 0), (pi, 1)):
                scaled = LPInstance(
                    instance.A, instance.b, tuple(factor * x for x in instance.c), instance.D, instance.e,
                )
                result = solve_lp(scaled)
                assert result.status == outcome.status
                if outcome.status == LPStatus.FEAS:
                    assert result.value == outcome.value + shift
