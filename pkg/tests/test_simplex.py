"""Tests for the exact simplex solver against brute-force and scipy oracles."""

import random
from fractions import Fraction

import pytest
from scipy.optimize import linprog

from bellgate.scalar import ExactScalar, MixedBackendError, to_float
from bellgate.simplex import (
    CyclingDetected,
    DimensionMismatch,
    FarkasCertificate,
    InfeasibleProblem,
    LPResult,
    Unbounded,
    solve_feasibility,
    solve_min,
    verify_certificate,
    verify_solution,
)

from oracles import exact_lp_feasible, exact_lp_minimize


def ex(value):
    return ExactScalar.from_rational(Fraction(value))


def random_system(rng, max_rows=4, max_cols=6, entry_bound=3):
    m = rng.randint(1, max_rows)
    n = rng.randint(1, max_cols)
    A = [[Fraction(rng.randint(-entry_bound, entry_bound))
          for _ in range(n)] for _ in range(m)]
    b = [Fraction(rng.randint(-entry_bound, entry_bound)) for _ in range(m)]
    return A, b


def columns_of(A):
    return [[row[j] for row in A] for j in range(len(A[0]))]


class TestFeasibility:
    def test_single_equation(self):
        result = solve_feasibility([[ex(1)]], [ex(1)])
        assert result.feasible
        assert result.x == (ex(1),)

    def test_inconsistent_pair(self):
        result = solve_feasibility([[ex(1)], [ex(-1)]], [ex(1), ex(1)])
        assert not result.feasible
        assert verify_certificate([[ex(1)], [ex(-1)]], [ex(1), ex(1)],
                                  result.certificate)
        # the textbook certificate for this system also verifies
        assert verify_certificate([[ex(1)], [ex(-1)]], [ex(1), ex(1)],
                                  FarkasCertificate(y=(ex(1), ex(1))))

    def test_negative_rhs_flipped(self):
        # -x = -3 is feasible at x = 3
        result = solve_feasibility([[ex(-1)]], [ex(-3)])
        assert result.feasible
        assert result.x == (ex(3),)

    def test_zero_columns_nonzero_rhs(self):
        result = solve_feasibility([[ex(0), ex(0)]], [ex(2)])
        assert not result.feasible

    def test_no_rows(self):
        assert solve_feasibility([], []).feasible

    def test_redundant_rows(self):
        A = [[ex(1), ex(1)], [ex(2), ex(2)]]
        b = [ex(1), ex(2)]
        result = solve_feasibility(A, b)
        assert result.feasible
        assert verify_solution(A, b, result.x)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            solve_feasibility([[ex(1)]], [ex(1), ex(2)])
        with pytest.raises(DimensionMismatch):
            solve_feasibility([[ex(1), ex(2)], [ex(1)]], [ex(1), ex(2)])

    def test_mixed_backend_rejected(self):
        with pytest.raises(MixedBackendError):
            solve_feasibility([[ex(1), 0.5]], [ex(1)])

    def test_exact_sqrt2_entries(self):
        # x * sqrt2 = 2 has the exact solution x = sqrt2
        sqrt2 = ExactScalar(Fraction(0), Fraction(1))
        result = solve_feasibility([[sqrt2]], [ex(2)])
        assert result.feasible
        assert result.x == (sqrt2,)

    def test_agreement_with_brute_oracle_random(self):
        rng = random.Random(20240920)
        feasible_seen = infeasible_seen = 0
        for _ in range(250):
            A, b = random_system(rng)
            result = solve_feasibility(A, b)
            oracle = exact_lp_feasible(columns_of(A), b)
            if result.feasible:
                feasible_seen += 1
                assert oracle is not None
                assert verify_solution(A, b, result.x)
            else:
                infeasible_seen += 1
                assert oracle is None
                assert verify_certificate(A, b, result.certificate)
        assert feasible_seen > 20 and infeasible_seen > 20

    def test_agreement_with_scipy_on_floats(self):
        rng = random.Random(20240921)
        for _ in range(100):
            A, b = random_system(rng)
            exact_result = solve_feasibility(A, b)
            float_result = solve_feasibility(
                [[float(v) for v in row] for row in A], [float(v) for v in b])
            assert exact_result.feasible == float_result.feasible
            scipy_result = linprog(
                c=[0.0] * len(A[0]),
                A_eq=[[float(v) for v in row] for row in A],
                b_eq=[float(v) for v in b],
                bounds=(0, None), method="highs")
            assert scipy_result.status in (0, 2)
            assert exact_result.feasible == (scipy_result.status == 0)


class TestMinimization:
    def test_pinned_variable(self):
        value, x = solve_min([ex(1)], [[ex(1)]], [ex(5)])
        assert value == ex(5)
        assert x == (ex(5),)

    def test_min_over_simplex(self):
        # minimize x2 on the segment x1 + x2 = 1
        value, x = solve_min([ex(0), ex(1)], [[ex(1), ex(1)]], [ex(1)])
        assert value == ex(0)
        assert x == (ex(1), ex(0))

    def test_infeasible_raises_with_certificate(self):
        A = [[ex(1)], [ex(-1)]]
        b = [ex(1), ex(1)]
        with pytest.raises(InfeasibleProblem) as info:
            solve_min([ex(1)], A, b)
        assert verify_certificate(A, b, info.value.certificate)

    def test_unbounded(self):
        # x1 - x2 = 0 leaves x1 = x2 free to grow; minimizing -x1 diverges
        with pytest.raises(Unbounded):
            solve_min([ex(-1), ex(0)], [[ex(1), ex(-1)]], [ex(0)])

    def test_redundant_row_dropped(self):
        A = [[ex(1), ex(1)], [ex(2), ex(2)]]
        b = [ex(1), ex(2)]
        value, x = solve_min([ex(1), ex(0)], A, b)
        assert value == ex(0)
        assert verify_solution(A, b, x)

    def test_degenerate_ties_terminate(self):
        # every rhs zero except the last: heavy pivot ties at every step
        A = [
            [ex(1), ex(-1), ex(0), ex(0)],
            [ex(0), ex(1), ex(-1), ex(0)],
            [ex(0), ex(0), ex(1), ex(-1)],
            [ex(1), ex(1), ex(1), ex(1)],
        ]
        b = [ex(0), ex(0), ex(0), ex(4)]
        value, x = solve_min([ex(1), ex(0), ex(0), ex(0)], A, b)
        assert x == (ex(1), ex(1), ex(1), ex(1))
        assert value == ex(1)

    def test_cost_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            solve_min([ex(1), ex(2)], [[ex(1)]], [ex(1)])

    def test_agreement_with_vertex_oracle_random(self):
        rng = random.Random(20240922)
        compared = 0
        for _ in range(150):
            A, b = random_system(rng, max_rows=3, max_cols=5, entry_bound=2)
            cost = [Fraction(rng.randint(-2, 2)) for _ in A[0]]
            try:
                value, x = solve_min(cost, A, b)
            except InfeasibleProblem:
                assert exact_lp_feasible(columns_of(A), b) is None
                continue
            except Unbounded:
                continue
            best = exact_lp_minimize(cost, columns_of(A), b)
            assert best is not None
            assert value == ExactScalar.from_rational(best) or \
                to_float(value) == pytest.approx(float(best), abs=1e-12)
            assert verify_solution(A, b, x)
            compared += 1
        assert compared > 30


class TestVerifiers:
    def test_solution_rejects_negative(self):
        assert not verify_solution([[ex(1)]], [ex(-1)], [ex(-1)])

    def test_solution_rejects_residual(self):
        assert not verify_solution([[ex(1)]], [ex(1)], [ex(2)])

    def test_certificate_rejects_zero_vector(self):
        assert not verify_certificate([[ex(1)]], [ex(1)],
                                      FarkasCertificate(y=(ex(0),)))

    def test_certificate_rejects_wrong_direction(self):
        # y = (1,) on the feasible system x = 1 gives y.A = 1 > 0
        assert not verify_certificate([[ex(1)]], [ex(1)],
                                      FarkasCertificate(y=(ex(1),)))

    def test_certificate_wrong_length(self):
        assert not verify_certificate([[ex(1)]], [ex(1)],
                                      FarkasCertificate(y=(ex(1), ex(1))))

    def test_float_tolerance(self):
        assert verify_solution([[1.0]], [1.0], [1.0 + 1e-12])
        assert not verify_solution([[1.0]], [1.0], [1.0 + 1e-6])

    def test_result_shape(self):
        result = LPResult(status="feasible", x=(ex(1),))
        assert result.feasible and result.certificate is None
