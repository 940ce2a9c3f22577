"""Tests for the exact simplex, Delsarte LP construction and cutting-plane refinement."""

from fractions import Fraction

import pytest

from kissing.config import VerifierConfig
from kissing.gegenbauer import GegenbauerExpansion, gegenbauer_values
from kissing.lpbound import (
    FAMILIES,
    ClassicalProgram,
    Constraint,
    ExtendedRows,
    LPProblem,
    LPSolution,
    build_classical_lp,
    build_extended_lp,
    classical_bound,
    extended_search,
    grid_lp_value,
    kissing_bound,
    lobatto_nodes,
    solve_lp,
    uniform_nodes,
    verify_and_refine,
)
from kissing.ratcore import RationalInterval
from kissing.types import DomainError, LPInfeasibleError, LPStatus, Relation

F = Fraction


def _row(coeffs, rel, rhs, label=""):
    return Constraint(tuple(F(c) for c in coeffs), Relation(rel), F(rhs), label)


def _problem(objective, rows, lower=None):
    n = len(objective)
    return LPProblem(n, [F(c) for c in objective], rows, lower or [F(0)] * n)


class TestSimplex:
    def test_two_variable_optimum(self):
        p = _problem([1, 1], [_row([1, 2], "<=", 4), _row([3, 1], "<=", 6)])
        sol = solve_lp(p)
        assert sol.status == LPStatus.OPTIMAL
        assert sol.x == [F(8, 5), F(6, 5)]
        assert sol.objective_value == F(14, 5)

    def test_degenerate_cycling_example(self):
        # Beale's example cycles under the textbook pivoting rule
        p = _problem(
            [F(3, 4), -20, F(1, 2), -6],
            [
                _row([F(1, 4), -8, -1, 9], "<=", 0),
                _row([F(1, 2), -12, F(-1, 2), 3], "<=", 0),
                _row([0, 0, 1, 0], "<=", 1),
            ],
        )
        sol = solve_lp(p)
        assert sol.status == LPStatus.OPTIMAL
        assert sol.objective_value == F(5, 4)

    def test_equality_and_ge_rows(self):
        p = _problem([1, 0], [_row([1, 1], "=", 1), _row([0, 1], ">=", F(1, 4))])
        sol = solve_lp(p)
        assert sol.x == [F(3, 4), F(1, 4)]

    def test_negative_lower_bound(self):
        p = _problem([-1], [_row([1], "<=", 5)], lower=[F(-2)])
        sol = solve_lp(p)
        assert sol.x == [F(-2)]
        assert sol.objective_value == 2

    def test_infeasible(self):
        p = _problem([1], [_row([1], "<=", 1), _row([1], ">=", 2)])
        assert solve_lp(p).status == LPStatus.INFEASIBLE

    def test_unbounded_returns_ray(self):
        sol = solve_lp(_problem([1, 0], [_row([1, -1], "<=", 1)]))
        assert sol.status == LPStatus.UNBOUNDED
        assert sol.ray == [1, 1]

    def test_row_generation_matches_full_solve(self):
        p = build_classical_lp(3, F(-1, 2), 3, 60)
        partial = solve_lp(p)
        full = solve_lp(p, range(len(p.constraints)))
        assert partial.status == full.status == LPStatus.OPTIMAL
        assert partial.objective_value == full.objective_value
        assert len(partial.active) < len(p.constraints)

    def test_solution_is_exactly_feasible(self):
        p = build_classical_lp(3, F(-1, 2), 3, 60)
        sol = solve_lp(p)
        assert p.is_feasible(sol.x)

    def test_constraint_violation(self):
        row = _row([1, 1], "<=", 1)
        assert row.violation([F(1), F(1)]) == 1
        assert row.violation([F(0), F(0)]) == -1
        assert _row([1], "=", 1).violation([F(3)]) == 2

    def test_problem_shape_checked(self):
        with pytest.raises(DomainError):
            LPProblem(2, [F(1)], [], [F(0), F(0)])
        with pytest.raises(DomainError):
            _problem([1, 1], [_row([1], "<=", 1)])

    def test_default_variable_names(self):
        assert _problem([1, 1], []).var_names == ["x0", "x1"]


class TestGrids:
    def test_uniform_nodes(self):
        assert uniform_nodes(-1, F(1, 2), 4) == [-1, F(-1, 2), 0, F(1, 2)]

    def test_lobatto_nodes_are_dyadic_with_exact_endpoints(self):
        iv = RationalInterval(F(-1), F(1, 2))
        nodes = lobatto_nodes(iv, 16)
        assert nodes[0] == -1 and nodes[-1] == F(1, 2)
        assert len(nodes) == 16
        assert all(a < b for a, b in zip(nodes, nodes[1:]))
        assert all((1 << 24) % t.denominator == 0 for t in nodes[1:-1])

    def test_lobatto_needs_two_nodes(self):
        with pytest.raises(DomainError):
            lobatto_nodes(RationalInterval(F(0), F(1)), 1)


class TestClassicalLP:
    def test_build_rows(self):
        p = build_classical_lp(3, F(1, 2), 4, 10)
        assert p.num_vars == 4
        assert p.var_names == ["c1", "c2", "c3", "c4"]
        assert p.objective == [-1] * 4
        assert len(p.constraints) == 10
        assert all(r.relation == Relation.LE and r.rhs == -1 for r in p.constraints)
        assert p.constraints[0].label == "grid:-1/1"

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"d": 2},
            {"cos_theta": F(1)},
            {"cos_theta": F(-1)},
            {"degree": 0},
            {"grid_size": 1},
        ],
    )
    def test_rejects_bad_parameters(self, kwargs):
        args = {"d": 3, "cos_theta": F(1, 2), "degree": 3, "grid_size": 10} | kwargs
        with pytest.raises(DomainError):
            build_classical_lp(**args)

    def test_toy_bound(self):
        result = classical_bound(3, F(-1, 2), 1, grid_size=2)
        assert result.bound == 3
        assert result.grid_value == 3
        assert result.refine.certified
        assert result.refine.rounds == 0

    def test_degree_one_kissing_lp_is_infeasible(self):
        with pytest.raises(LPInfeasibleError):
            classical_bound(3, F(1, 2), 1)

    def test_degree_two_kissing_lp_is_infeasible(self):
        assert grid_lp_value(3, F(1, 2), 2, 200) is None

    def test_grid_value_never_increases_with_degree(self):
        values = [grid_lp_value(3, F(1, 2), k, 200) for k in range(1, 7)]
        feasible = [v for v in values if v is not None]
        first = values.index(feasible[0]) if feasible else len(values)
        assert all(v is not None for v in values[first:])
        assert all(a >= b for a, b in zip(feasible, feasible[1:]))

    def test_scipy_agrees_on_grid_lp(self):
        linprog = pytest.importorskip("scipy.optimize").linprog
        for degree in (3, 4, 5):
            p = build_classical_lp(3, F(1, 2), degree, 200)
            exact = grid_lp_value(3, F(1, 2), degree, 200)
            res = linprog(
                c=[1.0] * degree,
                A_ub=[[float(a) for a in r.coeffs] for r in p.constraints],
                b_ub=[float(r.rhs) for r in p.constraints],
                bounds=[(0, None)] * degree,
                method="highs",
            )
            if exact is None:
                assert res.status == 2
            else:
                assert res.status == 0
                assert 1 + res.fun == pytest.approx(float(exact), rel=1e-6)


class TestRefinement:
    def _program(self):
        return ClassicalProgram(3, F(-1, 2), 1, 2, VerifierConfig())

    def test_violation_is_found_and_cut(self):
        program = self._program()
        f = GegenbauerExpansion(3, {0: 1, 1: 1})
        found = program.violations(f)
        assert [(v.point, v.amount) for v in found] == [(F(-1, 2), F(1, 2))]
        cuts = program.cut_rows(found)
        assert [c.label for c in cuts] == ["grid:-1/2"]

    def test_repair_shifts_constant_term(self):
        program = self._program()
        f = GegenbauerExpansion(3, {0: 1, 1: 1})
        repaired, shift = program.repair(f, program.violations(f))
        assert shift == F(1, 2)
        assert repaired.c0 == F(1, 2)
        assert program.certify(repaired)

    def test_refine_without_rounds_uses_shift(self):
        program = self._program()
        sol = LPSolution(LPStatus.OPTIMAL, [F(1)], F(-1))
        report = verify_and_refine(program, sol, 0)
        assert report.certified
        assert report.shift == F(1, 2)
        assert report.expansion.c0 == F(1, 2)

    def test_refine_adds_cutting_plane(self):
        program = self._program()
        sol = LPSolution(LPStatus.OPTIMAL, [F(1)], F(-1))
        report = verify_and_refine(program, sol, 1)
        assert report.certified
        assert report.rounds == 1
        assert report.cuts == 1
        assert report.shift == 0
        assert report.expansion.coeff(1) == 2

    def test_refine_needs_optimal_solution(self):
        with pytest.raises(DomainError):
            verify_and_refine(self._program(), LPSolution(LPStatus.INFEASIBLE), 3)


class TestExtendedLP:
    @pytest.mark.parametrize("support", [[], [1, 2], [-1, 0]])
    def test_support_validation(self, support):
        with pytest.raises(DomainError):
            ExtendedRows(support, F(123, 100), VerifierConfig())

    def test_build_shape(self):
        p = build_extended_lp([0, 1, 2], F(123, 100), grids=8)
        assert p.var_names == ["c0", "c1", "c2"]
        assert p.objective == [1, 0, 0]
        assert len(p.constraints) == len(FAMILIES) * 8
        assert {r.label.split(":")[0] for r in p.constraints} == set(FAMILIES)

    def test_coefficients_are_rounded_outward(self):
        p = build_extended_lp([0, 1, 2], F(123, 100), grids=8)
        assert all((1 << 64) % a.denominator == 0 for r in p.constraints for a in r.coeffs)

    def test_per_family_grid_sizes(self):
        sizes = {f: 4 for f in FAMILIES} | {"negativity": 6}
        p = build_extended_lp([0, 1], F(123, 100), grids=sizes)
        assert len(p.constraints) == 5 * 4 + 6

    def test_unknown_family(self):
        rows = ExtendedRows([0, 1], F(123, 100), VerifierConfig())
        with pytest.raises(DomainError):
            rows.row("quadruple", F(0))

    def test_constant_support_gives_no_bound(self):
        result = extended_search([0], F(123, 100), grids=8)
        assert result.solution.status == LPStatus.OPTIMAL
        assert result.solution.objective_value == 0
        assert not result.certified
        assert result.ratio is None

    @pytest.mark.slow
    def test_kissing_function_needs_no_refinement(self, f_kissing):
        result = extended_search([0, 1, 2, 3, 4, 5, 9], F(123, 100), grids=8, warm_start=f_kissing)
        assert result.certified
        assert result.refine.rounds == 0
        assert result.refine.shift == 0
        assert result.expansion == f_kissing
        assert result.max_n == 12


@pytest.mark.slow
class TestSlowBounds:
    def test_three_dimensional_kissing_bound(self):
        bound = kissing_bound(3, 9)
        assert 13 < bound < F(132, 10)

    def test_three_dimensional_bound_against_scipy(self):
        linprog = pytest.importorskip("scipy.optimize").linprog
        degree = 9
        bound = kissing_bound(3, degree)
        ts = uniform_nodes(-1, F(1, 2), 2000)
        rows = [[float(g) for g in gegenbauer_values(3, degree, t)[1:]] for t in ts]
        res = linprog(
            c=[1.0] * degree,
            A_ub=rows,
            b_ub=[-1.0] * len(ts),
            bounds=[(0, None)] * degree,
            method="highs",
        )
        assert res.status == 0
        assert abs(float(bound) - (1 + res.fun)) < 1e-3

    def test_eight_dimensional_bound_is_240(self):
        bound = kissing_bound(8, 6, grid_size=301)
        assert 240 <= bound <= 240 + F(1, 10**4)

    def test_extended_search_reproduces_constant_term(self):
        result = extended_search([0, 1, 2, 3, 4, 5, 9], F(123, 100))
        assert result.certified
        assert result.expansion.c0 >= F(946, 10**4)
        assert result.max_n == 12
