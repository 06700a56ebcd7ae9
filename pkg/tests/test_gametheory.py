"""Tests for the deterrence and collusion solvers."""

import numpy as np
import pytest

from ppg.errors import DomainViolation, EmptyQList, PreconditionViolation
from ppg.gametheory import (
    CollusionOutcome,
    CollusionParams,
    GameParams,
    beta_star,
    beta_star_closed_form,
    collusion_grid,
    collusion_loss,
    cost,
    critical_faction,
    deterrence_report,
    gain,
    solve_critical_faction,
)

PARAMS = GameParams()


def fine_grid(step=1e-6):
    return np.linspace(0.0, 1.0, int(round(1 / step)) + 1)


def default_h(xs, q, p=PARAMS):
    return p.c1 * xs**2 + p.c2 * xs - p.g_max * (1 - np.exp(-p.k * np.maximum(xs - q, 0.0)))


def last_nonnegative(xs, h):
    """Grid estimate of sup{f : h(f) >= 0}."""
    idx = int(np.flatnonzero(h >= 0)[-1])
    return 1.0 if idx == len(xs) - 1 else float(xs[idx + 1])


def fine_grid_f_star(q, p=PARAMS):
    xs = fine_grid()
    return last_nonnegative(xs, default_h(xs, q, p))


class TestCurves:
    def test_gain_is_zero_up_to_quorum(self):
        assert gain(0.0, 0.3, PARAMS) == 0.0
        assert gain(0.3, 0.3, PARAMS) == 0.0
        assert gain(0.5, 0.3, PARAMS) == pytest.approx(0.8 * (1 - np.exp(-6 * 0.2)))

    def test_cost(self):
        assert cost(0.5, PARAMS) == pytest.approx(0.55 * 0.25 + 0.08 * 0.5)

    @pytest.mark.parametrize("f", [-0.1, 1.1])
    def test_faction_out_of_range(self, f):
        with pytest.raises(DomainViolation):
            gain(f, 0.3, PARAMS)
        with pytest.raises(DomainViolation):
            cost(f, PARAMS)

    @pytest.mark.parametrize("q", [0.0, 1.0])
    def test_quorum_out_of_range(self, q):
        with pytest.raises(DomainViolation):
            solve_critical_faction(q, PARAMS)

    def test_non_positive_parameter(self):
        with pytest.raises(DomainViolation):
            GameParams(g_max=0.0)


class TestCriticalFaction:
    def test_exceeds_quorum_and_grows_with_it(self):
        values = [critical_faction(q, PARAMS) for q in (0.2, 0.3, 0.4)]
        for q, f_star in zip((0.2, 0.3, 0.4), values):
            assert f_star > q
        assert values[0] < values[1] < values[2]

    @pytest.mark.parametrize("q", [0.2, 0.3, 0.4])
    def test_matches_fine_grid(self, q):
        assert critical_faction(q, PARAMS) == pytest.approx(fine_grid_f_star(q), abs=1e-4)

    def test_first_crossing_near_quorum(self):
        result = solve_critical_faction(0.2, PARAMS)
        assert 0.2 < result.first_crossing < 0.22
        assert not result.reentry
        assert result.f_star == result.first_crossing

    def test_reentry_returns_supremum(self):
        # C - G dips below zero after 0.964 and is back above zero at f = 1
        result = solve_critical_faction(0.7425, PARAMS)
        assert result.reentry
        assert result.first_crossing == pytest.approx(0.9642, abs=1e-3)
        assert result.f_star == 1.0
        assert critical_faction(0.7425, PARAMS) == 1.0
        assert cost(0.98, PARAMS) < gain(0.98, 0.7425, PARAMS)
        assert cost(1.0, PARAMS) >= gain(1.0, 0.7425, PARAMS)

    def test_reentry_supremum_inside_grid(self):
        def dip_gain(f, q):
            # positive on (0.5, 0.7) and (0.8, 1]
            return np.where(((f > 0.5) & (f < 0.7)) | (f > 0.8), 1.0, 0.0)

        def flat_cost(f):
            return 0.5 * np.asarray(f, dtype=float)

        result = solve_critical_faction(0.3, GameParams(grid_step=1e-3), gain_fn=dip_gain, cost_fn=flat_cost)
        assert result.reentry
        assert result.first_crossing == pytest.approx(0.5, abs=1e-6)
        assert result.f_star == pytest.approx(0.8, abs=1e-6)

    def test_no_profitable_manipulation(self):
        result = solve_critical_faction(0.2, GameParams(g_max=0.01))
        assert result.no_profitable_manipulation
        assert result.f_star == 1.0

    def test_custom_curves(self):
        def step_gain(f, q):
            return np.where(f > q, 1.0, 0.0)

        def half_cost(f):
            return f / 2

        result = solve_critical_faction(0.3, PARAMS, gain_fn=step_gain, cost_fn=half_cost)
        assert result.f_star == pytest.approx(0.3, abs=1e-6)
        assert not result.reentry

    def test_report(self):
        report = deterrence_report([0.2, 0.3], PARAMS)
        assert [row["q"] for row in report.summary_rows()] == [0.2, 0.3]
        assert report.curve_fieldnames() == ["f", "cost", "gain_q0.2", "gain_q0.3"]
        rows = report.curve_rows()
        assert len(rows) == len(PARAMS.grid())
        assert rows[0] == {"f": 0.0, "cost": 0.0, "gain_q0.2": 0.0, "gain_q0.3": 0.0}

    def test_report_needs_quorums(self):
        with pytest.raises(EmptyQList):
            deterrence_report([], PARAMS)


class TestDeterrenceProperties:
    def test_random_parameter_sets(self):
        rng = np.random.default_rng(2024)
        for _ in range(100):
            p = GameParams(
                g_max=float(rng.uniform(0.2, 2.0)),
                k=float(rng.uniform(1.0, 20.0)),
                c1=float(rng.uniform(0.05, 1.5)),
                c2=float(rng.uniform(0.01, 0.5)),
                grid_step=1e-3,
            )
            q = float(rng.uniform(0.05, 0.9))
            result = solve_critical_faction(q, p)
            xs = p.grid()
            h = default_h(xs, q, p)

            assert result.first_crossing >= q > 0
            assert result.f_star >= result.first_crossing
            inside = (xs > 0) & (xs <= q)
            assert np.all(h[inside] > 0)
            below = (xs > 0) & (xs < result.first_crossing - p.tolerance)
            assert np.all(h[below] >= -1e-12)
            if result.no_profitable_manipulation:
                assert result.f_star == 1.0
                assert np.all(h >= -1e-12)
            else:
                assert np.all(h[xs > result.f_star + p.grid_step] < 1e-12)

    def test_convex_cost_and_smooth_gain(self):
        q = 0.3

        def cubic_cost(f):
            f = np.asarray(f, dtype=float)
            return 0.3 * f**3 + 0.2 * f**2 + 0.05 * f

        def tanh_gain(f, qq):
            return 0.6 * np.tanh(8.0 * np.maximum(np.asarray(f, dtype=float) - qq, 0.0))

        result = solve_critical_faction(q, PARAMS, gain_fn=tanh_gain, cost_fn=cubic_cost)
        xs = fine_grid()
        h = cubic_cost(xs) - tanh_gain(xs, q)

        assert not result.no_profitable_manipulation
        assert not result.reentry
        assert result.first_crossing > q
        assert result.f_star == pytest.approx(last_nonnegative(xs, h), abs=1e-4)
        crossing = np.array([result.f_star])
        assert (cubic_cost(crossing) - tanh_gain(crossing, q))[0] == pytest.approx(0.0, abs=1e-7)


class TestCollusion:
    def test_beta_star_is_monotone_over_quorum_grid(self):
        cp = CollusionParams()
        q_bases = np.linspace(0.20, 0.38, 10)
        alphas = np.linspace(0.0, 0.18, 10)
        table = np.array(
            [[beta_star(float(qb), float(a), 0.205, cp, PARAMS) for a in alphas] for qb in q_bases]
        )
        assert np.all(np.diff(table, axis=0) >= -1e-9)
        assert np.all(np.diff(table, axis=1) >= -1e-9)
        assert np.all((table > 0) & (table < 1))

    def test_closed_form_agrees(self):
        cp = CollusionParams(capture_horizon=8, capture_gain=0.3)
        loss = collusion_loss(0.25, 0.1, 0.21, cp, PARAMS)
        expected = beta_star_closed_form(loss, 0.3, 8)
        assert beta_star(0.25, 0.1, 0.21, cp, PARAMS) == pytest.approx(expected, abs=1e-7)

    def test_indifference_holds_at_beta_star(self):
        cp = CollusionParams()
        loss = collusion_loss(0.3, 0.0, 0.25, cp, PARAMS)
        beta = beta_star(0.3, 0.0, 0.25, cp, PARAMS)
        bt = beta**cp.capture_horizon
        assert PARAMS.g_max * bt == pytest.approx(loss * (1 - bt), abs=1e-7)

    def test_no_capture_gain(self):
        cp = CollusionParams(capture_gain=0.0)
        assert beta_star(0.3, 0.0, 0.25, cp, PARAMS) is CollusionOutcome.UNSUSTAINABLE

    def test_faction_in_profitable_gap(self):
        # below f*(0.7425) = 1 but past the first crossing, so C < G
        with pytest.raises(PreconditionViolation):
            collusion_loss(0.7425, 0.0, 0.98, CollusionParams(), PARAMS)

    @pytest.mark.parametrize("f", [0.0, 0.5])
    def test_faction_outside_precondition(self, f):
        with pytest.raises(PreconditionViolation):
            beta_star(0.2, 0.0, f, CollusionParams(), PARAMS)

    def test_grid_rows(self):
        rows = collusion_grid([0.2, 0.3], [0.0, 0.1], 0.205, CollusionParams(), PARAMS)
        assert len(rows) == 4
        assert rows[0]["q_base"] == 0.2 and rows[0]["alpha"] == 0.0
        assert all(0 < row["beta_star"] < 1 for row in rows)
