import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcournot.analysis import (
    CSV_HEADER,
    GAMMA_CAP,
    GridSpec,
    Region,
    asymmetry_measures,
    boundary_values,
    classify_region,
    format_number,
    payoff_gamma_derivatives,
    payoff_sum_diff,
    region_defined,
    scaled_diff,
    sweep,
    sweep_point,
)
from qcournot.equilibrium_solver import Branch, nash_payoffs, transition_gamma
from qcournot.errors import DomainError
from qcournot.quantum_payoff import GamePoint

K_GRID = np.linspace(1, 50, 50)
GAMMA_GRID = np.linspace(0, GAMMA_CAP, 41)


def grid_points():
    return [GamePoint(k, g) for k in K_GRID for g in GAMMA_GRID]


class TestSumDiff:
    @pytest.mark.parametrize(
        "k,gamma,expected",
        [
            (4, math.pi / 6, (3.315, 2.1)),
            (4, 0.0, (29 / 9, 21 / 9)),
            (1, 0.0, (0.25, 0.25)),
        ],
    )
    def test_examples(self, k, gamma, expected):
        assert payoff_sum_diff(GamePoint(k, gamma)) == pytest.approx(expected, abs=1e-13)

    def test_matches_nash_payoffs_on_grid(self):
        for g in grid_points():
            U1, U2 = nash_payoffs(g)
            total, diff = payoff_sum_diff(g)
            scale = max(1.0, g.k * g.k)
            assert abs(total - (U1 + U2)) <= 1e-12 * scale, g
            assert abs(diff - (U1 - U2)) <= 1e-12 * scale, g


class TestAsymmetry:
    def test_maximal_asymmetry(self):
        m = asymmetry_measures(GamePoint(2, 0.0))
        assert (m.s, m.s_bar, m.xi) == (1, 0, 0)

    def test_direct_substitution(self):
        m = asymmetry_measures(GamePoint(4, math.pi / 6))
        assert (m.s, m.s_bar, m.xi) == pytest.approx((0.5, 0.5, 1 / 3), abs=1e-15)

    def test_symmetric_limit(self):
        m = asymmetry_measures(GamePoint(1e6, 0.1))
        assert m.s == pytest.approx(2e-6)
        assert m.s_bar == pytest.approx(1, abs=1e-5)

    @given(st.floats(1, 1e4), st.floats(0, math.pi / 4, exclude_max=True))
    def test_ranges(self, k, gamma):
        m = asymmetry_measures(GamePoint(k, gamma))
        assert 0 < m.s <= 1 and 0 <= m.s_bar < 1 and 0 <= m.xi < 1

    @given(st.floats(2.01, 100), st.floats(1e-3, math.pi / 4 - 1e-3))
    def test_branch_test_equivalence(self, k, gamma):
        # s_bar > xi is the interior condition cos2g > 1/(k-1) in disguise
        g = GamePoint(k, gamma)
        m = asymmetry_measures(g)
        if abs(g.cos2g - 1 / (k - 1)) > 1e-9:
            assert (m.s_bar > m.xi) == (g.cos2g > 1 / (k - 1))


class TestScaledDiff:
    def test_interior_case(self):
        assert scaled_diff(GamePoint(4, math.pi / 6)) == pytest.approx(0.13125, abs=1e-14)

    def test_k_two_case(self):
        assert scaled_diff(GamePoint(2, math.pi / 6)) == pytest.approx(3 / 16, abs=1e-14)

    def test_tie_dispatches_to_boundary_formula(self):
        g = GamePoint(4, transition_gamma(4))
        assert scaled_diff(g) == pytest.approx(boundary_values(4)[0], abs=1e-15)

    def test_matches_diff_over_k2_on_grid(self):
        for g in grid_points():
            assert scaled_diff(g) == pytest.approx(payoff_sum_diff(g)[1] / g.k**2, abs=1e-12), g

    @settings(max_examples=200)
    @given(st.floats(1, 200), st.floats(0, math.pi / 4, exclude_max=True))
    def test_matches_diff_over_k2_random(self, k, gamma):
        g = GamePoint(k, gamma)
        assert scaled_diff(g) == pytest.approx(payoff_sum_diff(g)[1] / k**2, abs=1e-10)


class TestBoundaryValues:
    @pytest.mark.parametrize(
        "k,expected", [(2, (0.25, 0.25)), (4, (1 / 8, 5 / 24)), (3, (1 / 6, 5 / 24))]
    )
    def test_examples(self, k, expected):
        assert boundary_values(k) == pytest.approx(expected, abs=1e-15)

    @pytest.mark.parametrize("k", [2, 2.5, 3, 4, 6, 10])
    def test_match_direct_evaluation(self, k):
        g = GamePoint(k, transition_gamma(k))
        total, diff = payoff_sum_diff(g)
        assert boundary_values(k) == pytest.approx((diff / k**2, total / k**2), abs=1e-10)

    def test_rejects_k_without_boundary(self):
        with pytest.raises(DomainError):
            boundary_values(1.5)


class TestRegions:
    def test_low_k_is_a(self):
        assert classify_region(GamePoint(1.5, 0.3)) is Region.A

    def test_high_k_small_gamma_is_d(self):
        assert classify_region(GamePoint(10, 0.05)) is Region.D

    def test_moderate_k_is_b_or_c(self):
        assert classify_region(GamePoint(3, 0.4)) in (Region.B, Region.C)

    @pytest.mark.parametrize(
        "k,gamma", [(4, 0.0), (4, 5e-5), (4, math.pi / 4 - 5e-5), (2, 0.3), (2.00005, 0.3)]
    )
    def test_undefined_near_edges(self, k, gamma):
        g = GamePoint(k, gamma)
        assert not region_defined(g)
        with pytest.raises(DomainError):
            classify_region(g)

    def test_undefined_near_transition(self):
        gc = transition_gamma(4)
        assert not region_defined(GamePoint(4, gc + 5e-5))
        assert region_defined(GamePoint(4, gc + 2e-4))

    def test_partition_on_grid(self):
        seen = set()
        for k in np.linspace(1, 50, 60):
            for gamma in np.linspace(1e-3, math.pi / 4 - 1e-3, 50):
                g = GamePoint(k, gamma)
                if not region_defined(g):
                    continue
                region = classify_region(g)
                seen.add(region)
                if region is Region.D:
                    assert k > 5
        assert seen == set(Region)

    def test_u1_never_rises_while_u2_falls(self):
        for k in np.linspace(1, 30, 40):
            for gamma in np.linspace(1e-3, math.pi / 4 - 1e-3, 40):
                g = GamePoint(k, gamma)
                if region_defined(g):
                    d = payoff_gamma_derivatives(g)
                    assert not (d.dU1 > 0 and d.dU2 < 0)

    def test_slopes_use_branch_in_force(self):
        # a stencil straddling the boundary must not mix the two branches
        k = 4
        gc = transition_gamma(k)
        near = payoff_gamma_derivatives(GamePoint(k, gc - 5e-7))
        inner = payoff_gamma_derivatives(GamePoint(k, gc - 1e-4))
        assert near.dU1 == pytest.approx(inner.dU1, abs=1e-3)


@pytest.mark.parametrize("gamma", [0.0, 0.1, 0.3, 0.5, 0.7, 0.78])
def test_scaled_payoffs_converge(gamma):
    gaps = [payoff_sum_diff(GamePoint(k, gamma))[1] / k**2 for k in (4, 8, 16, 32, 64)]
    assert all(b <= a + 1e-15 for a, b in zip(gaps, gaps[1:]))


class TestGridSpec:
    def test_inclusive(self):
        assert list(GridSpec(1, 3, 3).values()) == [1, 2, 3]

    @pytest.mark.parametrize("lo,hi,n", [(1, 2, 0), (3, 2, 4), (1, 2, 1)])
    def test_invalid(self, lo, hi, n):
        with pytest.raises(DomainError):
            GridSpec(lo, hi, n)

    def test_single_point(self):
        assert list(GridSpec(4, 4, 1).values()) == [4]


class TestSweep:
    def test_single_point(self):
        table = sweep(GridSpec(4, 4, 1), GridSpec(math.pi / 6, math.pi / 6, 1))
        (row,) = table.rows
        assert (row.x1_sq, row.x2_sq) == pytest.approx((3.6, 0.6), abs=1e-13)
        assert (row.U1, row.U2) == pytest.approx((2.7075, 0.6075), abs=1e-13)
        assert (row.sum, row.diff) == pytest.approx((3.315, 2.1), abs=1e-13)
        assert row.branch is Branch.INTERIOR

    def test_k_two_u2_zero(self):
        table = sweep(GridSpec(2, 2, 1), GridSpec(0, 0.78, 14))
        assert all(r.U2 == 0 for r in table.rows)

    def test_gamma_zero_is_classical(self):
        table = sweep(GridSpec(2, 20, 10), GridSpec(0, 0, 1))
        for r in table.rows:
            assert r.U1 == pytest.approx((r.k + 1) ** 2 / 9, abs=1e-12)
            assert r.U2 == pytest.approx((r.k - 2) ** 2 / 9, abs=1e-12)

    def test_ordering(self):
        table = sweep(GridSpec(1, 3, 3), GridSpec(0, 0.5, 4))
        keys = [(r.k, r.gamma) for r in table.rows]
        assert keys == sorted(keys) and len(set(keys)) == len(keys)

    def test_gamma_cap(self):
        table = sweep(GridSpec(4, 4, 1), GridSpec(0, math.pi / 4, 3))
        assert table.rows[-1].gamma == GAMMA_CAP

    @pytest.mark.parametrize("k,g", [(GridSpec(0.5, 2, 3), GridSpec(0, 0.5, 2)), (GridSpec(1, 2, 3), GridSpec(-0.1, 0.5, 2))])
    def test_out_of_domain(self, k, g):
        with pytest.raises(DomainError):
            sweep(k, g)

    def test_csv(self):
        text = sweep(GridSpec(4, 4, 1), GridSpec(0, 0, 1)).to_csv()
        header, row, end = text.split("\n")
        assert header == CSV_HEADER
        assert end == ""
        cells = row.split(",")
        assert len(cells) == len(CSV_HEADER.split(","))
        assert float(cells[CSV_HEADER.split(",").index("U1_over_k2")]) == pytest.approx(25 / 144, rel=1e-11)
        assert cells[-2:] == ["Interior", ""]

    def test_region_csv(self):
        text = sweep_point(10, 0.05)
        assert text.region is Region.D
        csv = sweep(GridSpec(10, 10, 1), GridSpec(0.05, 0.05, 1)).to_region_csv()
        assert csv.splitlines() == ["k,inv_k,gamma,branch,region", "10,0.1,0.05,Interior,D"]


@pytest.mark.parametrize(
    "v,p,expected", [(0.0, 12, "0"), (-0.0, 12, "0"), (1 / 3, 4, "0.3333"), (25 / 144, 6, "0.173611")]
)
def test_format_number(v, p, expected):
    assert format_number(v, p) == expected
