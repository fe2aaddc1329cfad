import csv
import io
import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from midsampling import (
    INFINITE_LOT,
    LotSize,
    Plan,
    QualitySpec,
    RiskBounds,
    binomial_cdf,
    consumers_risk,
    hypergeometric_cdf,
    is_admissible,
    monte_carlo_acceptance,
    oc_curve,
    oc_curve_to_csv,
    oc_curve_to_json,
    producers_risk,
    realized_quality_levels,
)


class TestQualitySpecAndBounds:
    def test_defaults(self):
        spec = QualitySpec()
        assert spec.p_aql == Fraction(1, 100)
        assert spec.p_lq == Fraction(7, 100)
        bounds = RiskBounds()
        assert bounds.alpha_max == bounds.beta_max == 0.05

    def test_float_levels_become_exact_decimals(self):
        spec = QualitySpec(p_aql=0.015, p_lq=0.08)
        assert spec.p_aql == Fraction(3, 200)
        assert spec.p_lq == Fraction(2, 25)

    def test_validation(self):
        with pytest.raises(ValueError):
            QualitySpec(p_aql=0.07, p_lq=0.01)
        with pytest.raises(ValueError):
            QualitySpec(p_aql=0.0, p_lq=0.07)
        with pytest.raises(ValueError):
            RiskBounds(alpha_max=0.0)
        with pytest.raises(ValueError):
            RiskBounds(beta_max=1.0)


class TestRealizedLevels:
    def test_lot_258(self):
        levels = realized_quality_levels(LotSize(258))
        assert (levels.k_alpha, levels.k_beta) == (2, 19)
        assert levels.p_alpha == Fraction(2, 258)
        assert levels.p_beta == Fraction(19, 258)

    def test_exact_multiples(self):
        levels = realized_quality_levels(LotSize(100))
        assert levels.p_alpha == Fraction(1, 100)
        assert levels.p_beta == Fraction(7, 100)

    def test_small_lot_floors_to_zero(self):
        levels = realized_quality_levels(LotSize(50))
        assert (levels.k_alpha, levels.k_beta) == (0, 4)

    def test_infinite_lot_keeps_nominal_levels(self):
        levels = realized_quality_levels(INFINITE_LOT)
        assert levels.p_alpha == Fraction(1, 100)
        assert levels.p_beta == Fraction(7, 100)
        assert levels.k_alpha is None and levels.k_beta is None

    def test_floating_point_floor_traps(self):
        # 0.01*2900 and 0.07*300 both misround in binary floating point
        assert realized_quality_levels(LotSize(2900)).k_alpha == 29
        assert realized_quality_levels(LotSize(300)).k_beta == 21
        assert realized_quality_levels(LotSize(700)).k_alpha == 7

    @given(st.integers(1, 100_000))
    @settings(max_examples=200, deadline=None)
    def test_realized_levels_bracket_nominal(self, N):
        spec = QualitySpec()
        levels = realized_quality_levels(LotSize(N), spec)
        assert levels.p_alpha <= spec.p_aql
        assert levels.p_beta >= spec.p_lq
        assert levels.p_alpha == Fraction(levels.k_alpha, N)
        assert levels.p_beta == Fraction(levels.k_beta, N)


class TestRisks:
    def test_producers_risk_examples(self):
        assert producers_risk(Plan(82, 2), LotSize(400)) == pytest.approx(0.028, abs=1e-3)
        assert producers_risk(Plan(22, 0), LotSize(43)) == 0.0
        assert producers_risk(Plan(40, 40), LotSize(40)) == 0.0

    def test_consumers_risk_examples(self):
        assert consumers_risk(Plan(22, 0), LotSize(43)) == pytest.approx(0.048, abs=1e-3)
        assert consumers_risk(Plan(109, 3), INFINITE_LOT) == pytest.approx(0.0485, abs=5e-4)

    def test_full_inspection_has_zero_risks(self):
        for N in (1, 14, 99, 258):
            c = N // 100
            assert producers_risk(Plan(N, c), LotSize(N)) == 0.0
            assert consumers_risk(Plan(N, c), LotSize(N)) == 0.0

    def test_definitional_consistency_with_kernel(self):
        for N, plan in [(258, Plan(57, 1)), (43, Plan(22, 0)), (400, Plan(82, 2))]:
            levels = realized_quality_levels(LotSize(N))
            assert producers_risk(plan, LotSize(N)) == pytest.approx(
                1.0 - hypergeometric_cdf(plan.c, plan.n, levels.k_alpha, N), abs=1e-15
            )
            assert consumers_risk(plan, LotSize(N)) == pytest.approx(
                hypergeometric_cdf(plan.c, plan.n, levels.k_beta, N), abs=1e-15
            )

    def test_zero_alpha_below_hundred_per_acceptance_step(self):
        # a lot below 100(c+1) cannot hold more than c defectives at 1% quality
        for N, c in [(99, 0), (150, 1), (299, 2), (399, 3)]:
            n = min(N, 50 + c * 30)
            assert producers_risk(Plan(n, c), LotSize(N)) == 0.0

    def test_admissibility(self):
        assert is_admissible(Plan(57, 1), LotSize(258))
        assert not is_admissible(Plan(36, 0), LotSize(143))
        assert is_admissible(Plan(143, 1), LotSize(143))  # full inspection, c = floor(1.43)

    def test_degenerate_plan_rejected(self):
        with pytest.raises(ValueError):
            producers_risk(Plan(0, 0), LotSize(10))
        with pytest.raises(ValueError):
            consumers_risk(Plan(0, 0), INFINITE_LOT)
        with pytest.raises(ValueError):
            producers_risk(Plan(11, 0), LotSize(10))


class TestOcCurve:
    def test_starts_at_certain_acceptance_and_decreases(self):
        points = oc_curve(Plan(57, 1), LotSize(258))
        assert len(points) == 259
        assert points[0] == (0.0, 1.0)
        pacs = [pac for _, pac in points]
        assert all(a >= b - 1e-12 for a, b in zip(pacs, pacs[1:]))
        assert points[-1][1] == 0.0  # every item defective, sample exceeds c

    def test_anchor_points_for_plan_57_1(self):
        points = dict(oc_curve(Plan(57, 1), LotSize(258)))
        # quoted at display precision: 95.2% and 4.9%
        assert points[2 / 258] == pytest.approx(0.952, abs=5e-4)
        assert points[19 / 258] == pytest.approx(0.049, abs=5e-4)

    def test_infinite_default_grid(self):
        points = oc_curve(Plan(86, 2), INFINITE_LOT)
        assert len(points) == 151
        assert points[0] == (0.0, 1.0)
        assert points[-1][0] == pytest.approx(0.15)
        lookup = {round(p, 6): pac for p, pac in points}
        assert lookup[0.01] == pytest.approx(0.944466, abs=1e-6)

    def test_custom_grid_and_errors(self):
        points = oc_curve(Plan(86, 2), INFINITE_LOT, grid=[0.0, 0.01, 0.07])
        assert [p for p, _ in points] == [0.0, 0.01, 0.07]
        with pytest.raises(ValueError):
            oc_curve(Plan(86, 2), INFINITE_LOT, grid=[-0.1])
        with pytest.raises(ValueError):
            oc_curve(Plan(86, 2), INFINITE_LOT, grid=[1.5])
        with pytest.raises(ValueError):
            oc_curve(Plan(22, 0), LotSize(43), grid=[0.05])  # 0.05*43 not integral

    def test_csv_export(self):
        points = oc_curve(Plan(22, 0), LotSize(43), grid=[Fraction(3, 43)])
        text = oc_curve_to_csv(points, LotSize(43))
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == [
            "p_numerator",
            "p_denominator_or_0_for_infinite",
            "p_value",
            "acceptance_probability",
        ]
        assert rows[1][0] == "3" and rows[1][1] == "43"
        assert float(rows[1][3]) == pytest.approx(
            hypergeometric_cdf(0, 22, 3, 43), abs=1e-6
        )

    def test_csv_export_infinite_marks_zero_denominator(self):
        points = oc_curve(Plan(86, 2), INFINITE_LOT, grid=[0.01])
        rows = list(csv.reader(io.StringIO(oc_curve_to_csv(points, INFINITE_LOT))))
        assert rows[1][:2] == ["0", "0"]
        assert rows[1][2] == "0.010000"

    def test_json_export(self):
        points = oc_curve(Plan(86, 2), INFINITE_LOT, grid=[0.0, 0.01])
        payload = json.loads(oc_curve_to_json(points))
        assert payload[0] == {"p": 0.0, "pac": 1.0}
        assert payload[1]["p"] == 0.01
        assert payload[1]["pac"] == pytest.approx(0.944466, abs=1e-6)


class TestMonteCarlo:
    def test_always_accepting_plan(self):
        assert monte_carlo_acceptance(Plan(10, 10), LotSize(10), 0.5, 100, seed=1) == 1.0
        assert monte_carlo_acceptance(Plan(7, 7), INFINITE_LOT, 0.9, 100, seed=1) == 1.0

    def test_deterministic_for_fixed_seed(self):
        a = monte_carlo_acceptance(Plan(109, 3), INFINITE_LOT, 0.07, 20_000, seed=42)
        b = monte_carlo_acceptance(Plan(109, 3), INFINITE_LOT, 0.07, 20_000, seed=42)
        assert a == b
        c = monte_carlo_acceptance(Plan(109, 3), INFINITE_LOT, 0.07, 20_000, seed=43)
        assert a != c

    def test_infinite_lot_matches_analytic_within_3_sigma(self):
        trials = 100_000
        analytic = binomial_cdf(3, 109, 0.07)
        estimate = monte_carlo_acceptance(Plan(109, 3), INFINITE_LOT, 0.07, trials, seed=7)
        sigma = math.sqrt(analytic * (1 - analytic) / trials)
        assert abs(estimate - analytic) <= 3 * sigma

    def test_finite_lot_matches_analytic_within_3_sigma(self):
        trials = 100_000
        analytic = hypergeometric_cdf(0, 22, 3, 43)
        estimate = monte_carlo_acceptance(
            Plan(22, 0), LotSize(43), Fraction(3, 43), trials, seed=11
        )
        sigma = math.sqrt(analytic * (1 - analytic) / trials)
        assert abs(estimate - analytic) <= 3 * sigma

    def test_non_integral_defective_count_rejected(self):
        with pytest.raises(ValueError):
            monte_carlo_acceptance(Plan(57, 1), LotSize(258), 0.05, 100, seed=1)

    def test_trials_must_be_positive(self):
        with pytest.raises(ValueError):
            monte_carlo_acceptance(Plan(5, 1), INFINITE_LOT, 0.1, 0, seed=1)
