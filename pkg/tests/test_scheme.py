import csv
import io

import pytest

from midsampling import (
    LotSize,
    Plan,
    PlanRule,
    QualitySpec,
    RiskBounds,
    Scheme,
    SchemeCoverageError,
    SchemeParseError,
    SchemeRow,
    SchemeRuleError,
    default_mid_scheme,
    format_scheme,
    hypergeometric_cdf,
    optimal_plan,
    parse_scheme,
    scheme_lookup,
    validate_scheme,
    validation_report_csv,
)

# (from, to, n-label, c, alpha_min%, alpha_max%, beta_min%, beta_max%)
PUBLISHED_ROWS = [
    (1, 14, "N", 0, 0.00, 0.00, 0.00, 0.00),
    (15, 18, "14", 0, 0.00, 0.00, 0.00, 3.92),
    (19, 25, "N-4", 0, 0.00, 0.00, 2.00, 3.51),
    (26, 35, "22", 0, 0.00, 0.00, 0.96, 4.37),
    (36, 54, "28", 0, 0.00, 0.00, 0.78, 4.73),
    (55, 99, "34", 0, 0.00, 0.00, 0.93, 4.68),
    (100, 199, "58", 1, 0.00, 0.00, 1.00, 4.84),
    (200, 449, "82", 2, 0.00, 2.85, 1.97, 4.96),
    (450, 1499, "86", 2, 1.74, 4.98, 3.36, 4.99),
    (1500, None, "109", 3, 1.55, 2.43, 4.07, 4.85),
]


class TestDefaultScheme:
    def test_has_ten_rows(self):
        assert len(default_mid_scheme().rows) == 10

    def test_rows_match_published_scheme(self):
        for row, (lo, hi, label, c, *_risks) in zip(default_mid_scheme().rows, PUBLISHED_ROWS):
            assert row.n_from == lo
            assert row.n_to == hi
            assert row.rule.label() == label
            assert row.rule.c == c

    def test_last_row_plan(self):
        scheme = default_mid_scheme()
        assert scheme.rows[-1].rule.plan_for(10**6) == Plan(109, 3)


class TestSchemeLookup:
    def test_full_inspection_row(self):
        assert scheme_lookup(10, default_mid_scheme()) == Plan(10, 0)

    def test_lot_offset_row(self):
        assert scheme_lookup(22, default_mid_scheme()) == Plan(18, 0)

    def test_unbounded_row(self):
        assert scheme_lookup(5000, default_mid_scheme()) == Plan(109, 3)

    def test_boundaries(self):
        scheme = default_mid_scheme()
        assert scheme_lookup(14, scheme) == Plan(14, 0)
        assert scheme_lookup(15, scheme) == Plan(14, 0)
        assert scheme_lookup(1499, scheme) == Plan(86, 2)
        assert scheme_lookup(1500, scheme) == Plan(109, 3)

    def test_invalid_lot(self):
        with pytest.raises(ValueError):
            scheme_lookup(0, default_mid_scheme())


@pytest.fixture(scope="module")
def results():
    # modest cap keeps the unit test quick; acceptance runs the full 1e5
    return validate_scheme(default_mid_scheme(), n_cap=20_000)


class TestValidateScheme:
    def test_all_rows_admissible(self, results):
        assert all(res.admissible for res in results)

    def test_finite_rows_match_published_extrema(self, results):
        for res, (_lo, hi, _label, _c, a_lo, a_hi, b_lo, b_hi) in zip(results, PUBLISHED_ROWS):
            if hi is None:
                continue
            assert round(100 * res.alpha_min, 2) == a_lo
            assert round(100 * res.alpha_max, 2) == a_hi
            assert round(100 * res.beta_min, 2) == b_lo
            assert round(100 * res.beta_max, 2) == b_hi

    def test_every_scheme_plan_is_admissible_spot_checks(self):
        scheme = default_mid_scheme()
        bounds = RiskBounds()
        for N in (1, 14, 15, 18, 19, 25, 26, 99, 100, 199, 200, 449, 450, 1499, 1500, 9999):
            plan = scheme_lookup(N, scheme)
            from midsampling import is_admissible

            assert is_admissible(plan, LotSize(N), QualitySpec(), bounds)

    def test_scheme_never_beats_optimal_sample_size(self):
        scheme = default_mid_scheme()
        for N in (1, 7, 14, 15, 22, 43, 99, 100, 143, 258, 400, 449, 450, 1499, 1500, 2500):
            assert scheme_lookup(N, scheme).n >= optimal_plan(LotSize(N)).plan.n

    def test_broken_row_is_flagged(self):
        # shrinking the [15, 18] sample size to 13 pushes beta over 5% at N=18
        assert hypergeometric_cdf(0, 13, 2, 18) == pytest.approx(0.0654, abs=1e-4)
        rows = list(default_mid_scheme().rows)
        rows[1] = SchemeRow(15, 18, PlanRule.fixed(13, 0))
        results = validate_scheme(Scheme(rows=tuple(rows)), n_cap=20_000)
        assert not results[1].admissible
        assert results[1].beta_max == pytest.approx(0.0654, abs=1e-4)
        assert all(res.admissible for i, res in enumerate(results) if i != 1)

    def test_rule_invalid_within_interval(self):
        rows = list(default_mid_scheme().rows)
        rows[1] = SchemeRow(15, 18, PlanRule.fixed(16, 0))  # n > N at N = 15
        with pytest.raises(SchemeRuleError):
            validate_scheme(Scheme(rows=tuple(rows)), n_cap=20_000)

    def test_cap_below_finite_boundary_rejected(self):
        with pytest.raises(ValueError):
            validate_scheme(default_mid_scheme(), n_cap=1000)

    def test_extrema_locations_reported(self, results):
        last = results[-1]
        assert last.alpha_max_at is None  # attained in the binomial limit
        assert last.beta_max_at is None
        assert isinstance(last.alpha_min_at, int)


class TestSchemeStructure:
    def test_coverage_must_start_at_one(self):
        with pytest.raises(SchemeCoverageError):
            Scheme(rows=(SchemeRow(2, None, PlanRule.full_inspection(0)),))

    def test_gap_detected(self):
        with pytest.raises(SchemeCoverageError):
            Scheme(
                rows=(
                    SchemeRow(1, 10, PlanRule.full_inspection(0)),
                    SchemeRow(12, None, PlanRule.fixed(5, 0)),
                )
            )

    def test_overlap_detected(self):
        with pytest.raises(SchemeCoverageError):
            Scheme(
                rows=(
                    SchemeRow(1, 10, PlanRule.full_inspection(0)),
                    SchemeRow(10, None, PlanRule.fixed(5, 0)),
                )
            )

    def test_must_end_unbounded(self):
        with pytest.raises(SchemeCoverageError):
            Scheme(rows=(SchemeRow(1, 10, PlanRule.full_inspection(0)),))


class TestSchemeTextFormat:
    def test_round_trip(self):
        scheme = default_mid_scheme()
        assert parse_scheme(format_scheme(scheme)) == scheme

    def test_default_scheme_rendering(self):
        text = format_scheme(default_mid_scheme())
        lines = text.strip().splitlines()
        assert lines[0] == "1,14,full,0"
        assert lines[2] == "19,25,offset:4,0"
        assert lines[-1] == "1500,inf,n:109,3"

    def test_comments_and_blank_lines(self):
        text = "# scheme\n\n1,14,full,0\n15,inf,n:14,0  # tail\n"
        scheme = parse_scheme(text)
        assert len(scheme.rows) == 2

    def test_parse_error_carries_line_number(self):
        with pytest.raises(SchemeParseError) as excinfo:
            parse_scheme("1,14,full,0\nnot a row\n")
        assert excinfo.value.line_number == 2

    def test_bad_rule_token(self):
        with pytest.raises(SchemeParseError) as excinfo:
            parse_scheme("1,inf,sample:10,0\n")
        assert excinfo.value.line_number == 1

    def test_coverage_error_from_text(self):
        with pytest.raises(SchemeCoverageError):
            parse_scheme("1,10,full,0\n20,inf,n:5,0\n")


class TestValidationReportCsv:
    def test_mirrors_published_layout(self):
        results = validate_scheme(default_mid_scheme(), n_cap=20_000)
        rows = list(csv.reader(io.StringIO(validation_report_csv(results))))
        assert rows[0][:4] == ["N_from", "N_to", "n", "c"]
        assert rows[1] == ["1", "14", "N", "0", "0.00", "0.00", "0.00", "0.00", "yes"]
        assert rows[3][2] == "N-4"
        assert rows[10][0] == "1500" and rows[10][1] == "inf"
        for row, (_lo, hi, _label, _c, a_lo, a_hi, b_lo, b_hi) in zip(
            rows[1:], PUBLISHED_ROWS
        ):
            if hi is None:
                continue
            assert [row[4], row[5], row[6], row[7]] == [
                f"{a_lo:.2f}",
                f"{a_hi:.2f}",
                f"{b_lo:.2f}",
                f"{b_hi:.2f}",
            ]
