"""Interval-based simplified sampling schemes and their validation.

A scheme maps every lot size N >= 1 to a plan through an ordered list of
contiguous lot-size intervals, each carrying a plan rule (fixed sample
size, full inspection, or a lot-offset sample size).  The built-in scheme
is the ten-row recommendation for MID modules F/F1 whose producers' and
consumers' risks stay below 5% for every lot size.

Schemes can be read from and written to a one-row-per-line text format::

    from,to,rule,c        # to may be "inf"; rule is n:<int> | full | offset:<int>
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .kernel import (
    LotSize,
    Plan,
    binomial_cdf,
    _hypergeometric_cdf_bulk,
)
from .risks import QualitySpec, RiskBounds

__all__ = [
    "PlanRule",
    "SchemeRow",
    "Scheme",
    "RowValidation",
    "SchemeParseError",
    "SchemeCoverageError",
    "SchemeRuleError",
    "default_mid_scheme",
    "scheme_lookup",
    "validate_scheme",
    "parse_scheme",
    "format_scheme",
    "validation_report_csv",
    "DEFAULT_VALIDATION_CAP",
]

#: Lot sizes checked explicitly for a scheme's unbounded final interval;
#: beyond this the binomial limit covers the remaining tail.
DEFAULT_VALIDATION_CAP = 100_000


class SchemeParseError(ValueError):
    """Malformed scheme text; carries the offending 1-based line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class SchemeCoverageError(ValueError):
    """Scheme rows do not contiguously cover all lot sizes from 1."""


class SchemeRuleError(ValueError):
    """A rule yields an invalid plan somewhere in its interval."""

    def __init__(self, row_index: int, message: str):
        super().__init__(f"row {row_index}: {message}")
        self.row_index = row_index


@dataclass(frozen=True)
class PlanRule:
    """How to build a plan from a lot size: kind 'n' uses a fixed sample
    size, 'full' inspects the whole lot, 'offset' samples N - value items."""

    kind: str
    c: int
    value: int = 0

    _KINDS = ("n", "full", "offset")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown rule kind {self.kind!r}")
        if self.kind == "n" and self.value < 1:
            raise ValueError("fixed sample size must be >= 1")
        if self.kind == "offset" and self.value < 0:
            raise ValueError("offset must be >= 0")
        if self.c < 0:
            raise ValueError("acceptance number must be >= 0")

    @classmethod
    def fixed(cls, n: int, c: int) -> "PlanRule":
        return cls(kind="n", c=c, value=n)

    @classmethod
    def full_inspection(cls, c: int) -> "PlanRule":
        return cls(kind="full", c=c)

    @classmethod
    def lot_offset(cls, k: int, c: int) -> "PlanRule":
        return cls(kind="offset", c=c, value=k)

    def sample_size(self, N: int) -> int:
        if self.kind == "n":
            return self.value
        if self.kind == "full":
            return N
        return N - self.value

    def plan_for(self, N: int) -> Plan:
        return Plan(self.sample_size(N), self.c)

    def label(self) -> str:
        """Sample-size column as shown in scheme tables: 58, N, or N-4."""
        if self.kind == "n":
            return str(self.value)
        if self.kind == "full":
            return "N"
        return f"N-{self.value}"

    def token(self) -> str:
        if self.kind == "n":
            return f"n:{self.value}"
        if self.kind == "full":
            return "full"
        return f"offset:{self.value}"

    @classmethod
    def from_token(cls, token: str, c: int) -> "PlanRule":
        token = token.strip()
        if token == "full":
            return cls.full_inspection(c)
        if token.startswith("n:"):
            return cls.fixed(int(token[2:]), c)
        if token.startswith("offset:"):
            return cls.lot_offset(int(token[7:]), c)
        raise ValueError(f"unknown rule token {token!r}")


@dataclass(frozen=True)
class SchemeRow:
    """One lot-size interval [n_from, n_to] and its plan rule.

    ``n_to is None`` marks an interval open to infinity.
    """

    n_from: int
    n_to: Optional[int]
    rule: PlanRule

    def __post_init__(self):
        if self.n_from < 1:
            raise ValueError("interval must start at a lot size >= 1")
        if self.n_to is not None and self.n_to < self.n_from:
            raise ValueError(f"empty interval [{self.n_from}, {self.n_to}]")

    def contains(self, N: int) -> bool:
        return self.n_from <= N and (self.n_to is None or N <= self.n_to)


@dataclass(frozen=True)
class Scheme:
    """Contiguous, non-overlapping rows covering every lot size from 1 up."""

    rows: Tuple[SchemeRow, ...]

    def __post_init__(self):
        if not self.rows:
            raise SchemeCoverageError("scheme has no rows")
        if self.rows[0].n_from != 1:
            raise SchemeCoverageError(
                f"coverage must start at lot size 1, first row starts at {self.rows[0].n_from}"
            )
        for i, row in enumerate(self.rows[:-1]):
            if row.n_to is None:
                raise SchemeCoverageError(f"row {i} is unbounded but not last")
            nxt = self.rows[i + 1]
            if nxt.n_from != row.n_to + 1:
                raise SchemeCoverageError(
                    f"gap or overlap between rows {i} and {i + 1}: "
                    f"[..,{row.n_to}] followed by [{nxt.n_from},..]"
                )
        if self.rows[-1].n_to is not None:
            raise SchemeCoverageError("last row must extend to infinity")

    def row_for(self, N: int) -> SchemeRow:
        if N < 1:
            raise ValueError("lot size must be >= 1")
        for row in self.rows:
            if row.contains(N):
                return row
        raise LookupError(f"no scheme row covers lot size {N}")


@dataclass(frozen=True)
class RowValidation:
    """Risk extrema of one scheme row over every lot size it covers.

    ``*_at`` fields give the lot size attaining each extremum, with None
    standing for the infinite-lot (binomial) limit.
    """

    row: SchemeRow
    alpha_min: float
    alpha_max: float
    beta_min: float
    beta_max: float
    alpha_min_at: Optional[int]
    alpha_max_at: Optional[int]
    beta_min_at: Optional[int]
    beta_max_at: Optional[int]
    admissible: bool


_DEFAULT_ROWS = (
    SchemeRow(1, 14, PlanRule.full_inspection(0)),
    SchemeRow(15, 18, PlanRule.fixed(14, 0)),
    SchemeRow(19, 25, PlanRule.lot_offset(4, 0)),
    SchemeRow(26, 35, PlanRule.fixed(22, 0)),
    SchemeRow(36, 54, PlanRule.fixed(28, 0)),
    SchemeRow(55, 99, PlanRule.fixed(34, 0)),
    SchemeRow(100, 199, PlanRule.fixed(58, 1)),
    SchemeRow(200, 449, PlanRule.fixed(82, 2)),
    SchemeRow(450, 1499, PlanRule.fixed(86, 2)),
    SchemeRow(1500, None, PlanRule.fixed(109, 3)),
)

_DEFAULT_SCHEME = Scheme(rows=_DEFAULT_ROWS)


def default_mid_scheme() -> Scheme:
    """The built-in simplified scheme for MID modules F/F1 (ten rows,
    both risks below 5% for every lot size)."""
    return _DEFAULT_SCHEME


def scheme_lookup(N: int, scheme: Scheme) -> Plan:
    """Plan prescribed by the scheme for a lot of size N."""
    N = int(N)
    row = scheme.row_for(N)
    plan = row.rule.plan_for(N)
    if plan.n > N:
        raise SchemeRuleError(
            scheme.rows.index(row), f"rule {row.rule.token()} yields n={plan.n} > N={N}"
        )
    return plan


def validate_scheme(
    scheme: Scheme,
    spec: QualitySpec = QualitySpec(),
    bounds: RiskBounds = RiskBounds(),
    n_cap: int = DEFAULT_VALIDATION_CAP,
) -> List[RowValidation]:
    """Compute each row's risk extrema over every covered lot size.

    Finite rows are checked exhaustively.  The final unbounded row is
    checked for every N up to ``n_cap`` and additionally in the binomial
    (infinite-lot) limit, which convergence makes a faithful stand-in for
    the remaining tail.
    """
    largest_finite = max((row.n_to for row in scheme.rows if row.n_to is not None), default=1)
    if n_cap < largest_finite:
        raise ValueError(f"n_cap={n_cap} below the largest finite row boundary {largest_finite}")
    p_aql, p_lq = spec.p_aql, spec.p_lq
    results = []
    for index, row in enumerate(scheme.rows):
        hi = row.n_to if row.n_to is not None else n_cap
        ns = np.arange(row.n_from, hi + 1, dtype=np.int64)
        if row.rule.kind == "n":
            sample = np.full_like(ns, row.rule.value)
        elif row.rule.kind == "full":
            sample = ns.copy()
        else:
            sample = ns - row.rule.value
        if np.any(sample > ns) or np.any(sample < 1) or row.rule.c > sample.min():
            bad = int(ns[np.argmax((sample > ns) | (sample < 1) | (row.rule.c > sample))])
            raise SchemeRuleError(
                index, f"rule {row.rule.token()} yields an invalid plan at N={bad}"
            )
        # exact realized defective counts, floor(p_aql*N) and ceil(p_lq*N)
        k_alpha = (p_aql.numerator * ns) // p_aql.denominator
        k_beta = -((-p_lq.numerator * ns) // p_lq.denominator)
        alphas = 1.0 - _hypergeometric_cdf_bulk(row.rule.c, sample, k_alpha, ns)
        betas = _hypergeometric_cdf_bulk(row.rule.c, sample, k_beta, ns)
        candidates_n = [int(v) for v in ns]
        alphas = list(map(float, alphas))
        betas = list(map(float, betas))
        if row.n_to is None:
            if row.rule.kind != "n":
                raise SchemeRuleError(
                    index, "an unbounded interval requires a fixed sample size rule"
                )
            alphas.append(1.0 - binomial_cdf(row.rule.c, row.rule.value, float(p_aql)))
            betas.append(binomial_cdf(row.rule.c, row.rule.value, float(p_lq)))
            candidates_n.append(None)
        a_min = min(range(len(alphas)), key=alphas.__getitem__)
        a_max = max(range(len(alphas)), key=alphas.__getitem__)
        b_min = min(range(len(betas)), key=betas.__getitem__)
        b_max = max(range(len(betas)), key=betas.__getitem__)
        results.append(
            RowValidation(
                row=row,
                alpha_min=alphas[a_min],
                alpha_max=alphas[a_max],
                beta_min=betas[b_min],
                beta_max=betas[b_max],
                alpha_min_at=candidates_n[a_min],
                alpha_max_at=candidates_n[a_max],
                beta_min_at=candidates_n[b_min],
                beta_max_at=candidates_n[b_max],
                admissible=(alphas[a_max] <= bounds.alpha_max and betas[b_max] <= bounds.beta_max),
            )
        )
    return results


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

def parse_scheme(text: str) -> Scheme:
    """Parse the line-based scheme format.

    Each non-empty, non-comment line reads ``from,to,rule,c`` where ``to``
    may be ``inf`` and ``rule`` is ``n:<int>``, ``full`` or
    ``offset:<int>``.  Raises :class:`SchemeParseError` with the offending
    line number, or :class:`SchemeCoverageError` if the rows do not cover
    [1, inf) contiguously.
    """
    rows = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [part.strip() for part in line.split(",")]
        if len(parts) != 4:
            raise SchemeParseError(line_number, f"expected 'from,to,rule,c', got {raw!r}")
        try:
            n_from = int(parts[0])
            n_to = None if parts[1].lower() in ("inf", "infinite") else int(parts[1])
            c = int(parts[3])
            rule = PlanRule.from_token(parts[2], c)
            rows.append(SchemeRow(n_from=n_from, n_to=n_to, rule=rule))
        except SchemeParseError:
            raise
        except (ValueError, TypeError) as exc:
            raise SchemeParseError(line_number, str(exc)) from exc
    return Scheme(rows=tuple(rows))


def format_scheme(scheme: Scheme) -> str:
    lines = []
    for row in scheme.rows:
        to = "inf" if row.n_to is None else str(row.n_to)
        lines.append(f"{row.n_from},{to},{row.rule.token()},{row.rule.c}")
    return "\n".join(lines) + "\n"


def validation_report_csv(results: List[RowValidation]) -> str:
    """CSV report with one row per interval, risks in percent (2 decimals)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(
        [
            "N_from",
            "N_to",
            "n",
            "c",
            "alpha_min_pct",
            "alpha_max_pct",
            "beta_min_pct",
            "beta_max_pct",
            "admissible",
        ]
    )
    for res in results:
        writer.writerow(
            [
                res.row.n_from,
                "inf" if res.row.n_to is None else res.row.n_to,
                res.row.rule.label(),
                res.row.rule.c,
                f"{100 * res.alpha_min:.2f}",
                f"{100 * res.alpha_max:.2f}",
                f"{100 * res.beta_min:.2f}",
                f"{100 * res.beta_max:.2f}",
                "yes" if res.admissible else "no",
            ]
        )
    return out.getvalue()
