"""Search for admissible sampling plans with minimal sample size.

For a fixed sample size n the acceptance probability is non-decreasing in
the acceptance number c, so the consumers' bound admits exactly the
acceptance numbers 0..c_n for some maximal c_n (or none), and among those
c_n itself has the smallest producers' risk.  The optimal plan is found by
scanning n upward and risk-checking only (n, c_n), which keeps the search
at O(n) tail evaluations per lot size.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .kernel import (
    LotSize,
    Plan,
    binomial_cdf,
    hypergeometric_acceptance_curve,
    hypergeometric_cdf,
)
from .risks import (
    QualitySpec,
    RealizedLevels,
    RiskBounds,
    RiskPair,
    realized_quality_levels,
)

__all__ = [
    "PlanResult",
    "PlanTable",
    "NoPlanWithinCapError",
    "max_acceptance_number",
    "optimal_plan",
    "plan_table",
    "brute_force_oracle",
    "DEFAULT_SCAN_CAP",
    "ORACLE_LOT_LIMIT",
]

#: Largest sample size tried for infinite lots before giving up.
DEFAULT_SCAN_CAP = 1_000_000

#: Cost guard for the exhaustive oracle.
ORACLE_LOT_LIMIT = 2000


class NoPlanWithinCapError(Exception):
    """No admissible plan exists below the sample-size scan cap."""


@dataclass(frozen=True)
class PlanResult:
    plan: Plan
    risks: RiskPair
    realized: RealizedLevels


@dataclass(frozen=True)
class PlanTable:
    """Optimal plans for a contiguous range of lot sizes, sorted by N."""

    rows: Tuple[Tuple[int, PlanResult], ...]

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)

    def to_csv(self) -> str:
        """Deterministic CSV export, risks with six decimal digits."""
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["N", "n", "c", "alpha", "beta", "p_alpha_num", "p_beta_num"])
        for N, result in self.rows:
            writer.writerow(
                [
                    N,
                    result.plan.n,
                    result.plan.c,
                    f"{result.risks.alpha:.6f}",
                    f"{result.risks.beta:.6f}",
                    result.realized.k_alpha,
                    result.realized.k_beta,
                ]
            )
        return out.getvalue()


def _beta_evaluator(lot: LotSize, spec: QualitySpec):
    """Acceptance probability at the consumers' realized level, as a
    function of (n, c).  Resolves the model and level once."""
    if lot.is_finite:
        N = lot.count
        k_beta = realized_quality_levels(lot, spec).k_beta
        return lambda n, c: hypergeometric_cdf(c, n, k_beta, N)
    p_lq = float(spec.p_lq)
    return lambda n, c: binomial_cdf(c, n, p_lq)


def _alpha_evaluator(lot: LotSize, spec: QualitySpec):
    if lot.is_finite:
        N = lot.count
        k_alpha = realized_quality_levels(lot, spec).k_alpha
        return lambda n, c: 1.0 - hypergeometric_cdf(c, n, k_alpha, N)
    p_aql = float(spec.p_aql)
    return lambda n, c: 1.0 - binomial_cdf(c, n, p_aql)


def max_acceptance_number(
    n: int,
    lot: LotSize,
    spec: QualitySpec = QualitySpec(),
    bounds: RiskBounds = RiskBounds(),
) -> Optional[int]:
    """Largest c with consumers' risk within bounds, or None.

    Only the consumers' bound is checked here; the acceptance probability
    grows with c, so the feasible acceptance numbers are exactly 0..c_n.
    """
    lot = LotSize.of(lot)
    n = int(n)
    if n < 1:
        raise ValueError("sample size n must be >= 1")
    if lot.is_finite and n > lot.count:
        raise ValueError(f"sample size n={n} exceeds lot size N={lot.count}")
    beta = _beta_evaluator(lot, spec)
    return _scan_c_max(beta, n, bounds.beta_max, start=0)


def _scan_c_max(beta, n: int, beta_max: float, start: int) -> Optional[int]:
    """Largest feasible c, given that c = start-1 is already known feasible
    (start == 0 means nothing is known yet)."""
    if start == 0:
        if beta(n, 0) > beta_max:
            return None
        start = 1
    c = start - 1
    while c + 1 <= n and beta(n, c + 1) <= beta_max:
        c += 1
    return c


def optimal_plan(
    lot: LotSize,
    spec: QualitySpec = QualitySpec(),
    bounds: RiskBounds = RiskBounds(),
    scan_cap: int = DEFAULT_SCAN_CAP,
) -> PlanResult:
    """Admissible plan with the smallest sample size for the given lot.

    Scans n upward, pairing each n with its maximal feasible acceptance
    number; ties at the minimal n resolve to the largest such c, which
    minimizes the producers' risk at no extra inspection cost.  Finite
    lots always succeed (full inspection is admissible); infinite lots
    raise :class:`NoPlanWithinCapError` beyond ``scan_cap``.
    """
    lot = LotSize.of(lot)
    beta = _beta_evaluator(lot, spec)
    alpha = _alpha_evaluator(lot, spec)
    levels = realized_quality_levels(lot, spec)
    highest_n = lot.count if lot.is_finite else int(scan_cap)
    c = None
    for n in range(1, highest_n + 1):
        # warm start: the previous c stays feasible as n grows
        c = _scan_c_max(beta, n, bounds.beta_max, start=0 if c is None else c + 1)
        if c is None:
            continue
        a = alpha(n, c)
        if a <= bounds.alpha_max:
            plan = Plan(n, c)
            return PlanResult(
                plan=plan,
                risks=RiskPair(alpha=a, beta=beta(n, c)),
                realized=levels,
            )
    raise NoPlanWithinCapError(
        f"no admissible plan with sample size <= {highest_n} "
        f"for quality levels ({spec.p_aql}, {spec.p_lq}) "
        f"and risk bounds ({bounds.alpha_max}, {bounds.beta_max})"
    )


def plan_table(
    n_min: int,
    n_max: int,
    spec: QualitySpec = QualitySpec(),
    bounds: RiskBounds = RiskBounds(),
) -> PlanTable:
    """Optimal plans for every lot size N in [n_min, n_max].

    Lot sizes are independent, so this is trivially parallelizable; the
    sequential evaluation here keeps results deterministic and ordered.
    """
    n_min, n_max = int(n_min), int(n_max)
    if not 1 <= n_min <= n_max:
        raise ValueError(f"invalid lot-size range [{n_min}, {n_max}]")
    rows = tuple(
        (N, optimal_plan(LotSize(N), spec, bounds)) for N in range(n_min, n_max + 1)
    )
    return PlanTable(rows=rows)


def brute_force_oracle(
    lot: LotSize,
    spec: QualitySpec = QualitySpec(),
    bounds: RiskBounds = RiskBounds(),
) -> PlanResult:
    """Independent exhaustive search over every plan (n, c) with c <= n <= N.

    Computes both risks for all pairs straight from the hypergeometric
    acceptance probabilities (no feasibility shortcuts, no early exit)
    and picks the admissible plan with the smallest n, breaking ties by
    the largest c.  Meant as a verification oracle for
    :func:`optimal_plan`; refuses lots above ``ORACLE_LOT_LIMIT``.
    """
    lot = LotSize.of(lot)
    if not lot.is_finite:
        raise ValueError("the exhaustive oracle is defined for finite lots only")
    N = lot.count
    if N > ORACLE_LOT_LIMIT:
        raise ValueError(f"lot size {N} exceeds the oracle cost guard ({ORACLE_LOT_LIMIT})")
    levels = realized_quality_levels(lot, spec)
    best = None
    for n in range(1, N + 1):
        accept_alpha = hypergeometric_acceptance_curve(n, levels.k_alpha, N)
        accept_beta = hypergeometric_acceptance_curve(n, levels.k_beta, N)
        admissible = (1.0 - accept_alpha <= bounds.alpha_max) & (accept_beta <= bounds.beta_max)
        if best is None and np.any(admissible):
            c = int(np.nonzero(admissible)[0].max())
            best = PlanResult(
                plan=Plan(n, c),
                risks=RiskPair(alpha=float(1.0 - accept_alpha[c]), beta=float(accept_beta[c])),
                realized=levels,
            )
    if best is None:  # cannot happen: full inspection is always admissible
        raise NoPlanWithinCapError(f"no admissible plan for lot size {N}")
    return best
