"""Producers' and consumers' risks of sampling plans against concrete lots.

A finite lot of size N can only realize defective proportions k/N, so the
risks of a plan are evaluated at the worst realizable levels on each side
of the nominal quality requirements: floor(p_aql*N)/N for the producers'
side and ceil(p_lq*N)/N for the consumers' side.  Monotonicity of the
acceptance probability makes these two levels sufficient.

Quality levels are kept as exact rationals throughout.  Computing
floor(0.01*N) in floating point misrounds for many N (0.01*2900 comes out
just under 29), which would silently corrupt entire plan tables.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .kernel import (
    INFINITE_LOT,
    LotSize,
    Plan,
    binomial_cdf,
    hypergeometric_cdf,
)

__all__ = [
    "QualitySpec",
    "RiskBounds",
    "RealizedLevels",
    "RiskPair",
    "realized_quality_levels",
    "producers_risk",
    "consumers_risk",
    "risk_pair",
    "is_admissible",
    "oc_curve",
    "oc_curve_to_csv",
    "oc_curve_to_json",
    "monte_carlo_acceptance",
]

LevelLike = Union[Fraction, float, int, str]


def as_exact_level(value: LevelLike) -> Fraction:
    """Convert a quality level to an exact Fraction.

    Floats go through their shortest decimal representation, so the
    literal a user typed (0.07) becomes the rational they meant (7/100)
    rather than the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(str(value))
    return Fraction(value)


@dataclass(frozen=True)
class QualitySpec:
    """Nominal quality levels: acceptable quality (AQL) and limit quality (LQ)."""

    p_aql: Fraction = Fraction(1, 100)
    p_lq: Fraction = Fraction(7, 100)

    def __post_init__(self):
        object.__setattr__(self, "p_aql", as_exact_level(self.p_aql))
        object.__setattr__(self, "p_lq", as_exact_level(self.p_lq))
        if not (0 < self.p_aql < self.p_lq < 1):
            raise ValueError(
                f"quality levels must satisfy 0 < p_aql < p_lq < 1, "
                f"got ({self.p_aql}, {self.p_lq})"
            )


@dataclass(frozen=True)
class RiskBounds:
    """Largest tolerated producers' risk (alpha) and consumers' risk (beta)."""

    alpha_max: float = 0.05
    beta_max: float = 0.05

    def __post_init__(self):
        if not (0.0 < self.alpha_max < 1.0 and 0.0 < self.beta_max < 1.0):
            raise ValueError(
                f"risk bounds must lie strictly inside (0, 1), "
                f"got ({self.alpha_max}, {self.beta_max})"
            )


@dataclass(frozen=True)
class RealizedLevels:
    """Worst-case quality levels actually realizable in the lot.

    For a finite lot of size ``denominator``, ``p_alpha == k_alpha/N`` is
    the largest realizable proportion not above the AQL and ``p_beta ==
    k_beta/N`` the smallest not below the LQ.  For infinite lots the
    nominal levels are realizable as-is and the counts are ``None``.
    """

    p_alpha: Fraction
    p_beta: Fraction
    k_alpha: Optional[int] = None
    k_beta: Optional[int] = None
    denominator: Optional[int] = None


@dataclass(frozen=True)
class RiskPair:
    alpha: float
    beta: float


def realized_quality_levels(lot: LotSize, spec: QualitySpec = QualitySpec()) -> RealizedLevels:
    """Quality levels at which the risks of a plan have to be evaluated."""
    lot = LotSize.of(lot)
    if not lot.is_finite:
        return RealizedLevels(p_alpha=spec.p_aql, p_beta=spec.p_lq)
    N = lot.count
    k_alpha = math.floor(spec.p_aql * N)
    k_beta = math.ceil(spec.p_lq * N)
    return RealizedLevels(
        p_alpha=Fraction(k_alpha, N),
        p_beta=Fraction(k_beta, N),
        k_alpha=k_alpha,
        k_beta=k_beta,
        denominator=N,
    )


def _check_plan(plan: Plan, lot: LotSize) -> None:
    if plan.n < 1:
        raise ValueError("degenerate plan with n = 0 is not a usable sampling plan")
    if lot.is_finite and plan.n > lot.count:
        raise ValueError(f"sample size n={plan.n} exceeds lot size N={lot.count}")


def producers_risk(plan: Plan, lot: LotSize, spec: QualitySpec = QualitySpec()) -> float:
    """Probability of rejecting a lot whose quality meets the AQL.

    Evaluated at the realized level floor(p_aql*N)/N; by monotonicity of
    the acceptance probability this bounds the risk for every p below it.
    """
    lot = LotSize.of(lot)
    _check_plan(plan, lot)
    levels = realized_quality_levels(lot, spec)
    if lot.is_finite:
        return 1.0 - hypergeometric_cdf(plan.c, plan.n, levels.k_alpha, lot.count)
    return 1.0 - binomial_cdf(plan.c, plan.n, float(spec.p_aql))


def consumers_risk(plan: Plan, lot: LotSize, spec: QualitySpec = QualitySpec()) -> float:
    """Probability of accepting a lot whose quality is at or beyond the LQ."""
    lot = LotSize.of(lot)
    _check_plan(plan, lot)
    levels = realized_quality_levels(lot, spec)
    if lot.is_finite:
        return hypergeometric_cdf(plan.c, plan.n, levels.k_beta, lot.count)
    return binomial_cdf(plan.c, plan.n, float(spec.p_lq))


def risk_pair(plan: Plan, lot: LotSize, spec: QualitySpec = QualitySpec()) -> RiskPair:
    return RiskPair(
        alpha=producers_risk(plan, lot, spec),
        beta=consumers_risk(plan, lot, spec),
    )


def is_admissible(
    plan: Plan,
    lot: LotSize,
    spec: QualitySpec = QualitySpec(),
    bounds: RiskBounds = RiskBounds(),
) -> bool:
    """True iff both risks stay within the tolerated bounds."""
    return (
        producers_risk(plan, lot, spec) <= bounds.alpha_max
        and consumers_risk(plan, lot, spec) <= bounds.beta_max
    )


# ---------------------------------------------------------------------------
# Operating characteristic curves
# ---------------------------------------------------------------------------

#: Number of grid points for the default infinite-lot OC grid on [0, 0.15].
DEFAULT_OC_POINTS = 151


def oc_curve(
    plan: Plan,
    lot: LotSize,
    grid: Optional[Sequence[LevelLike]] = None,
) -> list:
    """Acceptance probability as a function of the defective proportion.

    Returns (p, Pac) pairs.  For a finite lot the default grid is every
    realizable proportion k/N; custom grid values must be realizable
    (p*N integer).  For infinite lots the default grid is 151 uniform
    points on [0, 0.15].
    """
    lot = LotSize.of(lot)
    _check_plan(plan, lot)
    points = []
    if lot.is_finite:
        N = lot.count
        if grid is None:
            ks = range(N + 1)
        else:
            ks = [_realizable_count(p, N) for p in grid]
        for k in ks:
            points.append((k / N, hypergeometric_cdf(plan.c, plan.n, k, N)))
    else:
        if grid is None:
            ps = [k / 1000 for k in range(DEFAULT_OC_POINTS)]
        else:
            ps = [_checked_level(p) for p in grid]
        for p in ps:
            points.append((p, binomial_cdf(plan.c, plan.n, p)))
    return points


def _checked_level(p: LevelLike) -> float:
    value = float(p)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"quality level {p!r} outside [0, 1]")
    return value


def _realizable_count(p: LevelLike, N: int) -> int:
    """Defective count k with p == k/N, or ValueError if p is not realizable."""
    _checked_level(p)
    if isinstance(p, (Fraction, str, int)):
        exact = Fraction(p) * N
        if exact.denominator != 1:
            raise ValueError(f"quality level {p} is not a multiple of 1/{N}")
        return int(exact)
    pN = float(p) * N
    k = round(pN)
    if abs(pN - k) > 1e-9 * max(1.0, abs(pN)):
        raise ValueError(f"quality level {p!r} is not a multiple of 1/{N}")
    return int(k)


def oc_curve_to_csv(points: Sequence, lot: LotSize) -> str:
    """CSV rendering of an OC curve.

    Columns: p_numerator, p_denominator_or_0_for_infinite, p_value,
    acceptance_probability.  Finite lots carry the exact k/N rational in
    the first two columns; infinite lots flag themselves with a zero
    denominator.
    """
    lot = LotSize.of(lot)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(
        ["p_numerator", "p_denominator_or_0_for_infinite", "p_value", "acceptance_probability"]
    )
    for p, pac in points:
        if lot.is_finite:
            num = _realizable_count(p, lot.count)
            den = lot.count
        else:
            num, den = 0, 0
        writer.writerow([num, den, f"{float(p):.6f}", f"{pac:.6f}"])
    return out.getvalue()


def oc_curve_to_json(points: Sequence) -> str:
    """JSON rendering of an OC curve: an array of {p, pac} objects."""
    payload = [{"p": round(float(p), 6), "pac": round(float(pac), 6)} for p, pac in points]
    return json.dumps(payload)


# ---------------------------------------------------------------------------
# Monte Carlo cross-check
# ---------------------------------------------------------------------------

# Cap on random numbers drawn per chunk; fixed so that results are a pure
# function of (plan, lot, p, trials, seed).
_MC_CHUNK_ELEMENTS = 1 << 22


def monte_carlo_acceptance(
    plan: Plan,
    lot: LotSize,
    p: LevelLike,
    trials: int,
    seed: int,
) -> float:
    """Empirical acceptance rate from simulated inspections.

    Finite lots are simulated by drawing ``plan.n`` items without
    replacement from a lot with exactly ``p*N`` defectives (``p*N`` must
    be an integer); infinite lots by independent draws that are defective
    with probability ``p``.  Deterministic for a fixed seed.
    """
    lot = LotSize.of(lot)
    _check_plan(plan, lot)
    trials = int(trials)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    accepted = 0
    if lot.is_finite:
        N = lot.count
        K = _realizable_count(p, N)
        chunk = max(1, _MC_CHUNK_ELEMENTS // N)
        done = 0
        while done < trials:
            m = min(chunk, trials - done)
            # Uniform keys give each size-n subset equal probability; items
            # 0..K-1 are the defectives.
            keys = rng.random((m, N))
            sample = np.argpartition(keys, plan.n - 1, axis=1)[:, : plan.n]
            defects = np.count_nonzero(sample < K, axis=1)
            accepted += int(np.count_nonzero(defects <= plan.c))
            done += m
    else:
        prob = _checked_level(p)
        chunk = max(1, _MC_CHUNK_ELEMENTS // max(plan.n, 1))
        done = 0
        while done < trials:
            m = min(chunk, trials - done)
            defects = np.count_nonzero(rng.random((m, plan.n)) < prob, axis=1)
            accepted += int(np.count_nonzero(defects <= plan.c))
            done += m
    return accepted / trials
