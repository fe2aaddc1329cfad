"""Numerically stable binomial and hypergeometric tail probabilities.

Probability mass terms are evaluated in log space through the log-gamma
function, exponentiated term by term, and accumulated with compensated
summation (``math.fsum``).  Direct factorials would overflow long before
the lot sizes this package has to handle (10**5 and beyond).

A shared table of log-factorials for integer arguments is built once and
then only read, so the millions of coefficient evaluations behind a full
plan table stay cheap and the kernel remains safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np
from scipy.special import gammaln, gammasgn

__all__ = [
    "LotSize",
    "INFINITE_LOT",
    "Plan",
    "log_binomial_coefficient",
    "binomial_pmf",
    "binomial_cdf",
    "hypergeometric_pmf",
    "hypergeometric_cdf",
    "hypergeometric_acceptance_curve",
    "interpolated_acceptance",
    "interpolated_acceptance_curve",
    "set_log_factorial_cap",
]

#: Default number of integer log-factorial entries kept in memory.
DEFAULT_LOG_FACTORIAL_CAP = 100_002

# Summation noise this far past the unit interval is clipped silently;
# anything beyond it indicates a logic error, not rounding.  The clip
# stays below 1e-12 for lot sizes into the thousands and grows with the
# magnitude of the log-gamma values (about 2e-10 at N = 10**6).
_PROB_GROSS_ERROR = 1e-6
_INTEGER_TOL = 1e-9

# _LOG_FACTORIAL[k] == ln(k!).  A plain list of floats is noticeably faster
# than a numpy array for the scalar lookups in the planner's hot loop; the
# numpy view is kept for vectorized paths.
_LOG_FACTORIAL: list = []
_LOG_FACTORIAL_NP = np.empty(0)


def set_log_factorial_cap(cap: int = DEFAULT_LOG_FACTORIAL_CAP) -> None:
    """Precompute ln(k!) for 0 <= k <= cap.

    Arguments above the cap transparently fall back to ``math.lgamma``;
    raising the cap only trades memory for speed.
    """
    global _LOG_FACTORIAL, _LOG_FACTORIAL_NP
    if cap < 1:
        raise ValueError("table cap must be >= 1")
    table = gammaln(np.arange(cap + 1, dtype=np.float64) + 1.0)
    _LOG_FACTORIAL_NP = table
    _LOG_FACTORIAL = table.tolist()


set_log_factorial_cap()


def _ensure_table(n: int) -> None:
    if n >= len(_LOG_FACTORIAL):
        set_log_factorial_cap(max(n + 1, 2 * len(_LOG_FACTORIAL)))


def _ln_factorial(k: int) -> float:
    if k < len(_LOG_FACTORIAL):
        return _LOG_FACTORIAL[k]
    return math.lgamma(k + 1.0)


def _ln_comb(a: int, b: int) -> float:
    # caller guarantees 0 <= b <= a
    if a < len(_LOG_FACTORIAL):
        t = _LOG_FACTORIAL
        return t[a] - t[b] - t[a - b]
    return _ln_factorial(a) - _ln_factorial(b) - _ln_factorial(a - b)


def _clamp_probability(value: float) -> float:
    if 0.0 <= value <= 1.0:
        return value
    if -_PROB_GROSS_ERROR <= value < 0.0:
        return 0.0
    if 1.0 < value <= 1.0 + _PROB_GROSS_ERROR:
        return 1.0
    raise ArithmeticError(f"probability {value!r} outside [0, 1] beyond rounding noise")


def _check_count(name: str, value) -> int:
    if isinstance(value, bool) or value != int(value):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < 0:
        raise ValueError(f"{name} must be >= 0, got {value}")
    return value


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LotSize:
    """Size of the lot under inspection.

    ``count`` is a positive integer for a finite lot, or ``None`` for the
    idealized infinite lot, which selects the binomial sampling model
    instead of the hypergeometric one.
    """

    count: Optional[int] = None

    def __post_init__(self):
        if self.count is not None:
            object.__setattr__(self, "count", _check_count("lot size", self.count))
            if self.count < 1:
                raise ValueError("finite lot size must be >= 1")

    @property
    def is_finite(self) -> bool:
        return self.count is not None

    @classmethod
    def of(cls, value: Union["LotSize", int, float, str, None]) -> "LotSize":
        """Coerce ints, ``float('inf')``, ``'inf'`` or ``None`` to a LotSize."""
        if isinstance(value, LotSize):
            return value
        if value is None:
            return INFINITE_LOT
        if isinstance(value, str):
            if value.strip().lower() in ("inf", "infinite", "infinity"):
                return INFINITE_LOT
            return cls(int(value.strip()))
        if isinstance(value, float):
            if math.isinf(value):
                return INFINITE_LOT
            return cls(int(value))
        return cls(value)

    def __str__(self) -> str:
        return "inf" if self.count is None else str(self.count)


INFINITE_LOT = LotSize(None)


@dataclass(frozen=True)
class Plan:
    """Attribute sampling plan: inspect ``n`` items, accept on <= ``c`` defects."""

    n: int
    c: int

    def __post_init__(self):
        object.__setattr__(self, "n", _check_count("sample size n", self.n))
        object.__setattr__(self, "c", _check_count("acceptance number c", self.c))
        if self.c > self.n:
            raise ValueError(f"acceptance number c={self.c} exceeds sample size n={self.n}")

    def valid_for(self, lot: LotSize) -> bool:
        return not lot.is_finite or self.n <= lot.count

    def __str__(self) -> str:
        return f"({self.n},{self.c})"


def _check_plan_for(plan: Plan, N: int) -> None:
    if plan.n > N:
        raise ValueError(f"sample size n={plan.n} exceeds lot size N={N}")


# ---------------------------------------------------------------------------
# Log-space combinatorics
# ---------------------------------------------------------------------------

def log_binomial_coefficient(a: float, b: float) -> float:
    """Natural log of the (Gamma-generalized) binomial coefficient C(a, b).

    Computed as ``lgamma(a+1) - lgamma(b+1) - lgamma(a-b+1)``, which extends
    the integer coefficient to real arguments with ``0 <= b <= a``.  Integer
    arguments below the table cap are served from the precomputed table and
    are accurate to better than 1e-10 relative error up to a = 10**6.

    Raises ``ValueError`` for ``a < 0`` or ``b`` outside ``[0, a]``.
    """
    if a < 0:
        raise ValueError(f"a must be >= 0, got {a!r}")
    if b < 0 or b > a:
        raise ValueError(f"b must lie in [0, {a}], got {b!r}")
    if float(a).is_integer() and float(b).is_integer():
        return _ln_comb(int(a), int(b))
    return math.lgamma(a + 1.0) - math.lgamma(b + 1.0) - math.lgamma(a - b + 1.0)


def _signed_lgamma(x: float) -> tuple:
    """(ln|Gamma(x)|, sign) for real x; sign is 0.0 at the poles."""
    if x > 0.0:
        return math.lgamma(x), 1.0
    if x == math.floor(x):
        return math.inf, 0.0  # pole: 1/Gamma == 0
    sign = 1.0 if math.floor(x) % 2 == 0 else -1.0
    return math.lgamma(x), sign


def _signed_ln_comb_real(a: float, b: int) -> tuple:
    """(ln|C(a, b)|, sign) for real a >= 0 and integer b >= 0.

    Unlike ``log_binomial_coefficient`` this admits b > a, where the
    Gamma-generalized coefficient is finite (and possibly negative) for
    non-integer a, and exactly zero for integer a.
    """
    num = math.lgamma(a + 1.0)
    den1 = math.lgamma(b + 1.0)
    den2, sign = _signed_lgamma(a - b + 1.0)
    if sign == 0.0:
        return -math.inf, 0.0
    return num - den1 - den2, sign


# ---------------------------------------------------------------------------
# Binomial model (infinite lots)
# ---------------------------------------------------------------------------

def binomial_pmf(x: int, n: int, p: float) -> float:
    """P(X == x) for X ~ Binomial(n, p)."""
    x = _check_count("x", x)
    n = _check_count("n", n)
    if x > n:
        raise ValueError(f"x={x} exceeds n={n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    if p == 0.0:
        return 1.0 if x == 0 else 0.0
    if p == 1.0:
        return 1.0 if x == n else 0.0
    return math.exp(_ln_comb(n, x) + x * math.log(p) + (n - x) * math.log1p(-p))


def binomial_cdf(c: int, n: int, p: float) -> float:
    """P(X <= c) for X ~ Binomial(n, p), i.e. the acceptance probability of
    plan (n, c) against an infinite lot with defective proportion p.

    Terms are accumulated in ascending order of x with compensated
    summation; absolute error stays below 1e-12.
    """
    c = _check_count("c", c)
    n = _check_count("n", n)
    if c > n:
        raise ValueError(f"c={c} exceeds n={n}")
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    if c == n or p == 0.0:
        return 1.0
    if p == 1.0:
        return 0.0  # c < n here
    log_p = math.log(p)
    log_q = math.log1p(-p)
    terms = [
        math.exp(_ln_comb(n, x) + x * log_p + (n - x) * log_q)
        for x in range(c + 1)
    ]
    return _clamp_probability(math.fsum(terms))


# ---------------------------------------------------------------------------
# Hypergeometric model (finite lots)
# ---------------------------------------------------------------------------

def _check_hypergeometric_args(n: int, K: int, N: int) -> tuple:
    n = _check_count("n", n)
    K = _check_count("K", K)
    N = _check_count("N", N)
    if K > N:
        raise ValueError(f"defective count K={K} exceeds lot size N={N}")
    if n > N:
        raise ValueError(f"sample size n={n} exceeds lot size N={N}")
    return n, K, N


def hypergeometric_pmf(x: int, n: int, K: int, N: int) -> float:
    """P(X == x) defectives in a sample of n drawn without replacement from
    a lot of N items containing K defectives."""
    x = _check_count("x", x)
    n, K, N = _check_hypergeometric_args(n, K, N)
    if x > n:
        raise ValueError(f"x={x} exceeds n={n}")
    if x > K or n - x > N - K:
        return 0.0  # C(a, b) == 0 for b > a, decided before any log is taken
    return math.exp(_ln_comb(K, x) + _ln_comb(N - K, n - x) - _ln_comb(N, n))


def hypergeometric_cdf(c: int, n: int, K: int, N: int) -> float:
    """P(X <= c) under the hypergeometric model: acceptance probability of
    plan (n, c) against a finite lot of N items with K defectives.

    Terms outside the support use the zero convention C(a, b) = 0 for
    b > a; the rest are evaluated in log space and compensated-summed in
    ascending order of x.  Absolute error stays below 1e-12 for lot sizes
    into the thousands and grows slowly with the magnitude of the
    log-gamma values (a few 1e-10 at N = 10**6).
    """
    c = _check_count("c", c)
    n, K, N = _check_hypergeometric_args(n, K, N)
    if c > n:
        raise ValueError(f"c={c} exceeds n={n}")
    if c >= min(K, n):
        return 1.0  # support of X is [max(0, n-(N-K)), min(K, n)]
    x_lo = max(0, n - (N - K))
    if c < x_lo:
        return 0.0
    ln_denom = _ln_comb(N, n)
    terms = [
        math.exp(_ln_comb(K, x) + _ln_comb(N - K, n - x) - ln_denom)
        for x in range(x_lo, c + 1)
    ]
    return _clamp_probability(math.fsum(terms))


def hypergeometric_acceptance_curve(n: int, K: int, N: int) -> np.ndarray:
    """Acceptance probabilities of the plans (n, 0), (n, 1), ..., (n, n).

    Returns an array ``a`` with ``a[c] == hypergeometric_cdf(c, n, K, N)``,
    computed in one vectorized pass.  Handy for exhaustive plan searches.
    """
    n, K, N = _check_hypergeometric_args(n, K, N)
    _ensure_table(N)
    lf = _LOG_FACTORIAL_NP
    x = np.arange(n + 1)
    valid = (x <= K) & (n - x <= N - K)
    xv = np.where(valid, x, 0)  # keep table indices in range on dead lanes
    log_terms = (
        lf[K] - lf[xv] - lf[K - xv]
        + lf[N - K] - lf[n - xv] - lf[np.maximum(N - K - n + xv, 0)]
        - (lf[N] - lf[n] - lf[N - n])
    )
    terms = np.zeros(n + 1)
    np.exp(log_terms, out=terms, where=valid)
    return np.minimum(np.cumsum(terms), 1.0)


def _hypergeometric_cdf_bulk(c: int, n, K, N) -> np.ndarray:
    """Vectorized hypergeometric_cdf over aligned integer arrays n, K, N
    with a shared acceptance number c.  Used by the scheme validator."""
    n, K, N = np.broadcast_arrays(
        np.asarray(n, dtype=np.int64),
        np.asarray(K, dtype=np.int64),
        np.asarray(N, dtype=np.int64),
    )
    if N.size and (np.any(K > N) or np.any(n > N) or np.any(n < 0) or np.any(K < 0)):
        raise ValueError("inconsistent hypergeometric parameters")
    _ensure_table(int(N.max(initial=1)))
    lf = _LOG_FACTORIAL_NP
    ln_denom = lf[N] - lf[n] - lf[N - n]
    total = np.zeros(N.shape, dtype=np.float64)
    for x in range(c + 1):
        valid = (x <= K) & (x <= n) & (n - x <= N - K)
        xa = np.where(x <= K, x, 0)
        nx = np.where(x <= n, n - x, 0)
        log_term = (
            lf[K] - lf[xa] - lf[K - xa]
            + lf[N - K] - lf[nx] - lf[np.maximum(N - K - nx, 0)]
            - ln_denom
        )
        term = np.zeros(N.shape, dtype=np.float64)
        np.exp(log_term, out=term, where=valid)
        total += term
    return np.minimum(total, 1.0)


# ---------------------------------------------------------------------------
# Gamma-interpolated hypergeometric model (WELMEC-style continuous risks)
# ---------------------------------------------------------------------------

def _as_defective_level(p, N: int) -> tuple:
    """Return (pN as float, integer count or None) for a quality level p."""
    if isinstance(p, Fraction):
        pN = p * N
        if pN.denominator == 1:
            return float(pN), int(pN)
        return float(pN), None
    pN = float(p) * N
    nearest = round(pN)
    if abs(pN - nearest) <= _INTEGER_TOL * max(1.0, abs(pN)):
        return float(nearest), int(nearest)
    return pN, None


def interpolated_acceptance(plan: Plan, N: int, p) -> float:
    """Acceptance probability of ``plan`` against a finite lot of size N
    whose defective count is the (possibly non-integer) real number p*N.

    The hypergeometric mass function is continued to real defective counts
    by replacing factorials with Gamma functions; at integer p*N this
    reduces exactly to ``hypergeometric_cdf``.  ``p`` may be a float or a
    ``fractions.Fraction`` (exact integrality detection).

    The continued mass terms are signed, so partial sums can leave the
    unit interval for acceptance numbers well beyond p*N (most visibly
    for near-full inspections of small lots); results are clipped into
    [0, 1].  At the acceptance numbers of practically relevant plans the
    continuation is probability-like and the clip is inactive.
    """
    N = _check_count("N", N)
    if N < 1:
        raise ValueError("lot size N must be >= 1")
    _check_plan_for(plan, N)
    pN, integer_count = _as_defective_level(p, N)
    if pN < 0.0 or pN > N:
        raise ValueError(f"defective level p*N={pN!r} outside [0, {N}]")
    if integer_count is not None:
        return hypergeometric_cdf(plan.c, plan.n, integer_count, N)
    ln_denom = _ln_comb(N, plan.n)
    total = []
    for x in range(plan.c + 1):
        l1, s1 = _signed_ln_comb_real(pN, x)
        l2, s2 = _signed_ln_comb_real(N - pN, plan.n - x)
        sign = s1 * s2
        if sign != 0.0:
            total.append(sign * math.exp(l1 + l2 - ln_denom))
    return min(max(math.fsum(total), 0.0), 1.0)


def interpolated_acceptance_curve(n: int, N: int, p) -> np.ndarray:
    """Gamma-interpolated acceptance probabilities for c = 0..n at once.

    ``out[c]`` equals ``interpolated_acceptance(Plan(n, c), N, p)``,
    clipped into [0, 1] like the scalar version.
    """
    N = _check_count("N", N)
    n = _check_count("n", n)
    if n > N:
        raise ValueError(f"sample size n={n} exceeds lot size N={N}")
    pN, integer_count = _as_defective_level(p, N)
    if pN < 0.0 or pN > N:
        raise ValueError(f"defective level p*N={pN!r} outside [0, {N}]")
    if integer_count is not None:
        return hypergeometric_acceptance_curve(n, integer_count, N)
    x = np.arange(n + 1, dtype=np.float64)
    a1 = pN
    a2 = N - pN
    l1 = gammaln(a1 + 1.0) - gammaln(x + 1.0) - gammaln(a1 - x + 1.0)
    s1 = gammasgn(a1 - x + 1.0)
    l2 = gammaln(a2 + 1.0) - gammaln(n - x + 1.0) - gammaln(a2 - n + x + 1.0)
    s2 = gammasgn(a2 - n + x + 1.0)
    ln_denom = _ln_comb(N, n)
    terms = s1 * s2 * np.exp(l1 + l2 - ln_denom)
    return np.clip(np.cumsum(terms), 0.0, 1.0)
