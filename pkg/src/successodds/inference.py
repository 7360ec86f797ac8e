"""Brunner-Munzel test and confidence intervals for theta, lambda_so, lambda_wr.

The variance estimator uses placements: for each observation the difference
between its midrank in the pooled sample and its midrank within its own
sample. Intervals for theta are built on the logit scale so they stay inside
(0, 1); exponentiating the same logit bounds gives the interval for
lambda_so. The win ratio gets a seeded percentile bootstrap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .effects import Extended, count_pairs_fast
from .tdist import t_cdf, t_ppf, t_sf, t_tail2
from .values import DataError, Sample, align

DEFAULT_LEVEL = 0.95
DEFAULT_REPS = 10_000
_ALTERNATIVES = ("two-sided", "greater", "less")


class DegenerateError(ArithmeticError):
    code = "E_DEGENERATE"


@dataclass(frozen=True)
class TestResult:
    theta_hat: Fraction
    variance_hat: float
    df: float | None
    statistic: float | None
    p_value: float | None
    n1: int
    n2: int
    alternative: str = "two-sided"
    degenerate: bool = False
    reason: str | None = None

    __test__ = False  # keep pytest from collecting this class

    def to_json(self) -> dict:
        return {
            "theta_hat": float(self.theta_hat),
            "variance_hat": self.variance_hat,
            "df": self.df,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "n1": self.n1,
            "n2": self.n2,
            "alternative": self.alternative,
            "degenerate": self.degenerate,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    estimate: float
    level: float
    scale: str
    method: str
    reps: int | None = None
    seed: int | None = None
    n_undefined: int = 0

    def __contains__(self, x) -> bool:
        return self.lower <= float(x) <= self.upper

    def to_json(self) -> dict:
        out = {
            "lower": _json_real(self.lower),
            "upper": _json_real(self.upper),
            "estimate": _json_real(self.estimate),
            "level": self.level,
            "scale": self.scale,
            "method": self.method,
        }
        if self.method == "bootstrap_percentile":
            out.update(reps=self.reps, seed=self.seed, n_undefined=self.n_undefined)
        return out


def _json_real(x: float):
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "undef"
    return x


# ---------------------------------------------------------------------------
# Rank machinery
# ---------------------------------------------------------------------------


def _check(a: Sample, b: Sample) -> tuple[list[int], list[int]]:
    if len(a) == 0 or len(b) == 0:
        raise DataError("empty sample")
    a, b = align(a, b)
    return list(a.keys), list(b.keys)


def estimate_theta_ranks(a: Sample, b: Sample) -> Fraction:
    """theta estimated from the mean pooled midrank of ``a``."""
    xa, xb = _check(a, b)
    n1, n2 = len(xa), len(xb)
    r2 = kernels.midranks2(xa + xb)
    sum2 = sum(r2[:n1])
    # (mean rank - (n1 + 1)/2) / n2 with doubled ranks
    return Fraction(sum2 - n1 * (n1 + 1), 2 * n1 * n2)


@dataclass(frozen=True)
class _Placements:
    theta: Fraction
    s2_a: Fraction
    s2_b: Fraction
    n1: int
    n2: int

    @property
    def N(self) -> int:
        return self.n1 + self.n2

    @property
    def variance(self) -> Fraction:
        """N * (S1^2 / ((N - n1)^2 n1) + S2^2 / ((N - n2)^2 n2))."""
        n1, n2, N = self.n1, self.n2, self.N
        return N * (self.s2_a / (n2 * n2 * n1) + self.s2_b / (n1 * n1 * n2))


def _sq_dev(pooled2: list[int], within2: list[int]) -> Fraction:
    """Sample variance of the placements of one group, exactly."""
    n = len(pooled2)
    diffs = [p - w for p, w in zip(pooled2, within2)]
    total = sum(diffs)
    # n * 2 * (placement - mean placement); mean of (R - R_within) is mean(R) - (n+1)/2
    ss = sum((n * d - total) ** 2 for d in diffs)
    return Fraction(ss, 4 * n * n * (n - 1))


def _placements(xa: list[int], xb: list[int]) -> _Placements:
    n1, n2 = len(xa), len(xb)
    pooled = kernels.midranks2(xa + xb)
    ra, rb = pooled[:n1], pooled[n1:]
    wa, wb = kernels.midranks2(xa), kernels.midranks2(xb)
    theta = Fraction(sum(ra) - n1 * (n1 + 1), 2 * n1 * n2)
    return _Placements(theta, _sq_dev(ra, wa), _sq_dev(rb, wb), n1, n2)


def _satterthwaite(pl: _Placements) -> float:
    c1 = pl.s2_a / pl.n2
    c2 = pl.s2_b / pl.n1
    den = c1 * c1 / (pl.n1 - 1) + c2 * c2 / (pl.n2 - 1)
    return float((c1 + c2) ** 2 / den)


def brunner_munzel(a: Sample, b: Sample, alternative: str = "two-sided") -> TestResult:
    """Test H0: theta = 1/2 for X from ``a`` against Y from ``b``.

    The statistic is sqrt(N) (theta_hat - 1/2) / sigma_hat referred to a t
    distribution with Satterthwaite degrees of freedom. ``alternative``
    ``"greater"`` means theta > 1/2. A zero variance estimate (complete
    separation, or no spread within either group) gives a result flagged
    ``degenerate`` with no statistic or p-value.
    """
    if alternative not in _ALTERNATIVES:
        raise ValueError(f"alternative must be one of {_ALTERNATIVES}")
    xa, xb = _check(a, b)
    n1, n2 = len(xa), len(xb)
    if n1 < 2 or n2 < 2:
        raise DataError("Brunner-Munzel test needs at least 2 observations per sample")
    pl = _placements(xa, xb)
    var = pl.variance
    if var == 0:
        reason = (
            "complete separation of the samples" if pl.theta in (0, 1)
            else "no variation in the placements"
        )
        return TestResult(pl.theta, 0.0, None, None, None, n1, n2, alternative, True, reason)
    df = _satterthwaite(pl)
    N = pl.N
    statistic = float(pl.theta - Fraction(1, 2)) * math.sqrt(N) / math.sqrt(float(var))
    if alternative == "two-sided":
        p = t_tail2(statistic, df)
    elif alternative == "greater":
        p = t_sf(statistic, df)
    else:
        p = t_cdf(statistic, df)
    return TestResult(pl.theta, float(var), df, statistic, min(1.0, max(0.0, p)), n1, n2, alternative)


# ---------------------------------------------------------------------------
# Intervals
# ---------------------------------------------------------------------------


def _logit_bounds(a: Sample, b: Sample, level: float) -> tuple[float, float, float, TestResult]:
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    res = brunner_munzel(a, b)
    th = res.theta_hat
    if th in (0, 1):
        raise DegenerateError(
            f"theta_hat = {th}: no logit interval exists; use the bootstrap interval instead"
        )
    if res.degenerate:
        raise DegenerateError(f"zero variance estimate ({res.reason}); use the bootstrap interval instead")
    t = float(th)
    N = res.n1 + res.n2
    centre = math.log(t / (1.0 - t))
    q = t_ppf(0.5 + level / 2.0, res.df)
    half = q * math.sqrt(res.variance_hat / N) / (t * (1.0 - t))
    return centre - half, centre + half, centre, res


_BELOW_ONE = math.nextafter(1.0, 0.0)
_ABOVE_ZERO = math.ulp(0.0)


def _expit(x: float) -> float:
    # rounded toward the interior so the bounds stay strictly inside (0, 1)
    if x >= 0:
        return min(1.0 / (1.0 + math.exp(-x)), _BELOW_ONE)
    e = math.exp(x)
    return max(e / (1.0 + e), _ABOVE_ZERO)


def _exp(x: float) -> float:
    if x > 709.0:
        return math.inf
    return max(math.exp(x), _ABOVE_ZERO)


def ci_theta_logit(a: Sample, b: Sample, level: float = DEFAULT_LEVEL) -> ConfidenceInterval:
    lo, hi, centre, _ = _logit_bounds(a, b, level)
    return ConfidenceInterval(_expit(lo), _expit(hi), _expit(centre), level, "theta", "logit_t")


def ci_lambda_so(a: Sample, b: Sample, level: float = DEFAULT_LEVEL) -> ConfidenceInterval:
    """Success-odds interval: exp of the logit-scale theta bounds."""
    lo, hi, centre, res = _logit_bounds(a, b, level)
    th = res.theta_hat
    return ConfidenceInterval(
        _exp(lo), _exp(hi), float(th / (1 - th)), level, "lambda_so", "logit_t"
    )


def _stream(seed: int, replicate: int) -> np.random.Generator:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, replicate], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def bootstrap_win_ratios(a: Sample, b: Sample, reps: int, seed: int) -> list[Extended]:
    """Win ratios of ``reps`` within-group resamples.

    Replicate ``r`` draws from its own counter-based stream keyed by
    (seed, r), so the list does not depend on evaluation order.
    """
    xa, xb = _check(a, b)
    fits = all(abs(k) < 2**62 for k in xa + xb)
    arr_a = np.array(xa, dtype=np.int64 if fits else object)
    arr_b = np.array(xb, dtype=np.int64 if fits else object)
    n1, n2 = len(xa), len(xb)
    out = []
    for r in range(reps):
        g = _stream(seed, r)
        ra = arr_a[g.integers(0, n1, n1)]
        rb = arr_b[g.integers(0, n2, n2)]
        if not fits:
            ra, rb = ra.tolist(), rb.tolist()
        w, t, l = kernels.count_pairs_merge(ra, rb)
        out.append(Extended.ratio(w, l))
    return out


def ci_lambda_wr_bootstrap(
    a: Sample,
    b: Sample,
    level: float = DEFAULT_LEVEL,
    reps: int = DEFAULT_REPS,
    seed: int = 0,
) -> ConfidenceInterval:
    """Percentile bootstrap interval for the win ratio.

    Replicates with no losses count as +inf and sort above every finite
    value; 0/0 replicates are dropped and counted in ``n_undefined``.
    """
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    if reps < 100:
        raise ValueError("reps must be at least 100")
    est = count_pairs_fast(a, b)
    point = Extended.ratio(est.wins, est.losses)
    if point.is_undefined:
        raise DegenerateError("win ratio is 0/0 (all pairs tied); no interval")
    reps_ = bootstrap_win_ratios(a, b, reps, seed)
    vals = sorted(float(v) for v in reps_ if not v.is_undefined)
    n_undef = reps - len(vals)
    if not vals:
        raise DegenerateError("every bootstrap replicate has an undefined win ratio")
    alpha = 1.0 - level
    R = len(vals)
    lo_idx = max(0, math.ceil(alpha / 2 * R) - 1)
    hi_idx = min(R - 1, max(0, math.ceil((1 - alpha / 2) * R) - 1))
    return ConfidenceInterval(
        vals[lo_idx], vals[hi_idx], float(point), level, "lambda_wr", "bootstrap_percentile",
        reps=reps, seed=seed, n_undefined=n_undef,
    )
