"""Chain summaries and the two-population comparison of posterior differences."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DataValidationError, NumericalFailure
from .inference import Chain

ChainLike = Union[Chain, np.ndarray]


def _draws(chain: ChainLike) -> np.ndarray:
    d = chain.draws if isinstance(chain, Chain) else np.asarray(chain, dtype=float)
    if d.ndim == 1:
        d = d[:, None]
    if d.ndim != 2 or d.shape[0] == 0:
        raise DataValidationError("chain is empty")
    return d


def acf(series, max_lag: int) -> np.ndarray:
    """Sample autocorrelations r_0..r_max_lag, normalised by the lag-0 sum of squares."""
    x = np.asarray(series, dtype=float).reshape(-1)
    max_lag = int(max_lag)
    if not 0 <= max_lag < x.size:
        raise DataValidationError(f"need series length > max_lag >= 0, got {x.size} and {max_lag}")
    x = x - x.mean()
    denom = float(np.dot(x, x))
    if denom == 0.0:
        raise DataValidationError("constant series has no autocorrelation")
    r = np.array([np.dot(x[: x.size - k], x[k:]) / denom for k in range(max_lag + 1)])
    r[0] = 1.0
    assert np.all(np.abs(r) <= 1.0 + 1e-12)
    return r


def _full_acf(x: np.ndarray) -> np.ndarray:
    n = x.size
    x = x - x.mean()
    size = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(x, size)
    ac = np.fft.irfft(f * np.conj(f), size)[:n]
    return ac / ac[0]


def effective_sample_size(series) -> float:
    """ESS with Geyer's initial monotone positive-sequence truncation."""
    x = np.asarray(series, dtype=float).reshape(-1)
    n = x.size
    if n < 4 or np.ptp(x) == 0.0:
        return float(n)
    rho = _full_acf(x)
    pairs = rho[: n - n % 2].reshape(-1, 2).sum(axis=1)
    tau = -1.0
    prev = math.inf
    for p in pairs:
        if p <= 0.0:
            break
        p = min(p, prev)
        tau += 2.0 * p
        prev = p
    return n / max(tau, 1.0 / n)


def mc_standard_error(series) -> float:
    """Monte Carlo standard error of the mean, ``sd / sqrt(ESS)``."""
    x = np.asarray(series, dtype=float).reshape(-1)
    return float(np.std(x, ddof=1) / math.sqrt(effective_sample_size(x)))


@dataclass(frozen=True)
class SummaryReport:
    """Per-parameter posterior summaries plus chain-level bookkeeping."""

    mean: np.ndarray
    sd: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    level: float
    acceptance_rate: float
    support_acceptance_rate: float
    n_draws: int
    ess: np.ndarray
    mcse: np.ndarray

    def as_dict(self) -> dict:
        pct = f"{100 * self.level:g}"
        out = {}
        for i in range(self.mean.size):
            tag = f"lambda{i + 1}"
            out[f"mean.{tag}"] = float(self.mean[i])
            out[f"sd.{tag}"] = float(self.sd[i])
            out[f"ci{pct}.lo.{tag}"] = float(self.lower[i])
            out[f"ci{pct}.hi.{tag}"] = float(self.upper[i])
            out[f"ess.{tag}"] = float(self.ess[i])
            out[f"mcse.{tag}"] = float(self.mcse[i])
        out["accept.rate"] = self.acceptance_rate
        out["accept.rate.in_support"] = self.support_acceptance_rate
        out["draws"] = self.n_draws
        return out


def credible_interval(values, level: float) -> tuple[float, float]:
    """Equal-tail interval from empirical quantiles with linear interpolation."""
    if not 0.0 < level < 1.0:
        raise DataValidationError(f"level must lie in (0, 1), got {level}")
    lo, hi = np.quantile(np.asarray(values, dtype=float), [(1 - level) / 2, (1 + level) / 2])
    return float(lo), float(hi)


def summarize(chain: ChainLike, level: float = 0.95) -> SummaryReport:
    d = _draws(chain)
    if not 0.0 < level < 1.0:
        raise DataValidationError(f"level must lie in (0, 1), got {level}")
    ci = np.array([credible_interval(d[:, i], level) for i in range(d.shape[1])])
    ess = np.array([effective_sample_size(d[:, i]) for i in range(d.shape[1])])
    sd = d.std(axis=0, ddof=1) if d.shape[0] > 1 else np.zeros(d.shape[1])
    if isinstance(chain, Chain):
        rate = chain.acceptance_rate
        in_support = chain.proposed_count - chain.prior_reject_count
        support_rate = chain.accept_count / in_support if in_support else float("nan")
    else:
        rate = support_rate = float("nan")
    return SummaryReport(
        mean=d.mean(axis=0),
        sd=sd,
        lower=ci[:, 0],
        upper=ci[:, 1],
        level=level,
        acceptance_rate=rate,
        support_acceptance_rate=support_rate,
        n_draws=d.shape[0],
        ess=ess,
        mcse=sd / np.sqrt(ess),
    )


@dataclass(frozen=True)
class RegionTestResult:
    mean_diff: np.ndarray
    cov_diff: np.ndarray
    mahalanobis_sq_origin: float
    threshold: float
    level: float
    n_pairs: int

    @property
    def origin_inside(self) -> bool:
        return self.mahalanobis_sq_origin <= self.threshold


def chi2_quantile_2df(level: float) -> float:
    """Chi-square quantile with two degrees of freedom (closed form ``-2 log(1 - level)``)."""
    return -2.0 * math.log1p(-level)


def difference_region_test(chain_a: ChainLike, chain_b: ChainLike, level: float = 0.95) -> RegionTestResult:
    """Is the origin inside the bivariate-normal ``level`` region of ``a - b`` posterior differences?

    Draws are paired by index after truncating to the shorter chain; the
    chains are independent, so any fixed pairing is valid.
    """
    a, b = _draws(chain_a), _draws(chain_b)
    if a.shape[1] != b.shape[1]:
        raise DataValidationError(f"chains have different dimensions: {a.shape[1]} vs {b.shape[1]}")
    if a.shape[1] != 2:
        raise DataValidationError("region test needs two-parameter (q = 3) chains")
    if not 0.0 < level < 1.0:
        raise DataValidationError(f"level must lie in (0, 1), got {level}")
    m = min(a.shape[0], b.shape[0])
    if m < 3:
        raise DataValidationError("need at least three paired draws")
    diff = a[:m] - b[:m]
    mean = diff.mean(axis=0)
    cov = np.cov(diff, rowvar=False)
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        raise NumericalFailure("covariance of the differences is singular") from None
    if np.min(np.diag(chol)) <= 1e-12 * math.sqrt(max(float(np.trace(cov)), 1e-300)):
        raise NumericalFailure("covariance of the differences is singular")
    z = np.linalg.solve(chol, mean)
    return RegionTestResult(
        mean_diff=mean,
        cov_diff=cov,
        mahalanobis_sq_origin=float(z @ z),
        threshold=chi2_quantile_2df(level),
        level=level,
        n_pairs=m,
    )
