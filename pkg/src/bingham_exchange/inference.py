"""Exchange-algorithm MCMC for the canonical Bingham concentrations.

The target is the posterior under independent exponential priors restricted
to ``lambda_1 >= ... >= lambda_{q-1} >= 0``. Each iteration proposes a
random-walk move, simulates an auxiliary data set of the same size from the
proposed parameter, and accepts with a ratio in which every normalising
constant ``c(lambda)`` cancels. The chain therefore never evaluates ``c``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import _kernels as K
from .errors import DataValidationError, NumericalFailure
from .model import LambdaVector, SufficientStats, log_unnorm_lik
from .rng import RngState, as_rng
from .samplers import MAX_TRIALS

DEFAULT_RATE = 0.01


@dataclass(frozen=True)
class PriorSpec:
    """Exponential rates for the ordered prior (prior mean of lambda_i is 1/rate_i)."""

    rates: tuple

    def __post_init__(self):
        rates = tuple(float(r) for r in np.ravel(self.rates))
        if not rates or not all(math.isfinite(r) and r > 0.0 for r in rates):
            raise DataValidationError(f"prior rates must be positive, got {rates}")
        object.__setattr__(self, "rates", rates)

    @classmethod
    def default(cls, q: int) -> "PriorSpec":
        return cls((DEFAULT_RATE,) * (q - 1))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.rates)


@dataclass(frozen=True)
class ChainConfig:
    """Run settings.

    ``proposal_sigma`` is the per-coordinate proposal *variance* (covariance
    ``sigma * I``). ``burn_in=None`` means 10% of ``iterations``. ``b`` is the
    envelope constant for auxiliary simulation or ``"auto"`` to tune it for
    every proposal. ``init`` defaults to the origin, which is always in the
    prior support.
    """

    iterations: int = 10**6
    burn_in: Optional[int] = None
    thin: int = 10
    proposal_sigma: float = 1.0
    b: Union[float, str] = 1.0
    seed: int = 0
    init: Optional[Sequence[float]] = None

    def __post_init__(self):
        if self.burn_in is None:
            object.__setattr__(self, "burn_in", int(self.iterations) // 10)
        if not (int(self.iterations) > int(self.burn_in) >= 0):
            raise DataValidationError(
                f"need iterations > burn_in >= 0, got {self.iterations}, {self.burn_in}"
            )
        if int(self.thin) < 1:
            raise DataValidationError(f"thin must be >= 1, got {self.thin}")
        if not (math.isfinite(self.proposal_sigma) and self.proposal_sigma > 0.0):
            raise DataValidationError(f"proposal sigma must be positive, got {self.proposal_sigma}")
        if isinstance(self.b, str):
            if self.b != "auto":
                raise DataValidationError(f"b must be a number or 'auto', got {self.b!r}")
        elif not self.b > 0.0:
            raise DataValidationError(f"b must be positive, got {self.b}")
        for name in ("iterations", "burn_in", "thin", "seed"):
            object.__setattr__(self, name, int(getattr(self, name)))
        if self.init is not None:
            object.__setattr__(self, "init", tuple(float(v) for v in np.ravel(self.init)))

    @property
    def n_stored(self) -> int:
        return (self.iterations - self.burn_in) // self.thin


@dataclass(frozen=True)
class Chain:
    """Thinned post-burn-in draws (one row per stored state) with acceptance bookkeeping."""

    draws: np.ndarray
    accept_count: int
    proposed_count: int
    config: ChainConfig
    stats: SufficientStats
    prior_reject_count: int = 0
    candidate_count: int = 0
    duration: float = field(default=0.0, compare=False)

    @property
    def acceptance_rate(self) -> float:
        return self.accept_count / self.proposed_count if self.proposed_count else float("nan")

    @property
    def dim(self) -> int:
        return self.draws.shape[1]

    def __eq__(self, other):
        if not isinstance(other, Chain):
            return NotImplemented
        return (
            np.array_equal(self.draws, other.draws)
            and self.accept_count == other.accept_count
            and self.proposed_count == other.proposed_count
            and self.prior_reject_count == other.prior_reject_count
            and self.candidate_count == other.candidate_count
            and self.config == other.config
            and self.stats == other.stats
        )


def _vec(lam) -> np.ndarray:
    if isinstance(lam, LambdaVector):
        return lam.array
    return np.asarray(lam, dtype=float).reshape(-1)


def log_prior(lam, prior: PriorSpec) -> float:
    """``-sum mu_i lambda_i`` on the ordered non-negative cone, ``-inf`` outside.

    The normalising constant of the prior is dropped.
    """
    lam = _vec(lam)
    if lam.size != len(prior.rates):
        raise DataValidationError("prior and lambda dimensions differ")
    return float(K._log_prior(lam, prior.array))


def propose(lam, sigma: float, rng) -> np.ndarray:
    """Gaussian random-walk proposal with covariance ``sigma * I`` (symmetric)."""
    if not sigma > 0.0:
        raise DataValidationError(f"sigma must be positive, got {sigma}")
    lam = _vec(lam)
    z = np.empty(lam.size)
    K.normal_fill(as_rng(rng).generator, z)
    return lam + math.sqrt(sigma) * z


def exchange_log_ratio(stats_obs: SufficientStats, stats_aux: SufficientStats,
                       lam, lam_can, prior: PriorSpec) -> float:
    """Log acceptance ratio of the exchange move ``lam -> lam_can``.

    The proposal density terms cancel because proposals are symmetric. The
    concentrations may be given with q-1 entries or with all q diagonal
    entries; the prior always sees the first q-1.
    """
    if stats_aux.n != stats_obs.n:
        raise DataValidationError(
            f"auxiliary sample size {stats_aux.n} differs from observed {stats_obs.n}"
        )
    if stats_aux.q != stats_obs.q:
        raise DataValidationError("auxiliary and observed dimensions differ")
    lam = _vec(lam)
    lam_can = _vec(lam_can)
    d = stats_obs.q - 1
    lp = log_prior(lam[:d], prior)
    lp_can = log_prior(lam_can[:d], prior)
    if lp_can == -math.inf:
        return -math.inf
    num = log_unnorm_lik(stats_obs, lam_can) + log_unnorm_lik(stats_aux, lam) + lp_can
    den = log_unnorm_lik(stats_obs, lam) + log_unnorm_lik(stats_aux, lam_can) + lp
    return num - den


def _check_inputs(stats: SufficientStats, prior: PriorSpec, cfg: ChainConfig) -> np.ndarray:
    d = stats.q - 1
    if len(prior.rates) != d:
        raise DataValidationError(f"prior has {len(prior.rates)} rates, data imply {d}")
    if cfg.init is None:
        init = np.zeros(d)
    else:
        init = np.asarray(cfg.init, dtype=float).reshape(-1)
        if init.size != d:
            raise DataValidationError(f"init has {init.size} entries, expected {d}")
        LambdaVector(tuple(init))
    if not isinstance(cfg.b, str) and cfg.b > stats.q:
        raise DataValidationError(f"b must lie in (0, {stats.q}], got {cfg.b}")
    return init


def run_exchange(stats: SufficientStats, prior: PriorSpec, cfg: ChainConfig,
                 rng: Optional[RngState] = None) -> Chain:
    """Run the exchange chain. ``rng`` defaults to ``RngState(cfg.seed)``."""
    init = _check_inputs(stats, prior, cfg)
    rng = as_rng(cfg.seed if rng is None else rng)
    d = stats.q - 1
    draws = np.empty((cfg.n_stored, d))
    counters = np.zeros(4, dtype=np.int64)
    diag = np.zeros(2 + d)
    b_fixed = -1.0 if cfg.b == "auto" else float(cfg.b)

    t0 = time.perf_counter()
    status = K.exchange_chain(
        rng.generator, stats.array, stats.n, prior.array, init,
        math.sqrt(cfg.proposal_sigma), cfg.iterations, cfg.burn_in, cfg.thin,
        b_fixed, MAX_TRIALS, draws, counters, diag,
    )
    elapsed = time.perf_counter() - t0
    if status == K.BOUND_VIOLATION:
        raise NumericalFailure(
            f"envelope violated (log excess {diag[0]:.3e}) at lambda'={tuple(diag[2:])}"
        )
    if status == K.TRIAL_CAP:
        raise NumericalFailure(
            f"rejection sampler exceeded {MAX_TRIALS} trials at lambda'={tuple(diag[2:])}"
        )
    ok = np.all(draws >= 0.0) and (d == 1 or np.all(np.diff(draws, axis=1) <= 0.0))
    if not ok:
        raise NumericalFailure("stored draw violates the ordering constraint")
    draws.setflags(write=False)
    return Chain(
        draws=draws,
        accept_count=int(counters[0]),
        proposed_count=int(counters[1]),
        config=cfg,
        stats=stats,
        prior_reject_count=int(counters[2]),
        candidate_count=int(counters[3]),
        duration=elapsed,
    )

