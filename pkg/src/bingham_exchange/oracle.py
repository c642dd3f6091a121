"""Brute-force quadrature for the Bingham normalising constant and moments (q = 2, 3).

Test support only: the exchange sampler never calls into this module. Also
provides a reference random-walk Metropolis-Hastings chain that evaluates
``c(lambda)`` explicitly, used to cross-check the exchange posterior.

For q = 3 the sphere is parameterised with the most concentrated axis as the
pole, ``x = (cos t, sin t cos p, sin t sin p)``, and integrated with
tensor-product composite Simpson rules including the ``sin t`` Jacobian. The
density at the poles is then ``exp(-lambda_1)`` at most, which suppresses the
endpoint error terms of the colatitude rule.
For q = 2 the circle is integrated with the periodic trapezoid rule.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import DataValidationError
from .inference import Chain, ChainConfig, PriorSpec, log_prior
from .model import LambdaVector, SufficientStats
from .rng import RngState, as_rng

MIN_RESOLUTION = 64


@dataclass(frozen=True)
class QuadratureGrid:
    """Resolutions: colatitude x longitude intervals for q = 3, angle nodes for q = 2."""

    n_theta: int = 512
    n_phi: int = 1024
    n_angle: int = 1024

    def __post_init__(self):
        for name in ("n_theta", "n_phi", "n_angle"):
            v = getattr(self, name)
            if int(v) != v or v < MIN_RESOLUTION or v % 2:
                raise DataValidationError(f"{name} must be an even integer >= {MIN_RESOLUTION}, got {v}")

    def doubled(self) -> "QuadratureGrid":
        return QuadratureGrid(2 * self.n_theta, 2 * self.n_phi, 2 * self.n_angle)


def _simpson_weights(n: int, length: float) -> np.ndarray:
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (length / n / 3.0)


class SphereRule:
    """Quadrature nodes (squared coordinates) and weights on the sphere or circle."""

    def __init__(self, q: int, grid: QuadratureGrid):
        if q == 3:
            theta = np.linspace(0.0, math.pi, grid.n_theta + 1)
            phi = np.linspace(0.0, 2.0 * math.pi, grid.n_phi + 1)
            wt = _simpson_weights(grid.n_theta, math.pi) * np.sin(theta)
            wp = _simpson_weights(grid.n_phi, 2.0 * math.pi)
            st, ct = np.sin(theta)[:, None], np.cos(theta)[:, None]
            x2 = (st * np.cos(phi)[None, :]) ** 2
            x3 = (st * np.sin(phi)[None, :]) ** 2
            x1 = np.broadcast_to(ct**2, x2.shape)
            self.sq = np.stack([x1.ravel(), x2.ravel(), x3.ravel()])
            self.weights = np.outer(wt, wp).ravel()
        elif q == 2:
            a = np.arange(grid.n_angle) * (2.0 * math.pi / grid.n_angle)
            self.sq = np.stack([np.cos(a) ** 2, np.sin(a) ** 2])
            self.weights = np.full(grid.n_angle, 2.0 * math.pi / grid.n_angle)
        else:
            raise DataValidationError(f"quadrature supports q in {{2, 3}}, got q={q}")
        self.q = q

    def density(self, lam: np.ndarray) -> np.ndarray:
        """Weighted unnormalised density at every node."""
        return self.weights * np.exp(-(lam @ self.sq[:-1]))

    def constant(self, lam: np.ndarray, exact_sum: bool = True) -> float:
        wf = self.density(lam)
        return math.fsum(wf) if exact_sum else float(np.sum(wf))

    def moments(self, lam: np.ndarray) -> np.ndarray:
        wf = self.density(lam)
        c = math.fsum(wf)
        return np.array([math.fsum(wf * s) / c for s in self.sq])


@lru_cache(maxsize=8)
def sphere_rule(q: int, grid: QuadratureGrid) -> SphereRule:
    return SphereRule(q, grid)


def _lam(lam) -> LambdaVector:
    return lam if isinstance(lam, LambdaVector) else LambdaVector(tuple(np.ravel(lam)))


def constant_quadrature(lam, grid: QuadratureGrid = QuadratureGrid()) -> float:
    """``c(lambda) = int exp(-sum lambda_i x_i^2) dS`` over the unit sphere (q = 2 or 3)."""
    lam = _lam(lam)
    return sphere_rule(lam.q, grid).constant(lam.array)


def moments_quadrature(lam, grid: QuadratureGrid = QuadratureGrid()) -> np.ndarray:
    """All q second moments ``E[x_i^2]``; they sum to one."""
    lam = _lam(lam)
    return sphere_rule(lam.q, grid).moments(lam.array)


def moment_quadrature(lam, i: int, grid: QuadratureGrid = QuadratureGrid()) -> float:
    """``E[x_i^2]`` for 0-based coordinate ``i``."""
    m = moments_quadrature(lam, grid)
    if not 0 <= i < m.size:
        raise DataValidationError(f"coordinate index {i} out of range for q={m.size}")
    return float(m[i])


def angle_cdf_q2(kappa: float, angles: np.ndarray, n_nodes: int = 1 << 16) -> np.ndarray:
    """CDF of the polar angle in [0, 2 pi) for the circular Bingham ``exp(-kappa cos^2 a)``.

    Cumulative trapezoid on a fine grid, linearly interpolated.
    """
    a = np.linspace(0.0, 2.0 * math.pi, n_nodes + 1)
    f = np.exp(-kappa * np.cos(a) ** 2)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * np.diff(a))])
    return np.interp(angles, a, cum / cum[-1])


def bound_check(lam, b: float, x: np.ndarray) -> np.ndarray:
    """``log f*(x) - log M* - log g*(x)`` for rows of ``x`` (vectorised, independent of the kernels)."""
    lam = _lam(lam).array
    q = lam.size + 1
    inv_psi = np.append(1.0 + 2.0 * lam / b, 1.0)
    lmstar = 0.0 if b >= q else -(q - b) / 2.0 + (q / 2.0) * math.log(q / b)
    log_f = -(x[:, :-1] ** 2) @ lam
    log_g = -(q / 2.0) * np.log((x**2) @ inv_psi)
    return log_f - lmstar - log_g


def reference_mh_chain(stats: SufficientStats, prior: PriorSpec, cfg: ChainConfig,
                       grid: QuadratureGrid = QuadratureGrid(128, 256),
                       rng: Optional[RngState] = None, use_likelihood: bool = True) -> Chain:
    """Random-walk Metropolis-Hastings with ``c(lambda)`` evaluated by quadrature.

    Same proposal, prior and bookkeeping as the exchange chain; the likelihood
    includes ``-n log c(lambda)`` explicitly. ``use_likelihood=False`` targets
    the prior alone.
    """
    if stats.q != 3:
        raise DataValidationError("reference chain supports q = 3 only")
    rule = sphere_rule(stats.q, grid)
    gen = as_rng(cfg.seed if rng is None else rng).generator
    taus = stats.array
    n = stats.n
    step = math.sqrt(cfg.proposal_sigma)

    def log_target(lam):
        lp = log_prior(lam, prior)
        if lp == -math.inf or not use_likelihood:
            return lp
        return lp - n * float(lam @ taus) - n * math.log(rule.constant(lam, exact_sum=False))

    lam = np.zeros(2) if cfg.init is None else np.asarray(cfg.init, dtype=float)
    cur = log_target(lam)
    draws = np.empty((cfg.n_stored, 2))
    accepted = prior_rej = stored = 0
    t0 = time.perf_counter()
    noise = gen.standard_normal((cfg.iterations, 2)) * step
    unif = gen.random(cfg.iterations)
    for it in range(cfg.iterations):
        can = lam + noise[it]
        new = log_target(can)
        if new == -math.inf:
            prior_rej += 1
        elif math.log(unif[it]) < new - cur:
            lam, cur = can, new
            accepted += 1
        if it >= cfg.burn_in and (it - cfg.burn_in + 1) % cfg.thin == 0:
            draws[stored] = lam
            stored += 1
    draws.setflags(write=False)
    return Chain(draws=draws, accept_count=accepted, proposed_count=cfg.iterations,
                 config=cfg, stats=stats, prior_reject_count=prior_rej,
                 duration=time.perf_counter() - t0)
