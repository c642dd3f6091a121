"""Exact Bingham simulation by rejection from an angular central Gaussian envelope.

For canonical concentrations ``lambda`` the envelope is the ACG with
``Psi^{-1} = I + (2/b) diag(lambda, 0)``. Writing ``t = sum lambda_i x_i^2``,
the ratio of unnormalised densities is ``e^{-t} (1 + 2t/b)^{q/2}``, maximised
over ``t >= 0`` at ``t* = (q - b)/2``; that supremum is the bound ``M*``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import _kernels as K
from .errors import DataValidationError, EnvelopeViolation, NumericalFailure
from .model import LambdaVector, UnitVector, as_symmetric, canonicalize, eigen_decompose
from .rng import RngState, as_rng

MAX_TRIALS = 10**7

BSpec = Union[float, str]


@dataclass(frozen=True)
class EnvelopeParams:
    """ACG envelope: diagonal variances ``psis`` (last is 1), constant ``b`` and ``log M*``."""

    b: float
    psis: tuple
    log_mstar: float

    def __post_init__(self):
        psis = tuple(float(p) for p in self.psis)
        if not all(0.0 < p <= 1.0 for p in psis):
            raise DataValidationError(f"ACG variances must lie in (0, 1], got {psis}")
        if self.log_mstar < 0.0:
            raise DataValidationError("log M* must be non-negative")
        object.__setattr__(self, "psis", psis)

    @property
    def q(self) -> int:
        return len(self.psis)

    def _arrays(self):
        psi = np.array(self.psis)
        return 1.0 / psi, np.sqrt(psi)


def _lam(lam) -> LambdaVector:
    return lam if isinstance(lam, LambdaVector) else LambdaVector(tuple(np.ravel(lam)))


def _check_b(b: float, q: int) -> float:
    b = float(b)
    if not (0.0 < b <= q):
        raise DataValidationError(f"tuning constant b must lie in (0, {q}], got {b}")
    return b


def log_mstar(q: int, b: float) -> float:
    """Log of the closed-form bound ``M* = e^{-(q-b)/2} (q/b)^{q/2}`` (``M* = 1`` at b = q)."""
    return K.log_mstar(q, _check_b(b, q))


def envelope_for(lam, b: float = 1.0) -> EnvelopeParams:
    lam = _lam(lam)
    q = lam.q
    b = _check_b(b, q)
    psi = np.empty(q)
    lmstar = K.envelope_arrays(lam.array, b, psi, np.empty(q), np.empty(q))
    return EnvelopeParams(b=b, psis=tuple(psi), log_mstar=lmstar)


def tune_objective(lam, b: float) -> float:
    """``M*(b) * prod_i psi_i(b)^{1/2}``, proportional to the expected number of trials."""
    lam = _lam(lam)
    return math.exp(K.log_tune_objective(lam.array, _check_b(b, lam.q)))


def tune_b(lam) -> float:
    """Envelope constant minimising the expected trial count, to within 1e-6."""
    return float(K.tune_b(_lam(lam).array))


def resolve_b(lam, b: BSpec) -> float:
    if isinstance(b, str):
        if b != "auto":
            raise DataValidationError(f"b must be a number or 'auto', got {b!r}")
        return tune_b(lam)
    return _check_b(b, _lam(lam).q)


def acg_log_unnorm(x, env: EnvelopeParams) -> float:
    """``-(q/2) log(x^T Psi^{-1} x)``."""
    coords = x.coords if isinstance(x, UnitVector) else np.asarray(x, dtype=float)
    if coords.size != env.q:
        raise DataValidationError("dimension mismatch between vector and envelope")
    inv_psi, _ = env._arrays()
    return -0.5 * env.q * math.log(float(np.dot(coords * coords, inv_psi)))


def acg_sample_n(env: EnvelopeParams, n: int, rng) -> np.ndarray:
    rng = as_rng(rng)
    out = np.empty((int(n), env.q))
    _, sqrt_psi = env._arrays()
    K.acg_fill(rng.generator, sqrt_psi, out)
    return out


def acg_sample(env: EnvelopeParams, rng) -> UnitVector:
    return UnitVector(acg_sample_n(env, 1, rng)[0])


def _raise_status(status: int, diag: np.ndarray, lam: LambdaVector, env_b: float):
    if status == K.BOUND_VIOLATION:
        raise EnvelopeViolation(
            f"f* exceeds M* g* by log-margin {diag[0]:.3e} for lambda={lam.lambdas}, b={env_b}"
        )
    if status == K.TRIAL_CAP:
        raise NumericalFailure(
            f"rejection sampler exceeded {MAX_TRIALS} trials for lambda={lam.lambdas}, b={env_b}"
        )


def bingham_sample_with_trials(lam, n: int, env: EnvelopeParams, rng,
                               max_trials: int = MAX_TRIALS) -> tuple[np.ndarray, np.ndarray]:
    """``n`` exact draws under an explicit envelope, plus the trial count of each draw."""
    lam = _lam(lam)
    if env.q != lam.q:
        raise DataValidationError("envelope dimension does not match lambda")
    n = int(n)
    if n < 1:
        raise DataValidationError(f"n must be >= 1, got {n}")
    rng = as_rng(rng)
    inv_psi, sqrt_psi = env._arrays()
    out = np.empty((n, lam.q))
    trials = np.zeros(n, dtype=np.int64)
    diag = np.zeros(2)
    status = K.bingham_fill(rng.generator, lam.array, inv_psi, sqrt_psi, env.log_mstar,
                            out, trials, max_trials, diag)
    _raise_status(status, diag, lam, env.b)
    return out, trials


def bingham_sample(lam, env: EnvelopeParams, rng) -> tuple[UnitVector, int]:
    """One exact Bingham draw and the number of candidates it consumed."""
    x, trials = bingham_sample_with_trials(lam, 1, env, rng)
    return UnitVector(x[0]), int(trials[0])


def bingham_sample_n(lam, n: int, b: BSpec = 1.0, rng=0) -> np.ndarray:
    """``n`` independent exact draws from the canonical Bingham distribution as an (n, q) array.

    ``b`` is the envelope constant, or ``"auto"`` to tune it for ``lam``.
    """
    lam = _lam(lam)
    env = envelope_for(lam, resolve_b(lam, b))
    x, _ = bingham_sample_with_trials(lam, n, env, rng)
    return x


def bingham_sample_matrix(a, n: int, rng, b: float = 1.0) -> np.ndarray:
    """Exact draws for a general symmetric parameter matrix ``A`` (density ~ exp(-x^T A x)).

    The rejection step runs directly in the original frame with a full-matrix
    ACG envelope ``Psi^{-1} = I + (2/b)(A - d_min I)``; no rotation is applied
    to the draws.
    """
    a = as_symmetric(a)
    q = a.shape[0]
    b = _check_b(b, q)
    _, d = eigen_decompose(a)
    a0 = a - d[-1] * np.eye(q)
    inv_psi = np.eye(q) + (2.0 / b) * a0
    chol = np.linalg.cholesky(np.linalg.inv(inv_psi))
    lmstar = K.log_mstar(q, b)
    gen = as_rng(rng).generator
    out = np.empty((0, q))
    while out.shape[0] < n:
        need = n - out.shape[0]
        m = max(64, int(need * 2.5))
        y = gen.standard_normal((m, q)) @ chol.T
        y /= np.linalg.norm(y, axis=1, keepdims=True)
        log_f = -np.einsum("ij,jk,ik->i", y, a0, y)
        log_g = -0.5 * q * np.log(np.einsum("ij,jk,ik->i", y, inv_psi, y))
        log_ratio = log_f - log_g - lmstar
        if np.any(log_ratio > K.BOUND_SLACK):
            raise EnvelopeViolation("full-matrix ACG envelope violated")
        keep = gen.random(m) < np.exp(log_ratio)
        out = np.vstack([out, y[keep][:need]])
    return out


def canonical_frame(a) -> tuple[np.ndarray, LambdaVector]:
    """Eigenvector matrix ``V`` and canonical concentrations for a parameter matrix.

    If ``x`` is Bingham(A) then ``V^T x`` is Bingham with the returned concentrations.
    """
    v, d = eigen_decompose(a)
    return v, canonicalize(d)
