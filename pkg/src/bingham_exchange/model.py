"""Canonical Bingham parameterisation, eigenframe reduction and sufficient statistics.

The Bingham density on the unit sphere is proportional to ``exp(-x^T A x)``.
Rotating into the eigenbasis of ``A`` and shifting the eigenvalues so the
smallest is zero gives the canonical form

    f*(x; lambda) = exp(-sum_{i<q} lambda_i x_i^2),   lambda_1 >= ... >= lambda_{q-1} >= 0

which is what every other module works with.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import DataValidationError, NumericalFailure

JACOBI_MAX_SWEEPS = 100
JACOBI_TOL = 1e-12
MIN_NORM = 1e-8
# vectors this close to unit norm are kept bit-for-bit; renormalising would only perturb the last ulp
NORM_EXACT_TOL = 4 * np.finfo(float).eps


@dataclass(frozen=True)
class UnitVector:
    """A point on the unit sphere in R^q."""

    coords: np.ndarray

    def __post_init__(self):
        c = np.array(self.coords, dtype=float).reshape(-1)
        if c.size < 2:
            raise DataValidationError("unit vectors need dimension q >= 2")
        if not np.all(np.isfinite(c)):
            raise DataValidationError("non-finite coordinate")
        norm = math.sqrt(math.fsum(c * c))
        if norm < MIN_NORM:
            raise DataValidationError(f"vector norm {norm:.3g} too small to normalise")
        if abs(norm - 1.0) > NORM_EXACT_TOL:
            c = c / norm
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @property
    def q(self) -> int:
        return self.coords.size

    def __neg__(self) -> UnitVector:
        return UnitVector(-self.coords)

    def __eq__(self, other):
        if not isinstance(other, UnitVector):
            return NotImplemented
        return np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash(self.coords.tobytes())


@dataclass(frozen=True)
class LambdaVector:
    """Ordered concentrations ``lambda_1 >= ... >= lambda_{q-1} >= 0``.

    The implicit ``lambda_q = 0`` is never stored.
    """

    lambdas: tuple

    def __post_init__(self):
        lam = tuple(float(v) for v in np.asarray(self.lambdas, dtype=float).reshape(-1))
        if len(lam) < 1:
            raise DataValidationError("need at least one concentration (q >= 2)")
        if not all(math.isfinite(v) for v in lam):
            raise DataValidationError(f"non-finite concentration in {lam}")
        if lam[-1] < 0.0 or any(a < b for a, b in zip(lam, lam[1:])):
            raise DataValidationError(
                f"concentrations must satisfy l1 >= ... >= l(q-1) >= 0, got {lam}"
            )
        object.__setattr__(self, "lambdas", lam)

    @property
    def q(self) -> int:
        return len(self.lambdas) + 1

    @property
    def array(self) -> np.ndarray:
        return np.array(self.lambdas, dtype=float)

    def full(self) -> np.ndarray:
        """All q diagonal entries, including the trailing zero."""
        return np.append(self.array, 0.0)

    def __len__(self):
        return len(self.lambdas)

    def __iter__(self):
        return iter(self.lambdas)


@dataclass(frozen=True)
class SufficientStats:
    """Sample size and mean squared coordinates ``tau_i = mean_j x_ji^2`` for i < q."""

    n: int
    taus: tuple
    # absolute slack for taus produced by floating point averaging
    _tol: float = field(default=1e-12, repr=False, compare=False)

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DataValidationError(f"sample size must be a positive integer, got {self.n}")
        taus = tuple(float(t) for t in np.asarray(self.taus, dtype=float).reshape(-1))
        if len(taus) < 1:
            raise DataValidationError("need at least one tau (q >= 2)")
        tol = self._tol
        for i, t in enumerate(taus):
            if not (math.isfinite(t) and -tol <= t <= 1.0 + tol):
                raise DataValidationError(f"tau{i + 1} = {t} outside [0, 1]")
        if math.fsum(taus) > 1.0 + tol:
            raise DataValidationError(f"taus sum to {math.fsum(taus)} > 1")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "taus", tuple(min(max(t, 0.0), 1.0) for t in taus))

    @property
    def q(self) -> int:
        return len(self.taus) + 1

    @property
    def array(self) -> np.ndarray:
        return np.array(self.taus, dtype=float)

    def full(self) -> np.ndarray:
        """All q mean squared coordinates; the last is ``1 - sum(taus)``."""
        return np.append(self.array, max(0.0, 1.0 - math.fsum(self.taus)))


ArrayLike = Union[np.ndarray, Sequence[float]]


def as_symmetric(a: ArrayLike, tol: float = 1e-12) -> np.ndarray:
    """Validate near-symmetry and return the exactly symmetrised matrix."""
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DataValidationError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
    if np.max(np.abs(a - a.T)) > tol * scale:
        raise DataValidationError("matrix is not symmetric")
    return 0.5 * (a + a.T)


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return math.sqrt(float(np.sum(off * off)))


def eigen_decompose(a: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns ``(V, d)`` with ``A = V diag(d) V^T``, ``d`` in descending order and
    ties kept in their original index order.
    """
    a = as_symmetric(a)
    q = a.shape[0]
    v = np.eye(q)
    frob = math.sqrt(float(np.sum(a * a)))
    tol = JACOBI_TOL * max(frob, 1.0)

    for _ in range(JACOBI_MAX_SWEEPS + 1):
        if _off_norm(a) <= tol:
            break
        for p in range(q - 1):
            for r in range(p + 1, q):
                apr = a[p, r]
                if apr == 0.0:
                    continue
                # rotation angle from the symmetric Schur decomposition of the (p, r) block
                diff = a[r, r] - a[p, p]
                if abs(diff) * 1e-150 > abs(apr):
                    # small-angle limit of the rotation; avoids overflow in theta
                    t = apr / diff
                else:
                    theta = diff / (2.0 * apr)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(q)
                rot[p, p] = c
                rot[r, r] = c
                rot[p, r] = s
                rot[r, p] = -s
                a = rot.T @ a @ rot
                a[p, r] = a[r, p] = 0.0
                v = v @ rot
    else:
        raise NumericalFailure(
            f"Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps"
        )

    d = np.diag(a).copy()
    order = sorted(range(q), key=lambda i: -d[i])
    return v[:, order], d[order]


def canonicalize(d: ArrayLike) -> LambdaVector:
    """Sort eigenvalues descending, shift the smallest to exactly 0 and drop it."""
    d = np.asarray(d, dtype=float).reshape(-1)
    if d.size < 2:
        raise DataValidationError("need at least two eigenvalues")
    srt = np.array(sorted(d, reverse=True))
    lam = srt[:-1] - srt[-1]
    return LambdaVector(tuple(lam))


def as_data_array(data: Union[np.ndarray, Iterable[UnitVector], Iterable[Sequence[float]]]) -> np.ndarray:
    """Stack unit vectors (or rows of an array) into an ``(n, q)`` float array."""
    if isinstance(data, np.ndarray):
        x = np.asarray(data, dtype=float)
        if x.ndim == 1:
            x = x[None, :]
    else:
        rows = [u.coords if isinstance(u, UnitVector) else np.asarray(u, dtype=float) for u in data]
        if not rows:
            raise DataValidationError("empty data set")
        dims = {r.size for r in rows}
        if len(dims) != 1:
            raise DataValidationError(f"mixed dimensions in data: {sorted(dims)}")
        x = np.vstack(rows)
    if x.shape[0] == 0:
        raise DataValidationError("empty data set")
    if x.ndim != 2 or x.shape[1] < 2:
        raise DataValidationError(f"expected (n, q) data with q >= 2, got shape {x.shape}")
    return x


def sufficient_stats(data) -> SufficientStats:
    """Sample size and per-coordinate mean squares of the first q-1 coordinates."""
    x = as_data_array(data)
    n = x.shape[0]
    sq = x[:, :-1] ** 2
    taus = tuple(math.fsum(sq[:, i]) / n for i in range(sq.shape[1]))
    return SufficientStats(n, taus)


def _lam_array(lam) -> np.ndarray:
    if isinstance(lam, LambdaVector):
        return lam.array
    return np.asarray(lam, dtype=float).reshape(-1)


def log_unnorm_bingham(x, lam) -> float:
    """``-sum_{i<q} lambda_i x_i^2`` for a single unit vector."""
    coords = x.coords if isinstance(x, UnitVector) else np.asarray(x, dtype=float).reshape(-1)
    lam = _lam_array(lam)
    if lam.size != coords.size - 1:
        raise DataValidationError(
            f"dimension mismatch: {lam.size} concentrations for q={coords.size}"
        )
    return -float(np.dot(lam, coords[:-1] ** 2))


def log_unnorm_lik(stats: SufficientStats, lam) -> float:
    """Unnormalised log-likelihood ``-n sum_i lambda_i tau_i``.

    ``lam`` may hold the q-1 free concentrations or all q diagonal entries; in
    the latter case the last entry multiplies ``tau_q = 1 - sum(taus)``.
    """
    lam = _lam_array(lam)
    if lam.size == stats.q - 1:
        taus = stats.array
    elif lam.size == stats.q:
        taus = stats.full()
    else:
        raise DataValidationError(
            f"dimension mismatch: {lam.size} concentrations for q={stats.q}"
        )
    return -stats.n * float(np.dot(lam, taus))
