"""Compiled inner loops.

All kernels draw from a ``numpy.random.Generator`` passed in by the caller, so
results are a pure function of the generator state. Normal variates come from
Marsaglia's polar method, which is exact (no tables, no truncated tail).

Status codes returned by the sampling kernels:

    0  success
    1  envelope violation (f* > M* g* beyond slack); diag[0] holds the log excess
    2  rejection loop exceeded ``max_trials`` for one draw
"""

import math

import numpy as np
from numba import njit

OK = 0
BOUND_VIOLATION = 1
TRIAL_CAP = 2

BOUND_SLACK = 1e-12
GOLDEN_TOL = 1e-6
# b is searched on [B_FLOOR, q]; the optimum always lies in [1, q]
B_FLOOR = 1e-6
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@njit(cache=True)
def std_normal(gen, spare):
    """One N(0, 1) variate; ``spare`` is a length-2 buffer (flag, value) for the second polar draw."""
    if spare[0] != 0.0:
        spare[0] = 0.0
        return spare[1]
    while True:
        u = 2.0 * gen.random() - 1.0
        v = 2.0 * gen.random() - 1.0
        w = u * u + v * v
        if 0.0 < w < 1.0:
            break
    f = math.sqrt(-2.0 * math.log(w) / w)
    spare[0] = 1.0
    spare[1] = v * f
    return u * f


@njit(cache=True)
def normal_fill(gen, out):
    spare = np.zeros(2)
    for i in range(out.shape[0]):
        out[i] = std_normal(gen, spare)


@njit(cache=True)
def log_mstar(q, b):
    """log sup_{t>=0} e^{-t} (1 + 2t/b)^{q/2}; the maximiser is t* = (q-b)/2."""
    if b >= q:
        return 0.0
    return -0.5 * (q - b) + 0.5 * q * math.log(q / b)


@njit(cache=True)
def envelope_arrays(lam, b, psi, inv_psi, sqrt_psi):
    """Fill ACG variances for ``Psi^{-1} = I + (2/b) diag(lam, 0)``; returns log M*."""
    q = lam.shape[0] + 1
    for i in range(q - 1):
        p = 1.0 / (1.0 + 2.0 * lam[i] / b)
        psi[i] = p
        inv_psi[i] = 1.0 / p
        sqrt_psi[i] = math.sqrt(p)
    psi[q - 1] = 1.0
    inv_psi[q - 1] = 1.0
    sqrt_psi[q - 1] = 1.0
    return log_mstar(q, b)


@njit(cache=True)
def log_tune_objective(lam, b):
    """log of M*(b) * prod_i psi_i(b)^{1/2}, proportional to the expected trial count."""
    q = lam.shape[0] + 1
    s = log_mstar(q, b)
    for i in range(q - 1):
        s -= 0.5 * math.log1p(2.0 * lam[i] / b)
    return s


@njit(cache=True)
def tune_b(lam):
    """Golden-section minimisation of :func:`log_tune_objective` over b in (0, q]."""
    q = lam.shape[0] + 1
    lo = B_FLOOR
    hi = float(q)
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc = log_tune_objective(lam, c)
    fd = log_tune_objective(lam, d)
    while hi - lo > GOLDEN_TOL:
        if fc <= fd:
            hi = d
            d = c
            fd = fc
            c = hi - _INVPHI * (hi - lo)
            fc = log_tune_objective(lam, c)
        else:
            lo = c
            c = d
            fc = fd
            d = lo + _INVPHI * (hi - lo)
            fd = log_tune_objective(lam, d)
    best = 0.5 * (lo + hi)
    # the boundary is the exact optimum when all concentrations vanish
    if log_tune_objective(lam, float(q)) <= log_tune_objective(lam, best):
        return float(q)
    return best


@njit(cache=True)
def _candidate(gen, spare, lam, inv_psi, sqrt_psi, z):
    """Draw one ACG candidate into ``z`` (unnormalised); returns (r2, s2, t)."""
    q = z.shape[0]
    while True:
        r2 = 0.0
        s2 = 0.0
        for i in range(q):
            zi = sqrt_psi[i] * std_normal(gen, spare)
            z[i] = zi
            zz = zi * zi
            r2 += zz
            s2 += zz * inv_psi[i]
        if r2 > 0.0:
            break
    t = 0.0
    for i in range(q - 1):
        t += lam[i] * z[i] * z[i]
    return r2, s2, t / r2


@njit(cache=True)
def _accept_one(gen, spare, lam, inv_psi, sqrt_psi, lmstar, z, max_trials, diag):
    """Rejection loop for one Bingham draw. Returns (status, trials, r2)."""
    q = z.shape[0]
    trials = 0
    while True:
        trials += 1
        if trials > max_trials:
            return TRIAL_CAP, trials - 1, 0.0
        r2, s2, t = _candidate(gen, spare, lam, inv_psi, sqrt_psi, z)
        # log f*(x) - log M* - log g*(x) with x = z / |z|
        log_ratio = -t + 0.5 * q * (math.log(s2) - math.log(r2)) - lmstar
        if log_ratio > BOUND_SLACK:
            diag[0] = log_ratio
            return BOUND_VIOLATION, trials, r2
        if gen.random() < math.exp(log_ratio):
            return OK, trials, r2


@njit(cache=True)
def bingham_fill(gen, lam, inv_psi, sqrt_psi, lmstar, out, trials, max_trials, diag):
    """Fill ``out`` (n, q) with exact Bingham draws and ``trials`` with per-draw trial counts."""
    q = out.shape[1]
    z = np.empty(q)
    spare = np.zeros(2)
    for k in range(out.shape[0]):
        status, ntr, r2 = _accept_one(gen, spare, lam, inv_psi, sqrt_psi, lmstar, z, max_trials, diag)
        trials[k] = ntr
        if status != OK:
            diag[1] = k
            return status
        r = math.sqrt(r2)
        for i in range(q):
            out[k, i] = z[i] / r
    return OK


@njit(cache=True)
def acg_fill(gen, sqrt_psi, out):
    q = out.shape[1]
    spare = np.zeros(2)
    for k in range(out.shape[0]):
        while True:
            r2 = 0.0
            for i in range(q):
                zi = sqrt_psi[i] * std_normal(gen, spare)
                out[k, i] = zi
                r2 += zi * zi
            if r2 > 0.0:
                break
        r = math.sqrt(r2)
        for i in range(q):
            out[k, i] /= r


@njit(cache=True)
def _log_prior(lam, rates):
    s = 0.0
    for i in range(lam.shape[0]):
        if lam[i] < 0.0 or (i > 0 and lam[i] > lam[i - 1]):
            return -np.inf
        s -= rates[i] * lam[i]
    return s


@njit(cache=True)
def _log_lik(n, taus, lam):
    s = 0.0
    for i in range(lam.shape[0]):
        s += lam[i] * taus[i]
    return -n * s


@njit(cache=True)
def exchange_chain(gen, tau_obs, n, rates, lam0, step_sd, iterations, burn_in, thin,
                   b_fixed, max_trials, draws, counters, diag):
    """Exchange-algorithm random-walk chain over the canonical concentrations.

    ``b_fixed <= 0`` selects a freshly tuned envelope constant for every
    proposal. ``counters`` receives (accepted, proposed, prior rejections,
    rejection-sampler candidates). Returns a status code.
    """
    d = lam0.shape[0]
    q = d + 1
    lam = lam0.copy()
    lam_can = np.empty(d)
    tau_aux = np.empty(d)
    psi = np.empty(q)
    inv_psi = np.empty(q)
    sqrt_psi = np.empty(q)
    z = np.empty(q)
    spare = np.zeros(2)
    lp = _log_prior(lam, rates)
    accepted = 0
    prior_rej = 0
    candidates = 0
    stored = 0

    for it in range(iterations):
        for i in range(d):
            lam_can[i] = lam[i] + step_sd * std_normal(gen, spare)
        lp_can = _log_prior(lam_can, rates)
        if lp_can == -np.inf:
            # zero acceptance probability, auxiliary data would be wasted
            prior_rej += 1
        else:
            b = b_fixed if b_fixed > 0.0 else tune_b(lam_can)
            lmstar = envelope_arrays(lam_can, b, psi, inv_psi, sqrt_psi)
            for i in range(d):
                tau_aux[i] = 0.0
            for j in range(n):
                status, ntr, r2 = _accept_one(gen, spare, lam_can, inv_psi, sqrt_psi,
                                              lmstar, z, max_trials, diag)
                candidates += ntr
                if status != OK:
                    counters[0] = accepted
                    counters[1] = it + 1
                    counters[2] = prior_rej
                    counters[3] = candidates
                    for i in range(d):
                        diag[2 + i] = lam_can[i]
                    return status
                for i in range(d):
                    tau_aux[i] += z[i] * z[i] / r2
            for i in range(d):
                tau_aux[i] /= n
            log_r = (_log_lik(n, tau_obs, lam_can) + _log_lik(n, tau_aux, lam) + lp_can) - (
                _log_lik(n, tau_obs, lam) + _log_lik(n, tau_aux, lam_can) + lp
            )
            if log_r >= 0.0 or gen.random() < math.exp(log_r):
                for i in range(d):
                    lam[i] = lam_can[i]
                lp = lp_can
                accepted += 1
        if it >= burn_in and (it - burn_in + 1) % thin == 0:
            for i in range(d):
                draws[stored, i] = lam[i]
            stored += 1

    counters[0] = accepted
    counters[1] = iterations
    counters[2] = prior_rej
    counters[3] = candidates
    return OK
