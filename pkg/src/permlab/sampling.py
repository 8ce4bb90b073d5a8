"""Chi-square sampling, determinant Laplace checks, the symmetrized-kernel
representation, and the iterated-logarithm Monte Carlo harness.

Randomness comes from a counter-based Philox generator keyed by the run seed;
all draws happen in fixed path-major order, so results are bit-identical for
a given (config, seed) regardless of how the caller schedules work.

The harness samples Gaussian vectors in (value at d, increments) form.  The
increment covariance is assembled from increment variances rather than by
subtracting kernel values, because on deep geometric grids the kernel entries
agree to fifteen digits and the difference would be pure cancellation noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, log, sqrt

import numpy as np

from .kernel_algebra import Decomposition, GridSpec

__all__ = [
    "philox",
    "sample_chi_square",
    "laplace_check",
    "sample_isymi_representation",
    "sandwich_check",
    "SandwichReport",
    "lil_harness",
    "LILRow",
    "trend_is_nondecreasing",
]


def philox(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))


def _psd_factor(cov: np.ndarray, floor: float = 1e-12) -> np.ndarray:
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise ValueError("covariance must be square")
    if np.max(np.abs(cov - cov.T)) > 1e-12 * max(1.0, np.max(np.abs(cov))):
        raise ValueError("covariance must be symmetric")
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        vals, vecs = np.linalg.eigh(cov)
        trace = float(np.trace(cov))
        if float(np.min(vals)) < -1e-10 * max(trace, 1.0):
            raise ValueError(
                f"covariance indefinite: eigenvalue {np.min(vals):.3e}")
        vals = np.clip(vals, floor * max(float(np.max(vals)), 1.0) * 0.0, None)
        return vecs * np.sqrt(np.clip(vals, 0.0, None))


def sample_chi_square(cov, k: int, n_paths: int, seed: int) -> np.ndarray:
    """(n_paths, dim) samples of sum of k squared centered Gaussians over 2."""
    if k < 1 or n_paths < 1:
        raise ValueError("k and n_paths must be positive")
    factor = _psd_factor(cov)
    dim = factor.shape[0]
    rng = philox(seed)
    z = rng.standard_normal((n_paths, k, dim))
    eta = z @ factor.T
    return 0.5 * np.sum(eta * eta, axis=1)


def laplace_check(cov, k: int, s_vec, n_paths: int, seed: int):
    """Empirical Laplace transform against det(I + cov S)^(-k/2).

    Returns (empirical, analytic, z_score) with the z-score in sample
    standard errors of the Monte Carlo mean.
    """
    s = np.asarray(s_vec, dtype=float)
    if np.any(s < 0.0):
        raise ValueError("Laplace arguments must be nonnegative")
    x = sample_chi_square(cov, k, n_paths, seed)
    vals = np.exp(-x @ s)
    emp = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / sqrt(n_paths))
    analytic = float(np.linalg.det(np.eye(len(s)) + np.asarray(cov) * s[None, :])
                     ** (-k / 2.0))
    z = 0.0 if se == 0.0 else (emp - analytic) / se
    return emp, analytic, z


def sample_isymi_representation(dec: Decomposition, k: int, n_paths: int,
                                seed: int, check_tol: float = 1e-6) -> np.ndarray:
    """Chi-square samples of the symmetrized comparison process.

    Each Gaussian copy is eta(t'_j) + a_j * xi with eta drawn from the grid
    Gram matrix and xi an independent standard normal; the implied Gram
    matrix is verified against the symmetrized kernel block before sampling.
    The guard catches wrong-formula bugs, which show up at full scale, while
    tolerating the conditioning-driven noise of deep grids.
    """
    G = dec.kernel.G
    a = dec.a
    implied = G + np.outer(a, a)
    block = dec.K_isymi[1:, 1:]
    scale = max(1.0, float(np.max(np.abs(block))))
    if float(np.max(np.abs(implied - block))) > check_tol * scale:
        raise ValueError("representation Gram matrix disagrees with the "
                         "symmetrized kernel block")
    factor = _psd_factor(G)
    dim = G.shape[0]
    rng = philox(seed)
    z = rng.standard_normal((n_paths, k, dim))
    xi = rng.standard_normal((n_paths, k, 1))
    eta = z @ factor.T + xi * a[None, None, :]
    return 0.5 * np.sum(eta * eta, axis=1)


@dataclass
class SandwichReport:
    nu: float
    symmetric_probability: float
    lower: float
    upper: float
    width: float


def sandwich_check(dec: Decomposition, k: int, event, n_paths: int,
                   seed: int) -> SandwichReport:
    """Probability interval for an event under the non-symmetric law.

    The symmetric surrogate is sampled, and the comparison inequality brackets
    the non-symmetric probability inside
    [nu^(-k/2) P, 1 - nu^(-k/2) + nu^(-k/2) P].  The width 1 - nu^(-k/2) is
    at most (k/2)(nu - 1).
    """
    x = sample_isymi_representation(dec, k, n_paths, seed)
    p_sym = float(np.mean(event(x)))
    damp = dec.nu ** (-k / 2.0)
    lower = damp * p_sym
    upper = 1.0 - damp + damp * p_sym
    width = 1.0 - damp
    if width > (k / 2.0) * (dec.nu - 1.0) + 1e-12:
        raise AssertionError("sandwich width exceeded its first-order bound")
    return SandwichReport(dec.nu, p_sym, lower, upper, width)


# -- iterated-logarithm harness ----------------------------------------


def _increment_structure(base, d: float, offsets: np.ndarray, direction: int):
    """(G00, cross, C): variance at d, E[eta_d (eta_j - eta_d)], increment Gram.

    Built from increment variances so that nothing cancels at tiny offsets.
    """
    pts = d + direction * offsets
    sig2_0 = np.array([_sigma2_of(base, d, p) for p in pts])
    m = len(pts)
    C = np.empty((m, m))
    for i in range(m):
        C[i, i] = sig2_0[i]
        for j in range(i + 1, m):
            s_ij = _sigma2_of(base, pts[i], pts[j])
            C[i, j] = C[j, i] = 0.5 * (sig2_0[i] + sig2_0[j] - s_ij)
    G00 = base.kernel(d, d)
    cross = -0.5 * sig2_0
    return G00, cross, C


def _sigma2_of(base, x: float, y: float) -> float:
    """Increment variance of the base kernel, via stable routes if possible."""
    pot = getattr(base, "pot", None)
    if getattr(base, "translation_invariant", False):
        if hasattr(base, "beta") and hasattr(base, "C"):
            # closed-form exponential kernel
            rate = sqrt(base.beta / base.C)
            amp = 1.0 / (2.0 * sqrt(base.beta * base.C))
            return -2.0 * amp * np.expm1(-rate * abs(x - y))
        if pot is not None:
            return pot.sigma2(x - y)
    if pot is not None and hasattr(pot, "s"):      # scale kernel 2 (s ^ s)
        return 2.0 * abs(float(pot.s(x)) - float(pot.s(y)))
    k = base.kernel
    return k(x, x) + k(y, y) - 2.0 * k(x, y)


@dataclass
class LILRow:
    n: int
    m: int
    epsilon: float
    freq_lower: float
    freq_upper: float
    nu: float
    paths: int
    degenerate: bool = False


def lil_harness(base, f, g, grid_specs, k: int, n_paths: int, seed: int,
                eps_list=(0.1, 0.2, 0.3)) -> list[LILRow]:
    """Per-grid exceedance frequencies of the normalized running maximum.

    For each grid the statistic is max_j (X(t'_j) - X(d)) / psi(t_j) with
    psi(t) = sqrt(2 sigma^2(d+t, d) log log 1/t); the lower frequency counts
    paths where it clears (1 - eps) sqrt(2 X(d)), the upper frequency counts
    paths whose two-sided maximum stays below (1 + eps) sqrt(2 X(d)).
    When f and g are given the symmetrized comparison process is sampled and
    its determinant ratio is reported alongside.
    """
    rows: list[LILRow] = []
    for spec in grid_specs:
        if not isinstance(spec, GridSpec):
            raise TypeError("grid_specs must contain GridSpec values")
        offsets = spec.offsets()
        d = spec.d
        G00, cross, C = _increment_structure(base, d, offsets, spec.direction)
        if np.min(np.diag(C)) <= 0.0:
            rows.extend(LILRow(spec.n, spec.m, eps, np.nan, np.nan, np.nan,
                               n_paths, degenerate=True) for eps in eps_list)
            continue

        a_extra = 0.0
        nu = 1.0
        if f is not None or g is not None:
            from .kernel_algebra import assemble_kernel, decompose
            dec = decompose(assemble_kernel(base, f, g, spec))
            nu = dec.nu
            a_extra = dec.a      # full vector, index 0 is the point d

        # conditional decomposition: eta_d, then increments given eta_d
        cond = C - np.outer(cross, cross) / G00
        dd = np.sqrt(np.diag(cond))
        corr = cond / np.outer(dd, dd)
        factor = np.linalg.cholesky(corr + 1e-13 * np.eye(len(dd)))
        rng = philox(seed)
        m = len(offsets)
        eta_d = sqrt(G00) * rng.standard_normal((n_paths, k))
        z = rng.standard_normal((n_paths, k, m))
        delta = (z @ factor.T) * dd[None, None, :] \
            + (cross / G00)[None, None, :] * eta_d[:, :, None]
        if f is not None or g is not None:
            xi = rng.standard_normal((n_paths, k, 1))
            eta_d = eta_d + xi[:, :, 0] * a_extra[0]
            delta = delta + xi * (a_extra[1:] - a_extra[0])[None, None, :]
        dX = np.sum(eta_d[:, :, None] * delta + 0.5 * delta * delta, axis=1)
        x_d = 0.5 * np.sum(eta_d * eta_d, axis=1)

        loglog = np.log(np.log(1.0 / offsets))
        psi = np.sqrt(2.0 * np.diag(C) * loglog)
        stat = np.max(dX / psi[None, :], axis=1)
        stat_abs = np.max(np.abs(dX) / psi[None, :], axis=1)
        target = np.sqrt(2.0 * x_d)
        for eps in eps_list:
            rows.append(LILRow(
                n=spec.n, m=spec.m, epsilon=eps,
                freq_lower=float(np.mean(stat >= (1.0 - eps) * target)),
                freq_upper=float(np.mean(stat_abs <= (1.0 + eps) * target)),
                nu=nu, paths=n_paths))
    return rows


def trend_is_nondecreasing(freqs, n_paths: int, z: float = 2.33) -> bool:
    """One-sided trend check: each step may drop at most z binomial errors."""
    freqs = list(freqs)
    for a, b in zip(freqs[:-1], freqs[1:]):
        se = sqrt(max(a * (1 - a), b * (1 - b), 1e-12) / n_paths)
        if b < a - z * sqrt(2.0) * se:
            return False
    return True
