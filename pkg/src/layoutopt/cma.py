"""Covariance matrix adaptation evolution strategy, (mu/mu_w, lambda) flavor.

A minimal, deterministic implementation sized for the latent-code search
spaces this package deals in (tens of dimensions): full eigendecomposition
every generation, cumulative step-size adaptation, rank-one plus rank-mu
covariance updates, and best-ever-point bookkeeping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def default_popsize(n: int) -> int:
    return 4 + int(3 * np.log(n))


@dataclass
class CmaResult:
    x_best: np.ndarray
    f_best: float
    evaluations: int
    generations: int


def cma_es_minimize(objective, x0, sigma0: float, iters: int, seed,
                    popsize: int | None = None) -> CmaResult:
    """Minimize a black-box function; deterministic under a fixed seed.

    Raises ValueError when the objective produces a non-finite value,
    reporting the offending point.
    """
    mean = np.asarray(x0, dtype=np.float64).copy()
    if mean.ndim != 1:
        raise ValueError(f"x0 must be a flat vector, got shape {mean.shape}")
    if not np.all(np.isfinite(mean)):
        raise ValueError("x0 contains non-finite values")
    if sigma0 <= 0:
        raise ValueError(f"sigma0 must be positive, got {sigma0}")
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")

    n = mean.shape[0]
    lam = popsize if popsize is not None else default_popsize(n)
    if lam < 2:
        raise ValueError(f"population size must be >= 2, got {lam}")
    mu = lam // 2
    raw = np.log((lam + 1) / 2) - np.log(np.arange(1, mu + 1))
    w = raw / raw.sum()
    mu_eff = 1.0 / np.sum(w ** 2)

    c_sigma = (mu_eff + 2) / (n + mu_eff + 5)
    d_sigma = 1 + 2 * max(0.0, np.sqrt((mu_eff - 1) / (n + 1)) - 1) + c_sigma
    c_c = (4 + mu_eff / n) / (n + 4 + 2 * mu_eff / n)
    c_1 = 2 / ((n + 1.3) ** 2 + mu_eff)
    c_mu = min(1 - c_1, 2 * (mu_eff - 2 + 1 / mu_eff) / ((n + 2) ** 2 + mu_eff))
    chi_n = np.sqrt(n) * (1 - 1 / (4 * n) + 1 / (21 * n ** 2))

    rng = np.random.default_rng(seed)
    sigma = float(sigma0)
    cov = np.eye(n)
    p_sigma = np.zeros(n)
    p_c = np.zeros(n)

    x_best = mean.copy()
    f_best = float(objective(mean))
    if not np.isfinite(f_best):
        raise ValueError(f"objective returned non-finite value {f_best} at {mean.tolist()}")
    evals = 1

    for gen in range(iters):
        eigvals, basis = np.linalg.eigh((cov + cov.T) / 2)
        scale = np.sqrt(np.clip(eigvals, 1e-30, None))

        normals = rng.standard_normal((lam, n))
        ys = (normals * scale) @ basis.T
        xs = mean + sigma * ys
        fs = np.empty(lam)
        for i in range(lam):
            fs[i] = objective(xs[i])
            if not np.isfinite(fs[i]):
                raise ValueError(
                    f"objective returned non-finite value {fs[i]} at {xs[i].tolist()}"
                )
        evals += lam

        order = np.argsort(fs, kind="stable")
        if fs[order[0]] < f_best:
            f_best = float(fs[order[0]])
            x_best = xs[order[0]].copy()

        y_w = w @ ys[order[:mu]]
        mean = mean + sigma * y_w

        inv_sqrt_y = basis @ ((basis.T @ y_w) / scale)
        p_sigma = (1 - c_sigma) * p_sigma + np.sqrt(c_sigma * (2 - c_sigma) * mu_eff) * inv_sqrt_y
        decay = np.sqrt(1 - (1 - c_sigma) ** (2 * (gen + 1)))
        h_sigma = float(np.linalg.norm(p_sigma)) / decay < (1.4 + 2 / (n + 1)) * chi_n
        p_c = (1 - c_c) * p_c + h_sigma * np.sqrt(c_c * (2 - c_c) * mu_eff) * y_w

        rank_mu = (w[:, None] * ys[order[:mu]]).T @ ys[order[:mu]]
        delta_h = (1 - h_sigma) * c_c * (2 - c_c)
        cov = ((1 - c_1 - c_mu) * cov
               + c_1 * (np.outer(p_c, p_c) + delta_h * cov)
               + c_mu * rank_mu)
        sigma *= float(np.exp((c_sigma / d_sigma) * (np.linalg.norm(p_sigma) / chi_n - 1)))

    return CmaResult(x_best=x_best, f_best=f_best, evaluations=evals, generations=iters)
