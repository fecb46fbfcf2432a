"""Constraint-driven latent optimization.

The constrained problem "make the generator's output satisfy every
constraint while staying realistic" is solved as a sequence of
unconstrained inner minimizations of an augmented Lagrangian, with
multipliers bumped by the observed violations and the quadratic penalty
weight growing geometrically between outer iterations. The inner solver
is pluggable: CMA-ES (gradient-free) or Adam over a finite-difference
gradient.

The raw objective is the negated discriminator score, clamped at its
value for the initial latent code so the optimizer is never rewarded for
chasing adversarial "more real than the start" points.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cma import cma_es_minimize
from .constraints import ConstraintSet, eval_all_array
from .core import Layout, ValidationError, layout_from_array, layout_from_dict, layout_to_dict
from .network import GeneratorHandle, _z_matrix

FD_STEP = 1e-4


@dataclass(frozen=True)
class CmaOptions:
    sigma0: float = 0.25
    iters: int = 200
    popsize: int | None = None

    method = "cma-es"

    def __post_init__(self):
        if self.sigma0 <= 0:
            raise ValidationError(f"sigma0 must be positive, got {self.sigma0}")
        if self.iters < 1:
            raise ValidationError(f"iters must be >= 1, got {self.iters}")

    def to_dict(self) -> dict:
        return {"method": self.method, "sigma0": self.sigma0, "iters": self.iters,
                "popsize": self.popsize}


@dataclass(frozen=True)
class AdamOptions:
    lr: float = 0.01
    iters: int = 200
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    method = "adam"

    def __post_init__(self):
        if self.lr <= 0:
            raise ValidationError(f"lr must be positive, got {self.lr}")
        if self.iters < 1:
            raise ValidationError(f"iters must be >= 1, got {self.iters}")

    def to_dict(self) -> dict:
        return {"method": self.method, "lr": self.lr, "iters": self.iters,
                "beta1": self.beta1, "beta2": self.beta2, "eps": self.eps}


@dataclass(frozen=True)
class SolveOptions:
    alpha: float = 3.0
    mu0: float = 1.0
    lambda0: tuple[float, ...] | None = None
    k_max: int = 5
    inner: CmaOptions | AdamOptions = field(default_factory=CmaOptions)
    eps_stop: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.alpha <= 1:
            raise ValidationError(f"alpha must be > 1, got {self.alpha}")
        if self.mu0 <= 0:
            raise ValidationError(f"mu0 must be positive, got {self.mu0}")
        if self.k_max < 1:
            raise ValidationError(f"k_max must be >= 1, got {self.k_max}")

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "mu0": self.mu0,
            "lambda0": None if self.lambda0 is None else list(self.lambda0),
            "k_max": self.k_max,
            "inner": self.inner.to_dict(),
            "eps_stop": self.eps_stop,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "SolveOptions":
        if not isinstance(obj, dict):
            raise ValidationError("options must be an object")
        inner_doc = obj.get("inner", {})
        if not isinstance(inner_doc, dict):
            raise ValidationError("options.inner must be an object", field="inner")
        method = inner_doc.get("method", "cma-es")
        known = {k: v for k, v in inner_doc.items() if k != "method"}
        try:
            if method == "cma-es":
                inner = CmaOptions(**known)
            elif method == "adam":
                inner = AdamOptions(**known)
            else:
                raise ValidationError(f"unknown inner method {method!r}", field="inner")
        except TypeError as e:
            raise ValidationError(f"bad inner options: {e}", field="inner") from None
        kwargs = {}
        for name in ("alpha", "mu0", "eps_stop"):
            if name in obj:
                kwargs[name] = float(obj[name])
        for name in ("k_max", "seed"):
            if name in obj:
                kwargs[name] = int(obj[name])
        if obj.get("lambda0") is not None:
            kwargs["lambda0"] = tuple(float(v) for v in obj["lambda0"])
        return cls(inner=inner, **kwargs)


@dataclass(frozen=True)
class OuterIteration:
    """State recorded at the end of one outer augmented-Lagrangian pass."""

    k: int
    f_raw: float
    f_clamped: float
    h: tuple[float, ...]
    lagrangian: float
    layout: Layout
    z: np.ndarray

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "f_raw": self.f_raw,
            "f_clamped": self.f_clamped,
            "h": list(self.h),
            "lagrangian": self.lagrangian,
            "layout": layout_to_dict(self.layout),
            "z": self.z.tolist(),
        }


@dataclass(frozen=True)
class SolveReport:
    history: tuple[OuterIteration, ...]
    layout: Layout
    z: np.ndarray
    satisfied: bool
    max_violation: float

    def to_dict(self) -> dict:
        return {
            "history": [it.to_dict() for it in self.history],
            "final": {
                "layout": layout_to_dict(self.layout),
                "z": self.z.tolist(),
                "satisfied": self.satisfied,
                "max_violation": self.max_violation,
            },
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "SolveReport":
        history = tuple(
            OuterIteration(
                k=int(it["k"]),
                f_raw=float(it["f_raw"]),
                f_clamped=float(it["f_clamped"]),
                h=tuple(float(v) for v in it["h"]),
                lagrangian=float(it["lagrangian"]),
                layout=layout_from_dict(it["layout"]),
                z=np.asarray(it["z"], dtype=np.float64),
            )
            for it in obj["history"]
        )
        final = obj["final"]
        return cls(
            history=history,
            layout=layout_from_dict(final["layout"]),
            z=np.asarray(final["z"], dtype=np.float64),
            satisfied=bool(final["satisfied"]),
            max_violation=float(final["max_violation"]),
        )


def augmented_lagrangian(f_clamped: float, h, lam, mu: float) -> float:
    """f + sum(lambda_n h_n) + (mu/2) sum(h_n^2)."""
    h = np.asarray(h, dtype=np.float64)
    lam = np.asarray(lam, dtype=np.float64)
    if h.shape != lam.shape:
        raise ValidationError(f"h has shape {h.shape} but lambda has shape {lam.shape}")
    if mu <= 0:
        raise ValidationError(f"mu must be positive, got {mu}")
    return float(f_clamped + lam @ h + (mu / 2) * (h @ h))


def update_duals(lam, mu: float, h, alpha: float):
    """Multiplier step lambda + mu h and penalty growth alpha mu."""
    lam = np.asarray(lam, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    if h.shape != lam.shape:
        raise ValidationError(f"h has shape {h.shape} but lambda has shape {lam.shape}")
    return lam + mu * h, alpha * mu


def clamped_objective(handle: GeneratorHandle, z, labels, z0_baseline: float) -> float:
    """max(f(Z) - f(Z0), 0) where f is the negated discriminator score."""
    boxes = handle.generate_array(_z_matrix(z), labels)
    f_raw = -handle.realism_array(boxes, labels)
    return max(f_raw - z0_baseline, 0.0)


def adam_minimize(objective, x0, lr: float = 0.01, iters: int = 200,
                  beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8,
                  gradient=None) -> tuple[np.ndarray, float]:
    """First-order minimization; falls back to central finite differences.

    Returns the best-ever evaluated point, not the last iterate.
    """
    x = np.asarray(x0, dtype=np.float64).copy()
    if gradient is None:
        def gradient(p):
            g = np.empty_like(p)
            for i in range(p.shape[0]):
                step = np.zeros_like(p)
                step[i] = FD_STEP
                g[i] = (objective(p + step) - objective(p - step)) / (2 * FD_STEP)
            return g

    def checked(v, what, point):
        if not np.all(np.isfinite(v)):
            raise ValueError(f"{what} non-finite at {np.asarray(point).tolist()}")
        return v

    f_best = float(checked(objective(x), "objective", x))
    x_best = x.copy()
    m = np.zeros_like(x)
    v = np.zeros_like(x)
    for t in range(1, iters + 1):
        g = checked(np.asarray(gradient(x), dtype=np.float64), "gradient", x)
        m = beta1 * m + (1 - beta1) * g
        v = beta2 * v + (1 - beta2) * g * g
        m_hat = m / (1 - beta1 ** t)
        v_hat = v / (1 - beta2 ** t)
        x = x - lr * m_hat / (np.sqrt(v_hat) + eps)
        f = float(checked(objective(x), "objective", x))
        if f < f_best:
            f_best = f
            x_best = x.copy()
    return x_best, f_best


@dataclass(frozen=True)
class AuglagStep:
    k: int
    x: np.ndarray
    f: float
    h: np.ndarray
    lagrangian: float


def auglag_minimize(evaluate, x0, options: SolveOptions, callback=None) -> list[AuglagStep]:
    """Generic augmented-Lagrangian outer loop over evaluate: x -> (f, h).

    Runs inner minimizations warm-started at the previous solution,
    updates duals from the violations at each solution, and stops when
    the worst violation drops to eps_stop or k_max is exhausted. One step
    is recorded per completed outer iteration.
    """
    x_k = np.asarray(x0, dtype=np.float64).copy()
    _, h0 = evaluate(x_k)
    n_constraints = np.asarray(h0).shape[0]
    if options.lambda0 is None:
        lam = np.zeros(n_constraints)
    else:
        lam = np.asarray(options.lambda0, dtype=np.float64)
        if lam.shape != (n_constraints,):
            raise ValidationError(
                f"lambda0 has length {lam.shape[0]}, expected {n_constraints}"
            )
    mu = options.mu0

    # child 0 of the solve seed is reserved for initial-point sampling
    inner_seeds = np.random.SeedSequence(options.seed).spawn(options.k_max + 1)[1:]
    steps: list[AuglagStep] = []
    for k in range(options.k_max):
        lam_k, mu_k = lam, mu

        def lagrangian_at(x):
            f, h = evaluate(x)
            return augmented_lagrangian(f, h, lam_k, mu_k)

        if isinstance(options.inner, CmaOptions):
            result = cma_es_minimize(
                lagrangian_at, x_k,
                sigma0=options.inner.sigma0,
                iters=options.inner.iters,
                seed=inner_seeds[k],
                popsize=options.inner.popsize,
            )
            x_star = result.x_best
        else:
            x_star, _ = adam_minimize(
                lagrangian_at, x_k,
                lr=options.inner.lr,
                iters=options.inner.iters,
                beta1=options.inner.beta1,
                beta2=options.inner.beta2,
                eps=options.inner.eps,
            )

        f_star, h_star = evaluate(x_star)
        h_star = np.asarray(h_star, dtype=np.float64)
        step = AuglagStep(
            k=k, x=x_star, f=float(f_star), h=h_star,
            lagrangian=augmented_lagrangian(f_star, h_star, lam_k, mu_k),
        )
        steps.append(step)
        if callback is not None:
            callback(step)

        lam, mu = update_duals(lam, mu, h_star, options.alpha)
        x_k = x_star
        if float(h_star.max(initial=0.0)) <= options.eps_stop:
            break
    return steps


def clg_lo_solve(handle: GeneratorHandle, labels, constraints: ConstraintSet,
                 options: SolveOptions | None = None, z0=None,
                 on_iteration=None) -> SolveReport:
    """Generate a layout for the label multiset that meets the constraints.

    The initial latent code is standard normal under the options seed
    (or the supplied warm start). An empty constraint set short-circuits
    to plain generation. The report carries one snapshot per completed
    outer iteration so a caller can offer intermediate trade-offs when
    the final point is infeasible.
    """
    options = options or SolveOptions()
    labels = [int(l) for l in labels]
    n = len(labels)
    if n < 1:
        raise ValidationError("need at least one label")
    if handle.max_elements is not None and n > handle.max_elements:
        raise ValidationError(
            f"{n} labels exceeds the model's element capacity {handle.max_elements}"
        )
    for c in constraints:
        for idx in (c.subject, c.object):
            if idx is not None and not 0 <= idx < n:
                raise ValidationError(
                    f"constraint {c.kind} references element {idx}, layout has {n}"
                )

    z0_seed = np.random.SeedSequence(options.seed).spawn(1)[0]
    if z0 is None:
        zmat0 = np.random.default_rng(z0_seed).standard_normal((n, handle.d_z))
    else:
        zmat0 = _z_matrix(z0)
        if zmat0.shape != (n, handle.d_z):
            raise ValidationError(
                f"warm-start z has shape {zmat0.shape}, expected {(n, handle.d_z)}"
            )

    if len(constraints) == 0:
        boxes0 = handle.generate_array(zmat0, labels)
        return SolveReport(
            history=(),
            layout=layout_from_array(boxes0, labels),
            z=zmat0,
            satisfied=True,
            max_violation=0.0,
        )

    boxes0 = handle.generate_array(zmat0, labels)
    baseline = -handle.realism_array(boxes0, labels)

    def evaluate(x):
        zmat = x.reshape(n, handle.d_z)
        boxes = handle.generate_array(zmat, labels)
        cache: dict = {}
        f_raw = -handle.realism_array(boxes, labels, cache)
        h = eval_all_array(constraints, boxes, cache)
        return max(f_raw - baseline, 0.0), h

    def snapshot(step: AuglagStep) -> OuterIteration:
        zmat = step.x.reshape(n, handle.d_z)
        boxes = handle.generate_array(zmat, labels)
        f_raw = -handle.realism_array(boxes, labels)
        return OuterIteration(
            k=step.k,
            f_raw=float(f_raw),
            f_clamped=step.f,
            h=tuple(float(v) for v in step.h),
            lagrangian=step.lagrangian,
            layout=layout_from_array(boxes, labels),
            z=zmat,
        )

    snapshots: list[OuterIteration] = []

    def step_callback(step: AuglagStep):
        snap = snapshot(step)
        snapshots.append(snap)
        if on_iteration is not None:
            on_iteration(snap)

    auglag_minimize(evaluate, zmat0.ravel(), options, callback=step_callback)
    history = tuple(snapshots)
    last = history[-1]
    max_violation = max(last.h, default=0.0)
    return SolveReport(
        history=history,
        layout=last.layout,
        z=last.z,
        satisfied=max_violation <= options.eps_stop,
        max_violation=float(max_violation),
    )
