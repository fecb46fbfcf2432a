"""Request-level operations shared by the CLI and the HTTP service.

A model reference is either `analytic:<seed>:<vocab_size>[:<d_z>]` for
the seeded affine-sigmoid generator with its toy-realism discriminator,
or a path to a weight manifest (absolute, workspace-relative, or under
the workspace's models/ directory).
"""

from __future__ import annotations

import json
import os

import numpy as np

from .constraints import ConstraintSet, constraint_set_from_dict
from .core import LabelVocabulary, ValidationError
from .network import GeneratorHandle, make_analytic_generator, make_network_handle
from .optim import SolveOptions, SolveReport, clg_lo_solve
from .weights import load_weights

WORKSPACE_ENV = "LAYOUTOPT_WORKSPACE"


def default_workspace() -> str:
    return os.environ.get(WORKSPACE_ENV, os.path.join(os.getcwd(), "workspace"))


def synthetic_vocabulary(size: int) -> LabelVocabulary:
    return LabelVocabulary([f"label_{i}" for i in range(size)])


def resolve_model(model: str, workspace: str | None = None) -> GeneratorHandle:
    if not isinstance(model, str) or not model:
        raise ValidationError("model reference must be a nonempty string", field="model")
    if model.startswith("analytic:"):
        parts = model.split(":")
        if len(parts) not in (3, 4):
            raise ValidationError(
                f"analytic model reference must be analytic:<seed>:<vocab_size>[:<d_z>], got {model!r}",
                field="model",
            )
        try:
            seed, vocab_size = int(parts[1]), int(parts[2])
            d_z = int(parts[3]) if len(parts) == 4 else 4
        except ValueError:
            raise ValidationError(
                f"analytic model reference has non-integer fields: {model!r}", field="model"
            ) from None
        if vocab_size < 1:
            raise ValidationError("analytic vocab_size must be >= 1", field="model")
        return make_analytic_generator(seed, vocab_size, d_z=d_z)

    candidates = [model]
    if workspace:
        candidates.append(os.path.join(workspace, model))
        candidates.append(os.path.join(workspace, "models", model))
    for path in candidates:
        if os.path.isfile(path):
            return make_network_handle(load_weights(path), ref=model)
    raise ValidationError(f"model {model!r} not found", field="model")


def list_models(workspace: str | None) -> list[dict]:
    """Weight manifests under <workspace>/models plus the analytic family."""
    models: list[dict] = [{
        "id": "analytic:<seed>:<vocab_size>[:<d_z>]",
        "kind": "analytic",
        "description": "seeded affine-sigmoid generator with metric-based realism",
    }]
    if not workspace:
        return models
    models_dir = os.path.join(workspace, "models")
    if not os.path.isdir(models_dir):
        return models
    for name in sorted(os.listdir(models_dir)):
        if not name.endswith(".json"):
            continue
        path = os.path.join(models_dir, name)
        try:
            with open(path, encoding="utf-8") as f:
                manifest = json.load(f)
            hp = manifest.get("hyperparameters", {})
        except (OSError, json.JSONDecodeError):
            continue
        models.append({
            "id": os.path.join("models", name),
            "kind": "weights",
            "hyperparameters": hp,
        })
    return models


def parse_labels(value, handle: GeneratorHandle) -> list[int]:
    if isinstance(value, str):
        try:
            value = [int(v) for v in value.split(",") if v.strip() != ""]
        except ValueError:
            raise ValidationError(f"labels must be integers, got {value!r}", field="labels") from None
    if not isinstance(value, list) or not value:
        raise ValidationError("labels must be a nonempty list", field="labels")
    labels = []
    for v in value:
        if not isinstance(v, int) or isinstance(v, bool):
            raise ValidationError(f"label ids must be integers, got {v!r}", field="labels")
        if not 0 <= v < handle.vocab_size:
            raise ValidationError(
                f"label id {v} out of range for vocabulary size {handle.vocab_size}",
                field="labels",
            )
        labels.append(v)
    if handle.max_elements is not None and len(labels) > handle.max_elements:
        raise ValidationError(
            f"{len(labels)} labels exceeds the model's element capacity {handle.max_elements}",
            field="labels",
        )
    return labels


def parse_warm_start(value, n: int, d_z: int) -> np.ndarray | None:
    if value is None:
        return None
    arr = np.asarray(value, dtype=np.float64)
    if arr.shape != (n, d_z):
        raise ValidationError(
            f"z must have shape [{n}][{d_z}], got {list(arr.shape)}", field="z"
        )
    if not np.all(np.isfinite(arr)):
        raise ValidationError("z contains non-finite values", field="z")
    return arr


def generate_layout(handle: GeneratorHandle, labels: list[int], seed: int):
    """Unconstrained generation, sharing the solver's latent sampling path."""
    report = clg_lo_solve(handle, labels, ConstraintSet(), SolveOptions(seed=seed))
    return report.layout, report.z


def run_optimize(handle: GeneratorHandle, request: dict, on_iteration=None) -> SolveReport:
    """Validate and execute one optimize request document."""
    labels = parse_labels(request.get("labels"), handle)
    constraints = constraint_set_from_dict(request.get("constraints", []))
    options = SolveOptions.from_dict(request.get("options", {}))
    z0 = parse_warm_start(request.get("z"), len(labels), handle.d_z)
    return clg_lo_solve(handle, labels, constraints, options,
                        z0=z0, on_iteration=on_iteration)
