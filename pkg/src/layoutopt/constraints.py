"""Design constraints as nonnegative cost functions over a layout.

Every constraint kind evaluates to a cost that is zero exactly when the
constraint is satisfied (within its tolerance) and grows continuously
with the amount of violation, which is what lets a black-box optimizer
push layouts toward feasibility.

Two layout-global kinds cover beautification (alignment threshold,
non-overlap); the relational kinds cover pairwise size and location
requirements plus element placement in a horizontal band of the canvas.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import Layout, ParseError, ValidationError
from .metrics import alignment_from_array, overlap_from_array

DEFAULT_TAU = 0.004
DEFAULT_GAMMA = 0.1

GLOBAL_KINDS = ("alignment", "non-overlap")
SIZE_KINDS = ("size-larger", "size-smaller", "size-equal")
LOCATION_KINDS = ("loc-above", "loc-below", "loc-left", "loc-right", "loc-overlap")
CANVAS_KINDS = ("canvas-region",)
ALL_KINDS = GLOBAL_KINDS + SIZE_KINDS + LOCATION_KINDS + CANVAS_KINDS

REGIONS = ("top", "middle", "bottom")
_REGION_BANDS = {"top": (0.0, 1 / 3), "middle": (1 / 3, 2 / 3), "bottom": (2 / 3, 1.0)}


@dataclass(frozen=True)
class Constraint:
    """A single requirement on a layout.

    Relational kinds read as "subject KIND object": loc-above demands the
    subject element lie entirely above the object element, size-larger
    demands the subject's area exceed the object's by the tolerance
    factor. tau/gamma override the set-level tolerances when given.
    """

    kind: str
    subject: int | None = None
    object: int | None = None
    region: str | None = None
    tau: float | None = None
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in ALL_KINDS:
            raise ValidationError(f"unknown constraint kind {self.kind!r}", field="kind")
        if self.kind in GLOBAL_KINDS:
            if self.subject is not None or self.object is not None or self.region is not None:
                raise ValidationError(f"{self.kind} is layout-global and takes no indices", field="kind")
        elif self.kind in CANVAS_KINDS:
            if self.subject is None:
                raise ValidationError(f"{self.kind} requires a subject element", field="subject")
            if self.object is not None:
                raise ValidationError(f"{self.kind} takes no object element", field="object")
            if self.region not in REGIONS:
                raise ValidationError(
                    f"{self.kind} requires region in {REGIONS}, got {self.region!r}", field="region"
                )
        else:
            if self.subject is None or self.object is None:
                raise ValidationError(f"{self.kind} requires subject and object elements", field="subject")
            if self.subject == self.object:
                raise ValidationError(f"{self.kind} requires subject != object", field="object")
            if self.region is not None:
                raise ValidationError(f"{self.kind} takes no region", field="region")

    def to_dict(self) -> dict:
        doc = {"kind": self.kind}
        if self.subject is not None:
            doc["subject"] = self.subject
        if self.object is not None:
            doc["object"] = self.object
        if self.region is not None:
            doc["region"] = self.region
        if self.tau is not None:
            doc["tau"] = self.tau
        if self.gamma is not None:
            doc["gamma"] = self.gamma
        return doc


@dataclass(frozen=True)
class ConstraintSet:
    """An ordered list of constraints with shared tolerance parameters.

    The evaluation order is the listed order; multiplier vectors in the
    solver index into it.
    """

    constraints: tuple[Constraint, ...] = ()
    tau: float = DEFAULT_TAU
    gamma: float = DEFAULT_GAMMA

    def __init__(self, constraints=(), tau: float = DEFAULT_TAU, gamma: float = DEFAULT_GAMMA):
        object.__setattr__(self, "constraints", tuple(constraints))
        object.__setattr__(self, "tau", float(tau))
        object.__setattr__(self, "gamma", float(gamma))

    def __len__(self) -> int:
        return len(self.constraints)

    def __iter__(self):
        return iter(self.constraints)

    def to_dict(self) -> dict:
        return {
            "constraints": [c.to_dict() for c in self.constraints],
            "tau": self.tau,
            "gamma": self.gamma,
        }


def _edges(boxes: np.ndarray, i: int) -> tuple[float, float, float, float]:
    xc, yc, w, h = (float(v) for v in boxes[i])
    return xc - w / 2, xc + w / 2, yc - h / 2, yc + h / 2


def _area(boxes: np.ndarray, i: int) -> float:
    return float(boxes[i, 2]) * float(boxes[i, 3])


def eval_from_array(c: Constraint, boxes: np.ndarray,
                    tau: float = DEFAULT_TAU, gamma: float = DEFAULT_GAMMA,
                    cache: dict | None = None) -> float:
    """Cost of one constraint against an N x 4 (xc, yc, w, h) array.

    `cache` memoizes the layout-global metric values so repeated
    evaluations against the same boxes (objective plus several
    constraints) compute them once.
    """
    n = boxes.shape[0]
    tau = c.tau if c.tau is not None else tau
    gamma = c.gamma if c.gamma is not None else gamma

    if c.kind == "alignment":
        if cache is not None and "alignment" in cache:
            score = cache["alignment"]
        else:
            score = alignment_from_array(boxes)
            if cache is not None:
                cache["alignment"] = score
        return max(score - tau, 0.0)

    if c.kind == "non-overlap":
        if cache is not None and "overlap" in cache:
            score = cache["overlap"]
        else:
            score = overlap_from_array(boxes)
            if cache is not None:
                cache["overlap"] = score
        return score

    s = c.subject
    if s is None or not 0 <= s < n:
        raise ValidationError(f"{c.kind}: subject index {s} out of range for {n} elements")

    if c.kind == "canvas-region":
        lo, hi = _REGION_BANDS[c.region]
        yc = float(boxes[s, 1])
        return max(lo - yc, yc - hi, 0.0)

    o = c.object
    if o is None or not 0 <= o < n:
        raise ValidationError(f"{c.kind}: object index {o} out of range for {n} elements")

    if c.kind in SIZE_KINDS:
        a_s, a_o = _area(boxes, s), _area(boxes, o)
        if c.kind == "size-larger":
            return max((1 + gamma) * a_o - a_s, 0.0)
        if c.kind == "size-smaller":
            return max((1 + gamma) * a_s - a_o, 0.0)
        return max(a_s - (1 + gamma) * a_o, 0.0) + max(a_o - (1 + gamma) * a_s, 0.0)

    xl_s, xr_s, yt_s, yb_s = _edges(boxes, s)
    xl_o, xr_o, yt_o, yb_o = _edges(boxes, o)
    if c.kind == "loc-above":
        return max(yb_s - yt_o, 0.0)
    if c.kind == "loc-below":
        return max(yb_o - yt_s, 0.0)
    if c.kind == "loc-left":
        return max(xr_s - xl_o, 0.0)
    if c.kind == "loc-right":
        return max(xr_o - xl_s, 0.0)
    # loc-overlap: separation distance along each axis; touching counts
    return max(max(xl_s, xl_o) - min(xr_s, xr_o), 0.0) + max(max(yt_s, yt_o) - min(yb_s, yb_o), 0.0)


def eval_constraint(c: Constraint, layout: Layout,
                    tau: float = DEFAULT_TAU, gamma: float = DEFAULT_GAMMA) -> float:
    """Nonnegative cost of one constraint; zero exactly when satisfied."""
    return eval_from_array(c, layout.boxes_array(), tau=tau, gamma=gamma)


def eval_all_array(cs: ConstraintSet, boxes: np.ndarray, cache: dict | None = None) -> np.ndarray:
    costs = np.empty(len(cs))
    for k, c in enumerate(cs.constraints):
        costs[k] = eval_from_array(c, boxes, tau=cs.tau, gamma=cs.gamma, cache=cache)
    return costs


def eval_all(cs: ConstraintSet, layout: Layout) -> np.ndarray:
    """Cost vector in the set's listed order."""
    return eval_all_array(cs, layout.boxes_array())


def relations_from_layout(layout: Layout, fraction: float, seed: int,
                          tau: float = DEFAULT_TAU, gamma: float = DEFAULT_GAMMA) -> ConstraintSet:
    """Extract relations that hold on a layout and keep a random subset.

    Enumerates one size and one location relation per element pair plus a
    canvas band per element, then samples ceil(fraction * total) of them
    uniformly under the seed. Every returned constraint has zero cost on
    the source layout.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValidationError(f"fraction must be in [0, 1], got {fraction}")
    boxes = layout.boxes_array()
    n = boxes.shape[0]
    relations: list[Constraint] = []
    for i in range(n):
        for j in range(i + 1, n):
            a_i, a_j = _area(boxes, i), _area(boxes, j)
            if a_i > (1 + gamma) * a_j:
                relations.append(Constraint("size-larger", subject=i, object=j))
            elif a_j > (1 + gamma) * a_i:
                relations.append(Constraint("size-smaller", subject=i, object=j))
            else:
                relations.append(Constraint("size-equal", subject=i, object=j))
            xl_i, xr_i, yt_i, yb_i = _edges(boxes, i)
            xl_j, xr_j, yt_j, yb_j = _edges(boxes, j)
            if yb_i < yt_j:
                relations.append(Constraint("loc-above", subject=i, object=j))
            elif yb_j < yt_i:
                relations.append(Constraint("loc-below", subject=i, object=j))
            elif xr_i < xl_j:
                relations.append(Constraint("loc-left", subject=i, object=j))
            elif xr_j < xl_i:
                relations.append(Constraint("loc-right", subject=i, object=j))
            else:
                relations.append(Constraint("loc-overlap", subject=i, object=j))
    for i in range(n):
        yc = float(boxes[i, 1])
        region = "top" if yc <= 1 / 3 else "middle" if yc <= 2 / 3 else "bottom"
        relations.append(Constraint("canvas-region", subject=i, region=region))

    count = math.ceil(fraction * len(relations))
    if count == 0:
        return ConstraintSet((), tau=tau, gamma=gamma)
    rng = np.random.default_rng(seed)
    picked = np.sort(rng.choice(len(relations), size=count, replace=False))
    return ConstraintSet((relations[k] for k in picked), tau=tau, gamma=gamma)


def constraint_from_dict(obj, where: str = "constraint") -> Constraint:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ParseError(f"{where}: expected an object with a 'kind' field")
    known = {"kind", "subject", "object", "region", "tau", "gamma"}
    unknown = set(obj) - known
    if unknown:
        raise ParseError(f"{where}: unknown fields {sorted(unknown)}")
    try:
        return Constraint(
            kind=obj["kind"],
            subject=None if obj.get("subject") is None else int(obj["subject"]),
            object=None if obj.get("object") is None else int(obj["object"]),
            region=obj.get("region"),
            tau=None if obj.get("tau") is None else float(obj["tau"]),
            gamma=None if obj.get("gamma") is None else float(obj["gamma"]),
        )
    except (TypeError, ValueError) as e:
        if isinstance(e, ValidationError):
            raise
        raise ParseError(f"{where}: {e}") from None


def constraint_set_from_dict(doc) -> ConstraintSet:
    """Accept either a bare list of constraints or an object wrapping one."""
    if isinstance(doc, list):
        items, tau, gamma = doc, DEFAULT_TAU, DEFAULT_GAMMA
    elif isinstance(doc, dict):
        items = doc.get("constraints", [])
        if not isinstance(items, list):
            raise ParseError("'constraints' must be a list")
        tau = float(doc.get("tau", DEFAULT_TAU))
        gamma = float(doc.get("gamma", DEFAULT_GAMMA))
    else:
        raise ParseError("constraint document must be a list or an object")
    return ConstraintSet(
        (constraint_from_dict(o, where=f"constraints[{i}]") for i, o in enumerate(items)),
        tau=tau,
        gamma=gamma,
    )


def load_constraints(path) -> ConstraintSet:
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError(f"{path}: not valid JSON ({e})") from None
    return constraint_set_from_dict(doc)


def save_constraints(cs: ConstraintSet, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(cs.to_dict(), f, indent=1)
        f.write("\n")
