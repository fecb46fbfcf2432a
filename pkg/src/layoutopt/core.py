"""Canonical layout data model: labeled bounding boxes on a unit canvas.

Coordinate convention: origin at the top-left corner, x grows rightward,
y grows downward, canvas is the unit square. Boxes are parameterized by
center and size; derived edges may extend past [0, 1] when a box touches
the border, and are intentionally left unclipped so geometric costs stay
smooth for the optimizer.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

COORD_TOLERANCE = 1e-6
DEFAULT_MAX_ELEMENTS = 9


class LayoutError(ValueError):
    """Base class for layout data errors."""


class ParseError(LayoutError):
    """A document could not be parsed as the expected format."""


class ValidationError(LayoutError):
    """A parsed document or value violates a data-model invariant."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


def _clamp01(v: float) -> float:
    return 0.0 if v < 0.0 else 1.0 if v > 1.0 else v


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box given by center (xc, yc) and size (w, h), all in [0, 1]."""

    xc: float
    yc: float
    w: float
    h: float

    def __post_init__(self):
        for name in ("xc", "yc", "w", "h"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValidationError(f"bbox {name} must be finite, got {v}", field=name)
            object.__setattr__(self, name, _clamp01(v))

    @property
    def x_left(self) -> float:
        return self.xc - self.w / 2

    @property
    def x_right(self) -> float:
        return self.xc + self.w / 2

    @property
    def y_top(self) -> float:
        return self.yc - self.h / 2

    @property
    def y_bottom(self) -> float:
        return self.yc + self.h / 2

    @property
    def area(self) -> float:
        return self.w * self.h


@dataclass(frozen=True)
class Element:
    """One layout element: a label id plus its bounding box."""

    label: int
    bbox: BBox

    def __post_init__(self):
        if self.label < 0:
            raise ValidationError(f"label id must be nonnegative, got {self.label}", field="label")


@dataclass(frozen=True)
class Layout:
    """A set of labeled boxes. Element order is storage order only."""

    elements: tuple[Element, ...]

    def __init__(self, elements):
        object.__setattr__(self, "elements", tuple(elements))
        if len(self.elements) == 0:
            raise ValidationError("layout must contain at least one element", field="elements")

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(e.label for e in self.elements)

    def label_multiset(self) -> tuple[int, ...]:
        """Sorted label bag, stable under element permutation."""
        return tuple(sorted(self.labels))

    def boxes_array(self) -> np.ndarray:
        """N x 4 float array of (xc, yc, w, h) rows in storage order."""
        return np.array(
            [(e.bbox.xc, e.bbox.yc, e.bbox.w, e.bbox.h) for e in self.elements],
            dtype=np.float64,
        )


@dataclass(frozen=True)
class LabelVocabulary:
    """Ordered label names for one dataset; label ids index into it."""

    names: tuple[str, ...]

    def __init__(self, names):
        object.__setattr__(self, "names", tuple(names))
        if any(not n for n in self.names):
            raise ValidationError("label names must be nonempty", field="names")
        if len(set(self.names)) != len(self.names):
            raise ValidationError("label names must be unique", field="names")

    @property
    def size(self) -> int:
        return len(self.names)


def layout_from_array(boxes: np.ndarray, labels) -> Layout:
    """Build a Layout from an N x 4 (xc, yc, w, h) array and matching label ids."""
    boxes = np.asarray(boxes, dtype=np.float64)
    if boxes.ndim != 2 or boxes.shape[1] != 4:
        raise ValidationError(f"expected N x 4 box array, got shape {boxes.shape}")
    if boxes.shape[0] != len(labels):
        raise ValidationError(f"{boxes.shape[0]} boxes but {len(labels)} labels")
    return Layout(
        Element(int(l), BBox(*(float(v) for v in row))) for row, l in zip(boxes, labels)
    )


def iou(a: BBox, b: BBox) -> float:
    """Intersection area over union area; 0 when the union is degenerate."""
    iw = min(a.x_right, b.x_right) - max(a.x_left, b.x_left)
    ih = min(a.y_bottom, b.y_bottom) - max(a.y_top, b.y_top)
    inter = max(iw, 0.0) * max(ih, 0.0)
    union = a.area + b.area - inter
    if union <= 0.0:
        return 0.0
    # edge arithmetic can overshoot the union by an ulp for identical boxes
    return min(inter / union, 1.0)


def validate_layout(layout: Layout, vocab: LabelVocabulary,
                    max_elements: int = DEFAULT_MAX_ELEMENTS) -> None:
    """Check a layout against a vocabulary and the element-count cap."""
    if len(layout) > max_elements:
        raise ValidationError(
            f"layout has {len(layout)} elements, maximum is {max_elements}",
            field="elements",
        )
    for i, e in enumerate(layout.elements):
        if e.label >= vocab.size:
            raise ValidationError(
                f"element {i} has label id {e.label}, vocabulary size is {vocab.size}",
                field="label",
            )


def _coord_from_json(value, where: str) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ParseError(f"{where}: expected a number, got {value!r}") from None
    if not math.isfinite(v):
        raise ValidationError(f"{where}: coordinate must be finite, got {v}")
    if v < -COORD_TOLERANCE or v > 1.0 + COORD_TOLERANCE:
        raise ValidationError(f"{where}: coordinate {v} outside [0, 1]")
    return v


def layout_to_dict(layout: Layout) -> dict:
    return {
        "elements": [
            {"label": e.label, "xc": e.bbox.xc, "yc": e.bbox.yc, "w": e.bbox.w, "h": e.bbox.h}
            for e in layout.elements
        ]
    }


def layout_from_dict(obj, where: str = "layout",
                     vocab: LabelVocabulary | None = None,
                     max_elements: int = DEFAULT_MAX_ELEMENTS) -> Layout:
    if not isinstance(obj, dict) or "elements" not in obj:
        raise ParseError(f"{where}: expected an object with an 'elements' field")
    raw = obj["elements"]
    if not isinstance(raw, list):
        raise ParseError(f"{where}.elements: expected a list")
    if len(raw) == 0:
        raise ValidationError(f"{where}: layout has no elements", field="elements")
    elements = []
    for i, el in enumerate(raw):
        if not isinstance(el, dict):
            raise ParseError(f"{where}.elements[{i}]: expected an object")
        try:
            label = int(el["label"])
        except (KeyError, TypeError, ValueError):
            raise ParseError(f"{where}.elements[{i}]: missing or invalid 'label'") from None
        coords = [_coord_from_json(el.get(k), f"{where}.elements[{i}].{k}")
                  for k in ("xc", "yc", "w", "h")]
        elements.append(Element(label, BBox(*coords)))
    layout = Layout(elements)
    if vocab is not None:
        validate_layout(layout, vocab, max_elements=max_elements)
    return layout


def load_layouts(path, max_elements: int = DEFAULT_MAX_ELEMENTS) -> tuple[list[Layout], LabelVocabulary]:
    """Read a canonical layout file: {'vocabulary': [...], 'layouts': [...]}."""
    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError(f"{path}: not valid JSON ({e})") from None
    if not isinstance(doc, dict):
        raise ParseError(f"{path}: expected a top-level object")
    if "vocabulary" not in doc or "layouts" not in doc:
        raise ParseError(f"{path}: missing 'vocabulary' or 'layouts' field")
    names = doc["vocabulary"]
    if not isinstance(names, list) or any(not isinstance(n, str) for n in names):
        raise ParseError(f"{path}: 'vocabulary' must be a list of strings")
    vocab = LabelVocabulary(names)
    if not isinstance(doc["layouts"], list):
        raise ParseError(f"{path}: 'layouts' must be a list")
    layouts = [
        layout_from_dict(obj, where=f"layouts[{i}]", vocab=vocab, max_elements=max_elements)
        for i, obj in enumerate(doc["layouts"])
    ]
    return layouts, vocab


def save_layouts(layouts, vocab: LabelVocabulary, path) -> None:
    """Write the canonical layout file; load_layouts(save_layouts(x)) == x."""
    doc = {
        "vocabulary": list(vocab.names),
        "layouts": [layout_to_dict(l) for l in layouts],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")
