"""Layout quality metrics.

Alignment and Overlap score a single layout, normalized by element count.
Maximum IoU scores a collection of layouts against references through
optimal label-preserving matching at both the element and collection
level. The distribution distance is computed from externally supplied
feature vectors as the Frechet distance between Gaussian fits.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import Layout, ValidationError, iou

ALIGNMENT_GAP_MAX = 1.0 - 1e-8
VIOLATION_EPS = 1e-4
PSD_TOLERANCE = 1e-6


@dataclass(frozen=True)
class FeatureSet:
    """M x d feature matrix, one row per layout."""

    vectors: np.ndarray

    def __init__(self, vectors):
        v = np.asarray(vectors, dtype=np.float64)
        if v.ndim != 2:
            raise ValidationError(f"feature matrix must be 2-d, got shape {v.shape}")
        if v.shape[0] < 2:
            raise ValidationError("need at least 2 feature rows to estimate covariance")
        if not np.all(np.isfinite(v)):
            raise ValidationError("feature matrix contains non-finite values")
        object.__setattr__(self, "vectors", v)

    @property
    def count(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class MetricReport:
    fid: float | None
    max_iou: float
    alignment: float
    overlap: float

    def to_dict(self) -> dict:
        doc = {
            "max_iou": self.max_iou,
            "alignment": self.alignment,
            "overlap": self.overlap,
        }
        if self.fid is not None:
            doc["fid"] = self.fid
        return doc


def _six_lines(boxes: np.ndarray) -> np.ndarray:
    """N x 6 matrix of alignment lines (xL, xC, xR, yT, yC, yB)."""
    xc, yc, w, h = boxes[:, 0], boxes[:, 1], boxes[:, 2], boxes[:, 3]
    return np.stack(
        [xc - w / 2, xc, xc + w / 2, yc - h / 2, yc, yc + h / 2], axis=1
    )


def alignment_from_array(boxes: np.ndarray) -> float:
    """Alignment score of an N x 4 (xc, yc, w, h) array."""
    n = boxes.shape[0]
    if n <= 1:
        return 0.0
    lines = _six_lines(boxes)
    # |line_i - line_j| per line type; diagonal excluded from the minimum
    diff = np.abs(lines[:, None, :] - lines[None, :, :])
    diff[np.arange(n), np.arange(n), :] = np.inf
    d = diff.min(axis=(1, 2))
    d = np.clip(d, 0.0, ALIGNMENT_GAP_MAX)
    return float(-np.log1p(-d).sum() / n)


def overlap_from_array(boxes: np.ndarray) -> float:
    """Overlap score of an N x 4 array: mean intersection over own area."""
    n = boxes.shape[0]
    if n <= 1:
        return 0.0
    xl = boxes[:, 0] - boxes[:, 2] / 2
    xr = boxes[:, 0] + boxes[:, 2] / 2
    yt = boxes[:, 1] - boxes[:, 3] / 2
    yb = boxes[:, 1] + boxes[:, 3] / 2
    iw = np.clip(np.minimum(xr[:, None], xr[None, :]) - np.maximum(xl[:, None], xl[None, :]), 0.0, None)
    ih = np.clip(np.minimum(yb[:, None], yb[None, :]) - np.maximum(yt[:, None], yt[None, :]), 0.0, None)
    inter = iw * ih
    area = boxes[:, 2] * boxes[:, 3]
    safe_area = np.where(area > 0.0, area, 1.0)
    ratio = np.where(area[:, None] > 0.0, inter / safe_area[:, None], 0.0)
    np.fill_diagonal(ratio, 0.0)
    return float(ratio.sum() / n)


def alignment_score(layout: Layout) -> float:
    """Per-element nearest alignment-line gap, -log(1 - gap) averaged over N."""
    return alignment_from_array(layout.boxes_array())


def overlap_score(layout: Layout) -> float:
    """Mean over ordered pairs of intersection area over the first box's area."""
    return overlap_from_array(layout.boxes_array())


def solve_assignment(scores: np.ndarray, maximize: bool = False) -> np.ndarray:
    """Optimal row-to-column permutation of a square score matrix."""
    m = np.asarray(scores, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"assignment matrix must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("assignment matrix contains non-finite entries")
    rows, cols = linear_sum_assignment(m, maximize=maximize)
    perm = np.empty(m.shape[0], dtype=np.intp)
    perm[rows] = cols
    return perm


def layout_similarity(a: Layout, b: Layout) -> float:
    """Mean IoU under the best label-preserving element matching."""
    if a.label_multiset() != b.label_multiset():
        raise ValidationError(
            f"label multisets differ: {a.label_multiset()} vs {b.label_multiset()}"
        )
    n = len(a)
    total = 0.0
    for label in set(a.labels):
        ia = [i for i, l in enumerate(a.labels) if l == label]
        ib = [j for j, l in enumerate(b.labels) if l == label]
        if len(ia) == 1:
            total += iou(a.elements[ia[0]].bbox, b.elements[ib[0]].bbox)
            continue
        scores = np.array(
            [[iou(a.elements[i].bbox, b.elements[j].bbox) for j in ib] for i in ia]
        )
        perm = solve_assignment(scores, maximize=True)
        total += float(scores[np.arange(len(ia)), perm].sum())
    return total / n


def max_iou(generated: list[Layout], references: list[Layout]) -> float:
    """Mean layout similarity under the best collection matching.

    Pairs with unequal label multisets are permitted in the matching and
    contribute similarity 0.
    """
    if len(generated) != len(references):
        raise ValidationError(
            f"collection sizes differ: {len(generated)} generated vs {len(references)} references"
        )
    if len(generated) == 0:
        raise ValidationError("collections must contain at least one layout")
    m = len(generated)
    scores = np.zeros((m, m))
    for i, g in enumerate(generated):
        for j, r in enumerate(references):
            if g.label_multiset() == r.label_multiset():
                scores[i, j] = layout_similarity(g, r)
    perm = solve_assignment(scores, maximize=True)
    return float(scores[np.arange(m), perm].mean())


def _psd_sqrt_eigvals(sym: np.ndarray, what: str) -> np.ndarray:
    """Eigenvalues of a nominally-PSD symmetric matrix, clamped per policy."""
    evals = np.linalg.eigvalsh((sym + sym.T) / 2)
    if np.any(evals < -PSD_TOLERANCE):
        raise ValidationError(
            f"{what} is not positive semidefinite: min eigenvalue {evals.min():.3e}"
        )
    return np.clip(evals, 0.0, None)


def fid(real: FeatureSet, gen: FeatureSet) -> float:
    """Frechet distance between Gaussian fits of two feature sets.

    The cross-covariance square root is taken through the symmetric
    product S1^(1/2) S2 S1^(1/2) so only real symmetric eigenproblems
    are involved.
    """
    if real.dim != gen.dim:
        raise ValidationError(f"feature dimensions differ: {real.dim} vs {gen.dim}")
    mu1 = real.vectors.mean(axis=0)
    mu2 = gen.vectors.mean(axis=0)
    s1 = np.atleast_2d(np.cov(real.vectors, rowvar=False))
    s2 = np.atleast_2d(np.cov(gen.vectors, rowvar=False))

    e1, v1 = np.linalg.eigh((s1 + s1.T) / 2)
    if np.any(e1 < -PSD_TOLERANCE):
        raise ValidationError(
            f"real covariance is not positive semidefinite: min eigenvalue {e1.min():.3e}"
        )
    sqrt_s1 = (v1 * np.sqrt(np.clip(e1, 0.0, None))) @ v1.T
    inner = sqrt_s1 @ s2 @ sqrt_s1
    cross = _psd_sqrt_eigvals(inner, "covariance product")

    raw = float(np.sum((mu1 - mu2) ** 2) + np.trace(s1) + np.trace(s2) - 2 * np.sqrt(cross).sum())
    if raw < -PSD_TOLERANCE:
        raise ValidationError(f"frechet distance computed as {raw:.3e}, below tolerance")
    return max(raw, 0.0)


def violation_rate(layouts: list[Layout], constraint_sets) -> float:
    """Percentage of individual constraints with cost above tolerance."""
    from .constraints import eval_all  # deferred: constraints imports this module

    if len(layouts) != len(constraint_sets):
        raise ValidationError(
            f"{len(layouts)} layouts but {len(constraint_sets)} constraint sets"
        )
    total = 0
    violated = 0
    for layout, cs in zip(layouts, constraint_sets):
        costs = eval_all(cs, layout)
        total += len(costs)
        violated += int(np.sum(np.asarray(costs) > VIOLATION_EPS))
    if total == 0:
        return 0.0
    return 100.0 * violated / total


def evaluate_collections(generated: list[Layout], references: list[Layout],
                         real_features: FeatureSet | None = None,
                         gen_features: FeatureSet | None = None) -> MetricReport:
    """Full metric report for a generated collection against references.

    Alignment and Overlap are averaged over the generated layouts; FID is
    included only when both feature sets are supplied.
    """
    fid_value = None
    if (real_features is None) != (gen_features is None):
        raise ValidationError("need both real and generated feature sets for FID, or neither")
    if real_features is not None and gen_features is not None:
        fid_value = fid(real_features, gen_features)
    return MetricReport(
        fid=fid_value,
        max_iou=max_iou(generated, references),
        alignment=float(np.mean([alignment_score(l) for l in generated])),
        overlap=float(np.mean([overlap_score(l) for l in generated])),
    )


def load_features(path) -> FeatureSet:
    """Read a feature file: {'features': [[...], ...]}."""
    import json

    from .core import ParseError

    with open(path, encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise ParseError(f"{path}: not valid JSON ({e})") from None
    if not isinstance(doc, dict) or "features" not in doc:
        raise ParseError(f"{path}: expected an object with a 'features' field")
    rows = doc["features"]
    if not isinstance(rows, list) or not rows or any(not isinstance(r, list) for r in rows):
        raise ParseError(f"{path}: 'features' must be a list of number lists")
    lengths = {len(r) for r in rows}
    if len(lengths) != 1:
        raise ValidationError(f"{path}: feature rows have unequal lengths {sorted(lengths)}")
    return FeatureSet(rows)


def save_features(features: FeatureSet, path) -> None:
    import json

    with open(path, "w", encoding="utf-8") as f:
        json.dump({"features": features.vectors.tolist()}, f)
        f.write("\n")
