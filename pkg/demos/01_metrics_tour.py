"""Tour of the layout quality metrics on small hand-built layouts."""

import numpy as np

from layoutopt import (
    BBox,
    FeatureSet,
    alignment_score,
    fid,
    iou,
    layout_from_array,
    layout_similarity,
    max_iou,
    overlap_score,
)

# two partially overlapping boxes: intersection 0.125, union 0.375
a = BBox(0.25, 0.25, 0.5, 0.5)
b = BBox(0.5, 0.25, 0.5, 0.5)
print(f"iou of the half-overlap pair: {iou(a, b):.4f}  (expected 1/3)")

# a tidy two-column layout vs. a sloppy variant of it
tidy = layout_from_array(np.array([
    [0.25, 0.20, 0.40, 0.20],   # header, left column
    [0.25, 0.55, 0.40, 0.40],   # body, shares the header's left edge
    [0.75, 0.55, 0.40, 0.40],   # sidebar, aligned with the body
]), labels=[0, 1, 1])

sloppy_boxes = tidy.boxes_array()
sloppy_boxes[:, 0] += np.array([0.00, 0.03, -0.02])   # push columns off-grid
sloppy_boxes[1, 1] -= 0.10                            # make body collide with header
sloppy = layout_from_array(sloppy_boxes, labels=[0, 1, 1])

for name, lay in [("tidy", tidy), ("sloppy", sloppy)]:
    print(f"{name:>7}: alignment {alignment_score(lay):.5f}   overlap {overlap_score(lay):.5f}")

print(f"similarity(tidy, sloppy): {layout_similarity(tidy, sloppy):.4f}")
print(f"similarity(tidy, tidy):   {layout_similarity(tidy, tidy):.4f}")

# collection-level maximum IoU with an optimal matching
rng = np.random.default_rng(0)
col = [layout_from_array(rng.uniform(0.2, 0.8, (3, 4)), labels=[0, 1, 1]) for _ in range(4)]
shuffled = [col[i] for i in (2, 0, 3, 1)]
print(f"max_iou against a shuffled copy of itself: {max_iou(col, shuffled):.4f}")

# Frechet distance between Gaussian fits of feature sets
real = FeatureSet(rng.normal(0.0, 1.0, size=(5000, 4)))
fake_near = FeatureSet(rng.normal(0.05, 1.0, size=(5000, 4)))
fake_far = FeatureSet(rng.normal(1.5, 2.0, size=(5000, 4)))
print(f"fid to a nearby distribution:  {fid(real, fake_near):.4f}")
print(f"fid to a distant distribution: {fid(real, fake_far):.4f}")
