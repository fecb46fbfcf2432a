"""Constraint costs: zero when satisfied, growing with the violation."""

import numpy as np

from layoutopt import (
    Constraint,
    ConstraintSet,
    eval_all,
    eval_constraint,
    layout_from_array,
    relations_from_layout,
)

layout = layout_from_array(np.array([
    [0.50, 0.15, 0.80, 0.20],   # 0: banner across the top
    [0.30, 0.60, 0.30, 0.50],   # 1: tall column, left
    [0.75, 0.50, 0.30, 0.20],   # 2: card, right
    [0.75, 0.80, 0.30, 0.20],   # 3: card below it
]), labels=[0, 1, 2, 2])

costs = [
    ("banner above column", Constraint("loc-above", subject=0, object=1)),
    ("column above banner (violated)", Constraint("loc-above", subject=1, object=0)),
    ("column left of cards", Constraint("loc-left", subject=1, object=2)),
    ("cards equal size", Constraint("size-equal", subject=2, object=3)),
    ("column larger than card", Constraint("size-larger", subject=1, object=2)),
    ("card larger than column (violated)", Constraint("size-larger", subject=2, object=1)),
    ("banner in top band", Constraint("canvas-region", subject=0, region="top")),
    ("banner in bottom band (violated)", Constraint("canvas-region", subject=0, region="bottom")),
    ("whole layout aligned", Constraint("alignment")),
    ("no overlaps", Constraint("non-overlap")),
]
for label, c in costs:
    print(f"{label:<36} cost = {eval_constraint(c, layout):.4f}")

# a slid card breaks the relations it used to satisfy
moved = layout.boxes_array()
moved[2, 1] = 0.05   # card jumps above the banner
broken = layout_from_array(moved, labels=layout.labels)
cs = ConstraintSet([
    Constraint("loc-above", subject=0, object=2),
    Constraint("loc-left", subject=1, object=2),
])
print("\ncost vectors before/after sliding card 2 to the top:")
print("  before:", np.round(eval_all(cs, layout), 4))
print("  after: ", np.round(eval_all(cs, broken), 4))

# relation extraction: every extracted constraint holds on its source
full = relations_from_layout(layout, fraction=1.0, seed=0)
sampled = relations_from_layout(layout, fraction=0.25, seed=0)
print(f"\nextracted {len(full)} relations total, sampled quarter has {len(sampled)}")
print(f"total cost of the full set on its source: {eval_all(full, layout).sum():.1f}")
for c in sampled:
    print(f"  {c.to_dict()}")
