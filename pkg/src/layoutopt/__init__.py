"""Graphic layout generation with constraint-driven latent optimization.

A generator maps per-element latent codes to labeled bounding boxes;
user constraints (alignment, non-overlap, pairwise size and location
relations, canvas placement) are enforced by optimizing the latent codes
under an augmented-Lagrangian scheme, with CMA-ES or Adam inside. A
metric suite (alignment, overlap, maximum IoU, Frechet feature distance,
violation rate) scores the results.
"""

from .core import (
    BBox,
    Element,
    LabelVocabulary,
    Layout,
    LayoutError,
    ParseError,
    ValidationError,
    iou,
    layout_from_array,
    layout_from_dict,
    layout_to_dict,
    load_layouts,
    save_layouts,
)
from .metrics import (
    FeatureSet,
    MetricReport,
    alignment_score,
    evaluate_collections,
    fid,
    layout_similarity,
    load_features,
    max_iou,
    overlap_score,
    save_features,
    solve_assignment,
    violation_rate,
)
from .constraints import (
    Constraint,
    ConstraintSet,
    eval_all,
    eval_constraint,
    load_constraints,
    relations_from_layout,
    save_constraints,
)
from .weights import HyperParams, NetworkWeights, load_weights, random_weights, save_weights, zero_weights
from .network import (
    GeneratorHandle,
    LatentCodes,
    aux_decoder_forward,
    discriminator_forward,
    gan_objective_eval,
    generator_forward,
    make_analytic_generator,
    make_network_handle,
    reconstruction_loss,
    sample_latents,
)
from .cma import CmaResult, cma_es_minimize
from .optim import (
    AdamOptions,
    CmaOptions,
    SolveOptions,
    SolveReport,
    adam_minimize,
    augmented_lagrangian,
    auglag_minimize,
    clamped_objective,
    clg_lo_solve,
    update_duals,
)

__version__ = "0.1.0"

__all__ = [
    "BBox", "Element", "Layout", "LabelVocabulary",
    "LayoutError", "ParseError", "ValidationError",
    "iou", "layout_from_array", "layout_from_dict", "layout_to_dict",
    "load_layouts", "save_layouts",
    "FeatureSet", "MetricReport", "alignment_score", "overlap_score",
    "layout_similarity", "max_iou", "solve_assignment", "fid",
    "violation_rate", "evaluate_collections", "load_features", "save_features",
    "Constraint", "ConstraintSet", "eval_constraint", "eval_all",
    "relations_from_layout", "load_constraints", "save_constraints",
    "HyperParams", "NetworkWeights", "random_weights", "zero_weights",
    "load_weights", "save_weights",
    "GeneratorHandle", "LatentCodes", "sample_latents",
    "generator_forward", "discriminator_forward", "aux_decoder_forward",
    "reconstruction_loss", "gan_objective_eval",
    "make_analytic_generator", "make_network_handle",
    "CmaResult", "cma_es_minimize",
    "SolveOptions", "CmaOptions", "AdamOptions", "SolveReport",
    "augmented_lagrangian", "update_duals", "clamped_objective",
    "adam_minimize", "auglag_minimize", "clg_lo_solve",
]
