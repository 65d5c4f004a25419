"""drapefit: differentiable garment draping and sewing-pattern optimization."""

from .pattern import (
    BezierEdge,
    Panel,
    SewingPattern,
    Stitch,
    SymmetrySpec,
    Symmetrizer,
    bezier_eval,
    bezier_tangent,
    arc_length,
    arc_length_params,
    choose_sample_counts,
    load_pattern,
    save_pattern,
    symmetrize,
)
from .templates import make_template

__version__ = "0.1.0"
