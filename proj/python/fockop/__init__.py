"""Boundedness, compactness and norm bounds for weighted composition
operators between Fock spaces."""

import json

from ._core import (
    Classification,
    DimensionError,
    DomainError,
    EllSup,
    Error,
    NormBounds,
    NumericalError,
    ParseError,
    Problem,
    ResourceError,
    UnsupportedError,
    __version__,
    carleson_integral,
    classify,
    composition_criterion,
    ell_sup,
    essential_norm_bounds,
    f2_matrix,
    norm_bounds,
    report,
    truncated_norm,
)


def problem(spec):
    """Problem from a dict in the problem-file layout, a JSON string or a path."""
    if isinstance(spec, dict):
        return Problem.from_json(json.dumps(spec))
    text = str(spec)
    if text.lstrip().startswith("{"):
        return Problem.from_json(text)
    return Problem.load(text)
