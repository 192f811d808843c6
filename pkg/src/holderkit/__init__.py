"""Hölder regularity after restriction: certificates, coverings and counterexamples."""

__version__ = "0.1.0"

from holderkit.core import (
    BallSpec,
    NormKind,
    Point,
    SampleFunction,
    dimension_constant,
    generate_weierstrass,
    load_samples,
    norm,
    unit_ball_volume,
)

__all__ = [
    "BallSpec",
    "NormKind",
    "Point",
    "SampleFunction",
    "__version__",
    "dimension_constant",
    "generate_weierstrass",
    "load_samples",
    "norm",
    "unit_ball_volume",
]
