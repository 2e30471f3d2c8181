"""Exact arithmetic for extending nilsequences on finite abelian groups."""

from .abgroup import (
    Character,
    FinAbGroup,
    GroupElement,
    Homomorphism,
    Ladder,
    SubgroupEmbedding,
    annihilator,
    build_ladder,
    canonical_decomposition,
    indicator_via_annihilator,
)
from .cubes import CubeMap, Corner, complete_corner, cube_count, enumerate_cubes, gray_code, is_cube, signature_image_count
from .gowers import CorrelationReport, GroupFunction, correlation, gowers_norm, gowers_u2_fourier
from .liftext import (
    OUTSIDE,
    HPoint,
    LinearOrbit,
    Nilsequence,
    assemble_full_nilsequence,
    extend_along_ladder,
    extend_nonsplit,
    extend_split,
    extend_to,
    linearize,
    orbit_eval,
    polynomial_nilsequence,
)
from .polymap import PolyMap, Target, check_extension_feasible, eval_poly, taylor_shift
from .torus import TorusPoint

__version__ = "0.1.0"

__all__ = [
    "Character",
    "CorrelationReport",
    "Corner",
    "CubeMap",
    "FinAbGroup",
    "GroupElement",
    "GroupFunction",
    "HPoint",
    "Homomorphism",
    "Ladder",
    "LinearOrbit",
    "Nilsequence",
    "OUTSIDE",
    "PolyMap",
    "SubgroupEmbedding",
    "Target",
    "TorusPoint",
    "annihilator",
    "assemble_full_nilsequence",
    "build_ladder",
    "canonical_decomposition",
    "check_extension_feasible",
    "complete_corner",
    "correlation",
    "cube_count",
    "enumerate_cubes",
    "eval_poly",
    "extend_along_ladder",
    "extend_nonsplit",
    "extend_split",
    "extend_to",
    "gowers_norm",
    "gowers_u2_fourier",
    "gray_code",
    "indicator_via_annihilator",
    "is_cube",
    "linearize",
    "orbit_eval",
    "polynomial_nilsequence",
    "signature_image_count",
    "taylor_shift",
]
