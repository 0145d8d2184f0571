"""Problem encoders, decoders and the exhaustive oracle."""

from .coloring import (
    DEMO_SPECS,
    ColoringResult,
    ColoringSpec,
    coloring_decode,
    coloring_encode,
    coloring_penalty,
    coloring_state,
    energy_penalty,
    penalty_from_energy,
)
from .digits import GLYPH_DIGITS, Bitmap, digit_instance, glyph, grid_instance, pixel_agreement, tile
from .maxcut import WeightedGraph, cut_value, maxcut_encode, random_weighted_graph
from .oracle import DEFAULT_LIMIT, GroundStates, OracleSizeError, brute_force, codes_to_spins

__all__ = [
    "Bitmap",
    "ColoringResult",
    "ColoringSpec",
    "DEFAULT_LIMIT",
    "DEMO_SPECS",
    "GLYPH_DIGITS",
    "GroundStates",
    "OracleSizeError",
    "WeightedGraph",
    "brute_force",
    "codes_to_spins",
    "coloring_decode",
    "coloring_encode",
    "coloring_penalty",
    "coloring_state",
    "cut_value",
    "digit_instance",
    "energy_penalty",
    "glyph",
    "grid_instance",
    "maxcut_encode",
    "penalty_from_energy",
    "pixel_agreement",
    "random_weighted_graph",
    "tile",
]
