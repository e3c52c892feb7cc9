"""Exact arithmetic layer: rationals, quadratic fields, extension towers.

Everything downstream (Galois machinery, the ansatz, the SIC verifier)
works with the types exported here.  The layer has two halves that are
kept deliberately separate:

  * exact values: QQ (arbitrary precision rationals), QuadElement over a
    QuadField, and TowerElement over a TowerSpec;
  * certified numerics: Ball and EmbeddingContext, which map exact values
    into complex balls whose radius bounds the rounding error.

The bridge back from balls to exact values is rational_reconstruct, which
relies on continued fractions over Q and two-dimensional linear solves
over Q(sqrt(D)); no lattice reduction is used anywhere.
"""

from .rational import QQ, qq, qq_int
from .quad import QuadField, QuadElement
from .tower import TowerSpec, TowerLevel, TowerElement, tower_from_json, tower_to_json
from .embed import Ball, EmbeddingContext, EmbeddingFiber
from .reconstruct import rational_reconstruct, ReconstructionError

__all__ = [
    "QQ",
    "qq",
    "qq_int",
    "QuadField",
    "QuadElement",
    "TowerSpec",
    "TowerLevel",
    "TowerElement",
    "tower_from_json",
    "tower_to_json",
    "Ball",
    "EmbeddingContext",
    "EmbeddingFiber",
    "rational_reconstruct",
    "ReconstructionError",
]
