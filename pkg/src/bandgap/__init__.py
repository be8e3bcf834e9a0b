"""Bandgap extremization for the 1D periodic Schrodinger equation.

Exact optimal potentials under two constraint families (pointwise bounds;
fixed first and second moments), independent band-structure solvers to
verify them, and a general variational optimizer that recovers both optima
from random starts.
"""

from .bandsolver import (
    BandEdgePair,
    band_edges_fourier,
    band_edges_segments,
    monodromy_discriminant,
)
from .elliptic import EllipticPair, complete_elliptic, jacobi_sn_cn_dn
from .moment_optimum import (
    EllipticOptimum,
    modulus_from_sigma,
    optimum_from_modulus,
    verify_optimum,
)
from .optimizer import (
    BoxConstraint,
    MomentConstraint,
    OptimizerState,
    maximize_gap,
)
from .potential import (
    MomentSummary,
    PotentialProfile,
    elliptic_profile,
    moments,
    sinusoidal_profile,
    square_well_profile,
)
from .squarewell import SquareWellSolution, optimal_alpha, sweep_eta

__version__ = "0.1.0"

__all__ = [
    "BandEdgePair",
    "BoxConstraint",
    "EllipticOptimum",
    "EllipticPair",
    "MomentConstraint",
    "MomentSummary",
    "OptimizerState",
    "PotentialProfile",
    "SquareWellSolution",
    "band_edges_fourier",
    "band_edges_segments",
    "complete_elliptic",
    "elliptic_profile",
    "jacobi_sn_cn_dn",
    "maximize_gap",
    "modulus_from_sigma",
    "moments",
    "monodromy_discriminant",
    "optimal_alpha",
    "optimum_from_modulus",
    "sinusoidal_profile",
    "square_well_profile",
    "sweep_eta",
    "verify_optimum",
]
