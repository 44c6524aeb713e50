"""Polarizer-cascade simulator: classical Malus-law intensities, exact
quantum projective-measurement probabilities, and seeded Monte Carlo photon
sampling, with a consistency check between the descriptions."""

from .core import (
    Angle,
    ClassicalBeam,
    DensityMatrix2,
    FilterStack,
    PolarizationKet,
    Polarizer,
    ZeroProbabilityProjectionError,
    angle_from_degrees,
    classical_transmit,
    density_pass_probability,
    density_project,
    inner_product,
    ket,
    malus_factor,
    pass_probability,
    project,
)
from .engines import (
    CascadeTrace,
    ComparisonDomainError,
    ComparisonReport,
    MonteCarloConfig,
    MonteCarloReport,
    PhotonInput,
    StageRecord,
    compare,
    run_classical,
    run_monte_carlo,
    run_quantum_exact,
    staircase_transmission,
    wilson_interval_95,
)

__version__ = "0.1.0"

__all__ = [
    "Angle",
    "CascadeTrace",
    "ClassicalBeam",
    "ComparisonDomainError",
    "ComparisonReport",
    "DensityMatrix2",
    "FilterStack",
    "MonteCarloConfig",
    "MonteCarloReport",
    "PhotonInput",
    "PolarizationKet",
    "Polarizer",
    "StageRecord",
    "ZeroProbabilityProjectionError",
    "angle_from_degrees",
    "classical_transmit",
    "compare",
    "density_pass_probability",
    "density_project",
    "inner_product",
    "ket",
    "malus_factor",
    "pass_probability",
    "project",
    "run_classical",
    "run_monte_carlo",
    "run_quantum_exact",
    "staircase_transmission",
    "wilson_interval_95",
]
