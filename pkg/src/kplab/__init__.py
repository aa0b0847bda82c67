"""Entropic Kneser-Poulsen laboratory.

Rényi-entropy comparisons between a finitely supported measure and its
contractive image under Gaussian smoothing, the smoothed-flow machinery
behind them, entropy-power inequalities, AWGN capacity, and a Monte Carlo
union-of-balls volume cross-check.
"""

__version__ = "0.1.0"

from .configspace import (
    ContractionPair,
    PointConfiguration,
    make_contraction_pair,
    random_contraction,
    validate_configuration,
)
from .gaussmix import (
    EntropyEstimate,
    EstimatorPolicy,
    GaussianMixture,
    QuadratureSpec,
    entropy_power,
    renyi,
    renyi_exact_integer,
    renyi_monte_carlo,
    renyi_quadrature,
    renyi_sup,
)
from .kpverify import mutual_information, verify_kp_entropy, verify_mi_contraction

__all__ = [
    "ContractionPair",
    "EntropyEstimate",
    "EstimatorPolicy",
    "GaussianMixture",
    "PointConfiguration",
    "QuadratureSpec",
    "entropy_power",
    "make_contraction_pair",
    "mutual_information",
    "random_contraction",
    "renyi",
    "renyi_exact_integer",
    "renyi_monte_carlo",
    "renyi_quadrature",
    "renyi_sup",
    "validate_configuration",
    "verify_kp_entropy",
    "verify_mi_contraction",
]
