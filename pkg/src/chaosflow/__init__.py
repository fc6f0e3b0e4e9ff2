"""chaosflow: discrete Wiener-chaos calculus.

Chaos expansions and Hermite algebra over a discretized white noise,
second-quantization operators, extended stochastic integrals for Gaussian
integrators (including fractional Brownian motion), series solutions of
anticipating SPDEs with boundary problems, and Gaussian smoothing with
correlated observation noise.
"""

from .backend import NAME as backend_name
from .chaos import (
    ChaosVector,
    HChaosVector,
    TruncationError,
    chaos_eval,
    chaos_mul,
    expect_product,
    hermite,
    moment2,
    pair_wick,
    skorokhod,
    stoch_derivative,
    wick_exp,
)
from .grid import TimeGrid
from .quadrature import gh_expect
from .second_quant import (
    BoundedOp,
    ParticleMeasure,
    gamma_apply,
    gamma_mc,
    ou_operator,
    projector_op,
    random_measure,
)
from .tensors import SymmetricTensor

__version__ = "0.1.0"

__all__ = [
    "BoundedOp",
    "ChaosVector",
    "HChaosVector",
    "ParticleMeasure",
    "SymmetricTensor",
    "TimeGrid",
    "TruncationError",
    "backend_name",
    "chaos_eval",
    "chaos_mul",
    "expect_product",
    "gamma_apply",
    "gamma_mc",
    "gh_expect",
    "hermite",
    "moment2",
    "ou_operator",
    "pair_wick",
    "projector_op",
    "random_measure",
    "skorokhod",
    "stoch_derivative",
    "wick_exp",
]
