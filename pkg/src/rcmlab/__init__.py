"""Numerical laboratory for sparse random 0/1 matrices with fixed row sums."""

from .model import (
    ModelParams,
    RowSupportMatrix,
    complement,
    expectation_matrix,
    normalize,
    sample_bernoulli,
    sample_combinatorial,
    shift,
)
from .spectral import (
    NumericalBackendError,
    SpectralSummary,
    eigenvalues,
    log_potential,
    singular_values,
    smallest_singular_value,
)

__version__ = "0.1.0"

__all__ = [
    "ModelParams",
    "NumericalBackendError",
    "RowSupportMatrix",
    "SpectralSummary",
    "complement",
    "eigenvalues",
    "expectation_matrix",
    "log_potential",
    "normalize",
    "sample_bernoulli",
    "sample_combinatorial",
    "shift",
    "singular_values",
    "smallest_singular_value",
]
