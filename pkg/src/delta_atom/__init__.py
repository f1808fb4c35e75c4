"""Cyclic (Delta-type) three-level artificial atom coupled to a quantized
mode: dressed frames, second-order elimination, cat-state dynamics and
flux-qubit selection rules."""

from .errors import (
    ConvergenceError,
    DegeneracyError,
    HermiticityError,
    NumericsError,
    ResonanceError,
    SingularParameterWarning,
    TruncationError,
    ValidationError,
)
from .hamiltonians import (
    DressedParams,
    EffectiveOperators,
    ModelParams,
    dressed_hamiltonian,
    dressed_params,
    dressed_params_from_theta,
    dressed_rotation,
    effective_hamiltonians,
    lab_hamiltonian,
    minus_branch_hamiltonian,
    rotating_hamiltonian,
)
from .numkernel import (
    HilbertSpace,
    SpectralDecomposition,
    boson_annihilation,
    coherent_state,
    embed,
    evolve_unitary,
    hermitian_eig,
    propagate,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DegeneracyError",
    "DressedParams",
    "EffectiveOperators",
    "HermiticityError",
    "HilbertSpace",
    "ModelParams",
    "NumericsError",
    "ResonanceError",
    "SingularParameterWarning",
    "SpectralDecomposition",
    "TruncationError",
    "ValidationError",
    "__version__",
    "boson_annihilation",
    "coherent_state",
    "dressed_hamiltonian",
    "dressed_params",
    "dressed_params_from_theta",
    "dressed_rotation",
    "effective_hamiltonians",
    "embed",
    "evolve_unitary",
    "hermitian_eig",
    "lab_hamiltonian",
    "minus_branch_hamiltonian",
    "propagate",
    "rotating_hamiltonian",
]
