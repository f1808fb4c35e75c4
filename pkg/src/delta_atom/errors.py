"""Exception taxonomy shared across the package.

The CLI maps these onto process exit codes: validation problems exit with
code 1, numeric failures with code 2 and I/O problems with code 3.
"""


class ValidationError(ValueError):
    """Bad user input: parameters, dimensions, config files."""


class NumericsError(RuntimeError):
    """A numeric procedure failed or left its domain of validity."""


class HermiticityError(NumericsError):
    """A matrix expected to be Hermitian is not, within tolerance."""


class TruncationError(NumericsError):
    """Fock-space truncation too small for the requested state or evolution."""


class ResonanceError(NumericsError):
    """Adiabatic elimination attempted at (near) zero detuning."""


class DegeneracyError(NumericsError):
    """Coupled degenerate levels: second-order elimination is undefined."""


class ConvergenceError(NumericsError):
    """An iterative eigensolver failed to converge."""


class SingularParameterWarning(UserWarning):
    """A dressed-frame parameter diverges, e.g. cot(theta/2) as theta -> 0."""
