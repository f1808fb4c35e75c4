"""Dense numeric substrate: truncated Fock space, operator algebra, Hermitian
spectral decomposition and exact unitary propagation.

Conventions, fixed once for the whole package:

* the atom has three levels ordered ``(b, c, e)`` with indices ``(0, 1, 2)``;
* joint atom+field indices are atom-major,
  ``index = atom_index * fock_dim + photon_number``;
* operators are dense ``complex128`` matrices, states are 1-D vectors;
* hbar = 1.

Everything in scope is time independent after the rotating-frame
transformation, so propagation goes through the spectral decomposition
(exact up to roundoff) rather than a step integrator.  All functions are
pure and never mutate their arguments; values can be shared freely across
threads and parameter sweeps.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .errors import HermiticityError, TruncationError, ValidationError

ATOM_DIM = 3
ATOM_LABELS = ("b", "c", "e")
B, C, E = range(ATOM_DIM)

#: default mode truncation; the acceptance suite re-runs its observables at 64
DEFAULT_FOCK_DIM = 32

_HERM_RTOL = 1e-12
_NORM_ATOL = 1e-8


@dataclasses.dataclass(frozen=True)
class HilbertSpace:
    """Joint Hilbert space of the three-level atom and one truncated mode."""

    fock_dim: int
    atom_dim: int = ATOM_DIM

    def __post_init__(self):
        if self.atom_dim != ATOM_DIM:
            raise ValidationError(f"atom_dim is fixed to {ATOM_DIM}, got {self.atom_dim}")
        if self.fock_dim < 2:
            raise ValidationError(f"fock_dim must be >= 2, got {self.fock_dim}")

    @property
    def total_dim(self) -> int:
        return self.atom_dim * self.fock_dim

    def index(self, atom: int, n: int) -> int:
        """Joint basis index of |atom> x |n>, atom-major."""
        if not 0 <= atom < self.atom_dim:
            raise ValidationError(f"atom index {atom} outside 0..{self.atom_dim - 1}")
        if not 0 <= n < self.fock_dim:
            raise ValidationError(f"photon number {n} outside 0..{self.fock_dim - 1}")
        return atom * self.fock_dim + n

    def basis_state(self, atom: int, n: int) -> np.ndarray:
        psi = np.zeros(self.total_dim, dtype=complex)
        psi[self.index(atom, n)] = 1.0
        return psi


@dataclasses.dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def atom_projector(i: int, j: int | None = None) -> np.ndarray:
    """3x3 transition operator |i><j| (projector if j is omitted)."""
    if j is None:
        j = i
    op = np.zeros((ATOM_DIM, ATOM_DIM), dtype=complex)
    op[i, j] = 1.0
    return op


def boson_annihilation(fock_dim: int) -> np.ndarray:
    """Truncated annihilation operator, entries a[n-1, n] = sqrt(n)."""
    if fock_dim < 2:
        raise ValidationError(f"fock_dim must be >= 2, got {fock_dim}")
    return np.diag(np.sqrt(np.arange(1, fock_dim, dtype=float)), k=1).astype(complex)


def number_operator(fock_dim: int) -> np.ndarray:
    if fock_dim < 2:
        raise ValidationError(f"fock_dim must be >= 2, got {fock_dim}")
    return np.diag(np.arange(fock_dim, dtype=float)).astype(complex)


def embed(atom_op: np.ndarray, field_op: np.ndarray, space: HilbertSpace) -> np.ndarray:
    """Kronecker product atom_op x field_op in the atom-major convention."""
    atom_op = np.asarray(atom_op, dtype=complex)
    field_op = np.asarray(field_op, dtype=complex)
    if atom_op.shape != (space.atom_dim, space.atom_dim):
        raise ValidationError(
            f"atom operator shape {atom_op.shape} does not match atom_dim {space.atom_dim}"
        )
    if field_op.shape != (space.fock_dim, space.fock_dim):
        raise ValidationError(
            f"field operator shape {field_op.shape} does not match fock_dim {space.fock_dim}"
        )
    return np.kron(atom_op, field_op)


def hermiticity_defect(matrix: np.ndarray) -> float:
    return float(np.max(np.abs(matrix - matrix.conj().T)))


def require_hermitian(matrix: np.ndarray, rtol: float = _HERM_RTOL) -> None:
    scale = float(np.max(np.abs(matrix))) or 1.0
    defect = hermiticity_defect(matrix)
    if defect > rtol * scale:
        raise HermiticityError(
            f"matrix is not Hermitian: max|M - M^dag| = {defect:.3e} "
            f"exceeds {rtol:.1e} * max|M| = {rtol * scale:.3e}"
        )


def hermitian_eig(matrix: np.ndarray) -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian matrix, eigenvalues ascending."""
    matrix = np.asarray(matrix, dtype=complex)
    require_hermitian(matrix)
    vals, vecs = np.linalg.eigh(matrix)
    return SpectralDecomposition(eigenvalues=vals, eigenvectors=vecs)


def _check_normalized(psi: np.ndarray) -> None:
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > _NORM_ATOL:
        raise ValidationError(f"state is not normalized: ||psi|| = {norm:.12f}")


def evolve_unitary(
    hamiltonian: np.ndarray | SpectralDecomposition,
    psi0: np.ndarray,
    t: float,
) -> np.ndarray:
    """Propagate psi0 for time t under a time-independent Hermitian H.

    psi(t) = V exp(-i lambda_k t) V^dag psi0, exact up to roundoff.  A
    precomputed :class:`SpectralDecomposition` may be passed to amortize the
    diagonalization over many times.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    _check_normalized(psi0)
    dec = hamiltonian if isinstance(hamiltonian, SpectralDecomposition) else hermitian_eig(hamiltonian)
    coeff = dec.eigenvectors.conj().T @ psi0
    return dec.eigenvectors @ (np.exp(-1j * dec.eigenvalues * t) * coeff)


def propagate(
    hamiltonian: np.ndarray | SpectralDecomposition,
    psi0: np.ndarray,
    times: np.ndarray,
) -> np.ndarray:
    """States at each time, shape (len(times), dim).  One diagonalization."""
    psi0 = np.asarray(psi0, dtype=complex)
    _check_normalized(psi0)
    dec = hamiltonian if isinstance(hamiltonian, SpectralDecomposition) else hermitian_eig(hamiltonian)
    times = np.asarray(times, dtype=float)
    coeff = dec.eigenvectors.conj().T @ psi0
    phases = np.exp(-1j * np.outer(times, dec.eigenvalues))
    return (phases * coeff) @ dec.eigenvectors.T


def coherent_state(alpha: complex, fock_dim: int) -> np.ndarray:
    """Truncated coherent state |alpha>, renormalized after truncation.

    The truncation guard |alpha|^2 <= fock_dim / 4 keeps the discarded
    Poisson tail negligible for every observable asserted in the tests.
    """
    if fock_dim < 2:
        raise ValidationError(f"fock_dim must be >= 2, got {fock_dim}")
    mean = abs(alpha) ** 2
    if mean > fock_dim / 4.0:
        raise TruncationError(
            f"|alpha|^2 = {mean:.3f} exceeds fock_dim/4 = {fock_dim / 4:.1f}; "
            f"increase fock_dim to at least {int(np.ceil(4 * mean))}"
        )
    amp = np.empty(fock_dim, dtype=complex)
    amp[0] = 1.0
    for n in range(1, fock_dim):
        amp[n] = amp[n - 1] * alpha / np.sqrt(n)
    amp *= np.exp(-mean / 2.0)
    return amp / np.linalg.norm(amp)


def expectation(op: np.ndarray, psi: np.ndarray) -> complex:
    return complex(np.vdot(psi, op @ psi))
