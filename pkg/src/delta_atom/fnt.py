"""Generic second-order effective-Hamiltonian engine (Schrieffer-Wolff /
Frohlich-Nakajima style), plus the closed-form generator for the dressed
three-level model.

Given H = H0 + H1 with H0 diagonal in a chosen basis and H1 purely
off-diagonal there, the anti-Hermitian generator S defined by

    H1 + [H0, S] = 0,    S_mn = <m|H1|n> / (E_n - E_m),

removes the coupling to first order and leaves

    H_eff = H0 + (1/2) [H1, S]

accurate to second order.  The same matrix elements reproduce standard
non-degenerate perturbation theory, which is exposed separately for
cross-checking against exact diagonalization.
"""

from __future__ import annotations

import dataclasses

import numpy as np
import scipy.linalg

from .errors import DegeneracyError, ValidationError
from .hamiltonians import EXC, MINUS, PLUS, DressedParams
from .numkernel import HilbertSpace, atom_projector, boson_annihilation, embed, require_hermitian

#: couplings across gaps below gap_rtol * max|E| are treated as degenerate
GAP_RTOL = 1e-9
#: |H1| entries below this (relative) are treated as uncoupled
COUPLING_RTOL = 1e-14


@dataclasses.dataclass(frozen=True)
class Decomposition:
    """H = H0 + H1 split relative to a basis in which H0 is diagonal.

    ``energies`` are the diagonal entries in that basis; ``h1_basis`` is the
    transformed coupling with an exactly zero diagonal.  ``h0``/``h1`` give
    the two parts back in the original frame.
    """

    energies: np.ndarray
    h1_basis: np.ndarray
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.energies.shape[0]

    @property
    def h0(self) -> np.ndarray:
        return (self.basis * self.energies) @ self.basis.conj().T

    @property
    def h1(self) -> np.ndarray:
        return self.basis @ self.h1_basis @ self.basis.conj().T


def split(hamiltonian: np.ndarray, basis: np.ndarray) -> Decomposition:
    """Split H into its diagonal and off-diagonal parts in ``basis``.

    The columns of ``basis`` define the frame; passing an identity splits in
    the computational basis.
    """
    hamiltonian = np.asarray(hamiltonian, dtype=complex)
    basis = np.asarray(basis, dtype=complex)
    if basis.shape != hamiltonian.shape:
        raise ValidationError(
            f"basis shape {basis.shape} does not match Hamiltonian shape {hamiltonian.shape}"
        )
    unitarity = np.max(np.abs(basis.conj().T @ basis - np.eye(basis.shape[0])))
    if unitarity > 1e-10:
        raise ValidationError(f"basis is not unitary: max|V^dag V - 1| = {unitarity:.3e}")
    require_hermitian(hamiltonian)

    transformed = basis.conj().T @ hamiltonian @ basis
    energies = np.diag(transformed).real.copy()
    h1_basis = transformed - np.diag(np.diag(transformed))
    return Decomposition(energies=energies, h1_basis=h1_basis, basis=basis)


def _coupled_mask(d: Decomposition) -> np.ndarray:
    scale = float(np.max(np.abs(d.h1_basis)))
    if scale == 0.0:
        return np.zeros_like(d.h1_basis, dtype=bool)
    return np.abs(d.h1_basis) > COUPLING_RTOL * scale


def generator(d: Decomposition) -> np.ndarray:
    """Anti-Hermitian S with S_mn = <m|H1|n> / (E_n - E_m), original frame.

    Degenerate pairs are only a problem where H1 actually couples them;
    uncoupled degenerate pairs get S_mn = 0.
    """
    energies = d.energies
    gaps = energies[np.newaxis, :] - energies[:, np.newaxis]  # gaps[m, n] = E_n - E_m
    coupled = _coupled_mask(d)
    gap_tol = GAP_RTOL * max(float(np.max(np.abs(energies))), 1e-300)
    bad = coupled & (np.abs(gaps) <= gap_tol)
    if np.any(bad):
        m, n = np.argwhere(bad)[0]
        raise DegeneracyError(
            f"levels {m} and {n} are coupled but degenerate "
            f"(E_{m} = {energies[m]:.12g}, E_{n} = {energies[n]:.12g}); "
            "second-order elimination undefined"
        )
    s_basis = np.zeros_like(d.h1_basis)
    np.divide(d.h1_basis, gaps, out=s_basis, where=coupled)
    return d.basis @ s_basis @ d.basis.conj().T


def effective_hamiltonian(d: Decomposition, s: np.ndarray) -> np.ndarray:
    """H_eff = H0 + (1/2)[H1, S], Hermitian to roundoff."""
    h1 = d.h1
    return d.h0 + 0.5 * (h1 @ s - s @ h1)


def elimination_residual(d: Decomposition, s: np.ndarray) -> float:
    """||H1 + [H0, S]|| / ||H1|| (2-norm); ~1e-16 for a valid generator."""
    h0, h1 = d.h0, d.h1
    num = np.linalg.norm(h1 + h0 @ s - s @ h0, 2)
    den = np.linalg.norm(h1, 2)
    return float(num / den) if den > 0 else 0.0


def perturbation_series(
    d: Decomposition, s: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Second-order energies and first/second-order eigenstate columns.

    E_n^(2) = E_n + sum_{l != n} |<l|H1|n>|^2 / (E_n - E_l); the states are
    (1 + S)|n> and (1 + S + S^2/2)|n> mapped back to the original frame.
    """
    s_basis = d.basis.conj().T @ s @ d.basis
    energies = d.energies
    denom = energies[np.newaxis, :] - energies[:, np.newaxis]
    coupled = _coupled_mask(d)
    terms = np.zeros_like(d.h1_basis, dtype=float)
    np.divide(np.abs(d.h1_basis) ** 2, denom.real, out=terms, where=coupled)
    energies_2nd = energies + terms.sum(axis=0)

    ident = np.eye(d.dim, dtype=complex)
    states_1st = d.basis @ (ident + s_basis)
    states_2nd = d.basis @ (ident + s_basis + 0.5 * (s_basis @ s_basis))
    return energies_2nd, states_1st, states_2nd


@dataclasses.dataclass(frozen=True)
class FNTResult:
    """Bundle of one full elimination run."""

    s: np.ndarray
    h_eff: np.ndarray
    energies_2nd: np.ndarray
    states_1st: np.ndarray
    states_2nd: np.ndarray
    residual: float


def eliminate(hamiltonian: np.ndarray, basis: np.ndarray) -> FNTResult:
    """split -> generator -> effective Hamiltonian -> perturbation series."""
    d = split(hamiltonian, basis)
    s = generator(d)
    h_eff = effective_hamiltonian(d, s)
    energies_2nd, states_1st, states_2nd = perturbation_series(d, s)
    return FNTResult(
        s=s,
        h_eff=h_eff,
        energies_2nd=energies_2nd,
        states_1st=states_1st,
        states_2nd=states_2nd,
        residual=elimination_residual(d, s),
    )


def transform(hamiltonian: np.ndarray, s: np.ndarray) -> np.ndarray:
    """exp(-S) H exp(S) without truncation (scaling-and-squaring expm).

    Being a similarity transform by a unitary, it preserves the spectrum;
    used to check that the generator does not change the physics.
    """
    v = scipy.linalg.expm(s)
    v_inv = scipy.linalg.expm(-s)
    return v_inv @ hamiltonian @ v


def random_test_instance(rng: np.random.Generator, dim_max: int, ratio: float):
    """Randomized benchmark Hamiltonian for the elimination engine.

    Ascending diagonal with O(1) gaps plus a Hermitian zero-diagonal
    coupling rescaled to ||H1||_2 = ratio * min-gap.  Returns
    (H, energies, H1, gap).
    """
    dim = int(rng.integers(4, dim_max + 1))
    energies = np.cumsum(rng.uniform(1.0, 2.0, size=dim))
    raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h1 = (raw + raw.conj().T) / 2.0
    np.fill_diagonal(h1, 0.0)
    gap = float(np.min(np.diff(energies)))
    h1 *= ratio * gap / np.linalg.norm(h1, 2)
    return np.diag(energies).astype(complex) + h1, energies, h1, gap


def analytic_generator(dp: DressedParams, space: HilbertSpace) -> np.ndarray:
    """Closed-form generator for the dressed model, slot order (+, -, e).

    S = G1 A|e><+| + G2 B|e><-| - h.c. with G1 = -g(theta)/delta_+ and
    G2 = +G(theta)/delta_-; the signs follow from H1 + [H0, S] = 0 with
    H1 = g(theta) A |e><+| - G(theta) B |e><-| + h.c., and the residual
    test enforces them.  Products are kept stable at singular xi/zeta.
    """
    a = boson_annihilation(space.fock_dim)
    ident = np.eye(space.fock_dim, dtype=complex)
    g1_a = -(dp.g_theta * a + dp.drive_e_plus * ident) / dp.delta_plus
    g2_b = (dp.G_theta * a - dp.drive_e_minus * ident) / dp.delta_minus
    s = embed(atom_projector(EXC, PLUS), g1_a, space)
    s += embed(atom_projector(EXC, MINUS), g2_b, space)
    return s - s.conj().T
