"""Three-junction flux-qubit loop: 2D potential, low-lying spectrum, and the
microwave selection rules that open or close the cyclic transition loop.

The loop Hamiltonian in the two phase variables is

    H = P_p^2 / 2 M_p + P_m^2 / 2 M_m + U(phi_p, phi_m, f),
    U  = 2 E_J (1 - cos phi_p cos phi_m) + alpha E_J [1 - cos(2 pi f + 2 phi_m)],

with M_m = M_p (1 + 2 alpha) and f the reduced bias flux.  At 2f = n the
potential is inversion symmetric, U(-phi_p, -phi_m) = U(phi_p, phi_m), so
eigenstates carry definite parity and the flux-coupling operator
dU/df = 2 pi alpha E_J sin(2 pi f + 2 phi_m), which is odd there, cannot
connect same-parity states: at least one leg of any three-level loop
vanishes.  Away from the symmetry point all three legs are allowed and the
transitions become cyclic.

Discretization: uniform periodic grid on [-pi, pi)^2, second-order central
differences for both kinetic terms, sparse shift-invert Lanczos for the
lowest levels.  Units: energies in E_J, hbar = 1; the mass enters through
the dimensionless ratio r = E_J * M_p (so that the plasma frequencies are
O(sqrt(2/r)) E_J).

One subtlety of the (phi_p, phi_m) coordinates: the junction phases
phi_1 = phi_p + phi_m and phi_2 = phi_p - phi_m are the 2 pi periodic
variables, and their period lattice maps to the rhombic lattice generated
by (pi, pi) and (pi, -pi) in the (phi_p, phi_m) plane.  The square torus
[-pi, pi)^2 therefore contains two copies of the physical cell, and U is
invariant under the half-period translation
T: (phi_p, phi_m) -> (phi_p + pi, phi_m + pi).  States that are
single-valued in the junction phases are exactly the T-symmetric ones;
the solver restricts to that sector (which also halves the problem),
otherwise every physical level would appear twice.
"""

from __future__ import annotations

import dataclasses

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .errors import ConvergenceError, ValidationError

#: deterministic Lanczos start vector seed (generic w.r.t. parity)
_LANCZOS_SEED = 7


@dataclasses.dataclass(frozen=True)
class FluxParams:
    """Loop parameters.  ``mass_ratio`` is r = E_J * M_p in grid units.

    The defaults (alpha = 0.6, r = 8, i.e. E_J ~ 32 E_C) keep the lowest
    three levels in the mirror-even sector of phi_p across f in
    [0.45, 0.55].  The flux drive dU/df is phi_p independent, so mirror-odd
    plasmon levels are exactly dark; heavier loops push such a level into
    the lowest three and no drive can close the transition loop through it.
    """

    E_J: float = 1.0
    alpha: float = 0.6
    f: float = 0.5
    mass_ratio: float = 8.0

    def __post_init__(self):
        if self.E_J <= 0:
            raise ValidationError(f"E_J must be positive, got {self.E_J}")
        if not 0.0 < self.alpha < 2.0:
            raise ValidationError(f"alpha must lie in (0, 2), got {self.alpha}")
        if self.mass_ratio <= 0:
            raise ValidationError(f"mass_ratio must be positive, got {self.mass_ratio}")

    @property
    def mass_p(self) -> float:
        return self.mass_ratio / self.E_J

    @property
    def mass_m(self) -> float:
        return self.mass_p * (1.0 + 2.0 * self.alpha)


@dataclasses.dataclass(frozen=True)
class Grid2D:
    """Uniform periodic grid, phi_p and phi_m both on [-pi, pi)."""

    n_p: int = 64
    n_m: int = 64

    def __post_init__(self):
        if self.n_p < 16 or self.n_m < 16:
            raise ValidationError(f"grid needs >= 16 points per axis, got {self.n_p}x{self.n_m}")
        if self.n_p % 2 or self.n_m % 2:
            # the half-period translation must map grid points to grid points
            raise ValidationError(f"grid sizes must be even, got {self.n_p}x{self.n_m}")

    @property
    def phi_p(self) -> np.ndarray:
        return -np.pi + 2.0 * np.pi * np.arange(self.n_p) / self.n_p

    @property
    def phi_m(self) -> np.ndarray:
        return -np.pi + 2.0 * np.pi * np.arange(self.n_m) / self.n_m

    @property
    def cell(self) -> float:
        return (2.0 * np.pi / self.n_p) * (2.0 * np.pi / self.n_m)


@dataclasses.dataclass(frozen=True)
class LevelData:
    """Lowest levels: energies ascending, grid wavefunctions, (b, c, e) labels."""

    energies: np.ndarray
    wavefunctions: np.ndarray  # shape (k, n_p, n_m), grid-normalized
    labels: tuple[str, ...]
    degenerate: bool


def potential_energy(phi_p, phi_m, params: FluxParams):
    """U(phi_p, phi_m, f); broadcasts over array inputs."""
    phi_p = np.asarray(phi_p, dtype=float)
    phi_m = np.asarray(phi_m, dtype=float)
    u = 2.0 * params.E_J * (1.0 - np.cos(phi_p) * np.cos(phi_m))
    u = u + params.alpha * params.E_J * (1.0 - np.cos(2.0 * np.pi * params.f + 2.0 * phi_m))
    return u


def flux_coupling(phi_p, phi_m, params: FluxParams):
    """dU/df = 2 pi alpha E_J sin(2 pi f + 2 phi_m): the operator through
    which every applied flux drive acts."""
    phi_m = np.asarray(phi_m, dtype=float)
    out = 2.0 * np.pi * params.alpha * params.E_J * np.sin(2.0 * np.pi * params.f + 2.0 * phi_m)
    return np.broadcast_arrays(np.asarray(phi_p, dtype=float), out)[1]


def _periodic_laplacian(n: int) -> scipy.sparse.csr_matrix:
    """Fourth-order central-difference d^2/dx^2 on a periodic grid.

    Second order leaves ~5e-4 relative error in the lowest levels at a
    64 x 64 grid, too coarse for the convergence contract; the 5-point
    stencil (-1/12, 4/3, -5/2, 4/3, -1/12) gets comfortably below 1e-4.
    """
    h = 2.0 * np.pi / n
    lap = scipy.sparse.lil_matrix((n, n))
    stencil = {0: -5.0 / 2.0, 1: 4.0 / 3.0, 2: -1.0 / 12.0}
    for i in range(n):
        for off, coeff in stencil.items():
            lap[i, (i + off) % n] = coeff
            if off:
                lap[i, (i - off) % n] = coeff
    return (lap / h**2).tocsr()


def build_hamiltonian(params: FluxParams, grid: Grid2D) -> scipy.sparse.csr_matrix:
    """Sparse grid Hamiltonian; row index = i_p * n_m + i_m."""
    kin_p = -_periodic_laplacian(grid.n_p) / (2.0 * params.mass_p)
    kin_m = -_periodic_laplacian(grid.n_m) / (2.0 * params.mass_m)
    ident_p = scipy.sparse.identity(grid.n_p, format="csr")
    ident_m = scipy.sparse.identity(grid.n_m, format="csr")
    h = scipy.sparse.kron(kin_p, ident_m) + scipy.sparse.kron(ident_p, kin_m)
    u = potential_energy(grid.phi_p[:, None], grid.phi_m[None, :], params)
    return (h + scipy.sparse.diags(u.ravel())).tocsr()


def half_period_translation(grid: Grid2D) -> np.ndarray:
    """Index permutation for T: (phi_p, phi_m) -> (phi_p + pi, phi_m + pi)."""
    ip = (np.arange(grid.n_p) + grid.n_p // 2) % grid.n_p
    im = (np.arange(grid.n_m) + grid.n_m // 2) % grid.n_m
    return (ip[:, None] * grid.n_m + im[None, :]).ravel()


def _symmetric_sector_basis(grid: Grid2D) -> scipy.sparse.csr_matrix:
    """Orthonormal columns spanning the T-symmetric (physical) sector.

    T is an involution without fixed points on an even grid, so every orbit
    has size two and the sector has half the grid dimension.
    """
    perm = half_period_translation(grid)
    idx = np.arange(perm.shape[0])
    reps = idx[idx < perm]
    cols = np.arange(reps.shape[0])
    rows = np.concatenate([reps, perm[reps]])
    data = np.full(2 * reps.shape[0], 1.0 / np.sqrt(2.0))
    return scipy.sparse.csr_matrix(
        (data, (rows, np.concatenate([cols, cols]))), shape=(perm.shape[0], reps.shape[0])
    )


def spectrum_2d(params: FluxParams, grid: Grid2D, k: int = 3, maxiter: int | None = None) -> LevelData:
    """Lowest k eigenpairs on the periodic grid (shift-invert Lanczos).

    The solve is restricted to the translation-symmetric sector (see module
    docstring), which holds the states single-valued in the junction
    phases.  Wavefunctions are normalized so that sum |psi|^2 * cell = 1.
    The lowest three levels are labeled (b, c, e); a near-degeneracy among
    them is flagged rather than silently mislabeled.
    """
    if k < 3:
        raise ValidationError(f"need at least the lowest 3 levels, got k = {k}")
    h = build_hamiltonian(params, grid)
    q = _symmetric_sector_basis(grid)
    h_sym = (q.T @ h @ q).tocsr()
    rng = np.random.default_rng(_LANCZOS_SEED)
    v0 = rng.standard_normal(h_sym.shape[0])
    u_min = float(
        potential_energy(grid.phi_p[:, None], grid.phi_m[None, :], params).min()
    )
    try:
        vals, vecs = scipy.sparse.linalg.eigsh(
            h_sym, k=k, sigma=u_min - 1.0, which="LM", v0=v0, tol=0, maxiter=maxiter
        )
    except scipy.sparse.linalg.ArpackNoConvergence as exc:
        raise ConvergenceError(
            f"eigensolver did not converge: {len(exc.eigenvalues)} of {k} levels "
            f"after maxiter={maxiter} iterations"
        ) from exc
    order = np.argsort(vals)
    vals = vals[order]
    vecs = q @ vecs[:, order]

    span = max(float(vals[-1] - vals[0]), 1e-300)
    degenerate = bool(np.min(np.diff(vals[: min(k, 3)])) < 1e-9 * span)

    psi = (vecs / np.sqrt(grid.cell)).T.reshape(k, grid.n_p, grid.n_m)
    labels = tuple(["b", "c", "e"][:3] + [f"l{i}" for i in range(3, k)])
    return LevelData(energies=vals, wavefunctions=psi, labels=labels, degenerate=degenerate)


def transition_elements(levels: LevelData, params: FluxParams, grid: Grid2D) -> np.ndarray:
    """3x3 matrix t_ij = <i| dU/df |j> over the labeled (b, c, e) levels."""
    op = flux_coupling(grid.phi_p[:, None], grid.phi_m[None, :], params)
    t = np.empty((3, 3), dtype=complex)
    for i in range(3):
        for j in range(3):
            t[i, j] = np.sum(np.conj(levels.wavefunctions[i]) * op * levels.wavefunctions[j]) * grid.cell
    return t


def cyclic_product(t: np.ndarray) -> float:
    """|t_bc * t_ce * t_eb|: zero iff the Delta loop is broken."""
    return float(abs(t[0, 1] * t[1, 2] * t[2, 0]))


def parity_reflection(grid: Grid2D) -> np.ndarray:
    """Index permutation realizing (phi_p, phi_m) -> (-phi_p, -phi_m).

    Exact on the uniform grid because -(-pi + i h) = -pi + ((n - i) mod n) h
    modulo 2 pi.
    """
    ip = (-np.arange(grid.n_p)) % grid.n_p
    im = (-np.arange(grid.n_m)) % grid.n_m
    return (ip[:, None] * grid.n_m + im[None, :]).ravel()
