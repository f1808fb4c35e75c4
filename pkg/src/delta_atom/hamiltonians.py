"""Model Hamiltonians of the cyclic three-level atom coupled to one quantized
mode and two classical drives, in three frames.

Lab frame (time dependent)::

    H(t) = w_e |e><e| + w_c |c><c| + w a^dag a
         + ( g |e><c| a + G e^{i W_e t} |b><e| + lam e^{i W_c t} |b><c| + h.c. )

Rotating frame (time independent once W_e - W_c = w)::

    H = D_c |c><c| + D_e |e><e| + ( g |e><c| a + G |e><b| + lam |b><c| + h.c. )

Dressed frame: the classically driven (b, c) subsystem is diagonalized by
the mixing angle theta = atan(2 lam / D_c), giving dressed states

    |+> = cos(theta/2)|c> + sin(theta/2)|b>,
    |-> = -sin(theta/2)|c> + cos(theta/2)|b>,

with energies eps_pm = D_c/2 +- omega', omega' = sqrt(lam^2 + D_c^2/4).
In that basis the coupling collects into displaced mode operators
A = a + xi and B = a - zeta,

    H0 = D_e |e><e| + eps_+ |+><+| + eps_- |-><-|,
    H1 = g(theta) A |e><+|  -  G(theta) B |e><-|  + h.c.,

with g(theta) = g cos(theta/2), G(theta) = g sin(theta/2),
xi = (G/g) tan(theta/2) and zeta = (G/g) cot(theta/2).  Expanding the
rotating-frame couplings in the dressed basis gives exactly these
displacements; the change-of-basis identity is asserted in the tests.

Dressed-frame operators returned by this module use atom slot order
``(+, -, e)`` = ``(0, 1, 2)``; :func:`dressed_rotation` maps back to the
bare ``(b, c, e)`` order.
"""

from __future__ import annotations

import dataclasses
import math
import typing
import warnings

import numpy as np

from .errors import ResonanceError, SingularParameterWarning, ValidationError
from .numkernel import (
    B,
    C,
    E,
    HilbertSpace,
    atom_projector,
    boson_annihilation,
    embed,
    number_operator,
)

PLUS, MINUS, EXC = range(3)
DRESSED_LABELS = ("+", "-", "e")

_MATCH_RTOL = 1e-12


@dataclasses.dataclass(frozen=True)
class ModelParams:
    """Physical frequencies and couplings of the three-field model.

    All Rabi frequencies are real and non-negative; the frequency matching
    condition Omega_e - Omega_c = omega is enforced at construction because
    the rotating frame is only time independent when it holds.
    """

    omega_e: float
    omega_c: float
    omega: float
    Omega_e: float
    Omega_c: float
    g: float
    G: float
    lam: float

    def __post_init__(self):
        if not self.omega_e > self.omega_c > 0:
            raise ValidationError(
                f"need omega_e > omega_c > 0, got omega_e={self.omega_e}, omega_c={self.omega_c}"
            )
        if self.omega <= 0:
            raise ValidationError(f"mode frequency must be positive, got {self.omega}")
        for name in ("g", "G", "lam"):
            if getattr(self, name) < 0:
                raise ValidationError(f"Rabi frequency {name} must be non-negative")
        scale = max(abs(self.Omega_e), abs(self.Omega_c), abs(self.omega), 1.0)
        mismatch = self.Omega_e - self.Omega_c - self.omega
        if abs(mismatch) > _MATCH_RTOL * scale:
            raise ValidationError(
                f"frequency matching violated: Omega_e - Omega_c - omega = {mismatch:.3e} "
                "(the rotating frame would stay time dependent)"
            )

    @property
    def delta_e(self) -> float:
        return self.omega_e - self.Omega_e

    @property
    def delta_c(self) -> float:
        return self.omega_c - self.Omega_c

    @classmethod
    def from_detunings(
        cls,
        delta_e: float,
        delta_c: float,
        g: float,
        G: float,
        lam: float,
        omega: float = 10.0,
        Omega_c: float = 50.0,
    ) -> "ModelParams":
        """Build params from the detunings that the rotating frame depends on.

        The absolute frequencies drop out of every rotating-frame quantity;
        the defaults just need to keep omega_e > omega_c > 0.
        """
        Omega_e = Omega_c + omega
        return cls(
            omega_e=Omega_e + delta_e,
            omega_c=Omega_c + delta_c,
            omega=omega,
            Omega_e=Omega_e,
            Omega_c=Omega_c,
            g=g,
            G=G,
            lam=lam,
        )


@dataclasses.dataclass(frozen=True)
class DressedParams:
    """Derived quantities of the dressed frame.

    ``xi`` and ``zeta`` diverge in the limits theta -> pi or theta -> 0
    (e.g. lam = 0); the products that enter any Hamiltonian stay finite and
    are stored separately:

    * ``drive_e_plus  = g(theta) * xi   = G sin(theta/2)``
    * ``drive_e_minus = G(theta) * zeta = G cos(theta/2)``
    * ``drive_plus    = xi * omega_a``  (linear drive on the + branch)
    * ``drive_minus   = zeta * omega_b`` (linear drive on the - branch)
    """

    theta: float
    omega_prime: float
    eps_plus: float
    eps_minus: float
    delta_plus: float
    delta_minus: float
    g_theta: float
    G_theta: float
    xi: float
    zeta: float
    omega_a: float
    omega_b: float
    gamma_cross: float
    drive_e_plus: float
    drive_e_minus: float
    drive_plus: float
    drive_minus: float
    weight_plus: float
    weight_minus: float
    delta_e: float
    delta_c: float
    g: float
    G: float
    lam: float

    @property
    def displacements_finite(self) -> bool:
        return bool(np.isfinite(self.xi) and np.isfinite(self.zeta))


def _dressed(delta_e: float, delta_c: float, g: float, G: float, lam: float) -> DressedParams:
    if lam == 0.0 and delta_c == 0.0:
        raise ValidationError("mixing angle undefined: delta_c and lam are both zero")
    if min(g, G, lam) < 0:
        raise ValidationError("Rabi frequencies must be non-negative")

    theta = math.atan2(2.0 * lam, delta_c)  # in (0, pi) for lam > 0
    omega_prime = math.hypot(lam, delta_c / 2.0)
    eps_plus = delta_c / 2.0 + omega_prime
    eps_minus = delta_c / 2.0 - omega_prime

    half = theta / 2.0
    s, c = math.sin(half), math.cos(half)
    g_theta = g * c
    G_theta = g * s

    if G == 0.0:
        xi = zeta = 0.0
    elif g == 0.0:
        raise ValidationError(
            "displaced-frame parameters undefined: classical drive G nonzero "
            "but quantized coupling g is zero"
        )
    else:
        xi = (G / g) * s / c if c != 0.0 else math.inf
        zeta = (G / g) * c / s if s != 0.0 else math.inf

    delta_plus = delta_e - eps_plus
    delta_minus = delta_e - eps_minus
    scale = max(abs(delta_e), abs(delta_c), lam, 1.0)
    if min(abs(delta_plus), abs(delta_minus)) <= 1e-12 * scale:
        raise ResonanceError(
            f"dressed level resonant with |e>: delta_+ = {delta_plus:.3e}, "
            f"delta_- = {delta_minus:.3e}; adiabatic elimination invalid"
        )

    omega_a = g_theta**2 / delta_plus
    omega_b = G_theta**2 / delta_minus
    gamma_cross = g_theta * G_theta * (2.0 * delta_e - delta_c) / (2.0 * delta_plus * delta_minus)
    drive_e_plus = G * s
    drive_e_minus = G * c
    drive_plus = g_theta * drive_e_plus / delta_plus
    drive_minus = G_theta * drive_e_minus / delta_minus

    if not (np.isfinite(xi) and np.isfinite(zeta)) or max(abs(xi), abs(zeta)) > 1e12:
        warnings.warn(
            f"dressed displacement diverges at theta = {theta:.3e} "
            f"(xi = {xi:.3e}, zeta = {zeta:.3e}); displaced-operator forms are singular",
            SingularParameterWarning,
            stacklevel=3,
        )

    return DressedParams(
        theta=theta,
        omega_prime=omega_prime,
        eps_plus=eps_plus,
        eps_minus=eps_minus,
        delta_plus=delta_plus,
        delta_minus=delta_minus,
        g_theta=g_theta,
        G_theta=G_theta,
        xi=xi,
        zeta=zeta,
        omega_a=omega_a,
        omega_b=omega_b,
        gamma_cross=gamma_cross,
        drive_e_plus=drive_e_plus,
        drive_e_minus=drive_e_minus,
        drive_plus=drive_plus,
        drive_minus=drive_minus,
        weight_plus=s,
        weight_minus=c,
        delta_e=delta_e,
        delta_c=delta_c,
        g=g,
        G=G,
        lam=lam,
    )


def dressed_params(params: ModelParams) -> DressedParams:
    """All dressed-frame quantities derived from the model parameters."""
    return _dressed(params.delta_e, params.delta_c, params.g, params.G, params.lam)


def dressed_params_from_theta(
    theta: float, delta_e: float, g: float, G: float, lam: float = 1.0
) -> DressedParams:
    """Dressed parameters with the mixing angle given directly.

    Convenient for sweeps over theta: the corresponding detuning is
    delta_c = 2 lam / tan(theta).
    """
    if not 0.0 < theta < math.pi:
        raise ValidationError(f"theta must lie in (0, pi), got {theta}")
    delta_c = 2.0 * lam / math.tan(theta) if theta != math.pi / 2.0 else 0.0
    return _dressed(delta_e, delta_c, g, G, lam)


def frame_generator(params: ModelParams, space: HilbertSpace) -> np.ndarray:
    """K such that W(t) = exp(-i t K) defines the rotating frame."""
    atom = params.Omega_e * atom_projector(E) + params.Omega_c * atom_projector(C)
    ident = np.eye(space.fock_dim, dtype=complex)
    return embed(atom, ident, space) + embed(
        np.eye(3, dtype=complex), params.omega * number_operator(space.fock_dim), space
    )


def frame_unitary(params: ModelParams, space: HilbertSpace, t: float) -> np.ndarray:
    """W(t): diagonal, so the exponential is taken entrywise."""
    k = np.diag(frame_generator(params, space)).real
    return np.diag(np.exp(-1j * k * t))


def lab_hamiltonian(params: ModelParams, space: HilbertSpace, t: float) -> np.ndarray:
    """Time-dependent lab-frame Hamiltonian at time t."""
    a = boson_annihilation(space.fock_dim)
    ident = np.eye(space.fock_dim, dtype=complex)
    n_op = number_operator(space.fock_dim)

    h = embed(params.omega_e * atom_projector(E) + params.omega_c * atom_projector(C), ident, space)
    h += embed(np.eye(3, dtype=complex), params.omega * n_op, space)
    coupling = (
        params.g * embed(atom_projector(E, C), a, space)
        + params.G * np.exp(1j * params.Omega_e * t) * embed(atom_projector(B, E), ident, space)
        + params.lam * np.exp(1j * params.Omega_c * t) * embed(atom_projector(B, C), ident, space)
    )
    return h + coupling + coupling.conj().T


def rotating_hamiltonian(params: ModelParams, space: HilbertSpace) -> np.ndarray:
    """Time-independent Hamiltonian in the frame rotating with the drives."""
    scale = max(abs(params.Omega_e), abs(params.Omega_c), abs(params.omega), 1.0)
    if abs(params.Omega_e - params.Omega_c - params.omega) > _MATCH_RTOL * scale:
        raise ValidationError(
            "frequency matching violated; the rotating-frame Hamiltonian would be time dependent"
        )
    a = boson_annihilation(space.fock_dim)
    ident = np.eye(space.fock_dim, dtype=complex)
    h = embed(
        params.delta_e * atom_projector(E) + params.delta_c * atom_projector(C), ident, space
    )
    coupling = (
        params.g * embed(atom_projector(E, C), a, space)
        + params.G * embed(atom_projector(E, B), ident, space)
        + params.lam * embed(atom_projector(B, C), ident, space)
    )
    return h + coupling + coupling.conj().T


def dressed_rotation(dp: DressedParams) -> np.ndarray:
    """3x3 unitary whose columns are |+>, |->, |e> in the bare (b, c, e) basis."""
    s, c = dp.weight_plus, dp.weight_minus
    return np.array(
        [
            [s, c, 0.0],
            [c, -s, 0.0],
            [0.0, 0.0, 1.0],
        ],
        dtype=complex,
    )


def displaced_ops(dp: DressedParams, fock_dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Displaced mode operators A = a + xi and B = a - zeta (truncated)."""
    if not dp.displacements_finite:
        raise ValidationError("displacements xi/zeta are not finite for these parameters")
    a = boson_annihilation(fock_dim)
    ident = np.eye(fock_dim, dtype=complex)
    return a + dp.xi * ident, a - dp.zeta * ident


def dressed_hamiltonian(
    params: ModelParams, space: HilbertSpace
) -> tuple[np.ndarray, np.ndarray]:
    """(H0, H1) in the dressed atom basis, slot order (+, -, e).

    Built from the products g(theta)*A and G(theta)*B directly, which stay
    finite even where xi or zeta diverge (lam -> 0).
    """
    dp = dressed_params(params)
    a = boson_annihilation(space.fock_dim)
    ident = np.eye(space.fock_dim, dtype=complex)

    h0 = embed(
        dp.eps_plus * atom_projector(PLUS)
        + dp.eps_minus * atom_projector(MINUS)
        + dp.delta_e * atom_projector(EXC),
        ident,
        space,
    )
    # g(theta) A  and  -G(theta) B, without forming xi/zeta explicitly
    coupling_plus = dp.g_theta * a + dp.drive_e_plus * ident
    coupling_minus = -dp.G_theta * a + dp.drive_e_minus * ident
    h1 = embed(atom_projector(EXC, PLUS), coupling_plus, space)
    h1 += embed(atom_projector(EXC, MINUS), coupling_minus, space)
    h1 += h1.conj().T
    return h0, h1


class EffectiveOperators(typing.NamedTuple):
    """Second-order effective Hamiltonians after eliminating |e>.

    ``h_e``, ``h_bc`` and ``h_bc_rwa`` act on the full dressed space
    (slot order +, -, e); ``h_minus`` is the driven-oscillator Hamiltonian
    of the field alone, valid when the atom stays in |->.
    """

    h_e: np.ndarray
    h_bc: np.ndarray
    h_bc_rwa: np.ndarray
    h_minus: np.ndarray


def minus_branch_hamiltonian(dp: DressedParams, fock_dim: int) -> np.ndarray:
    """Field-only driven oscillator governing the |-> branch.

    -omega_b a^dag a + f (a + a^dag) with the drive f = zeta * omega_b kept
    in product form so the lam -> 0 limit (f -> 0, free evolution) is exact.
    """
    a = boson_annihilation(fock_dim)
    n_op = number_operator(fock_dim)
    return -dp.omega_b * n_op + dp.drive_minus * (a + a.conj().T)


def effective_hamiltonians(params: ModelParams, space: HilbertSpace) -> EffectiveOperators:
    """Analytic effective operators; cross-checked against the generic engine.

    h_e     = (D_e + omega_a A A^dag + omega_b B B^dag) |e><e|
    h_bc    = (eps_+ - omega_a A^dag A)|+><+| + (eps_- - omega_b B^dag B)|-><-|
              + Gamma (A^dag B |+><-| + B^dag A |-><+|)
    h_bc_rwa: h_bc without the fast cross term.

    All displaced products are expanded into combinations that stay finite
    in the singular-displacement limits.
    """
    dp = dressed_params(params)
    n = space.fock_dim
    a = boson_annihilation(n)
    adag = a.conj().T
    ident = np.eye(n, dtype=complex)
    n_op = number_operator(n)
    aadag = a @ adag
    x_op = a + adag

    # omega_a A^dag A = omega_a n + drive_plus (a + a^dag) + drive_e_plus^2/delta_+
    stark_plus = dp.drive_e_plus**2 / dp.delta_plus
    stark_minus = dp.drive_e_minus**2 / dp.delta_minus
    wa_num = dp.omega_a * n_op + dp.drive_plus * x_op + stark_plus * ident
    wb_num = dp.omega_b * n_op - dp.drive_minus * x_op + stark_minus * ident
    wa_rev = dp.omega_a * aadag + dp.drive_plus * x_op + stark_plus * ident
    wb_rev = dp.omega_b * aadag - dp.drive_minus * x_op + stark_minus * ident

    h_e = embed(atom_projector(EXC), dp.delta_e * ident + wa_rev + wb_rev, space)

    # Gamma A^dag B = Gamma a^dag a - (Gamma zeta) a^dag + (Gamma xi) a - Gamma xi zeta
    k = (2.0 * dp.delta_e - dp.delta_c) / (2.0 * dp.delta_plus * dp.delta_minus)
    cross_field = (
        dp.g_theta * dp.G_theta * k * (adag @ a)
        - dp.g_theta * dp.drive_e_minus * k * adag
        + dp.G_theta * dp.drive_e_plus * k * a
        - dp.drive_e_plus * dp.drive_e_minus * k * ident
    )
    cross = embed(atom_projector(PLUS, MINUS), cross_field, space)
    cross += cross.conj().T

    h_bc_rwa = embed(atom_projector(PLUS), dp.eps_plus * ident - wa_num, space)
    h_bc_rwa += embed(atom_projector(MINUS), dp.eps_minus * ident - wb_num, space)
    h_bc = h_bc_rwa + cross

    return EffectiveOperators(
        h_e=h_e,
        h_bc=h_bc,
        h_bc_rwa=h_bc_rwa,
        h_minus=minus_branch_hamiltonian(dp, n),
    )
