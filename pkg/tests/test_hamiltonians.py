import math

import numpy as np
import pytest

from delta_atom.errors import ResonanceError, SingularParameterWarning, ValidationError
from delta_atom.hamiltonians import (
    EXC,
    MINUS,
    PLUS,
    ModelParams,
    displaced_ops,
    dressed_hamiltonian,
    dressed_params,
    dressed_params_from_theta,
    dressed_rotation,
    effective_hamiltonians,
    frame_generator,
    frame_unitary,
    lab_hamiltonian,
    minus_branch_hamiltonian,
    rotating_hamiltonian,
)
from delta_atom.numkernel import HilbertSpace, boson_annihilation, hermitian_eig

FIG5_POINT = dict(delta_e=3.0, delta_c=0.0, g=0.8, G=0.9, lam=1.0)


def make_params(delta_e=3.0, delta_c=0.0, g=0.8, G=0.9, lam=1.0):
    return ModelParams.from_detunings(delta_e, delta_c, g, G, lam)


class TestModelParams:
    def test_matching_enforced(self):
        with pytest.raises(ValidationError, match="matching"):
            ModelParams(
                omega_e=63.0, omega_c=50.0, omega=10.0, Omega_e=59.0, Omega_c=50.0,
                g=0.8, G=0.9, lam=1.0,
            )

    def test_detunings_roundtrip(self):
        p = make_params(3.2, 0.4)
        assert p.delta_e == pytest.approx(3.2, abs=1e-12)
        assert p.delta_c == pytest.approx(0.4, abs=1e-12)
        assert p.Omega_e - p.Omega_c - p.omega == 0.0

    def test_ordering_enforced(self):
        with pytest.raises(ValidationError):
            ModelParams(
                omega_e=40.0, omega_c=50.0, omega=10.0, Omega_e=60.0, Omega_c=50.0,
                g=0.8, G=0.9, lam=1.0,
            )

    def test_negative_rabi_rejected(self):
        with pytest.raises(ValidationError):
            make_params(g=-0.1)


class TestLabHamiltonian:
    def test_decoupled_diagonal(self):
        space = HilbertSpace(4)
        p = make_params(g=0.0, G=0.0, lam=0.0)
        h = lab_hamiltonian(p, space, t=0.4)
        assert np.max(np.abs(h - np.diag(np.diag(h)))) == 0.0
        n = np.arange(4)
        assert np.allclose(np.diag(h).real[:4], p.omega * n)
        assert np.allclose(np.diag(h).real[4:8], p.omega_c + p.omega * n)
        assert np.allclose(np.diag(h).real[8:], p.omega_e + p.omega * n)

    def test_hermitian_at_arbitrary_time(self):
        space = HilbertSpace(5)
        p = make_params()
        for t in (0.0, 0.173, 2.9):
            h = lab_hamiltonian(p, space, t)
            assert np.max(np.abs(h - h.conj().T)) <= 1e-12 * np.max(np.abs(h))

    def test_quantized_coupling_element(self):
        space = HilbertSpace(4)
        p = make_params()
        h = lab_hamiltonian(p, space, t=0.0)
        bra = space.basis_state(2, 0)  # |e,0>
        ket = space.basis_state(1, 1)  # |c,1>
        assert np.vdot(bra, h @ ket) == pytest.approx(p.g)


class TestRotatingHamiltonian:
    def test_frame_identity(self, rng):
        # W^dag H_lab W + i (dW/dt)^dag W must equal the rotating Hamiltonian,
        # with the derivative evaluated analytically: dW/dt = -i K W.
        space = HilbertSpace(6)
        p = make_params(3.0, 0.7)
        h_rot = rotating_hamiltonian(p, space)
        k = frame_generator(p, space)
        times = [0.0, 0.3 / p.omega, 1.7 / p.omega] + list(rng.uniform(0.0, 5.0, 5))
        for t in times:
            w = frame_unitary(p, space, t)
            dw_dt = -1j * k @ w
            check = w.conj().T @ lab_hamiltonian(p, space, t) @ w + 1j * dw_dt.conj().T @ w
            assert np.max(np.abs(check - h_rot)) <= 1e-10

    def test_zero_case(self):
        space = HilbertSpace(3)
        p = make_params(0.0, 0.0, g=0.0, G=0.0, lam=0.0)
        assert np.max(np.abs(rotating_hamiltonian(p, space))) == 0.0

    def test_classical_drive_element_every_sector(self):
        space = HilbertSpace(5)
        p = make_params()
        h = rotating_hamiltonian(p, space)
        for n in range(5):
            bra = space.basis_state(0, n)  # |b,n>
            ket = space.basis_state(1, n)  # |c,n>
            assert np.vdot(bra, h @ ket) == pytest.approx(p.lam)

    def test_matching_violation_rejected(self):
        space = HilbertSpace(3)
        p = make_params()
        object.__setattr__(p, "Omega_e", p.Omega_e + 0.5)  # corrupt a frozen copy
        with pytest.raises(ValidationError, match="matching"):
            rotating_hamiltonian(p, space)


class TestDressedParams:
    def test_reference_point(self):
        dp = dressed_params(make_params(**{k: FIG5_POINT[k] for k in FIG5_POINT}))
        assert dp.theta == pytest.approx(math.pi / 2)
        assert dp.omega_prime == pytest.approx(1.0)
        assert (dp.eps_plus, dp.eps_minus) == (pytest.approx(1.0), pytest.approx(-1.0))
        assert (dp.delta_plus, dp.delta_minus) == (pytest.approx(2.0), pytest.approx(4.0))
        assert dp.g_theta == pytest.approx(0.8 / math.sqrt(2))
        assert dp.G_theta == pytest.approx(0.8 / math.sqrt(2))
        assert dp.omega_a == pytest.approx(0.16)
        assert dp.omega_b == pytest.approx(0.08)
        assert dp.xi == pytest.approx(1.125)
        assert dp.zeta == pytest.approx(1.125)
        assert dp.gamma_cross == pytest.approx(0.12)

    def test_eigenvalue_characteristic_equation(self):
        for delta_c in (-1.3, 0.0, 0.6, 2.4):
            dp = dressed_params(make_params(delta_c=delta_c))
            for eps in (dp.eps_plus, dp.eps_minus):
                assert abs(eps**2 - delta_c * eps - dp.lam**2) <= 1e-12

    def test_eps_are_subsystem_eigenvalues(self):
        dp = dressed_params(make_params(delta_c=0.9, lam=0.7))
        h_s = np.array([[dp.delta_c, dp.lam], [dp.lam, 0.0]], dtype=complex)
        dec = hermitian_eig(h_s)
        assert abs(dec.eigenvalues[0] - dp.eps_minus) <= 1e-12
        assert abs(dec.eigenvalues[1] - dp.eps_plus) <= 1e-12

    def test_gap_identity_and_displacement_product(self):
        dp = dressed_params(make_params(delta_c=1.7, g=0.6, G=0.5))
        assert dp.eps_plus - dp.eps_minus == pytest.approx(2 * dp.omega_prime, abs=1e-14)
        assert dp.xi * dp.zeta == pytest.approx((dp.G / dp.g) ** 2, abs=1e-14)

    def test_zero_detuning_angle(self):
        dp = dressed_params(make_params(delta_c=0.0))
        assert dp.theta == math.pi / 2

    def test_singular_warning_at_zero_lam(self):
        with pytest.warns(SingularParameterWarning):
            dp = dressed_params(make_params(delta_c=1.0, lam=0.0))
        assert dp.theta == 0.0
        assert not dp.displacements_finite
        assert dp.drive_minus == 0.0

    def test_resonance_rejected(self):
        # delta_e equal to eps_+ makes the elimination denominators vanish
        with pytest.raises(ResonanceError):
            dressed_params(make_params(delta_e=1.0, delta_c=0.0, lam=1.0))

    def test_both_zero_rejected(self):
        with pytest.raises(ValidationError):
            dressed_params(make_params(delta_c=0.0, lam=0.0))


class TestDressedHamiltonian:
    def test_change_of_basis_identity(self):
        # rotating the dressed blocks back to the bare basis must reproduce
        # the rotating-frame Hamiltonian exactly; this pins the zeta = cot
        # convention (the arctan reading fails by O(1))
        space = HilbertSpace(12)
        for delta_c in (0.0, 0.7, -0.9):
            p = make_params(delta_c=delta_c)
            dp = dressed_params(p)
            h0, h1 = dressed_hamiltonian(p, space)
            rot = np.kron(dressed_rotation(dp), np.eye(space.fock_dim))
            assembled = rot @ (h0 + h1) @ rot.conj().T
            assert np.max(np.abs(assembled - rotating_hamiltonian(p, space))) <= 1e-10

    def test_no_classical_drive_limit(self):
        # G = 0 removes the displacements and leaves bare-mode couplings
        space = HilbertSpace(6)
        p = make_params(G=0.0, delta_c=0.5)
        dp = dressed_params(p)
        assert dp.xi == 0.0 and dp.zeta == 0.0
        _, h1 = dressed_hamiltonian(p, space)
        a = boson_annihilation(space.fock_dim)
        build = np.zeros_like(h1)
        e_plus = np.zeros((3, 3), dtype=complex)
        e_plus[EXC, PLUS] = 1.0
        e_minus = np.zeros((3, 3), dtype=complex)
        e_minus[EXC, MINUS] = 1.0
        build += np.kron(e_plus, dp.g_theta * a) + np.kron(e_minus, -dp.G_theta * a)
        build += build.conj().T
        assert np.max(np.abs(h1 - build)) <= 1e-14

    def test_plus_branch_coupling_element(self):
        space = HilbertSpace(5)
        p = make_params(delta_c=0.4)
        dp = dressed_params(p)
        _, h1 = dressed_hamiltonian(p, space)
        bra = np.zeros(space.total_dim)
        bra[EXC * space.fock_dim + 0] = 1.0  # |e,0> in dressed slots
        ket = np.zeros(space.total_dim)
        ket[PLUS * space.fock_dim + 1] = 1.0  # |+,1>
        assert np.vdot(bra, h1 @ ket) == pytest.approx(dp.g_theta)

    def test_frame_equivalence_of_spectra(self):
        space = HilbertSpace(10)
        p = make_params(delta_c=0.3)
        h0, h1 = dressed_hamiltonian(p, space)
        spec_dressed = np.linalg.eigvalsh(h0 + h1)
        spec_rot = np.linalg.eigvalsh(rotating_hamiltonian(p, space))
        assert np.max(np.abs(spec_dressed - spec_rot)) <= 1e-10

    def test_displacement_consistency(self):
        # A^dag A - a^dag a - xi (a + a^dag) - xi^2 vanishes identically
        dp = dressed_params(make_params(delta_c=0.5))
        a = boson_annihilation(9)
        big_a, big_b = displaced_ops(dp, 9)
        lhs = big_a.conj().T @ big_a - a.conj().T @ a - dp.xi * (a + a.conj().T)
        lhs -= dp.xi**2 * np.eye(9)
        assert np.max(np.abs(lhs)) <= 1e-13
        rhs = big_b.conj().T @ big_b - a.conj().T @ a + dp.zeta * (a + a.conj().T)
        rhs -= dp.zeta**2 * np.eye(9)
        assert np.max(np.abs(rhs)) <= 1e-13


class TestEffectiveHamiltonians:
    def test_rwa_block_structure(self):
        space = HilbertSpace(6)
        eff = effective_hamiltonians(make_params(delta_c=0.8), space)
        n = space.fock_dim
        # no +/- cross block and an empty |e> block in h_bc_rwa
        assert np.max(np.abs(eff.h_bc_rwa[PLUS * n : MINUS * n, MINUS * n : EXC * n])) == 0.0
        assert np.max(np.abs(eff.h_bc_rwa[EXC * n :, :])) == 0.0
        # the cross term is present in the full h_bc
        cross = eff.h_bc[PLUS * n : MINUS * n, MINUS * n : EXC * n]
        assert np.max(np.abs(cross)) > 0.0

    def test_displaced_number_spectrum(self):
        # the + branch spectrum is eps_+ - omega_a * (0, 1, 2, ...) up to
        # truncation error in the top corner
        space = HilbertSpace(64)
        p = make_params(delta_c=0.0)
        dp = dressed_params(p)
        eff = effective_hamiltonians(p, space)
        n = space.fock_dim
        block = eff.h_bc_rwa[PLUS * n : MINUS * n, PLUS * n : MINUS * n]
        vals = np.linalg.eigvalsh(block)
        integers = (dp.eps_plus - vals) / dp.omega_a
        lowest = np.sort(integers)[:8]
        assert np.max(np.abs(lowest - np.arange(8))) < 1e-6

    def test_minus_branch_drive_vanishes_without_symmetry_breaking(self):
        with pytest.warns(SingularParameterWarning):
            dp = dressed_params(make_params(delta_c=1.0, lam=0.0))
        h = minus_branch_hamiltonian(dp, 8)
        assert np.max(np.abs(h)) == 0.0  # free (zero-frequency) oscillator

    def test_effective_spectra_match_exact_at_large_detuning(self):
        # sorted branch eigenvalues of the rotating Hamiltonian vs h_bc_rwa,
        # elementwise within 10 (g sqrt(N))^3 / delta_min^2
        fock = 12
        space = HilbertSpace(fock)
        g, G, lam = 0.2, 0.22, 1.0
        g_theta = g / math.sqrt(2)
        delta_plus = 10.0 * g_theta * math.sqrt(fock)
        p = make_params(delta_e=1.0 + delta_plus, delta_c=0.0, g=g, G=G, lam=lam)
        dp = dressed_params(p)
        eff = effective_hamiltonians(p, space)
        exact = np.linalg.eigvalsh(rotating_hamiltonian(p, space))
        cutoff = dp.delta_e / 2.0
        exact_branches = exact[exact < cutoff]
        branch_block = eff.h_bc_rwa[: 2 * fock, : 2 * fock]
        approx = np.sort(np.linalg.eigvalsh(branch_block))
        assert exact_branches.shape == approx.shape
        coupling = max(dp.g_theta, dp.G_theta) * math.sqrt(fock)
        bound = 10.0 * coupling**3 / min(abs(dp.delta_plus), abs(dp.delta_minus)) ** 2
        assert np.max(np.abs(exact_branches - approx)) <= bound
