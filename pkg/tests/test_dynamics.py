import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from delta_atom.errors import SingularParameterWarning, TruncationError, ValidationError
from delta_atom.dynamics import (
    Trajectory,
    branch_amplitudes,
    cat_evolution,
    cat_state_vector,
    evolve_and_compare,
    fock_overlap_y,
    generation_rate,
    generation_rate_simple_prefactor,
    minus_branch_photon_number,
    overlap_y,
    photon_number,
)
from delta_atom.hamiltonians import (
    ModelParams,
    dressed_params,
    dressed_params_from_theta,
    dressed_rotation,
    effective_hamiltonians,
)
from delta_atom.numkernel import B, HilbertSpace, propagate

FIG5 = dict(delta_e=3.0, g=0.8, G=0.9, lam=1.0)


def fig5_dressed(theta):
    return dressed_params_from_theta(theta, **FIG5)


def make_params(delta_e=3.0, delta_c=0.0, g=0.8, G=0.9, lam=1.0):
    return ModelParams.from_detunings(delta_e, delta_c, g, G, lam)


def cat_point():
    """theta = pi/2 with the minimal elimination gap ten couplings wide."""
    g, G, lam = 0.8, 0.4, 1.0
    delta_e = lam + 10.0 * g / math.sqrt(2.0)
    return make_params(delta_e=delta_e, delta_c=0.0, g=g, G=G, lam=lam)


class TestCatEvolution:
    def test_initial_vacuum_branches(self):
        cs = cat_evolution(fig5_dressed(math.pi / 2), 0.0)
        assert cs.alpha_plus == 0.0
        assert cs.alpha_minus == 0.0
        assert cs.weight_plus**2 + cs.weight_minus**2 == pytest.approx(1.0)

    def test_maximal_minus_displacement(self):
        dp = fig5_dressed(math.pi / 2)
        cs = cat_evolution(dp, math.pi / dp.omega_b)
        assert abs(cs.alpha_minus) == pytest.approx(2.0 * dp.zeta, rel=1e-12)

    def test_phases_unimodular(self):
        dp = fig5_dressed(math.pi / 3)
        for t in (0.0, 0.7, 13.2):
            cs = cat_evolution(dp, t)
            assert abs(abs(cs.phase_plus) - 1.0) < 1e-12
            assert abs(abs(cs.phase_minus) - 1.0) < 1e-12

    def test_matches_effective_propagation(self):
        # the assembled analytic state must coincide with exact propagation
        # under the block effective Hamiltonian from |b>|0>; this fixes the
        # branch phase factors unambiguously
        space = HilbertSpace(64)
        p = make_params(**FIG5)
        dp = dressed_params(p)
        eff = effective_hamiltonians(p, space)
        rot = np.kron(dressed_rotation(dp), np.eye(space.fock_dim))
        psi0 = space.basis_state(B, 0)
        times = np.linspace(0.3, 2.0 * np.pi / dp.omega_b, 7)
        states = propagate(eff.h_bc_rwa + eff.h_e, rot.conj().T @ psi0, times) @ rot.T
        for t, state in zip(times, states):
            cat = cat_state_vector(dp, t, space)
            assert abs(np.vdot(cat, state)) >= 1.0 - 1e-8

    def test_singular_displacement_rejected(self):
        with pytest.warns(SingularParameterWarning):
            dp = dressed_params(make_params(delta_c=1.0, lam=0.0))
        with pytest.raises(ValidationError):
            cat_evolution(dp, 1.0)


class TestOverlapY:
    def test_zero_at_start(self):
        for theta in (math.pi / 2, math.pi / 3, math.pi / 4):
            assert overlap_y(fig5_dressed(theta), 0.0) == 0.0

    def test_matches_branch_amplitude_distance(self):
        # closed form equals |alpha_+ - alpha_-|^2 / 2
        dp = fig5_dressed(math.pi / 3)
        ts = np.linspace(0.0, 300.0, 500)
        a_plus, a_minus = branch_amplitudes(dp, ts)
        direct = np.abs(a_plus - a_minus) ** 2 / 2.0
        assert np.max(np.abs(overlap_y(dp, ts) - direct)) < 1e-12

    def test_fock_inner_product_oracle(self):
        # 200 samples over one slow period at truncation 64
        dp = fig5_dressed(math.pi / 2)
        ts = np.linspace(0.0, 2.0 * np.pi / dp.omega_b, 200)
        y_closed = overlap_y(dp, ts)
        y_fock = fock_overlap_y(dp, ts, fock_dim=64)
        assert np.max(np.abs(y_closed - y_fock)) < 1e-8

    def test_fock_guard(self):
        dp = fig5_dressed(math.pi / 4)  # branch amplitude up to 2 zeta = 5.4
        ts = np.linspace(0.0, 2.0 * np.pi / dp.omega_b, 50)
        with pytest.raises(TruncationError):
            fock_overlap_y(dp, ts, fock_dim=32)

    @settings(max_examples=40, deadline=None)
    @given(
        st.floats(0.15, 3.0),
        st.floats(0.0, 500.0),
    )
    def test_nonnegative(self, theta, t):
        dp = dressed_params_from_theta(theta, 9.0, 0.8, 0.9, 1.0)
        assert overlap_y(dp, t) >= 0.0

    def test_periodic_for_rational_frequency_ratio(self):
        # theta = pi/2 gives omega_a / omega_b = delta_- / delta_+ = 2
        dp = fig5_dressed(math.pi / 2)
        assert dp.omega_a / dp.omega_b == pytest.approx(2.0, abs=1e-12)
        period = 2.0 * np.pi / dp.omega_b
        ts = np.linspace(0.0, period, 50)
        assert np.max(np.abs(overlap_y(dp, ts + period) - overlap_y(dp, ts))) < 1e-10

    def test_fig5_maxima_ordering_and_recurrence(self):
        dps = [fig5_dressed(t) for t in (math.pi / 2, math.pi / 3, math.pi / 4)]
        t_end = 2.0 * 2.0 * np.pi / min(dp.omega_b for dp in dps)
        ts = np.linspace(0.0, t_end, 2000)
        ys = [overlap_y(dp, ts) for dp in dps]
        maxima = [y.max() for y in ys]
        assert maxima[2] > maxima[1] > maxima[0]
        # slower branch frequency for smaller theta: longer period
        assert dps[2].omega_b < dps[1].omega_b < dps[0].omega_b
        for y in ys:
            tail = y[ts > t_end / 4.0]
            assert tail.min() <= 0.01 * y.max()


class TestPhotonGeneration:
    def test_starts_empty(self):
        assert photon_number(fig5_dressed(math.pi / 2), 0.0) == 0.0

    def test_peak_value(self):
        dp = fig5_dressed(math.pi / 2)
        assert photon_number(dp, np.pi / dp.omega_b) == pytest.approx(
            4.0 * dp.zeta**2, rel=1e-12
        )

    def test_exact_propagation_oracle(self):
        # the minus-branch Hamiltonian is exactly a driven oscillator, so
        # the closed form must match to truncation accuracy
        dp = dressed_params(make_params())
        assert dp.zeta <= 1.5
        ts = np.linspace(0.0, 2.0 * np.pi / dp.omega_b, 300)
        exact = minus_branch_photon_number(dp, 64, ts)
        assert np.max(np.abs(exact - photon_number(dp, ts))) < 1e-8

    def test_rate_zero_at_start_and_peak_location(self):
        dp = fig5_dressed(math.pi / 2)
        assert generation_rate(dp, 0.0) == 0.0
        t_peak = np.pi / (2.0 * dp.omega_b)
        assert generation_rate(dp, t_peak) == pytest.approx(
            2.0 * dp.zeta**2 * dp.omega_b, rel=1e-12
        )

    def test_rate_finite_difference_oracle(self):
        dp = dressed_params(make_params())
        ts = np.linspace(0.05, 2.0 * np.pi / dp.omega_b, 100)
        h = 1e-3
        fd = np.abs(photon_number(dp, ts + h) - photon_number(dp, ts - h)) / (2.0 * h)
        rate = generation_rate(dp, ts)
        assert np.max(np.abs(fd - rate)) <= 1e-6 * rate.max()

    def test_simple_prefactor_differs_unless_couplings_match(self):
        dp = dressed_params(make_params())  # G != g
        t = 0.3 * np.pi / dp.omega_b
        assert generation_rate_simple_prefactor(dp, t) != pytest.approx(
            float(generation_rate(dp, t)), rel=1e-3
        )
        dp_eq = dressed_params(make_params(g=0.8, G=0.8))
        t = 0.3 * np.pi / dp_eq.omega_b
        assert generation_rate_simple_prefactor(dp_eq, t) == pytest.approx(
            float(generation_rate(dp_eq, t)), rel=1e-12
        )

    def test_no_generation_without_symmetry_breaking(self):
        # lam = 0 removes the drive entirely
        with pytest.warns(SingularParameterWarning):
            dp = dressed_params(make_params(delta_c=1.0, lam=0.0))
        ts = np.linspace(0.0, 200.0, 50)
        assert np.max(photon_number(dp, ts)) <= 1e-10
        assert np.max(minus_branch_photon_number(dp, 16, ts)) <= 1e-10


class TestEvolveAndCompare:
    def test_no_coupling_agreement(self):
        space = HilbertSpace(8)
        p = make_params(delta_c=0.3, g=0.0, G=0.0)
        times = np.linspace(0.0, 30.0, 60)
        traj = evolve_and_compare(p, space, space.basis_state(B, 0), times)
        assert np.min(traj.observables["fidelity"]) >= 1.0 - 1e-10

    def test_cat_regime_fidelity_and_leakage(self):
        p = cat_point()
        dp = dressed_params(p)
        space = HilbertSpace(32)
        times = np.linspace(0.0, 2.0 * np.pi / min(dp.omega_a, dp.omega_b), 400)
        traj = evolve_and_compare(p, space, space.basis_state(B, 0), times)
        coupling = max(dp.g_theta, dp.G_theta)
        detuning = min(abs(dp.delta_plus), abs(dp.delta_minus))
        assert np.min(traj.observables["fidelity"]) >= 0.90
        assert np.max(traj.observables["pop_e"]) <= 4.0 * (coupling / detuning) ** 2
        assert np.max(np.abs(traj.observables["norm"] - 1.0)) <= 1e-10

    def test_branch_field_states_are_coherent(self):
        # conditioned on a dressed branch, the exact field state stays close
        # to the analytic coherent state, with the right branch weights
        p = cat_point()
        dp = dressed_params(p)
        space = HilbertSpace(32)
        n = space.fock_dim
        times = np.linspace(0.0, 2.0 * np.pi / min(dp.omega_a, dp.omega_b), 24)
        traj = evolve_and_compare(p, space, space.basis_state(B, 0), times)
        rot = np.kron(dressed_rotation(dp), np.eye(n))
        lower = np.diag(np.sqrt(np.arange(1, n)), k=1)
        for index in range(0, len(times), 6):
            dressed = rot.conj().T @ traj.states[index]
            cs = cat_evolution(dp, times[index])
            for slot, alpha, weight in (
                (0, cs.alpha_plus, dp.weight_plus),
                (1, cs.alpha_minus, dp.weight_minus),
            ):
                field = dressed[slot * n : (slot + 1) * n]
                weight_num = np.linalg.norm(field)
                assert abs(weight_num - weight) <= 0.02
                normalized = field / weight_num
                # coherence: fidelity to the best-fit coherent state, whose
                # amplitude is <a>; its magnitude must track the analytic
                # branch (the argument drifts at the second-order rate)
                alpha_fit = np.vdot(normalized, lower @ normalized)
                assert abs(abs(alpha_fit) - abs(alpha)) <= 0.1
                amps = np.exp(-abs(alpha_fit) ** 2 / 2) * np.array(
                    [alpha_fit**k / math.sqrt(math.factorial(k)) for k in range(n)]
                )
                target = amps / np.linalg.norm(amps)
                assert abs(np.vdot(target, normalized)) >= 0.99

    def test_truncation_guard(self):
        p = make_params()  # zeta = 1.125, peak photon number ~5
        space = HilbertSpace(16)
        dp = dressed_params(p)
        times = np.linspace(0.0, 2.0 * np.pi / dp.omega_b, 100)
        with pytest.raises(TruncationError):
            evolve_and_compare(p, space, space.basis_state(B, 0), times)

    def test_trajectory_time_ordering_enforced(self):
        with pytest.raises(ValidationError):
            Trajectory(
                times=np.array([0.0, 0.0, 1.0]),
                states=np.zeros((3, 4), dtype=complex),
                observables={},
            )
