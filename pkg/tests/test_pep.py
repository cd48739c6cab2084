import numpy as np
import pytest

from pepqm import (
    BranchConfig,
    ContractViolationError,
    Dispersion,
    EnergySign,
    MomentumGrid,
    MomentumHalfLine,
    MomentumWavefunction,
    Regime,
    ResolutionError,
    arrival_amplitude,
    arrival_amplitude_via_time_basis,
    arrival_distribution,
    eigenstate_momentum_state,
    even_kernel_arrival_routes,
    gaussian_momentum_state,
    nonrel_arrival_amplitude,
)
from pepqm.dispersion import _momentum_modulus

BRANCH = BranchConfig(EnergySign.POSITIVE, MomentumHalfLine.NONNEGATIVE)


def standard_state(np_nodes=2048, sigma_p=0.25):
    grid = MomentumGrid(np.linspace(1e-3, 12.0, np_nodes), MomentumHalfLine.NONNEGATIVE)
    return gaussian_momentum_state(grid, 5.0, sigma_p)


def rel_l2(a, b, t):
    num = np.sqrt(np.trapezoid(np.abs(a - b) ** 2, t))
    den = np.sqrt(np.trapezoid(np.abs(a) ** 2, t))
    return num / den


class TestGridAndState:
    def test_grid_rejects_mixed_signs(self):
        with pytest.raises(ContractViolationError):
            MomentumGrid(np.linspace(-1.0, 1.0, 11), MomentumHalfLine.NONNEGATIVE)

    def test_grid_rejects_nonuniform(self):
        nodes = np.array([0.0, 1.0, 2.5, 3.0])
        with pytest.raises(ContractViolationError):
            MomentumGrid(nodes, MomentumHalfLine.NONNEGATIVE)

    def test_single_node_needs_spacing(self):
        with pytest.raises(ContractViolationError):
            MomentumGrid(np.array([2.0]), MomentumHalfLine.NONNEGATIVE)
        g = MomentumGrid(np.array([2.0]), MomentumHalfLine.NONNEGATIVE, spacing=0.5)
        assert g.spacing == 0.5

    def test_gaussian_state_normalized(self):
        state = standard_state()
        assert state.norm_sq() == pytest.approx(1.0, abs=1e-12)
        assert state.is_normalized
        assert state.has_boundary_decay

    def test_eigenstate_unit_discrete_norm(self):
        state = eigenstate_momentum_state(1.0, 0.25, MomentumHalfLine.NONNEGATIVE)
        assert state.norm_sq() == pytest.approx(1.0, rel=1e-15)

    def test_leaky_state_flagged(self):
        grid = MomentumGrid(np.linspace(1e-3, 5.5, 512), MomentumHalfLine.NONNEGATIVE)
        state = gaussian_momentum_state(grid, 5.0, 0.25)
        assert not state.has_boundary_decay


class TestArrivalAmplitude:
    def test_eigenstate_density_is_flat(self):
        state = eigenstate_momentum_state(1.0, 1.0, MomentumHalfLine.NONNEGATIVE)
        amp = arrival_amplitude(state, 0.0, 20.0, np.linspace(0, 10, 500),
                                Dispersion(1.0), BRANCH)
        dens = amp.density()
        assert np.max(np.abs(dens - dens.mean())) / dens.mean() < 1e-12

    def test_peak_at_group_arrival_time(self):
        state = standard_state()
        times = np.linspace(10.0, 30.0, 2000)
        amp = arrival_amplitude(state, 0.0, 20.0, times, Dispersion(1.0), BRANCH)
        expected = 20.0 * np.sqrt(26.0) / 5.0
        peak = times[np.argmax(amp.density())]
        assert abs(peak - expected) / expected < 0.02

    def test_peak_against_refined_quadrature(self):
        # brute force: same integral on a 4x finer momentum grid
        coarse = standard_state(1024)
        fine = standard_state(4096)
        times = np.linspace(18.0, 23.0, 400)
        a = arrival_amplitude(coarse, 0.0, 20.0, times, Dispersion(1.0), BRANCH)
        b = arrival_amplitude(fine, 0.0, 20.0, times, Dispersion(1.0), BRANCH)
        assert rel_l2(b.amplitudes, a.amplitudes, times) < 1e-10

    def test_coincident_points_real_for_real_state(self):
        state = standard_state()
        amp = arrival_amplitude(state, 0.0, 0.0, np.array([0.0]),
                                Dispersion(1.0), BRANCH)
        value = amp.amplitudes[0]
        assert abs(value.imag) < 1e-12
        grid = state.grid
        w = np.full(grid.size, grid.spacing)
        w[0] *= 0.5
        w[-1] *= 0.5
        direct = np.sum(w * _momentum_modulus(grid.nodes, Dispersion(1.0))
                        * state.amplitudes.real)
        assert value.real == pytest.approx(direct, rel=1e-13)

    def test_unitarity(self):
        state = standard_state(4096)
        times = np.linspace(10.0, 30.0, 2000)
        amp = arrival_amplitude(state, 0.0, 20.0, times, Dispersion(1.0), BRANCH)
        assert amp.total_mass() == pytest.approx(state.norm_sq(), rel=1e-3)

    def test_unitarity_improves_with_refinement(self):
        # the momentum quadrature is already converged far below the window
        # tail, so refinement shows up in the time-integral of the density
        state = standard_state()
        errs = []
        for nt in (150, 1500):
            times = np.linspace(10.0, 30.0, nt)
            amp = arrival_amplitude(state, 0.0, 20.0, times,
                                    Dispersion(1.0), BRANCH)
            errs.append(abs(amp.total_mass() - 1.0))
        assert errs[1] < errs[0]

    def test_half_line_mismatch(self):
        state = standard_state()
        wrong = BranchConfig(EnergySign.POSITIVE, MomentumHalfLine.NONPOSITIVE)
        with pytest.raises(ContractViolationError):
            arrival_amplitude(state, 0.0, 20.0, np.linspace(0, 10, 50),
                              Dispersion(1.0), wrong)

    def test_undersampled_times_rejected(self):
        state = standard_state()
        with pytest.raises(ResolutionError):
            arrival_amplitude(state, 0.0, 20.0, np.linspace(0.0, 100.0, 11),
                              Dispersion(1.0), BRANCH)

    def test_leaking_state_rejected(self):
        grid = MomentumGrid(np.linspace(1e-3, 5.5, 512), MomentumHalfLine.NONNEGATIVE)
        state = gaussian_momentum_state(grid, 5.0, 0.25)
        with pytest.raises(ResolutionError):
            arrival_amplitude(state, 0.0, 20.0, np.linspace(0, 10, 500),
                              Dispersion(1.0), BRANCH)


class TestInvariances:
    def test_shift_both_positions(self):
        state = standard_state()
        times = np.linspace(15.0, 25.0, 300)
        a = arrival_amplitude(state, 0.0, 20.0, times, Dispersion(1.0), BRANCH)
        b = arrival_amplitude(state, 3.0, 23.0, times, Dispersion(1.0), BRANCH)
        np.testing.assert_allclose(b.amplitudes, a.amplitudes, rtol=0, atol=1e-12)

    def test_detector_shift_equals_premultiplied_state(self):
        state = standard_state()
        times = np.linspace(15.0, 25.0, 300)
        delta = 0.7
        a = arrival_amplitude(state, 0.0, 20.0 + delta, times, Dispersion(1.0), BRANCH)
        pre = MomentumWavefunction(
            state.grid, state.amplitudes * np.exp(1j * state.grid.nodes * delta)
        )
        b = arrival_amplitude(pre, 0.0, 20.0, times, Dispersion(1.0), BRANCH)
        np.testing.assert_allclose(b.amplitudes, a.amplitudes, rtol=0, atol=1e-10)

    def test_branch_reflection(self):
        state = standard_state()
        times = np.linspace(15.0, 25.0, 300)
        a = arrival_amplitude(state, 0.0, 20.0, times, Dispersion(1.0), BRANCH)
        mirror_grid = MomentumGrid(-state.grid.nodes[::-1], MomentumHalfLine.NONPOSITIVE)
        mirror_state = MomentumWavefunction(mirror_grid, state.amplitudes[::-1])
        mirror_branch = BranchConfig(EnergySign.POSITIVE, MomentumHalfLine.NONPOSITIVE)
        b = arrival_amplitude(mirror_state, 0.0, -20.0, times, Dispersion(1.0),
                              mirror_branch)
        np.testing.assert_allclose(b.density(), a.density(), rtol=0, atol=1e-10)

    def test_energy_sign_flip_reverses_time(self):
        state = standard_state()
        times = np.linspace(15.0, 25.0, 300)
        a = arrival_amplitude(state, 0.0, 20.0, times, Dispersion(1.0), BRANCH)
        neg = BranchConfig(EnergySign.NEGATIVE, MomentumHalfLine.NONNEGATIVE)
        b = arrival_amplitude(state, 0.0, 20.0, -times[::-1], Dispersion(1.0), neg)
        np.testing.assert_allclose(b.amplitudes[::-1], a.amplitudes, rtol=0, atol=1e-12)
        # conjugate reversal additionally needs a coincident detector
        t0 = np.linspace(-5.0, 5.0, 201)
        fwd = arrival_amplitude(state, 0.0, 0.0, t0, Dispersion(1.0), BRANCH)
        rev = arrival_amplitude(state, 0.0, 0.0, t0, Dispersion(1.0), neg)
        np.testing.assert_allclose(rev.amplitudes, np.conj(fwd.amplitudes)[::-1][::-1],
                                   rtol=0, atol=1e-12)


class TestTimeBasisRoute:
    def test_agrees_with_direct_route(self):
        state = standard_state()
        times = np.linspace(10.0, 30.0, 800)
        a = arrival_amplitude(state, 0.0, 20.0, times, Dispersion(1.0), BRANCH)
        b = arrival_amplitude_via_time_basis(state, 0.0, 20.0, times,
                                             Dispersion(1.0), BRANCH)
        assert rel_l2(a.amplitudes, b.amplitudes, times) < 1e-8

    def test_agrees_on_negative_half_line(self):
        grid = MomentumGrid(np.linspace(-12.0, -1e-3, 2048), MomentumHalfLine.NONPOSITIVE)
        state = gaussian_momentum_state(grid, -5.0, 0.25)
        branch = BranchConfig(EnergySign.POSITIVE, MomentumHalfLine.NONPOSITIVE)
        times = np.linspace(10.0, 30.0, 800)
        a = arrival_amplitude(state, 0.0, -20.0, times, Dispersion(1.0), branch)
        b = arrival_amplitude_via_time_basis(state, 0.0, -20.0, times,
                                             Dispersion(1.0), branch)
        assert rel_l2(a.amplitudes, b.amplitudes, times) < 1e-8

    def test_eigenstate_identical(self):
        state = eigenstate_momentum_state(1.0, 1.0, MomentumHalfLine.NONNEGATIVE)
        times = np.linspace(0.0, 10.0, 200)
        a = arrival_amplitude(state, 0.0, 20.0, times, Dispersion(1.0), BRANCH)
        b = arrival_amplitude_via_time_basis(state, 0.0, 20.0, times,
                                             Dispersion(1.0), BRANCH)
        np.testing.assert_allclose(b.amplitudes, a.amplitudes, rtol=1e-12)

    def test_mixed_grid_refused(self):
        nodes = np.linspace(-6.0, 6.0, 121)
        with pytest.raises(ContractViolationError):
            MomentumGrid(nodes, MomentumHalfLine.NONNEGATIVE)


class TestQuadraticLimit:
    def test_classical_peak(self):
        state = standard_state(4096)
        times = np.linspace(0.0, 10.0, 2000)
        amp = nonrel_arrival_amplitude(state, 0.0, 20.0, times, 1.0)
        peak = times[np.argmax(amp.density())]
        assert abs(peak - 4.0) / 4.0 < 0.02

    def test_matches_relativistic_at_small_momentum(self):
        grid = MomentumGrid(np.linspace(1e-5, 0.025, 2048), MomentumHalfLine.NONNEGATIVE)
        state = gaussian_momentum_state(grid, 0.01, 0.0015)
        times = np.linspace(10.0, 30.0, 4000)
        rel = arrival_amplitude(state, 0.0, 0.2, times, Dispersion(1.0), BRANCH)
        quad = nonrel_arrival_amplitude(state, 0.0, 0.2, times, 1.0)
        peak_rel = times[np.argmax(rel.density())]
        peak_quad = times[np.argmax(quad.density())]
        assert abs(peak_rel - peak_quad) / peak_quad < 1e-3

    def test_eigenstate_flat(self):
        state = eigenstate_momentum_state(2.0, 1.0, MomentumHalfLine.NONNEGATIVE)
        amp = nonrel_arrival_amplitude(state, 0.0, 20.0, np.linspace(0, 10, 300), 1.0)
        dens = amp.density()
        assert np.max(np.abs(dens - dens.mean())) / dens.mean() < 1e-12


class TestArrivalDistribution:
    def test_zero_state(self):
        grid = MomentumGrid(np.linspace(1e-3, 12.0, 1024), MomentumHalfLine.NONNEGATIVE)
        state = MomentumWavefunction(grid, np.zeros(1024, dtype=complex))
        amp = arrival_amplitude(state, 0.0, 20.0, np.linspace(0, 10, 100),
                                Dispersion(1.0), BRANCH)
        times, dens, mass = arrival_distribution(amp)
        assert np.all(dens == 0.0) and mass == 0.0

    def test_mass_matches_momentum_norm(self):
        state = standard_state(4096)
        amp = arrival_amplitude(state, 0.0, 20.0, np.linspace(10, 30, 2000),
                                Dispersion(1.0), BRANCH)
        _, _, mass = arrival_distribution(amp)
        assert mass == pytest.approx(state.norm_sq(), rel=1e-3)


def mixed_packet(nodes, p0=5.0, sigma=0.25):
    amp = (np.exp(-((nodes - p0) ** 2) / (4 * sigma ** 2))
           + np.exp(-((nodes + p0) ** 2) / (4 * sigma ** 2))).astype(complex)
    return amp / np.sqrt(np.trapezoid(np.abs(amp) ** 2, nodes))


class TestEvenKernelRoutes:
    NODES = np.linspace(-12.0, 12.0, 4097)
    TIMES = np.linspace(0.0, 10.0, 800)

    def test_positive_support_consistent(self):
        amp = np.exp(-((self.NODES - 5.0) ** 2) / 0.25).astype(complex)
        amp /= np.sqrt(np.trapezoid(np.abs(amp) ** 2, self.NODES))
        _, _, disc = even_kernel_arrival_routes(
            self.NODES, amp, 0.0, 10.0, self.TIMES, Dispersion(1.0)
        )
        assert disc < 1e-6

    def test_coincident_positions_consistent(self):
        amp = mixed_packet(self.NODES)
        _, _, disc = even_kernel_arrival_routes(
            self.NODES, amp, 0.0, 0.0, self.TIMES, Dispersion(1.0)
        )
        assert disc < 1e-6

    def test_mixed_support_inconsistent(self):
        amp = mixed_packet(self.NODES)
        route_a, route_b, disc = even_kernel_arrival_routes(
            self.NODES, amp, 0.0, 10.0, self.TIMES, Dispersion(1.0)
        )
        assert disc > 0.1
        # the collapsed route rewrites the left-moving half as right-moving:
        # for this symmetric packet the halves add coherently, quadrupling
        # the detector-window mass of the direct route
        mass_a = np.trapezoid(np.abs(route_a.amplitudes) ** 2, self.TIMES)
        mass_b = np.trapezoid(np.abs(route_b.amplitudes) ** 2, self.TIMES)
        assert mass_b == pytest.approx(4.0 * mass_a, rel=0.05)

    def test_asymmetric_grid_refused(self):
        with pytest.raises(ContractViolationError):
            even_kernel_arrival_routes(
                np.linspace(-5.0, 6.0, 100), np.ones(100, complex), 0.0, 1.0,
                self.TIMES, Dispersion(1.0)
            )
