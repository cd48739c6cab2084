import numpy as np
import pytest
from scipy.integrate import quad

from pepqm import (
    BranchConfig,
    Dispersion,
    DomainError,
    EnergySign,
    MomentumHalfLine,
    ResolutionError,
    SmearingTest,
    check_even_kernel_orthogonality,
    check_position_orthogonality,
    check_time_orthogonality,
    unrestricted_energy_control,
    unrestricted_momentum_control,
)

BRANCH = BranchConfig(EnergySign.POSITIVE, MomentumHalfLine.NONNEGATIVE)
LADDER = (5.0, 10.0, 20.0, 40.0)

# round-off floor for comparing errors that have converged to machine noise
FLOOR = 1e-12


def errors_of(report):
    return [e for _, e in report.cutoff_sequence]


def assert_converging(report, final_bound=1e-2):
    errs = errors_of(report)
    for lo, hi in zip(errs, errs[1:]):
        assert hi <= 1.05 * lo + FLOOR
    assert errs[-1] < final_bound
    assert errs[-1] <= errs[0] + FLOOR


class TestTimeCheck:
    def test_massless_ladder(self):
        report = check_time_orthogonality(
            Dispersion(0.0), BRANCH, SmearingTest(0.0, 1.0, LADDER)
        )
        assert_converging(report)
        # the first cutoff still misses spectral tail mass, the rest sit on
        # the quadrature floor
        errs = errors_of(report)
        assert errs[0] > 10 * errs[-1]

    def test_massive_wide_function(self):
        report = check_time_orthogonality(
            Dispersion(1.0), BRANCH, SmearingTest(0.0, 2.0, LADDER)
        )
        assert_converging(report)

    def test_control_does_not_converge(self):
        report = unrestricted_momentum_control(
            Dispersion(1.0), SmearingTest(0.0, 1.0, LADDER)
        )
        assert all(e > 0.5 for e in errors_of(report))

    def test_branch_independent(self):
        smear = SmearingTest(0.0, 1.0, (5.0, 10.0))
        d = Dispersion(1.0)
        reports = [
            check_time_orthogonality(d, BranchConfig(es, hl), smear)
            for es in EnergySign for hl in MomentumHalfLine
        ]
        base = errors_of(reports[0])
        for r in reports[1:]:
            np.testing.assert_allclose(errors_of(r), base, rtol=0, atol=1e-12)

    def test_translation_invariance(self):
        d = Dispersion(1.0)
        e0 = errors_of(check_time_orthogonality(d, BRANCH, SmearingTest(0.0, 1.0, LADDER)))
        e1 = errors_of(check_time_orthogonality(d, BRANCH, SmearingTest(3.7, 1.0, LADDER)))
        np.testing.assert_allclose(e1, e0, rtol=0, atol=1e-10)

    def test_flip_symmetry(self):
        # flipping the energy sign together with mirroring the test function
        # center reproduces the report
        d = Dispersion(1.0)
        a = check_time_orthogonality(
            d, BranchConfig(EnergySign.POSITIVE, MomentumHalfLine.NONNEGATIVE),
            SmearingTest(2.0, 1.0, LADDER))
        b = check_time_orthogonality(
            d, BranchConfig(EnergySign.NEGATIVE, MomentumHalfLine.NONNEGATIVE),
            SmearingTest(-2.0, 1.0, LADDER))
        np.testing.assert_allclose(errors_of(a), errors_of(b), rtol=0, atol=1e-12)


class TestPositionCheck:
    def test_massless_ladder(self):
        report = check_position_orthogonality(
            Dispersion(0.0), BRANCH, SmearingTest(0.0, 1.0, LADDER)
        )
        assert_converging(report)

    def test_massive_ladder(self):
        report = check_position_orthogonality(
            Dispersion(1.0), BRANCH, SmearingTest(0.0, 1.0, LADDER)
        )
        assert_converging(report)

    def test_control_does_not_converge(self):
        report = unrestricted_energy_control(
            Dispersion(1.0), SmearingTest(0.0, 1.0, LADDER)
        )
        assert all(e > 0.5 for e in errors_of(report))

    def test_cutoff_below_threshold_rejected(self):
        with pytest.raises(DomainError):
            check_position_orthogonality(
                Dispersion(1.0), BRANCH, SmearingTest(0.0, 1.0, (0.5, 40.0))
            )


class TestEvenKernelCheck:
    def test_massive_ladder(self):
        report = check_even_kernel_orthogonality(
            Dispersion(1.0), SmearingTest(0.0, 1.0, LADDER)
        )
        assert_converging(report)

    def test_massless_wide(self):
        report = check_even_kernel_orthogonality(
            Dispersion(0.0), SmearingTest(0.0, 2.0, LADDER)
        )
        assert_converging(report)

    def test_matches_restricted_kernel(self):
        # the |p|/2E_p weight over the whole line carries the same spectral
        # measure as one half-line of the restricted kernel
        d = Dispersion(1.0)
        smear = SmearingTest(0.0, 1.0, (5.0, 20.0))
        even = errors_of(check_even_kernel_orthogonality(d, smear))
        restricted = errors_of(check_time_orthogonality(d, BRANCH, smear))
        np.testing.assert_allclose(even, restricted, rtol=1e-12, atol=1e-15)

    def test_degenerate_width_rejected(self):
        with pytest.raises(ResolutionError):
            check_even_kernel_orthogonality(
                Dispersion(1.0), SmearingTest(0.0, 0.01, LADDER)
            )


class TestGuards:
    def test_coarse_resolution_rejected(self):
        with pytest.raises(ResolutionError):
            check_time_orthogonality(
                Dispersion(1.0), BRANCH, SmearingTest(0.0, 1.0, LADDER, resolution=16)
            )

    def test_bad_width_rejected(self):
        with pytest.raises(DomainError):
            SmearingTest(0.0, -1.0, LADDER)

    def test_bad_cutoffs_rejected(self):
        with pytest.raises(DomainError):
            SmearingTest(0.0, 1.0, ())
        with pytest.raises(DomainError):
            SmearingTest(0.0, 1.0, (-1.0, 2.0))

    def test_report_record_shape(self):
        report = check_time_orthogonality(
            Dispersion(0.0), BRANCH, SmearingTest(0.0, 1.0, (5.0, 10.0))
        )
        rec = report.to_record()
        assert rec["check"] == "time"
        assert rec["cutoffs"] == [5.0, 10.0]
        assert len(rec["errors"]) == 2
        assert report.reproduction_error == rec["errors"][-1]


class TestAgainstQuadrature:
    """The production path is fixed-order trapezoid; an adaptive quadrature
    of the same truncated-kernel convolution is the independent reference."""

    @pytest.mark.parametrize("mass,cutoff", [(0.0, 5.0), (1.0, 5.0), (1.0, 12.0)])
    def test_reconstruction_matches_adaptive_quadrature(self, mass, cutoff):
        width, center = 1.0, 0.4
        d = Dispersion(mass)
        band = d.kinetic_energy_of_momentum(cutoff)

        def g_exact(t):
            val, _ = quad(
                lambda u: np.exp(-0.5 * (u * width) ** 2) * np.cos(u * (t - center)),
                0.0, band, limit=400,
            )
            return val * width * np.sqrt(2.0 * np.pi) / np.pi

        # recompute the production reconstruction at a few probe times
        from pepqm.orthogonality import _band_pass, _trap_weights

        half = 8.0 * width
        dt = min(np.pi / (4.0 * band), width / 6.0)
        nt = int(np.ceil(2 * half / dt)) + 1
        t = np.linspace(center - half, center + half, nt)
        f = np.exp(-0.5 * ((t - center) / width) ** 2)
        wt = _trap_weights(nt, t[1] - t[0])
        nu = 4096
        u = np.linspace(0.0, band, nu + 1)
        wu = _trap_weights(nu + 1, u[1] - u[0])
        g = _band_pass(t, f * wt, u, wu)

        probes = np.linspace(center - 2.5, center + 2.5, 9)
        for tp in probes:
            i = int(np.argmin(np.abs(t - tp)))
            assert g[i] == pytest.approx(g_exact(t[i]), abs=5e-8)
