"""Conventional time evolution, used as an independent cross-check.

Free evolution is exact in the momentum representation: FFT, multiply by
exp(-i E_p dt) on the positive-energy branch, inverse FFT. No PDE stepper is
involved, so the only discretization concerns are the spatial grid's reach
(leakage through the periodic boundary is detected and refused) and its
momentum Nyquist range.

The probability current J = (1/m) Im(psi* dpsi/dx) is the standard
Schroedinger expression; for the relativistic dispersion the same formula is
used with the mass replaced by the energy at the packet's mean momentum,
a documented quasi-monochromatic approximation (an exact relativistic
current would need to commit to a specific wave equation).

``crosscheck_arrival_vs_current`` ties the two pictures together: for a
right-moving, narrow-band packet the normalized arrival-time density at the
detector and the normalized current trace through it should agree, and do so
increasingly well as the relative momentum spread shrinks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dispersion import (
    BranchConfig,
    Dispersion,
    EnergySign,
    MomentumHalfLine,
    Regime,
)
from .errors import ContractViolationError, DomainError, GridLeakageError
from .pep import MomentumWavefunction, arrival_amplitude

_SYNTH_CHUNK = 256


@dataclass(frozen=True)
class PositionWavefunction:
    """Complex amplitudes on a uniform position grid at one instant."""

    positions: np.ndarray
    amplitudes: np.ndarray
    timestamp: float = 0.0

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.positions, dtype=float)).copy()
        a = np.atleast_1d(np.asarray(self.amplitudes, dtype=complex)).copy()
        x.flags.writeable = False
        a.flags.writeable = False
        object.__setattr__(self, "positions", x)
        object.__setattr__(self, "amplitudes", a)
        if x.size != a.size:
            raise ContractViolationError("position and amplitude lengths differ")
        if x.size < 4:
            raise ContractViolationError("position grid too small")
        steps = np.diff(x)
        if np.any(steps <= 0.0):
            raise ContractViolationError("positions must be strictly ascending")
        step = float(np.mean(steps))
        tol = max(1e-12 * step, 8.0 * np.finfo(float).eps * np.max(np.abs(x)))
        if np.max(np.abs(steps - step)) > tol:
            raise ContractViolationError("position grid is not uniform")

    @property
    def spacing(self) -> float:
        return float(self.positions[1] - self.positions[0])

    def norm_sq(self) -> float:
        return float(np.trapezoid(np.abs(self.amplitudes) ** 2, self.positions))

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm_sq() - 1.0) <= 1e-6


def gaussian_position_state(positions, x0: float, sigma_x: float, p0: float,
                            timestamp: float = 0.0) -> PositionWavefunction:
    """Gaussian packet centered at x0 with carrier momentum p0, renormalized
    on the grid."""
    x = np.asarray(positions, dtype=float)
    amp = (2.0 * np.pi * sigma_x ** 2) ** (-0.25) * np.exp(
        -((x - x0) ** 2) / (4.0 * sigma_x ** 2) + 1j * p0 * x
    )
    state = PositionWavefunction(x, amp, timestamp)
    return PositionWavefunction(x, state.amplitudes / np.sqrt(state.norm_sq()),
                                timestamp)


def _fft_momenta(state: PositionWavefunction) -> np.ndarray:
    return 2.0 * np.pi * np.fft.fftfreq(state.positions.size, d=state.spacing)


def evolve_tep(state: PositionWavefunction, t2: float, disp: Dispersion,
               branch: BranchConfig) -> PositionWavefunction:
    """Free evolution of a position-space state from its timestamp to t2.

    Unitary phase multiplication in the momentum representation on the
    branch's energy sign; norm is preserved to round-off. Refuses to evolve
    backwards and refuses results whose density has reached the grid edge
    (the FFT wraps around, so leakage means aliasing, not absorption).
    """
    if t2 < state.timestamp - 1e-15:
        raise ContractViolationError("t2 must not precede the state's timestamp")
    dt = t2 - state.timestamp
    p = _fft_momenta(state)
    energies = np.asarray(disp.energy_of_momentum(p))
    phase = np.exp(-1j * branch.energy_sign.value * energies * dt)
    out = np.fft.ifft(np.fft.fft(state.amplitudes) * phase)
    dens = np.abs(out) ** 2
    edge = max(dens[0], dens[-1])
    if edge > 1e-6 * np.max(dens):
        raise GridLeakageError(
            f"packet density at the grid edge is {edge:.3g} "
            f"({edge / np.max(dens):.3g} of the peak); enlarge the grid"
        )
    return PositionWavefunction(state.positions, out, t2)


def _mean_momentum(state: PositionWavefunction) -> float:
    p = _fft_momenta(state)
    w = np.abs(np.fft.fft(state.amplitudes)) ** 2
    return float(np.sum(p * w) / np.sum(w))


def probability_current(state: PositionWavefunction, x: float,
                        disp: Dispersion) -> float:
    """Probability current at x via centered differences.

    J = (1/m_eff) Im(psi* dpsi/dx), with m_eff the mass for the quadratic
    dispersion and E at the packet's mean momentum for the relativistic one
    (quasi-monochromatic approximation). x must lie in the grid interior.
    """
    xs = state.positions
    if not (xs[1] <= x <= xs[-2]):
        raise DomainError("x outside the interior of the position grid")
    i = int(round((x - xs[0]) / state.spacing))
    i = min(max(i, 1), xs.size - 2)
    dpsi = (state.amplitudes[i + 1] - state.amplitudes[i - 1]) / (2.0 * state.spacing)
    if disp.regime is Regime.NONRELATIVISTIC:
        m_eff = disp.mass
    else:
        m_eff = float(disp.energy_of_momentum(abs(_mean_momentum(state))))
    return float(np.imag(np.conj(state.amplitudes[i]) * dpsi) / m_eff)


def synthesize_position_state(state: MomentumWavefunction, x1: float,
                              positions) -> PositionWavefunction:
    """Position-space packet at time 0 built from a momentum-space state
    prepared at x1: psi(x) = (1/sqrt(2 pi)) int dp phi(p) exp(i p (x - x1))."""
    x = np.asarray(positions, dtype=float)
    p = state.grid.nodes
    w = np.full(p.size, state.grid.spacing)
    if p.size > 1:
        w[0] *= 0.5
        w[-1] *= 0.5
    coef = w * state.amplitudes / np.sqrt(2.0 * np.pi)
    out = np.zeros(x.size, dtype=complex)
    for lo in range(0, x.size, _SYNTH_CHUNK):
        hi = min(lo + _SYNTH_CHUNK, x.size)
        out[lo:hi] = np.exp(1j * np.outer(x[lo:hi] - x1, p)) @ coef
    return PositionWavefunction(x, out, 0.0)


def _detector_grid(x_lo: float, x_hi: float, x2: float, n: int) -> np.ndarray:
    """Uniform grid covering [x_lo, x_hi] with x2 landing exactly on a node."""
    dx = (x_hi - x_lo) / (n - 1)
    shift = (x2 - x_lo) % dx
    return x_lo + shift - dx + dx * np.arange(n)


def crosscheck_arrival_vs_current(state: MomentumWavefunction, x1: float,
                                  x2: float, window, disp: Dispersion,
                                  grid_size: int = 4096):
    """L1 distance between the normalized arrival-time density and the
    normalized current trace at the detector.

    Requires a right-moving quasi-monochromatic state (momentum spread at
    most 10% of the mean); an eigenstate stand-in has a flat, non-normalizable
    arrival density and is refused. Returns (l1_distance, report) where the
    report carries the masses captured by the window and the packet summary.
    """
    if state.grid.size < 2:
        raise ContractViolationError(
            "cross-check needs a spread-out state; a single-node eigenstate "
            "has a flat arrival density with no normalizable window"
        )
    if state.grid.half_line is not MomentumHalfLine.NONNEGATIVE:
        raise ContractViolationError("cross-check expects a right-moving state")
    p0 = state.mean_momentum()
    sigma_p = state.momentum_spread()
    if p0 <= 0.0 or sigma_p / p0 > 0.1:
        raise ContractViolationError(
            f"state is not quasi-monochromatic: sigma_p/p0 = {sigma_p / p0:.3g}"
        )
    window = np.atleast_1d(np.asarray(window, dtype=float))
    branch = BranchConfig(EnergySign.POSITIVE, state.grid.half_line)

    arrival = arrival_amplitude(state, x1, x2, window, disp, branch)
    rho_arrival = arrival.density()
    mass_arrival = float(np.trapezoid(rho_arrival, window))

    # spatial grid: room for the initial packet, the flight, and spreading,
    # with the dispersion curvature setting the spreading rate
    sigma_x = 1.0 / (2.0 * sigma_p)
    t_end = float(window[-1])
    h = 1e-3 * max(p0, 1.0)
    curvature = float(
        (disp.group_velocity(p0 + h) - disp.group_velocity(p0 - h)) / (2.0 * h)
    )
    spread = sigma_x * np.sqrt(1.0 + (2.0 * sigma_p ** 2 * curvature * t_end) ** 2)
    pad = 12.0 * max(sigma_x, spread)
    v_max = float(disp.group_velocity(p0 + 6.0 * sigma_p))
    x_lo = min(x1, x2) - pad
    x_hi = max(x1, x2) + pad + max(0.0, v_max * t_end - (x2 - x1))
    xs = _detector_grid(x_lo, x_hi, x2, grid_size)
    psi0 = synthesize_position_state(state, x1, xs)

    current = np.empty(window.size)
    for k, t in enumerate(window):
        evolved = evolve_tep(psi0, float(t), disp, branch)
        current[k] = probability_current(evolved, x2, disp)
    mass_current = float(np.trapezoid(current, window))

    if mass_arrival <= 0.0 or mass_current <= 0.0:
        raise DomainError("window captures no probability flux")
    l1 = float(
        np.trapezoid(
            np.abs(rho_arrival / mass_arrival - current / mass_current), window
        )
    )
    report = {
        "l1_distance": l1,
        "mean_momentum": p0,
        "momentum_spread": sigma_p,
        "arrival_mass_in_window": mass_arrival,
        "current_mass_in_window": mass_current,
        "state_norm": state.norm_sq(),
        "times": window,
        "current": current,
        "arrival_density": rho_arrival,
    }
    return l1, report
