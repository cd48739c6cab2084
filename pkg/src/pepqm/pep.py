"""Arrival-time amplitudes: evolution with position as the parameter.

Given a momentum-space state phi1(p) prepared at a source position x1, the
detection-time amplitude at a detector position x2 is

    phi2(t) = (1/sqrt(2 pi)) * int dp sqrt(|p|/E_p)
              * exp(-i s E_p t + i p (x2 - x1)) * phi1(p)

with s the energy sign of the branch and the momentum integral running over
a single half-line. |phi2(t)|^2 is the arrival-time density. The integral is
evaluated by direct trapezoid quadrature on the state's grid, one output
time per row: the frequency map t <-> E_p(p) is nonuniform, so an FFT buys
nothing but aliasing headaches at this scale. O(N_t * N_p) is accepted.

Two alternative assemblies of the same amplitude live here as consistency
probes:

* ``arrival_amplitude_via_time_basis`` inserts a resolution over sharp
  detection times at the source. The intermediate time integral concentrates
  onto equal on-shell energies, which is collapsed analytically; the spatial
  phase momentum is then rebuilt from the energy through the declared
  half-line. On a single half-line this must reproduce the direct route to
  round-trip precision; on a mixed-sign grid the rebuild is ill-posed and is
  refused.
* ``even_kernel_arrival_routes`` runs the same two assemblies with the
  even-in-momentum kernel on the full line, where the energy no longer
  determines the momentum sign. The collapsed route keeps the positive
  dispersion root, and the two routes genuinely disagree whenever the state
  mixes momentum signs and the detector is displaced from the source.

Set the environment variable TOA_THREADS to allow chunk-parallel evaluation
over output times; 0 or unset keeps the serial reproducibility default.
Chunks are concatenated in time order, so results are identical either way.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dispersion import (
    BranchConfig,
    Dispersion,
    EnergySign,
    MomentumHalfLine,
    Regime,
    _momentum_modulus,
)
from .errors import ContractViolationError, ResolutionError

_TIME_CHUNK = 128


def _worker_count() -> int:
    raw = os.environ.get("TOA_THREADS", "0")
    try:
        return max(0, int(raw))
    except ValueError:
        return 0


@dataclass(frozen=True)
class MomentumGrid:
    """Uniform momentum grid confined to one half-line.

    ``spacing`` may be omitted for grids with at least two nodes; a single
    node (the delta-collocated eigenstate stand-in) must declare it.
    """

    nodes: np.ndarray
    half_line: MomentumHalfLine
    spacing: float | None = None

    def __post_init__(self):
        nodes = np.atleast_1d(np.asarray(self.nodes, dtype=float)).copy()
        nodes.flags.writeable = False
        object.__setattr__(self, "nodes", nodes)
        if nodes.size == 0:
            raise ContractViolationError("empty momentum grid")
        if nodes.size > 1:
            steps = np.diff(nodes)
            if np.any(steps <= 0.0):
                raise ContractViolationError("grid nodes must be strictly ascending")
            step = float(np.mean(steps))
            tol = max(1e-12 * step, 8.0 * np.finfo(float).eps * np.max(np.abs(nodes)))
            if np.max(np.abs(steps - step)) > tol:
                raise ContractViolationError("grid spacing is not uniform")
            object.__setattr__(self, "spacing", step)
        else:
            if self.spacing is None or self.spacing <= 0.0:
                raise ContractViolationError(
                    "a single-node grid must declare a positive spacing"
                )
        if self.half_line is MomentumHalfLine.NONNEGATIVE:
            if nodes[0] < -1e-15:
                raise ContractViolationError("negative node on a nonnegative grid")
        else:
            if nodes[-1] > 1e-15:
                raise ContractViolationError("positive node on a nonpositive grid")

    @property
    def size(self) -> int:
        return self.nodes.size


@dataclass(frozen=True)
class MomentumWavefunction:
    """Complex amplitudes on a momentum grid.

    Normalization and boundary decay are advisory flags, not hard errors:
    deliberately unnormalized inputs are allowed, and the single-node
    eigenstate stand-in has no boundary to decay at.
    """

    grid: MomentumGrid
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.atleast_1d(np.asarray(self.amplitudes, dtype=complex)).copy()
        amp.flags.writeable = False
        object.__setattr__(self, "amplitudes", amp)
        if amp.size != self.grid.size:
            raise ContractViolationError("amplitude and grid lengths differ")

    def norm_sq(self) -> float:
        """Trapezoid of |phi|^2 over the grid (spacing * |amp|^2 for one node)."""
        if self.grid.size == 1:
            return float(np.abs(self.amplitudes[0]) ** 2 * self.grid.spacing)
        return float(np.trapezoid(np.abs(self.amplitudes) ** 2, dx=self.grid.spacing))

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm_sq() - 1.0) <= 1e-6

    @property
    def has_boundary_decay(self) -> bool:
        """True when the amplitude at the large-|p| end is negligible."""
        if self.grid.size == 1:
            return True
        peak = float(np.max(np.abs(self.amplitudes)))
        if peak == 0.0:
            return True
        edge = -1 if self.grid.half_line is MomentumHalfLine.NONNEGATIVE else 0
        return bool(np.abs(self.amplitudes[edge]) < 1e-6 * peak)

    def mean_momentum(self) -> float:
        w = np.abs(self.amplitudes) ** 2
        return float(np.sum(self.grid.nodes * w) / np.sum(w))

    def momentum_spread(self) -> float:
        w = np.abs(self.amplitudes) ** 2
        mu = np.sum(self.grid.nodes * w) / np.sum(w)
        var = np.sum((self.grid.nodes - mu) ** 2 * w) / np.sum(w)
        return float(np.sqrt(var))


def gaussian_momentum_state(grid: MomentumGrid, p0: float,
                            sigma_p: float) -> MomentumWavefunction:
    """Minimum-uncertainty Gaussian, renormalized to exactly unit mass on the
    grid."""
    if sigma_p <= 0.0:
        raise ContractViolationError("sigma_p must be positive")
    amp = (2.0 * np.pi * sigma_p ** 2) ** (-0.25) * np.exp(
        -((grid.nodes - p0) ** 2) / (4.0 * sigma_p ** 2)
    )
    state = MomentumWavefunction(grid, amp.astype(complex))
    return MomentumWavefunction(grid, state.amplitudes / np.sqrt(state.norm_sq()))


def eigenstate_momentum_state(p_value: float, spacing: float,
                              half_line: MomentumHalfLine) -> MomentumWavefunction:
    """Delta-collocated momentum eigenstate: one node carrying 1/sqrt(spacing),
    the distributional stand-in with unit discrete norm."""
    grid = MomentumGrid(np.array([p_value]), half_line, spacing=spacing)
    return MomentumWavefunction(grid, np.array([1.0 / np.sqrt(spacing)], dtype=complex))


@dataclass(frozen=True)
class ArrivalAmplitude:
    """phi2 on a time grid at a fixed detector position.

    ``branch`` is None only for the even-kernel full-line routes, which have
    no single half-line to record.
    """

    detector_position: float
    source_position: float
    times: np.ndarray
    amplitudes: np.ndarray
    branch: BranchConfig | None

    def __post_init__(self):
        times = np.atleast_1d(np.asarray(self.times, dtype=float)).copy()
        amp = np.atleast_1d(np.asarray(self.amplitudes, dtype=complex)).copy()
        times.flags.writeable = False
        amp.flags.writeable = False
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "amplitudes", amp)
        if times.size != amp.size:
            raise ContractViolationError("time and amplitude lengths differ")
        if times.size > 1 and np.any(np.diff(times) <= 0.0):
            raise ContractViolationError("times must be strictly ascending")

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def total_mass(self) -> float:
        if self.times.size == 1:
            return float(self.density()[0])
        return float(np.trapezoid(self.density(), self.times))


def arrival_distribution(a: ArrivalAmplitude):
    """(times, |phi2|^2, trapezoid mass) for a computed amplitude."""
    return a.times, a.density(), a.total_mass()


def _trap_weights(grid: MomentumGrid) -> np.ndarray:
    w = np.full(grid.size, grid.spacing)
    if grid.size > 1:
        w[0] *= 0.5
        w[-1] *= 0.5
    return w


def _require_resolved(state: MomentumWavefunction, x1: float, x2: float,
                      times: np.ndarray, disp: Dispersion) -> None:
    # phase rates are judged on the state's effective support: nodes with
    # zero amplitude contribute nothing however fast their phase turns
    peak = float(np.max(np.abs(state.amplitudes)))
    if peak == 0.0:
        return
    live = np.abs(state.amplitudes) > 1e-12 * peak
    p = state.grid.nodes[live]
    e_max = float(np.max(disp.energy_of_momentum(np.abs(p))))
    t_abs = float(np.max(np.abs(times)))
    if times.size > 1:
        dt = float(np.max(np.diff(times)))
        if dt * e_max > np.pi:
            raise ResolutionError(
                f"time step {dt:.3g} undersamples the fastest phase "
                f"E_max = {e_max:.3g} (dt * E_max > pi)"
            )
    if state.grid.size > 1:
        v_max = float(np.max(np.abs(disp.group_velocity(p))))
        rate = abs(x2 - x1) + t_abs * v_max
        if state.grid.spacing * rate > np.pi:
            raise ResolutionError(
                f"momentum spacing {state.grid.spacing:.3g} undersamples the "
                f"quadrature phase (spacing * (|x2-x1| + t_max v_max) > pi)"
            )
        if not state.has_boundary_decay:
            raise ResolutionError(
                "state amplitude has not decayed at the large-|p| grid edge; "
                "widen the momentum window"
            )


def _phase_reduce(times: np.ndarray, energies: np.ndarray, base: np.ndarray,
                  sign: int) -> np.ndarray:
    """sum_p base_p * exp(-i * sign * E_p * t) for every t, chunked over t."""

    def one_chunk(chunk: np.ndarray) -> np.ndarray:
        return np.exp(-1j * sign * np.outer(chunk, energies)) @ base

    chunks = [times[i:i + _TIME_CHUNK] for i in range(0, times.size, _TIME_CHUNK)]
    workers = _worker_count()
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one_chunk, chunks))
    else:
        parts = [one_chunk(c) for c in chunks]
    return np.concatenate(parts) if len(parts) > 1 else parts[0]


def arrival_amplitude(state: MomentumWavefunction, x1: float, x2: float,
                      times, disp: Dispersion,
                      branch: BranchConfig) -> ArrivalAmplitude:
    """Direct assembly of the detection-time amplitude at x2.

    Trapezoid over the state's momentum grid per output time; deterministic
    for a fixed grid. Raises ContractViolationError when the state's
    half-line disagrees with the branch and ResolutionError when either grid
    undersamples the quadrature phases.
    """
    if state.grid.half_line is not branch.momentum_half_line:
        raise ContractViolationError(
            "state half-line does not match the branch momentum half-line"
        )
    branch.require_momentum(state.grid.nodes)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    _require_resolved(state, x1, x2, times, disp)

    p = state.grid.nodes
    base = (
        _trap_weights(state.grid)
        * _momentum_modulus(p, disp)
        * np.exp(1j * p * (x2 - x1))
        * state.amplitudes
    )
    energies = np.asarray(disp.energy_of_momentum(p))
    amp = _phase_reduce(times, energies, base, branch.energy_sign.value)
    return ArrivalAmplitude(x2, x1, times, amp, branch)


def arrival_amplitude_via_time_basis(state: MomentumWavefunction, x1: float,
                                     x2: float, times, disp: Dispersion,
                                     branch: BranchConfig) -> ArrivalAmplitude:
    """Detection-time amplitude assembled through sharp times at the source.

    The intermediate integral over the source time concentrates onto equal
    on-shell energies; that delta is collapsed analytically (the substitution
    dE = (p/E_p) dp makes the collapse exact), after which the spatial phase
    momentum is no longer the integration variable but is rebuilt from the
    energy: p -> sigma * p_E(E_p(p)) on the declared half-line sigma. On a
    single half-line the rebuild is the identity up to floating-point
    round-trip and the result must match :func:`arrival_amplitude`; a grid
    mixing momentum signs leaves the rebuilt sign ambiguous and is refused.
    """
    if state.grid.half_line is not branch.momentum_half_line:
        raise ContractViolationError(
            "state half-line does not match the branch momentum half-line"
        )
    branch.require_momentum(state.grid.nodes)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    _require_resolved(state, x1, x2, times, disp)

    p = state.grid.nodes
    sigma = branch.momentum_half_line.value
    energies = np.asarray(disp.energy_of_momentum(p))
    p_rebuilt = sigma * np.asarray(disp.momentum_of_energy(energies))
    base = (
        _trap_weights(state.grid)
        * _momentum_modulus(p, disp)
        * np.exp(1j * p_rebuilt * (x2 - x1))
        * state.amplitudes
    )
    amp = _phase_reduce(times, energies, base, branch.energy_sign.value)
    return ArrivalAmplitude(x2, x1, times, amp, branch)


def nonrel_arrival_amplitude(state: MomentumWavefunction, x1: float, x2: float,
                             times, mass: float) -> ArrivalAmplitude:
    """Arrival amplitude in the quadratic limit: modulus sqrt(|p|/m), phase
    from the kinetic energy p^2/2m. Positive-energy branch on the state's own
    half-line."""
    disp = Dispersion(mass, Regime.NONRELATIVISTIC)
    branch = BranchConfig(EnergySign.POSITIVE, state.grid.half_line)
    return arrival_amplitude(state, x1, x2, times, disp, branch)


def even_kernel_arrival_routes(nodes, amplitudes, x1: float, x2: float, times,
                               disp: Dispersion,
                               energy_sign: EnergySign = EnergySign.POSITIVE):
    """Direct versus collapsed arrival routes with the even kernel on a
    symmetric full-line grid.

    Route A keeps the actual spatial phase exp(i p (x2 - x1)). Route B
    collapses the intermediate equal-energy delta and rebuilds the momentum
    from the energy, which on the full line can only pick one dispersion
    root; the positive root is kept, so exp(i p d) degrades to
    exp(i |p| d). The two routes coincide exactly when x2 == x1 or when the
    state is supported on positive momenta only, and disagree otherwise;
    the returned relative L2 discrepancy quantifies it.
    """
    p = np.atleast_1d(np.asarray(nodes, dtype=float))
    amp_in = np.atleast_1d(np.asarray(amplitudes, dtype=complex))
    if p.size != amp_in.size:
        raise ContractViolationError("node and amplitude lengths differ")
    if p.size < 2:
        raise ContractViolationError("full-line routes need a multi-node grid")
    steps = np.diff(p)
    if np.any(steps <= 0.0):
        raise ContractViolationError("grid nodes must be strictly ascending")
    step = float(np.mean(steps))
    tol = max(1e-12 * step, 8.0 * np.finfo(float).eps * np.max(np.abs(p)))
    if np.max(np.abs(steps - step)) > tol:
        raise ContractViolationError("grid spacing is not uniform")
    if np.max(np.abs(p + p[::-1])) > 1e-9 * np.max(np.abs(p)):
        raise ContractViolationError("grid must be symmetric about p = 0")
    times = np.atleast_1d(np.asarray(times, dtype=float))

    d = x2 - x1
    abs_p = np.abs(p)
    energies = np.asarray(disp.energy_of_momentum(abs_p))
    den = 2.0 * np.asarray(disp.weight_energy(p), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        mod = np.sqrt(abs_p / den) / np.sqrt(2.0 * np.pi)
    mod = np.where(p == 0.0, 0.0, mod)
    w = np.full(p.size, step)
    w[0] *= 0.5
    w[-1] *= 0.5

    p_root = np.asarray(disp.momentum_of_energy(energies))
    base_direct = w * mod * np.exp(1j * p * d) * amp_in
    base_collapsed = w * mod * np.exp(1j * p_root * d) * amp_in

    sign = energy_sign.value
    amp_a = _phase_reduce(times, energies, base_direct, sign)
    amp_b = _phase_reduce(times, energies, base_collapsed, sign)
    route_a = ArrivalAmplitude(x2, x1, times, amp_a, None)
    route_b = ArrivalAmplitude(x2, x1, times, amp_b, None)

    if times.size > 1:
        scale = np.sqrt(np.trapezoid(np.abs(amp_a) ** 2, times))
        gap = np.sqrt(np.trapezoid(np.abs(amp_a - amp_b) ** 2, times))
    else:
        scale = np.abs(amp_a[0])
        gap = np.abs(amp_a[0] - amp_b[0])
    discrepancy = 0.0 if scale == 0.0 else float(gap / scale)
    return route_a, route_b, discrepancy
