"""WKB tunneling probabilities from the imaginary part of the reduced action.

Inside a classically forbidden interval [a, b] the generalized momentum
p(x) = sqrt(2 m (E - V(x))) turns imaginary and the reduced action picks up

    Im W = int_a^b sqrt(2 m (V(x) - E)) dx,

giving the transmission estimate P = exp(-2 Im W) (hbar = 1). The prefactor
multiplying the exponential is not fixed by the stationary-path collapse and
is deliberately dropped: P is an order-of-magnitude estimator whose logarithm
tracks the exact result, not a calibrated transmission coefficient.

Turning points are located by bisection of V(x) - E; potentials with more
than one forbidden interval inside the bracket are rejected rather than
guessed at. The integrand vanishes like a square root at smooth turning
points, so the quadrature uses Gauss-Chebyshev (second kind) nodes, which
absorb that endpoint behavior exactly; a rectangular barrier has no smooth
turning points and is integrated in closed form instead.

An exact rectangular-barrier transmission coefficient is included purely as
an oracle for the WKB exponent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    AmbiguousBarrierError,
    ContractViolationError,
    DomainError,
    NoTunnelingError,
)

_BRACKET_SAMPLES = 2048
_BISECT_STEPS = 200


@dataclass(frozen=True)
class RectangularBarrier:
    """V = v0 on [left, left + width], zero elsewhere."""

    v0: float
    left: float
    width: float

    def __post_init__(self):
        if self.v0 <= 0.0 or self.width <= 0.0:
            raise ContractViolationError("rectangular barrier needs v0 > 0, width > 0")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= self.left) & (x <= self.left + self.width)
        v = np.where(inside, self.v0, 0.0)
        return v if v.ndim else float(v)


@dataclass(frozen=True)
class ParabolicBarrier:
    """Inverted parabola V = v0 - curvature (x - center)^2 / 2."""

    v0: float
    curvature: float
    center: float = 0.0

    def __post_init__(self):
        if self.curvature <= 0.0:
            raise ContractViolationError("parabolic barrier needs curvature > 0")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        v = self.v0 - 0.5 * self.curvature * (x - self.center) ** 2
        return v if v.ndim else float(v)


@dataclass(frozen=True)
class TabulatedPotential:
    """Linear interpolation through sampled (x, V) pairs; evaluation outside
    the table is a domain error, not an extrapolation."""

    x: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float)).copy()
        v = np.atleast_1d(np.asarray(self.v, dtype=float)).copy()
        x.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "v", v)
        if x.size != v.size or x.size < 2:
            raise ContractViolationError("tabulation needs >= 2 matching (x, V) pairs")
        if np.any(np.diff(x) <= 0.0):
            raise ContractViolationError("tabulated x must be strictly ascending")

    def __call__(self, x):
        xq = np.asarray(x, dtype=float)
        if np.any(xq < self.x[0]) or np.any(xq > self.x[-1]):
            raise DomainError("evaluation outside the tabulated range")
        v = np.interp(xq, self.x, self.v)
        return v if v.ndim else float(v)


@dataclass(frozen=True)
class TunnelingResult:
    energy: float
    turning_points: tuple[float, float]
    im_w: float
    probability: float


def _forbidden_runs(mask: np.ndarray):
    """Index ranges of contiguous True runs."""
    runs = []
    start = None
    for i, flag in enumerate(mask):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, mask.size - 1))
    return runs


def _bisect_crossing(potential, energy: float, lo: float, hi: float) -> float:
    """Root of V(x) - E on [lo, hi], assuming one sign change."""
    f_lo = potential(lo) - energy
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        f_mid = potential(mid) - energy
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_turning_points(potential, energy: float, bracket,
                        samples: int = _BRACKET_SAMPLES):
    """Roots of V(x) = E delimiting the single forbidden interval inside the
    bracket.

    No forbidden region (the energy clears the barrier) and multiple
    forbidden intervals are distinct, explicit errors. Rectangular barriers
    take the exact edges; continuous potentials are bisected to float
    precision.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ContractViolationError("bracket must satisfy lo < hi")

    if isinstance(potential, RectangularBarrier):
        if energy >= potential.v0:
            raise NoTunnelingError(
                f"E = {energy} is at or above the barrier top {potential.v0}"
            )
        a, b = potential.left, potential.left + potential.width
        if not (lo <= a and b <= hi):
            raise ContractViolationError("bracket does not contain the barrier")
        return a, b

    xs = np.linspace(lo, hi, samples)
    vs = np.asarray(potential(xs), dtype=float)
    if energy >= float(np.max(vs)):
        raise NoTunnelingError(
            f"E = {energy} is at or above the barrier top {float(np.max(vs))}"
        )
    runs = _forbidden_runs(vs > energy)
    if len(runs) == 0:
        raise NoTunnelingError("no forbidden region inside the bracket")
    if len(runs) > 1:
        raise AmbiguousBarrierError(
            f"{len(runs)} forbidden intervals inside the bracket; "
            "narrow the bracket to a single barrier"
        )
    i0, i1 = runs[0]
    if i0 == 0 or i1 == samples - 1:
        raise ContractViolationError(
            "forbidden region touches the bracket edge; widen the bracket"
        )
    a = _bisect_crossing(potential, energy, xs[i0 - 1], xs[i0])
    b = _bisect_crossing(potential, energy, xs[i1], xs[i1 + 1])
    return a, b


def jacobi_action_im(potential, energy: float, mass: float, a: float, b: float,
                     nodes: int = 256) -> float:
    """Im W = int_a^b sqrt(2 m (V - E)) dx over the forbidden interval.

    Gauss-Chebyshev (second kind) quadrature absorbs the square-root zeros at
    smooth turning points; for an inverted parabola the rule is exact for any
    node count. Rectangular barriers are integrated in closed form. The
    integrand turning negative beyond round-off inside [a, b] means the
    interval is not actually forbidden and raises.
    """
    if not a < b:
        raise ContractViolationError("turning points must satisfy a < b")
    if mass <= 0.0:
        raise DomainError("mass must be positive")

    if isinstance(potential, RectangularBarrier):
        if energy >= potential.v0:
            raise DomainError("E at or above the barrier top: nothing to tunnel")
        return float(np.sqrt(2.0 * mass * (potential.v0 - energy)) * (b - a))

    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    theta = np.pi * np.arange(1, nodes + 1) / (nodes + 1)
    x = mid + half * np.cos(theta)
    gap = np.asarray(potential(x), dtype=float) - energy
    scale = max(1.0, abs(energy), float(np.max(np.abs(gap))))
    if np.any(gap < -1e-9 * scale):
        raise DomainError("V(x) < E inside [a, b]: interval is not forbidden")
    gap = np.maximum(gap, 0.0)
    return float(
        half * (np.pi / (nodes + 1)) * np.sum(np.sin(theta) * np.sqrt(2.0 * mass * gap))
    )


def tunneling_probability(potential, energy: float, mass: float, bracket,
                          nodes: int = 256) -> TunnelingResult:
    """Turning points, Im W, and the WKB estimate P = exp(-2 Im W)."""
    a, b = find_turning_points(potential, energy, bracket)
    im_w = jacobi_action_im(potential, energy, mass, a, b, nodes=nodes)
    return TunnelingResult(
        energy=energy,
        turning_points=(a, b),
        im_w=im_w,
        probability=float(np.exp(-2.0 * im_w)),
    )


def exact_rectangular_transmission(v0: float, length: float, energy: float,
                                   mass: float) -> float:
    """Exact plane-wave transmission through a rectangular barrier:
    T = [1 + v0^2 sinh^2(kappa L) / (4 E (v0 - E))]^(-1),
    kappa = sqrt(2 m (v0 - E)). Valid for 0 < E < v0."""
    if not 0.0 < energy < v0:
        raise DomainError("exact transmission needs 0 < E < v0")
    if length <= 0.0 or mass <= 0.0:
        raise DomainError("length and mass must be positive")
    kappa = np.sqrt(2.0 * mass * (v0 - energy))
    arg = kappa * length
    if arg > 350.0:
        # sinh overflows; asymptotic form, exact to e^(-2 arg) relative
        return float(16.0 * energy * (v0 - energy) / v0 ** 2 * np.exp(-2.0 * arg))
    s = np.sinh(arg)
    return float(1.0 / (1.0 + v0 ** 2 * s * s / (4.0 * energy * (v0 - energy))))
