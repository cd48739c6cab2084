"""On-shell dispersion relations and the elementary transition kernels.

Everything works in natural units (hbar = c = 1); there is no unit system in
the code. A :class:`Dispersion` carries the mass and the dispersion family
(exact relativistic shell, or the quadratic limit) and maps momentum to
energy on shell and back. A :class:`BranchConfig` pins the two sign choices
that every kernel evaluation must declare: which energy sign the phase
carries and which momentum half-line the state lives on. There is no default
branch on purpose: leaving either range unrestricted is exactly what breaks
the orthogonality constructions downstream.

All functions are pure; arguments broadcast like numpy ufuncs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ContractViolationError, DomainError

SQRT_TWO_PI = float(np.sqrt(2.0 * np.pi))

# slack for "zero" momenta produced by grid construction round-off
_ZERO_TOL = 1e-15


class Regime(Enum):
    RELATIVISTIC = "relativistic"
    NONRELATIVISTIC = "nonrelativistic"


class EnergySign(Enum):
    POSITIVE = 1
    NEGATIVE = -1


class MomentumHalfLine(Enum):
    NONNEGATIVE = 1
    NONPOSITIVE = -1


@dataclass(frozen=True)
class BranchConfig:
    """Sign bookkeeping for one evolution branch.

    Exactly one energy sign and one momentum half-line. A "both signs" state
    is deliberately not representable; unrestricted-range constructions are
    exposed only as explicit control calculations elsewhere.
    """

    energy_sign: EnergySign
    momentum_half_line: MomentumHalfLine

    def require_momentum(self, p) -> None:
        """Raise unless every momentum sits on the declared half-line."""
        p = np.asarray(p, dtype=float)
        if self.momentum_half_line is MomentumHalfLine.NONNEGATIVE:
            bad = p < -_ZERO_TOL
        else:
            bad = p > _ZERO_TOL
        if np.any(bad):
            raise ContractViolationError(
                f"momentum off the declared {self.momentum_half_line.name} half-line"
            )

    def require_energy(self, energy, threshold: float) -> None:
        """Raise unless every energy sits strictly on the declared branch,
        beyond the threshold |E| = m."""
        e = np.asarray(energy, dtype=float)
        if np.any(np.abs(e) <= threshold):
            raise DomainError(
                f"energy inside the forbidden gap [-{threshold}, {threshold}]"
            )
        sign = self.energy_sign.value
        if np.any(sign * e <= 0.0):
            raise ContractViolationError(
                f"energy off the declared {self.energy_sign.name} branch"
            )

    def label(self) -> str:
        e = "+" if self.energy_sign is EnergySign.POSITIVE else "-"
        p = "+" if self.momentum_half_line is MomentumHalfLine.NONNEGATIVE else "-"
        return f"E{e}/p{p}"


@dataclass(frozen=True)
class Dispersion:
    """On-shell energy-momentum map for a free particle.

    RELATIVISTIC: E_p = sqrt(p^2 + m^2), inverse p_E = sqrt(E^2 - m^2).
    NONRELATIVISTIC: E_p = p^2 / 2m (rest energy removed), inverse
    p_E = sqrt(2 m E). The quadratic family is the p << m limit of the exact
    shell with the rest phase stripped; kernel moduli use the rest mass as
    the energy scale in that limit, which keeps the p <-> E substitution
    measure preserving.
    """

    mass: float
    regime: Regime = Regime.RELATIVISTIC

    def __post_init__(self):
        if not np.isfinite(self.mass) or self.mass < 0.0:
            raise DomainError("mass must be finite and nonnegative")
        if self.regime is Regime.NONRELATIVISTIC and self.mass == 0.0:
            raise DomainError("the quadratic dispersion needs a positive mass")

    @property
    def threshold(self) -> float:
        """Smallest attainable |E|: the rest energy, or 0 in the quadratic limit."""
        return self.mass if self.regime is Regime.RELATIVISTIC else 0.0

    def energy_of_momentum(self, p):
        p = np.asarray(p, dtype=float)
        if self.regime is Regime.RELATIVISTIC:
            e = np.hypot(p, self.mass)
        else:
            e = p * p / (2.0 * self.mass)
        return e if e.ndim else float(e)

    def kinetic_energy_of_momentum(self, p):
        """E_p measured from the threshold, computed without cancellation.

        Relativistic: p^2 / (E_p + m), which stays accurate for p << m where
        the naive E_p - m loses all significant digits.
        """
        p = np.asarray(p, dtype=float)
        if self.regime is Regime.NONRELATIVISTIC:
            u = p * p / (2.0 * self.mass)
        elif self.mass == 0.0:
            u = np.abs(p)
        else:
            u = p * p / (np.hypot(p, self.mass) + self.mass)
        return u if u.ndim else float(u)

    def momentum_of_energy(self, energy):
        """Momentum magnitude on shell for a given energy.

        Relativistic energies must satisfy |E| >= m; the band (-m, m) is a
        genuine spectral gap and is rejected. The difference of squares is
        factored so the result stays accurate near the threshold.
        """
        e = np.asarray(energy, dtype=float)
        if self.regime is Regime.RELATIVISTIC:
            a = np.abs(e)
            if np.any(a < self.mass):
                raise DomainError(
                    f"|E| < m: no on-shell momentum inside the gap "
                    f"(-{self.mass}, {self.mass})"
                )
            p = np.sqrt((a - self.mass) * (a + self.mass))
        else:
            if np.any(e < 0.0):
                raise DomainError("negative kinetic energy has no on-shell momentum")
            p = np.sqrt(2.0 * self.mass * e)
        return p if p.ndim else float(p)

    def group_velocity(self, p):
        p = np.asarray(p, dtype=float)
        if self.regime is Regime.NONRELATIVISTIC:
            v = p / self.mass
        else:
            v = np.where(p == 0.0, 0.0, p / np.hypot(p, self.mass))
        return v if v.ndim else float(v)

    def weight_energy(self, p):
        """Energy scale in kernel moduli: E_p on the exact shell, m in the
        quadratic limit."""
        p = np.asarray(p, dtype=float)
        if self.regime is Regime.NONRELATIVISTIC:
            w = np.full_like(p, self.mass)
        else:
            w = np.hypot(p, self.mass)
        return w if w.ndim else float(w)


def _momentum_modulus(p_arr: np.ndarray, disp: Dispersion) -> np.ndarray:
    """(1/sqrt(2 pi)) sqrt(|p| / weight_energy), with an exact 0 at p = 0."""
    den = np.asarray(disp.weight_energy(p_arr), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        mod = np.sqrt(np.abs(p_arr) / den) / SQRT_TWO_PI
    return np.where(p_arr == 0.0, 0.0, mod)


def kernel_p_t(p, t, disp: Dispersion, branch: BranchConfig):
    """Amplitude connecting a sharp momentum to a sharp detection time at a
    fixed position.

    Closed form: (1/sqrt(2 pi)) * sqrt(|p| / E_p) * exp(i s E_p t), where s
    is the branch energy sign. The value at p = 0 is exactly 0 (the modulus
    vanishes like sqrt(p)); at t = 0 the kernel is real and nonnegative.
    Momenta off the branch half-line are a contract violation, not a silent
    extension.
    """
    branch.require_momentum(p)
    p_arr = np.asarray(p, dtype=float)
    mod = _momentum_modulus(p_arr, disp)
    phase = np.exp(
        1j * branch.energy_sign.value * np.asarray(disp.energy_of_momentum(p_arr)) * np.asarray(t, dtype=float)
    )
    out = mod * phase
    return out if out.ndim else complex(out)


def kernel_x_E(x, energy, disp: Dispersion, branch: BranchConfig):
    """Amplitude connecting a sharp position to a sharp energy at a fixed
    time.

    Closed form: (1/sqrt(2 pi)) * sqrt(|E| / p_E) * exp(i sigma p_E x), with
    sigma the sign of the branch momentum half-line (the quadratic limit uses
    sqrt(m / p_E) for the modulus). The threshold |E| = m is a square-root
    divergence of the modulus and raises instead of returning inf; smoothing
    that edge is a quadrature concern, not a point-evaluation one.
    """
    e_arr = np.asarray(energy, dtype=float)
    branch.require_energy(e_arr, disp.threshold)
    p_e = np.asarray(disp.momentum_of_energy(np.abs(e_arr)), dtype=float)
    if disp.regime is Regime.RELATIVISTIC:
        num = np.abs(e_arr)
    else:
        num = np.full_like(p_e, disp.mass)
    mod = np.sqrt(num / p_e) / SQRT_TWO_PI
    sigma = branch.momentum_half_line.value
    out = mod * np.exp(1j * sigma * p_e * np.asarray(x, dtype=float))
    return out if out.ndim else complex(out)


def kernel_p_t_even(p, t, disp: Dispersion, energy_sign: EnergySign):
    """Even-in-momentum alternative to :func:`kernel_p_t`, defined on the
    whole momentum line.

    Closed form: (1/sqrt(2 pi)) * sqrt(|p| / 2 E_p) * exp(i s E_p t). By
    construction kernel_p_t_even(-p, t) == kernel_p_t_even(p, t) exactly.
    This variant needs no half-line restriction to reproduce the diagonal
    orthogonality identities; its defect shows up only in propagation between
    two distinct positions (see the arrival-route comparison in ``pep``).
    """
    p_arr = np.asarray(p, dtype=float)
    den = 2.0 * np.asarray(disp.weight_energy(p_arr), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        mod = np.sqrt(np.abs(p_arr) / den) / SQRT_TWO_PI
    mod = np.where(p_arr == 0.0, 0.0, mod)
    phase = np.exp(
        1j * energy_sign.value * np.asarray(disp.energy_of_momentum(np.abs(p_arr))) * np.asarray(t, dtype=float)
    )
    out = mod * phase
    return out if out.ndim else complex(out)
