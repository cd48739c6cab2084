"""pepqm: quantum evolution with position as the evolution parameter.

Natural units hbar = c = 1 throughout. The package computes arrival-time
amplitudes for free particles from branch-restricted transition kernels,
validates the delta-orthogonality constructions those kernels rest on,
cross-checks the arrival densities against conventional time evolution, and
estimates tunneling probabilities from the imaginary part of the reduced
action.
"""

__version__ = "0.1.0"

from .dispersion import (
    BranchConfig,
    Dispersion,
    EnergySign,
    MomentumHalfLine,
    Regime,
    kernel_p_t,
    kernel_p_t_even,
    kernel_x_E,
)
from .errors import (
    AmbiguousBarrierError,
    ContractViolationError,
    DomainError,
    GridLeakageError,
    NoTunnelingError,
    ResolutionError,
)
from .orthogonality import (
    OrthogonalityReport,
    SmearingTest,
    check_even_kernel_orthogonality,
    check_position_orthogonality,
    check_time_orthogonality,
    unrestricted_energy_control,
    unrestricted_momentum_control,
)
from .pep import (
    ArrivalAmplitude,
    MomentumGrid,
    MomentumWavefunction,
    arrival_amplitude,
    arrival_amplitude_via_time_basis,
    arrival_distribution,
    eigenstate_momentum_state,
    even_kernel_arrival_routes,
    gaussian_momentum_state,
    nonrel_arrival_amplitude,
)
from .tep import (
    PositionWavefunction,
    crosscheck_arrival_vs_current,
    evolve_tep,
    gaussian_position_state,
    probability_current,
    synthesize_position_state,
)
from .tunneling import (
    ParabolicBarrier,
    RectangularBarrier,
    TabulatedPotential,
    TunnelingResult,
    exact_rectangular_transmission,
    find_turning_points,
    jacobi_action_im,
    tunneling_probability,
)

__all__ = [name for name in dir() if not name.startswith("_")]
