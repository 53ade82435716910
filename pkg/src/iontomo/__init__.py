"""Tomography of motional states of a trapped ion in a modulated Paul trap.

The trap frequency obeys omega^2(t) = 1 + kappa^2 sin^2(Omega t).  Everything
is built on the complex trajectory eps(t) of the classical oscillator, which
fixes the time-dependent invariant, the number states and the rotation of
tomographic parameters.
"""

from .dynamics import EpsilonTrajectory, TrapConfig, epsilon_at, solve_epsilon, sqrt_eps, wronskian
from .phase_space import (
    PhaseSpaceGrid,
    RotatedParams,
    Tomogram,
    f_tomogram,
    fock_cross_tomogram,
    gaussian_tomogram,
    rotated_params,
    sample_tomogram,
    state_tomogram,
    tomogram_function,
    wigner,
    wigner_fock,
    wigner_grid,
)
from .specfun import (
    NumericalError,
    QuadratureResult,
    QuadratureSpec,
    hermite,
    hermite_normalized,
    integrate_1d,
    integrate_3d,
    laguerre,
    laguerre_table,
)
from .states import (
    DeformationSpec,
    QuadratureMoments,
    StateSpec,
    f_value,
    f_values,
    ladder_matrices,
    make_state,
    moments,
    psi_number,
    psi_state,
    verify_eigenstate,
)
from .tomography import (
    DensityMatrix,
    PhotonDistribution,
    evolution_residual,
    inversion_quadrature,
    invert_to_wigner,
    photon_number_distribution,
    reconstruct_density_matrix,
)

__version__ = "0.1.0"
