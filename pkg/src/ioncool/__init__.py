"""Doppler cooling of 1-D trapped-ion Coulomb crystals.

The package follows the chain of descriptions top to bottom: exact chain
mechanics and Franck-Condon couplings, exact state counting, the
coarse-grained shell rate equation for the total mechanical energy, its
classical scattering kernel, and the Fokker-Planck / Lamb-Dicke limits,
with each layer checkable against the one below it.
"""

from .ion_chain import (
    ChainConfig,
    EquilibriumPositions,
    LambDickeSet,
    ModeSpectrum,
    chain_modes,
    hessian,
    lamb_dicke,
    solve_equilibrium,
    solve_modes,
)
from .spectrum import (
    EnergyGrid,
    ShellCensus,
    count_in_band,
    count_states,
    smooth_density,
    states_in_band,
)
from .franck_condon import (
    FockState,
    LDWeights,
    ShellCoupling,
    average_coupling_bruteforce,
    fc_abs2_matrix,
    fc_multi,
    fc_single,
    ld_weights,
    moments_bruteforce,
)
from .ergodic_kernel import (
    KernelParams,
    kernel_cdf,
    kernel_f,
    kernel_moments,
    kernel_sample,
    q_classical,
)
from .cooling_dynamics import (
    CoolingParams,
    EnergyDistribution,
    FPSolution,
    LDModeState,
    alpha_from_pattern,
    cooling_rate,
    evolve_ergodic,
    fp_coefficients,
    fp_evolution,
    fp_steady,
    ld_evolve,
    ld_steady_occupations,
    ld_total_energy,
    lorentzian,
    steady_energy,
    thermal_distribution,
    transition_matrix,
)

__version__ = "0.1.0"
