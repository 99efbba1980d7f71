"""Dark-state polarization of a 13C nuclear spin near an NV center.

A small numpy library for the driven electron(S=1) x nucleus(I=1/2) system:
Hamiltonian construction, Lindblad and non-Hermitian time evolution,
closed-form amplitudes as an independent oracle, the repeated polarization
protocol, and reproducible parameter-sweep scenarios.
"""

from .analytic import (
    CharacteristicRoots,
    EigenTriple,
    characteristic_roots,
    closed_form_amplitudes,
    eigenstates,
    optimal_detuning,
    perturbative_roots,
    polarization_deficit,
)
from .dynamics import (
    Amplitudes3,
    Trajectory,
    evolve_master,
    evolve_nonhermitian,
    populations,
)
from .errors import (
    ConfigError,
    ConstraintInfeasibleError,
    DarkpolError,
    DegenerateRootsError,
    IntegrationError,
    UnsupportedRegimeError,
)
from .experiments import (
    GridBounds,
    OptimizeResult,
    ResultTable,
    SweepSpec,
    optimize_pulse,
    scenario_custom,
    scenario_fig2,
    scenario_fig3,
    scenario_fig4,
    scenario_protocol,
)
from .model import (
    DriveFrequencies,
    ModelSwitches,
    PhysicalParams,
    default_params,
    dephasing_dissipator,
    drive_frequencies,
    drive_hamiltonian,
    lab_hamiltonian,
    nonhermitian_hamiltonian,
    rotating_hamiltonian,
    secular_hamiltonian,
    validity_flags,
)
from .protocol import (
    ProtocolConfig,
    ProtocolResult,
    nuclear_polarization,
    reset_electron,
    run_cycle,
    run_protocol,
    signed_nuclear_polarization,
)
from .spin import (
    BASIS_ORDER,
    THREE_LEVEL_INDICES,
    BasisLabel,
    basis_index,
    basis_label,
    ket,
    spin_operators,
    tensor,
)

__version__ = "0.1.0"
