"""Repeated polarization cycles with an ideal optical electron reset.

Each cycle drives the system (simultaneous two-tone pulse or two sequential
pi pulses), then models the 532-nm optical pumping as an instantaneous
re-initialization of the electron into |0> that leaves the nuclear state
untouched:  rho -> |0><0| (x) Tr_e rho.
"""

from dataclasses import dataclass, field
from math import pi

import numpy as np

from .dynamics import evolve_master
from .model import ModelSwitches, PhysicalParams
from .spin import BASIS_ORDER, basis_index

__all__ = [
    "ProtocolConfig",
    "ProtocolResult",
    "reset_electron",
    "run_cycle",
    "run_protocol",
    "nuclear_polarization",
    "signed_nuclear_polarization",
    "initial_state",
]

SCHEMES = ("simultaneous", "sequential")
INITIAL_NUCLEAR = ("mixed", "up", "down")

_DOWN_IDX = [i for i, lbl in enumerate(BASIS_ORDER) if lbl.mi == "down"]
_I_0UP = basis_index((0, "up"))


@dataclass(frozen=True)
class ProtocolConfig:
    """Pulse scheme, cycle count, durations, and the initial nuclear state.

    Durations left as None default to the ideal values at run time:
    t_pulse = pi/Omega for the simultaneous dark-state transfer and
    t1 = pi/(2 Omega1), t2 = pi/(2 Omega2) for the sequential pi pulses.
    """

    scheme: str = "simultaneous"
    n_cycles: int = 1
    t_pulse: float | None = None
    t1: float | None = None
    t2: float | None = None
    initial_nuclear: str = "mixed"
    switches: ModelSwitches = field(default_factory=ModelSwitches)
    dt: float | None = None
    keep_states: bool = False

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.initial_nuclear not in INITIAL_NUCLEAR:
            raise ValueError(
                f"initial_nuclear must be one of {INITIAL_NUCLEAR}, got {self.initial_nuclear!r}"
            )
        if self.n_cycles < 1:
            raise ValueError("n_cycles must be >= 1")
        for name in ("t_pulse", "t1", "t2", "dt"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class ProtocolResult:
    """Per-cycle nuclear polarization and transfer fidelity.

    p_down[0] is the initial polarization; p_down[n] the value after cycle n.
    fidelity[n-1] is the conditional up->down transfer probability of cycle n,
    measured from a pure |0,up> start (constant across cycles for fixed
    parameters).  states holds lab-frame snapshots after each cycle when
    requested.
    """

    p_down: np.ndarray
    fidelity: np.ndarray
    states: list | None = None

    @property
    def records(self) -> list:
        return [
            {"cycle": n + 1, "p_down": float(self.p_down[n + 1]), "fidelity": float(self.fidelity[n])}
            for n in range(len(self.fidelity))
        ]


def reset_electron(rho):
    """Ideal optical pumping: rho -> |0><0| (x) Tr_e rho."""
    rho = np.asarray(rho, dtype=complex).reshape(3, 2, 3, 2)
    rho_nuc = np.einsum("iaib->ab", rho)
    out = np.zeros((3, 2, 3, 2), dtype=complex)
    out[1, :, 1, :] = rho_nuc  # electron index 1 is ms = 0
    return out.reshape(6, 6)


def nuclear_polarization(rho) -> float:
    """Population of the nuclear |down> state, p_down = tr[(1 (x) |dn><dn|) rho]."""
    diag = np.real(np.diag(np.asarray(rho)))
    return float(diag[_DOWN_IDX].sum())


def signed_nuclear_polarization(rho) -> float:
    """Signed polarization p_down - p_up."""
    p_down = nuclear_polarization(rho)
    return 2.0 * p_down - float(np.trace(np.asarray(rho)).real)


def initial_state(nuclear: str = "mixed"):
    """Protocol starting state |0><0| (x) rho_nuclear for mixed, up, or down."""
    rho_e = np.zeros((3, 3), dtype=complex)
    rho_e[1, 1] = 1.0
    if nuclear == "mixed":
        rho_n = np.eye(2, dtype=complex) / 2
    elif nuclear == "up":
        rho_n = np.diag([1.0, 0.0]).astype(complex)
    elif nuclear == "down":
        rho_n = np.diag([0.0, 1.0]).astype(complex)
    else:
        raise ValueError(f"unknown nuclear state {nuclear!r}")
    return np.kron(rho_e, rho_n)


def _pulse_durations(p: PhysicalParams, cfg: ProtocolConfig):
    if cfg.scheme == "simultaneous":
        t_pulse = cfg.t_pulse if cfg.t_pulse is not None else pi / p.Omega
        return (t_pulse,)
    t1 = cfg.t1 if cfg.t1 is not None else pi / (2 * p.Omega1)
    t2 = cfg.t2 if cfg.t2 is not None else pi / (2 * p.Omega2)
    return (t1, t2)


def run_cycle(p: PhysicalParams, cfg: ProtocolConfig, rho):
    """One polarization cycle: pulse(s) then electron reset.

    Simultaneous scheme: both drives on for t_pulse.  Sequential scheme:
    microwave only for t1, then radio-frequency only for t2.  Returns the
    lab-frame density matrix after the reset.
    """
    if cfg.scheme == "simultaneous":
        (t_pulse,) = _pulse_durations(p, cfg)
        traj = evolve_master(p, rho, t_pulse, cfg.dt, cfg.switches)
        rho = traj.final_state
    else:
        t1, t2 = _pulse_durations(p, cfg)
        traj = evolve_master(p.with_(Omega2=0.0), rho, t1, cfg.dt, cfg.switches)
        traj = evolve_master(p.with_(Omega1=0.0), traj.final_state, t2, cfg.dt, cfg.switches)
        rho = traj.final_state
    return reset_electron(rho)


def transfer_fidelity(p: PhysicalParams, cfg: ProtocolConfig) -> float:
    """Conditional up->down transfer probability of one cycle from |0,up>."""
    rho = np.zeros((6, 6), dtype=complex)
    rho[_I_0UP, _I_0UP] = 1.0
    return nuclear_polarization(run_cycle(p, cfg, rho))


def run_protocol(p: PhysicalParams, cfg: ProtocolConfig) -> ProtocolResult:
    """Iterate run_cycle from |0><0| (x) rho_nuclear(cfg.initial_nuclear).

    In the ideal limit the series follows the recursion
    p_down(n) = 1 - (1 - p_down(0)) (1 - f)^n with f the single-cycle transfer
    fidelity.  Deterministic: identical configs give bit-identical series.
    """
    rho = initial_state(cfg.initial_nuclear)
    f = transfer_fidelity(p, cfg)
    p_down = [nuclear_polarization(rho)]
    states = [] if cfg.keep_states else None
    for _ in range(cfg.n_cycles):
        rho = run_cycle(p, cfg, rho)
        p_down.append(nuclear_polarization(rho))
        if states is not None:
            states.append(rho.copy())
    return ProtocolResult(
        p_down=np.array(p_down),
        fidelity=np.full(cfg.n_cycles, f),
        states=states,
    )
