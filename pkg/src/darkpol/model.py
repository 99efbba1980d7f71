"""Physical parameters, Hamiltonians, and the pure-dephasing dissipator.

Unit convention
---------------
Every frequency-like parameter is an angular frequency in rad/us, numerically
equal to the customary MHz quote for this system (zero-field splitting
D = 2870, first-shell hyperfine A_par = 130, Rabi frequencies 13, ...).  The
convention is fixed by the balanced-drive transfer time

    t_peak = pi / sqrt(Omega1^2 + Omega2^2) = 0.1709 us  for Omega1 = Omega2 = 13.

Time is in us, magnetic field in G, gyromagnetic ratios in rad us^-1 G^-1
(converted once from rad s^-1 T^-1: multiply by 1e-13), dephasing rate kappa
in us^-1.

Level scheme (secular part, diagonal in the product basis):

    E(ms, mi) = D ms^2 + gamma_e Bz ms + gamma_c Bz mi + A_par ms mi

The microwave drive addresses |0,up> <-> |-1,up> at omega_A, the
radio-frequency drive addresses |-1,up> <-> |-1,down> at omega_B.
"""

import warnings
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple

import numpy as np

from .spin import basis_index, spin_operators, tensor

__all__ = [
    "PhysicalParams",
    "DriveFrequencies",
    "ModelSwitches",
    "default_params",
    "drive_frequencies",
    "lab_hamiltonian",
    "secular_hamiltonian",
    "nonhermitian_hamiltonian",
    "drive_hamiltonian",
    "rotating_hamiltonian",
    "frame_diagonal",
    "dephasing_dissipator",
    "validity_flags",
    "warn_on_invalid",
]

# Gyromagnetic ratios, rad us^-1 G^-1 (from -1.76e11 and 6.73e7 rad s^-1 T^-1).
GAMMA_E = -1.76e-2
GAMMA_C = 6.73e-6

# Indices into the 6-level basis used throughout this module.
_I_PUP = basis_index((+1, "up"))
_I_PDN = basis_index((+1, "down"))
_I_0UP = basis_index((0, "up"))
_I_0DN = basis_index((0, "down"))
_I_MUP = basis_index((-1, "up"))
_I_MDN = basis_index((-1, "down"))


@dataclass(frozen=True)
class PhysicalParams:
    """Model constants and pulse parameters.  See module docstring for units."""

    D: float = 2870.0        # zero-field splitting, rad/us
    gamma_e: float = GAMMA_E  # electron gyromagnetic ratio, rad us^-1 G^-1
    gamma_c: float = GAMMA_C  # 13C gyromagnetic ratio, rad us^-1 G^-1
    Bz: float = 50.0         # static field along the NV axis, G
    A_par: float = 130.0     # longitudinal hyperfine, rad/us
    A_perp: float = 130.0    # transverse hyperfine, rad/us
    Omega1: float = 13.0     # microwave Rabi frequency, rad/us
    Omega2: float = 13.0     # radio-frequency Rabi frequency, rad/us
    delta: float = 0.0       # microwave detuning, rad/us
    Delta: float = 0.0       # radio-frequency detuning, rad/us
    kappa: float = 1.0 / 58.0  # pure-dephasing rate of the ms = -1 manifold, us^-1

    def __post_init__(self):
        if self.Omega1 < 0 or self.Omega2 < 0:
            raise ValueError("Rabi frequencies must be non-negative")
        if self.kappa < 0:
            raise ValueError("dephasing rate kappa must be non-negative")

    @property
    def Omega(self) -> float:
        """Combined drive strength sqrt(Omega1^2 + Omega2^2)."""
        return float(np.hypot(self.Omega1, self.Omega2))

    @property
    def omega1(self) -> complex:
        """Complex intermediate-level energy delta - i*kappa/2."""
        return self.delta - 0.5j * self.kappa

    @property
    def omega2(self) -> complex:
        """Complex target-level energy Delta - i*kappa/2."""
        return self.Delta - 0.5j * self.kappa

    def with_(self, **kwargs) -> "PhysicalParams":
        """Copy with replaced fields (dataclasses.replace shorthand)."""
        return replace(self, **kwargs)


class DriveFrequencies(NamedTuple):
    omega_A: float  # microwave drive frequency, rad/us
    omega_B: float  # radio-frequency drive frequency, rad/us


@dataclass(frozen=True)
class ModelSwitches:
    """Which beyond-ideal terms enter the 6-level simulations.

    off_resonant_drives:
        Include the detuned branch of the microwave on |0,dn> <-> |-1,dn>
        and the counter-rotating partner of the radio-frequency drive on
        |-1,up> <-> |-1,dn>.  Both oscillate in the rotating frame.
    include_ms_plus:
        Keep the ms = +1 manifold coupled (it participates through the
        transverse-hyperfine flip-flop).  With False, terms touching ms = +1
        are dropped.
    """

    off_resonant_drives: bool = True
    include_ms_plus: bool = True


def default_params() -> PhysicalParams:
    """First-shell 13C defaults: A = 130, Omega1 = Omega2 = 13, kappa = 1/58."""
    return PhysicalParams()


def drive_frequencies(p: PhysicalParams) -> DriveFrequencies:
    """Drive frequencies matched to the addressed transitions.

    omega_A = D - gamma_e Bz - delta - A_par/2 hits |0,up> <-> |-1,up> up to
    the detuning delta; omega_B = A_par - gamma_c Bz + delta - Delta hits
    |-1,up> <-> |-1,down> up to Delta.
    """
    omega_A = p.D - p.gamma_e * p.Bz - p.delta - p.A_par / 2
    omega_B = p.A_par - p.gamma_c * p.Bz + p.delta - p.Delta
    return DriveFrequencies(omega_A, omega_B)


def lab_hamiltonian(p: PhysicalParams):
    """Full static 6x6 Hamiltonian including the transverse hyperfine term."""
    sx, sy, sz = spin_operators(1)
    ix, iy, iz = spin_operators(0.5)
    eye2 = np.eye(2)
    eye3 = np.eye(3)
    h = (
        p.D * tensor(sz @ sz, eye2)
        + p.gamma_e * p.Bz * tensor(sz, eye2)
        + p.gamma_c * p.Bz * tensor(eye3, iz)
        + p.A_par * tensor(sz, iz)
        + p.A_perp * (tensor(sx, ix) + tensor(sy, iy))
    )
    return h


def secular_hamiltonian(p: PhysicalParams):
    """Diagonal 6x6 Hamiltonian: lab_hamiltonian without the A_perp flip-flop."""
    return lab_hamiltonian(p.with_(A_perp=0.0))


def nonhermitian_hamiltonian(p: PhysicalParams):
    """3x3 drive Hamiltonian over {|0,up>, |-1,up>, |-1,dn>} with loss.

        [[0,      Omega1, 0     ],
         [Omega1, omega1, Omega2],
         [0,      Omega2, omega2]]

    with omega1 = delta - i kappa/2 and omega2 = Delta - i kappa/2.  Hermitian
    when kappa = 0.
    """
    return np.array(
        [
            [0.0, p.Omega1, 0.0],
            [p.Omega1, p.omega1, p.Omega2],
            [0.0, p.Omega2, p.omega2],
        ],
        dtype=complex,
    )


def frame_diagonal(p: PhysicalParams):
    """Diagonal (length 6, real) of the rotating-frame generator G.

    G = H_secular - delta |-1,up><-1,up| - Delta |-1,dn><-1,dn|; the frame is
    U(t) = exp(-i G t).  The Delta shift keeps the frame Hamiltonian
    time-independent on the addressed transitions for Delta != 0 as well.
    """
    g = np.real(np.diag(secular_hamiltonian(p))).copy()
    g[_I_MUP] -= p.delta
    g[_I_MDN] -= p.Delta
    return g


def drive_hamiltonian(p: PhysicalParams, t: float, switches: ModelSwitches = ModelSwitches()):
    """Lab-frame drive H_I(t), Hermitian 6x6.

    Resonant terms: Omega1 e^{i omega_A t} |0,up><-1,up| and
    Omega2 e^{i omega_B t} |-1,up><-1,dn| plus conjugates.  With
    off_resonant_drives, the microwave also couples |0,dn><-1,dn| and the
    radio-frequency term gains its counter-rotating partner e^{-i omega_B t}.
    """
    wA, wB = drive_frequencies(p)
    h = np.zeros((6, 6), dtype=complex)
    h[_I_0UP, _I_MUP] += p.Omega1 * np.exp(1j * wA * t)
    h[_I_MUP, _I_MDN] += p.Omega2 * np.exp(1j * wB * t)
    if switches.off_resonant_drives:
        h[_I_0DN, _I_MDN] += p.Omega1 * np.exp(1j * wA * t)
        h[_I_MUP, _I_MDN] += p.Omega2 * np.exp(-1j * wB * t)
    return h + h.conj().T


def _rotating_terms(p: PhysicalParams, switches: ModelSwitches = ModelSwitches()):
    """Static part and oscillating terms of the rotating-frame Hamiltonian.

    Returns (h0, terms) with h0 the static 6x6 part and terms a tuple of
    (i, j, amplitude, nu) entries contributing amplitude*e^{i nu t} at [i, j]
    plus the conjugate at [j, i].
    """
    h0 = np.zeros((6, 6), dtype=complex)
    h0[_I_MUP, _I_MUP] = p.delta
    h0[_I_MDN, _I_MDN] = p.Delta
    h0[_I_0UP, _I_MUP] = h0[_I_MUP, _I_0UP] = p.Omega1
    h0[_I_MUP, _I_MDN] = h0[_I_MDN, _I_MUP] = p.Omega2

    _, wB = drive_frequencies(p)
    terms = []
    if switches.off_resonant_drives:
        # Detuned microwave branch |0,dn><-1,dn|.
        terms.append((_I_0DN, _I_MDN, p.Omega1, p.Delta - p.delta - p.A_par))
        # Counter-rotating partner of the radio-frequency drive.
        terms.append((_I_MUP, _I_MDN, p.Omega2, -2.0 * wB))
    if p.A_perp != 0.0:
        g = frame_diagonal(p)
        amp = p.A_perp / np.sqrt(2.0)
        # Flip-flop |0,dn><-1,up| with its rotating-frame phase.
        terms.append((_I_0DN, _I_MUP, amp, g[_I_0DN] - g[_I_MUP]))
        if switches.include_ms_plus:
            # Flip-flop |+1,dn><0,up|.
            terms.append((_I_PDN, _I_0UP, amp, g[_I_PDN] - g[_I_0UP]))
    return h0, tuple(terms)


def rotating_hamiltonian(p: PhysicalParams, t: float, switches: ModelSwitches = ModelSwitches()):
    """Rotating-frame 6x6 Hamiltonian U+(H_F + H_I)U + i dU+/dt U at time t.

    Static part: delta |-1,up><-1,up| + Delta |-1,dn><-1,dn| plus the resonant
    Omega1, Omega2 couplings.  Off-resonant drive branches and A_perp
    flip-flops enter as explicitly oscillating terms.  With A_perp = 0 and
    off-resonant drives disabled, the restriction to indices (2, 4, 5) equals
    nonhermitian_hamiltonian with kappa = 0.
    """
    h0, terms = _rotating_terms(p, switches)
    h = h0.copy()
    for i, j, amp, nu in terms:
        c = amp * np.exp(1j * nu * t)
        h[i, j] += c
        h[j, i] += np.conj(c)
    return h


def dephasing_dissipator(p: PhysicalParams) -> Callable:
    """Pure-dephasing superoperator rho -> kappa (P rho P - {P, rho}/2).

    P projects onto the full ms = -1 manifold (both nuclear states), so the
    dissipator damps every coherence between ms = -1 and the rest at kappa/2
    and annihilates the trace.
    """
    proj = np.zeros((6, 6))
    proj[_I_MUP, _I_MUP] = proj[_I_MDN, _I_MDN] = 1.0
    kappa = p.kappa

    def apply(rho):
        rho = np.asarray(rho, dtype=complex)
        return kappa * (proj @ rho @ proj - 0.5 * (proj @ rho + rho @ proj))

    return apply


def validity_flags(p: PhysicalParams) -> dict:
    """Secular and selective-excitation validity, as data (no warnings).

    secular_ratio compares the smallest flip-flop level gap against
    A_perp/sqrt(2); it should exceed 20.  The selective-excitation margins
    require each Rabi frequency to stay at or below a tenth of the detuning
    to the nearest unaddressed transition (boundary included, matching the
    customary "no more than A/10" rule).
    """
    gap = abs(p.D - p.gamma_e * p.Bz + p.gamma_c * p.Bz - p.A_par / 2)
    scale = abs(p.A_perp) / np.sqrt(2.0)
    secular_ratio = float(gap / scale) if scale > 0 else float("inf")
    mw_margin = abs(p.delta + p.A_par) / 10.0
    rf_margin = abs(p.A_par - p.delta + p.Delta) / 10.0
    eps = 1e-12
    return {
        "secular_ratio": secular_ratio,
        "secular_ok": secular_ratio > 20.0,
        "mw_margin": float(mw_margin),
        "selective_mw_ok": p.Omega1 <= mw_margin * (1 + eps),
        "rf_margin": float(rf_margin),
        "selective_rf_ok": p.Omega2 <= rf_margin * (1 + eps),
    }


def warn_on_invalid(p: PhysicalParams) -> dict:
    """Emit warnings for violated validity flags; returns the flags."""
    flags = validity_flags(p)
    if not flags["secular_ok"]:
        warnings.warn(
            f"secular approximation marginal: level gap over A_perp/sqrt(2) is "
            f"{flags['secular_ratio']:.2f} (< 20)",
            stacklevel=2,
        )
    if not flags["selective_mw_ok"]:
        warnings.warn(
            f"microwave selective excitation marginal: Omega1 = {p.Omega1:.4g} exceeds "
            f"{flags['mw_margin']:.4g}",
            stacklevel=2,
        )
    if not flags["selective_rf_ok"]:
        warnings.warn(
            f"radio-frequency selective excitation marginal: Omega2 = {p.Omega2:.4g} exceeds "
            f"{flags['rf_margin']:.4g}",
            stacklevel=2,
        )
    return flags
