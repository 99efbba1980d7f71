"""Closed-form machinery for the driven three-level system with loss.

With omega1 = delta - i kappa/2, omega2 = Delta - i kappa/2 and
Omega^2 = Omega1^2 + Omega2^2, the complex eigenenergies x_j solve the cubic

    x [x^2 - (omega1 + omega2) x + omega1 omega2 - Omega^2] + Omega1^2 omega2 = 0.

Inverse Laplace transform of the amplitude equations gives residue sums for
the amplitudes starting from u(0) = 1, v(0) = w(0) = 0:

    u(t) = sum_j [(x_j - omega1)(x_j - omega2) - Omega2^2] e^{-i x_j t} / prod_{k != j}(x_j - x_k)
    v(t) = sum_j [Omega1 (x_j - omega2)]       e^{-i x_j t} / prod_{k != j}(x_j - x_k)
    w(t) = sum_j [Omega1 Omega2]               e^{-i x_j t} / prod_{k != j}(x_j - x_k)

These are exact for distinct roots and serve as the independent oracle for the
numerical integrators.  The eigenvector attached to the root continuously
connected to 0 is the dark state: it carries no weight on the lossy
intermediate level |-1,up>.
"""

import itertools
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dynamics import Amplitudes3
from .errors import DegenerateRootsError, UnsupportedRegimeError
from .model import PhysicalParams

__all__ = [
    "CharacteristicRoots",
    "EigenTriple",
    "characteristic_roots",
    "perturbative_roots",
    "closed_form_amplitudes",
    "eigenstates",
    "optimal_detuning",
    "polarization_deficit",
]


class CharacteristicRoots(NamedTuple):
    """Cubic roots ordered by continuity from the lossless resonant limit:
    x1 -> 0, x2 -> +Omega, x3 -> -Omega as kappa, delta, Delta -> 0."""

    x1: complex
    x2: complex
    x3: complex


@dataclass(frozen=True)
class EigenTriple:
    """Right eigenvectors of the non-Hermitian Hamiltonian.

    vectors[j] is the normalized eigenvector (components on |0,up>, |-1,up>,
    |-1,dn>) attached to roots[j]; norms[j] is the normalization constant of
    the unnormalized residue form.  dark_approx and bright_approx are the
    zeroth-order strong-driving limits (-Omega2, 0, Omega1)/Omega and
    (Omega1, +-Omega, Omega2)/(sqrt(2) Omega).
    """

    roots: CharacteristicRoots
    vectors: tuple
    norms: tuple
    dark_approx: np.ndarray
    bright_approx: tuple


def _cubic_coefficients(p: PhysicalParams):
    w1, w2 = p.omega1, p.omega2
    return (
        -(w1 + w2),                      # x^2
        w1 * w2 - p.Omega**2,            # x^1
        p.Omega1**2 * w2,                # x^0
    )


def characteristic_roots(p: PhysicalParams) -> CharacteristicRoots:
    """Exact cubic roots via a companion-matrix eigensolve.

    The companion matrix avoids branch-cut pitfalls of closed-form cubic
    solutions with complex coefficients; each returned root satisfies the
    cubic to within 1e-9 * Omega^3.
    """
    if p.Omega <= 0:
        raise ValueError("need Omega1^2 + Omega2^2 > 0")
    c2, c1, c0 = _cubic_coefficients(p)
    companion = np.array(
        [
            [0.0, 0.0, -c0],
            [1.0, 0.0, -c1],
            [0.0, 1.0, -c2],
        ],
        dtype=complex,
    )
    roots = np.linalg.eigvals(companion)
    targets = (0.0, p.Omega, -p.Omega)
    best = min(
        itertools.permutations(range(3)),
        key=lambda perm: (
            sum(abs(roots[perm[k]] - targets[k]) for k in range(3)),
            tuple(roots[perm[k]].imag for k in range(3)),
        ),
    )
    return CharacteristicRoots(*(complex(roots[k]) for k in best))


def perturbative_roots(p: PhysicalParams) -> CharacteristicRoots:
    """First-order roots for weak loss and detuning (|omega_j| << Omega):

        x1 = (Omega1/Omega)^2 omega2
        x2,3 = +-Omega + (omega1 + (Omega2/Omega)^2 omega2) / 2

    Warns when |omega1| or |omega2| exceeds Omega/10.
    """
    if p.Omega <= 0:
        raise ValueError("need Omega1^2 + Omega2^2 > 0")
    w1, w2 = p.omega1, p.omega2
    if max(abs(w1), abs(w2)) >= 0.1 * p.Omega:
        warnings.warn(
            "perturbative roots outside their regime: |omega_j|/Omega >= 0.1",
            stacklevel=2,
        )
    r1 = (p.Omega1 / p.Omega) ** 2 * w2
    shift = 0.5 * (w1 + (p.Omega2 / p.Omega) ** 2 * w2)
    return CharacteristicRoots(r1, p.Omega + shift, -p.Omega + shift)


def _residue_weights(p: PhysicalParams, roots: CharacteristicRoots):
    """Numerators and denominators of the residue sums for (u, v, w)."""
    xs = np.array(roots, dtype=complex)
    gap = min(abs(xs[j] - xs[k]) for j in range(3) for k in range(j + 1, 3))
    if gap <= 1e-9 * p.Omega:
        raise DegenerateRootsError(
            f"characteristic roots nearly degenerate (min gap {gap:.3e}); "
            "perturb the drive parameters"
        )
    w1, w2 = p.omega1, p.omega2
    denom = np.array(
        [np.prod([xs[j] - xs[k] for k in range(3) if k != j]) for j in range(3)]
    )
    num_u = (xs - w1) * (xs - w2) - p.Omega2**2
    num_v = p.Omega1 * (xs - w2)
    num_w = np.full(3, p.Omega1 * p.Omega2, dtype=complex)
    return xs, num_u / denom, num_v / denom, num_w / denom


def closed_form_amplitudes(p: PhysicalParams, t) -> Amplitudes3:
    """Exact amplitudes (u, v, w) at time(s) t from the residue sums.

    t may be a scalar or an array; the components follow its shape.  Raises
    DegenerateRootsError when two roots coincide to within 1e-9 * Omega.
    """
    xs, cu, cv, cw = _residue_weights(p, characteristic_roots(p))
    t = np.asarray(t, dtype=float)
    phase = np.exp(-1j * np.multiply.outer(t, xs))
    u = phase @ cu
    v = phase @ cv
    w = phase @ cw
    if t.ndim == 0:
        return Amplitudes3(complex(u), complex(v), complex(w))
    return Amplitudes3(u, v, w)


def eigenstates(p: PhysicalParams) -> EigenTriple:
    """Exact right eigenvectors plus their strong-driving approximations.

    The eigenvector attached to x_j is proportional to

        [(x_j - omega1)(x_j - omega2) - Omega2^2,  Omega1 (x_j - omega2),  Omega1 Omega2]

    over (|0,up>, |-1,up>, |-1,dn>).  The x1 vector is the dark state; the
    two bright states differ only in the sign of the |-1,up> component at
    zeroth order.
    """
    roots = characteristic_roots(p)
    w1, w2 = p.omega1, p.omega2
    vectors = []
    norms = []
    for x in roots:
        raw = np.array(
            [(x - w1) * (x - w2) - p.Omega2**2, p.Omega1 * (x - w2), p.Omega1 * p.Omega2],
            dtype=complex,
        )
        n = float(np.linalg.norm(raw))
        if n == 0.0:
            raise DegenerateRootsError("degenerate eigenvector configuration")
        vectors.append(raw / n)
        norms.append(n)
    om = p.Omega
    dark = np.array([-p.Omega2, 0.0, p.Omega1], dtype=complex) / om
    bright = (
        np.array([p.Omega1, om, p.Omega2], dtype=complex) / (np.sqrt(2) * om),
        np.array([p.Omega1, -om, p.Omega2], dtype=complex) / (np.sqrt(2) * om),
    )
    return EigenTriple(
        roots=roots,
        vectors=tuple(vectors),
        norms=tuple(norms),
        dark_approx=dark,
        bright_approx=bright,
    )


def optimal_detuning(Omega1: float, Omega2: float, Delta: float) -> float:
    """Microwave detuning that rephases the dark/bright interference at the
    transfer time: delta = (2 Omega1^2 - Omega2^2) / Omega^2 * Delta.

    For balanced drives this reduces to delta = Delta / 2.
    """
    om_sq = Omega1**2 + Omega2**2
    if om_sq <= 0:
        raise ValueError("need Omega1^2 + Omega2^2 > 0")
    return (2 * Omega1**2 - Omega2**2) / om_sq * Delta


def polarization_deficit(p: PhysicalParams) -> float:
    """First-order polarization-deficit estimate 3 pi kappa / (8 Omega).

    Derived for balanced drives (Omega1 = Omega2); raises
    UnsupportedRegimeError otherwise.  Warns when 3 pi kappa / 8 is not small
    against Omega.

    Known limitation: the residue-exact deficit 1 - |w(pi/Omega)|^2 carries
    coefficient 5 pi / 8 at first order (the dark branch decays as
    e^{-pi kappa/(4 Omega)} and the bright branch as e^{-3 pi kappa/(8 Omega)};
    |w| is their mean), so this customary estimate undershoots by 5/3.  Use
    closed_form_amplitudes for exact values.
    """
    if not np.isclose(p.Omega1, p.Omega2, rtol=1e-9, atol=0.0):
        raise UnsupportedRegimeError(
            "polarization deficit formula requires balanced drives Omega1 = Omega2"
        )
    if p.Omega <= 0:
        raise ValueError("need Omega1^2 + Omega2^2 > 0")
    deficit = 3 * np.pi * p.kappa / (8 * p.Omega)
    if deficit > 0.1:
        warnings.warn(
            f"deficit {deficit:.3g} is not small; first-order formula unreliable",
            stacklevel=2,
        )
    return float(deficit)
