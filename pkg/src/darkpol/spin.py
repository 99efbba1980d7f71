"""Spin operators and basis bookkeeping for the electron(S=1) x nucleus(I=1/2) space.

Basis order of the 6-dimensional product space, fixed once and used everywhere:

    index  0        1        2        3        4        5
    state  |+1,up>  |+1,dn>  |0,up>   |0,dn>   |-1,up>  |-1,dn>

This keeps the driven three-level subspace {|0,up>, |-1,up>, |-1,dn>} at
indices (2, 4, 5).  hbar = 1 throughout; Hamiltonians are angular frequencies.
"""

from typing import NamedTuple

import numpy as np

UP = "up"
DOWN = "down"


class BasisLabel(NamedTuple):
    ms: int  # electron projection, one of +1, 0, -1
    mi: str  # nuclear state, "up" or "down"


BASIS_ORDER: tuple[BasisLabel, ...] = (
    BasisLabel(+1, UP),
    BasisLabel(+1, DOWN),
    BasisLabel(0, UP),
    BasisLabel(0, DOWN),
    BasisLabel(-1, UP),
    BasisLabel(-1, DOWN),
)

# Indices of the driven three-level subspace {|0,up>, |-1,up>, |-1,dn>}.
THREE_LEVEL_INDICES = (2, 4, 5)


def spin_operators(s):
    """Standard angular-momentum matrices (Sx, Sy, Sz) for spin s in {1/2, 1}.

    Basis is the Sz eigenbasis in descending m.  Raising-operator elements are
    <m+1|S+|m> = sqrt(s(s+1) - m(m+1)).
    """
    if s not in (0.5, 1, 1.0):
        raise ValueError(f"unsupported spin quantum number {s!r}: expected 1/2 or 1")
    dim = int(round(2 * s + 1))
    m = s - np.arange(dim)  # descending: s, s-1, ..., -s
    sz = np.diag(m).astype(complex)
    sp = np.zeros((dim, dim), dtype=complex)
    for k in range(1, dim):
        sp[k - 1, k] = np.sqrt(s * (s + 1) - m[k] * (m[k] + 1))
    sx = (sp + sp.conj().T) / 2
    sy = (sp - sp.conj().T) / 2j
    return sx, sy, sz


def tensor(a, b):
    """Kronecker product with index order matching BASIS_ORDER (electron first)."""
    return np.kron(np.asarray(a), np.asarray(b))


def basis_index(label) -> int:
    """Index 0..5 of a basis label; inverse of basis_label."""
    ms, mi = label
    if ms not in (+1, 0, -1) or mi not in (UP, DOWN):
        raise ValueError(f"invalid basis label {label!r}")
    return BASIS_ORDER.index(BasisLabel(ms, mi))


def basis_label(index: int) -> BasisLabel:
    """Basis label of index 0..5; inverse of basis_index."""
    return BASIS_ORDER[index]


def ket(ms, mi=None):
    """Unit column vector of a product basis state, e.g. ket(0, "up").

    Accepts a BasisLabel or (ms, mi) separately.
    """
    if mi is None:
        ms, mi = ms
    e = np.zeros(6, dtype=complex)
    e[basis_index((ms, mi))] = 1.0
    return e


def is_hermitian(a, tol=1e-12) -> bool:
    a = np.asarray(a)
    return bool(np.max(np.abs(a - a.conj().T)) < tol)
