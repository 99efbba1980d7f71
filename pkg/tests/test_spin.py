import numpy as np
import pytest

from darkpol.spin import (
    BASIS_ORDER,
    BasisLabel,
    basis_index,
    basis_label,
    is_hermitian,
    ket,
    spin_operators,
    tensor,
)


def test_sz_eigenbasis_descending_m():
    _, _, sz = spin_operators(1)
    assert np.allclose(sz, np.diag([1.0, 0.0, -1.0]))
    _, _, iz = spin_operators(0.5)
    assert np.allclose(iz, np.diag([0.5, -0.5]))


@pytest.mark.parametrize("s", [0.5, 1])
def test_su2_commutators(s):
    sx, sy, sz = spin_operators(s)
    assert np.max(np.abs(sx @ sy - sy @ sx - 1j * sz)) < 1e-12
    assert np.max(np.abs(sy @ sz - sz @ sy - 1j * sx)) < 1e-12
    assert np.max(np.abs(sz @ sx - sx @ sz - 1j * sy)) < 1e-12


@pytest.mark.parametrize("s", [0.5, 1])
def test_casimir(s):
    sx, sy, sz = spin_operators(s)
    dim = int(round(2 * s + 1))
    total = sx @ sx + sy @ sy + sz @ sz
    assert np.max(np.abs(total - s * (s + 1) * np.eye(dim))) < 1e-12


@pytest.mark.parametrize("s", [0.5, 1])
def test_spin_matrices_hermitian(s):
    for op in spin_operators(s):
        assert is_hermitian(op)


def test_unsupported_spin_rejected():
    with pytest.raises(ValueError):
        spin_operators(1.5)
    with pytest.raises(ValueError):
        spin_operators(0)


def test_tensor_identity():
    assert np.allclose(tensor(np.eye(3), np.eye(2)), np.eye(6))


def test_tensor_eigenvalue_product():
    _, _, sz = spin_operators(1)
    _, _, iz = spin_operators(0.5)
    sziz = tensor(sz, iz)
    i = basis_index((-1, "down"))
    assert sziz[i, i] == pytest.approx(0.5)  # (-1)(-1/2)


def test_tensor_trace_identity():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert np.trace(tensor(a, b)) == pytest.approx(np.trace(a) * np.trace(b))


def test_basis_order_documented():
    assert basis_index((+1, "up")) == 0
    assert basis_index((0, "up")) == 2
    assert basis_index((-1, "down")) == 5


def test_basis_index_roundtrip():
    for i, label in enumerate(BASIS_ORDER):
        assert basis_index(label) == i
        assert basis_label(i) == label
        assert basis_label(basis_index(label)) == label


def test_invalid_label_rejected():
    with pytest.raises(ValueError):
        basis_index((2, "up"))
    with pytest.raises(ValueError):
        basis_index((0, "sideways"))


def test_ket():
    e = ket(0, "up")
    assert e[2] == 1.0 and np.sum(np.abs(e)) == 1.0
    assert np.array_equal(ket(BasisLabel(-1, "down")), np.eye(6)[5])
