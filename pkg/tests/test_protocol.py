import numpy as np
import pytest

import darkpol as dp
from darkpol.model import ModelSwitches
from darkpol.protocol import ProtocolConfig, initial_state, transfer_fidelity
from darkpol.spin import basis_index

IDEAL = ModelSwitches(off_resonant_drives=False)


def ket_dm(label):
    rho = np.zeros((6, 6), dtype=complex)
    i = basis_index(label)
    rho[i, i] = 1.0
    return rho


def test_reset_projects_electron():
    out = dp.reset_electron(ket_dm((-1, "down")))
    assert np.allclose(out, ket_dm((0, "down")))


def test_reset_fixed_point():
    rho = initial_state("mixed")
    assert np.allclose(dp.reset_electron(rho), rho)


def test_reset_preserves_nuclear_state():
    rng = np.random.default_rng(23)
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    rho = a @ a.conj().T
    rho /= np.trace(rho)
    out = dp.reset_electron(rho)
    # electron reduced state is exactly |0><0|
    red_e = np.einsum("aibi->ab", out.reshape(3, 2, 3, 2))
    assert np.allclose(red_e, np.diag([0.0, 1.0, 0.0]))
    # nuclear reduced state unchanged
    red_n_in = np.einsum("iaib->ab", rho.reshape(3, 2, 3, 2))
    red_n_out = np.einsum("iaib->ab", out.reshape(3, 2, 3, 2))
    assert np.max(np.abs(red_n_in - red_n_out)) < 1e-12


def test_reset_idempotent():
    rng = np.random.default_rng(29)
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    rho = a @ a.conj().T
    rho /= np.trace(rho)
    once = dp.reset_electron(rho)
    assert np.max(np.abs(dp.reset_electron(once) - once)) < 1e-14


def test_nuclear_polarization_values():
    assert dp.nuclear_polarization(initial_state("mixed")) == pytest.approx(0.5)
    assert dp.nuclear_polarization(ket_dm((0, "down"))) == pytest.approx(1.0)
    rng = np.random.default_rng(41)
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    rho = a @ a.conj().T
    rho /= np.trace(rho)
    p_down = dp.nuclear_polarization(rho)
    p_up = 1.0 - p_down
    assert dp.signed_nuclear_polarization(rho) == pytest.approx(p_down - p_up, abs=1e-10)


def test_config_validation():
    with pytest.raises(ValueError):
        ProtocolConfig(scheme="other")
    with pytest.raises(ValueError):
        ProtocolConfig(n_cycles=0)
    with pytest.raises(ValueError):
        ProtocolConfig(t_pulse=-0.1)
    with pytest.raises(ValueError):
        ProtocolConfig(initial_nuclear="left")


def test_ideal_cycle_full_transfer():
    p = dp.default_params().with_(A_perp=0.0, kappa=0.0)
    cfg = ProtocolConfig(scheme="simultaneous", n_cycles=1, switches=IDEAL)
    res = dp.run_protocol(p, cfg)
    assert res.p_down[0] == pytest.approx(0.5)
    assert res.p_down[1] == pytest.approx(1.0, abs=1e-6)


def test_ideal_sequential_cycle_full_transfer():
    p = dp.default_params().with_(Omega1=4.3, Omega2=4.3, A_perp=0.0, kappa=0.0)
    cfg = ProtocolConfig(scheme="sequential", n_cycles=1, switches=IDEAL)
    res = dp.run_protocol(p, cfg)
    assert res.p_down[1] == pytest.approx(1.0, abs=1e-6)
    # explicit durations equal to the defaults give the same answer
    t_pi = np.pi / (2 * 4.3)
    cfg2 = ProtocolConfig(scheme="sequential", n_cycles=1, t1=t_pi, t2=t_pi, switches=IDEAL)
    res2 = dp.run_protocol(p, cfg2)
    assert res2.p_down[1] == pytest.approx(res.p_down[1], abs=1e-12)


def test_ideal_cycle_any_initial_nuclear_state():
    p = dp.default_params().with_(A_perp=0.0, kappa=0.0)
    for nuclear in ("mixed", "up", "down"):
        cfg = ProtocolConfig(n_cycles=1, initial_nuclear=nuclear, switches=IDEAL)
        res = dp.run_protocol(p, cfg)
        assert res.p_down[-1] == pytest.approx(1.0, abs=1e-6)


def test_mixed_cycle_linearity():
    # For one cycle, p_down(mixed) = (p_down(up) + p_down(down)) / 2 exactly,
    # and approximately 0.5 + 0.5 f since the down sector barely leaks.
    p = dp.default_params()
    outs = {}
    for nuclear in ("mixed", "up", "down"):
        cfg = ProtocolConfig(n_cycles=1, initial_nuclear=nuclear)
        outs[nuclear] = dp.run_protocol(p, cfg).p_down[1]
    assert outs["mixed"] == pytest.approx((outs["up"] + outs["down"]) / 2, abs=1e-9)
    f = transfer_fidelity(p, ProtocolConfig(n_cycles=1))
    assert outs["mixed"] == pytest.approx(0.5 + 0.5 * f, abs=5e-3)


def test_recursion_in_three_level_idealization():
    p = dp.default_params().with_(A_perp=0.0)
    cfg = ProtocolConfig(n_cycles=10, switches=IDEAL)
    res = dp.run_protocol(p, cfg)
    f = res.fidelity[0]
    n = np.arange(11)
    recursion = 1 - (1 - res.p_down[0]) * (1 - f) ** n
    assert np.max(np.abs(res.p_down - recursion)) < 5e-3


def test_recursion_formula_evaluation():
    # f = 0.9, 10 cycles from 0.5: 1 - 0.5*0.1^10 > 0.999
    assert 1 - 0.5 * (1 - 0.9) ** 10 > 0.999


def test_down_state_barely_driven():
    p = dp.default_params()
    cfg = ProtocolConfig(n_cycles=1, initial_nuclear="down")
    res = dp.run_protocol(p, cfg)
    assert res.p_down[1] >= 0.99


def test_polarization_monotone_under_resonant_idealization():
    p = dp.default_params().with_(A_perp=0.0)
    cfg = ProtocolConfig(n_cycles=8, switches=IDEAL)
    res = dp.run_protocol(p, cfg)
    assert np.all(np.diff(res.p_down) >= -1e-6)


def test_protocol_deterministic():
    p = dp.default_params()
    cfg = ProtocolConfig(n_cycles=3)
    a = dp.run_protocol(p, cfg)
    b = dp.run_protocol(p, cfg)
    assert np.array_equal(a.p_down, b.p_down)
    assert np.array_equal(a.fidelity, b.fidelity)


def test_records_and_snapshots():
    p = dp.default_params().with_(A_perp=0.0)
    cfg = ProtocolConfig(n_cycles=3, switches=IDEAL, keep_states=True)
    res = dp.run_protocol(p, cfg)
    recs = res.records
    assert [r["cycle"] for r in recs] == [1, 2, 3]
    assert recs[-1]["p_down"] == pytest.approx(res.p_down[-1])
    assert len(res.states) == 3
    assert dp.nuclear_polarization(res.states[-1]) == pytest.approx(res.p_down[-1])
