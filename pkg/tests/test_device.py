import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinhall_ising import device
from spinhall_ising.device import (
    EnergyLedger,
    ResistanceModel,
    SwitchCurve,
    account_energy,
    calibrate_switch_curve,
    calibrate_torque_scale,
    crossing_current,
    divider_voltage,
    load_shipped_curve,
    magnetization_to_spin,
    params_energy,
    psw_lookup,
    read_state,
    sweep_currents_uA,
)
from spinhall_ising.magnetics import NonFiniteStateError, RngStream, WritePulse, simulate_write_event, thermalize
from spinhall_ising.params import DeviceParams

R_P, R_AP = 8.56e3, 18.31e3


@pytest.fixture
def res():
    return ResistanceModel(R_P, R_AP)


# ---------------------------------------------------------------- read-out


def test_reference_is_geometric_mean(res):
    assert res.R_REF == pytest.approx(math.sqrt(R_P * R_AP))


def test_read_state_examples(res):
    assert read_state(R_P, res) == 1
    assert read_state(R_AP, res) == -1
    assert read_state(R_AP, res, V_DD=0.3) == -1
    assert divider_voltage(R_P, res, 1.0) < 0.5 < divider_voltage(R_AP, res, 1.0)


def test_read_state_follows_swapped_resistances():
    swapped = ResistanceModel(1e3, 5e4)
    assert read_state(1e3, swapped) == 1
    assert read_state(5e4, swapped) == -1


def test_read_state_rejects_other_resistance(res):
    with pytest.raises(ValueError):
        read_state(1.2e4, res)
    with pytest.raises(ValueError):
        read_state(R_P, res, V_DD=0.0)
    with pytest.raises(ValueError):
        ResistanceModel(R_AP, R_P)
    with pytest.raises(ValueError):
        ResistanceModel(R_P, R_AP, R_REF=R_AP * 2)


def test_write_then_read_round_trip(model, config, res):
    rng = np.random.default_rng(8)
    start = thermalize(model, config, rng, sign=1)
    assert read_state(res.resistance(magnetization_to_spin(start.m, model.easy_axis)), res) == 1
    ev = simulate_write_event(start, WritePulse(-160e-6), model, config, rng)
    spin = magnetization_to_spin(ev.final.m, model.easy_axis)
    assert spin == -1
    assert read_state(res.resistance(spin), res) == -1


# ---------------------------------------------------------------- curve


def _toy_curve():
    I = [40.0, 60.0, 80.0, 90.0, 100.0, 120.0]
    p = [0.0, 0.05, 0.3, 0.5, 0.7, 1.0]
    return SwitchCurve(I, p, np.clip(np.array(p) - 0.05, 0, 1), np.clip(np.array(p) + 0.05, 0, 1), {"n_trials": 10})


def test_curve_round_trip(tmp_path):
    c = _toy_curve()
    path = c.save(tmp_path / "c.csv")
    assert (tmp_path / "c.csv.json").exists()
    d = SwitchCurve.load(path)
    for name in ("I_uA", "p", "ci_lo", "ci_hi"):
        np.testing.assert_array_equal(getattr(c, name), getattr(d, name))
    assert d.metadata == {"n_trials": 10}


def test_curve_validation(tmp_path):
    with pytest.raises(ValueError):
        SwitchCurve([1.0, 1.0], [0, 0], [0, 0], [0, 0])
    with pytest.raises(ValueError):
        SwitchCurve([1.0], [1.5], [0], [1])
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError, match="header"):
        SwitchCurve.load(bad)


def test_lookup_at_points_and_midpoints():
    c = _toy_curve()
    np.testing.assert_allclose(psw_lookup(c, c.currents), c.p, rtol=0, atol=1e-12)
    assert psw_lookup(c, 85e-6) == pytest.approx(0.4)
    assert psw_lookup(c, 110e-6) == pytest.approx(0.85)


def test_lookup_out_of_range():
    c = _toy_curve()
    with pytest.raises(ValueError, match="outside"):
        psw_lookup(c, 39e-6)
    with pytest.raises(ValueError, match="outside"):
        psw_lookup(c, 121e-6)


@given(st.lists(st.floats(40e-6, 120e-6), min_size=2, max_size=20))
@settings(max_examples=50, deadline=None)
def test_lookup_preserves_monotonicity(currents):
    c = _toy_curve()
    currents = np.sort(currents)
    assert np.all(np.diff(psw_lookup(c, currents)) >= 0)


def test_crossing_current():
    c = _toy_curve()
    assert crossing_current(c) == pytest.approx(90e-6)
    assert crossing_current(c, 0.4) == pytest.approx(85e-6)
    with pytest.raises(ValueError):
        crossing_current(SwitchCurve([1.0, 2.0], [0.0, 0.1], [0, 0], [0.2, 0.2]))


def test_merge_prefers_other():
    a = _toy_curve()
    b = SwitchCurve([90.0, 91.0], [0.45, 0.55], [0.4, 0.5], [0.5, 0.6], {"n_trials": 20})
    m = a.merged(b)
    assert list(m.I_uA) == [40, 60, 80, 90, 91, 100, 120]
    assert m.p[3] == 0.45
    assert m.metadata["n_trials"] == 20


def test_monotone_within_ci():
    c = SwitchCurve([1.0, 2.0, 3.0], [0.2, 0.18, 0.5], [0.15, 0.13, 0.45], [0.25, 0.23, 0.55])
    assert not c.is_monotone()
    assert c.monotone_within_ci()
    d = SwitchCurve([1.0, 2.0], [0.5, 0.1], [0.45, 0.05], [0.55, 0.15])
    assert not d.monotone_within_ci()


def test_sweep_grid():
    np.testing.assert_array_equal(sweep_currents_uA(40, 160, 5), np.arange(40, 161, 5))
    assert len(sweep_currents_uA(78, 102, 1)) == 25
    with pytest.raises(ValueError):
        sweep_currents_uA(40, 160, 0)


def test_single_trial_sweep_is_flagged(model):
    c = calibrate_switch_curve([160.0], 1, model, seed=3)
    assert c.p[0] in (0.0, 1.0)
    assert c.ci_lo[0] < c.ci_hi[0]
    assert c.metadata["low_statistics"] is True
    assert c.metadata["n_trials"] == 1


def test_sweep_points_independent_of_grid(model):
    a = calibrate_switch_curve([85.0, 90.0], 30, model, seed=4)
    b = calibrate_switch_curve([90.0], 30, model, seed=4)
    assert a.p[1] == b.p[0]


def test_integrator_failure_names_current(model, monkeypatch):
    def boom(*args, **kwargs):
        raise NonFiniteStateError("state not finite", current=None)

    monkeypatch.setattr(device, "estimate_psw", boom)
    with pytest.raises(NonFiniteStateError, match="I = 75 uA") as info:
        calibrate_switch_curve([75.0], 5, model, seed=0)
    assert info.value.current == pytest.approx(75e-6)


def test_shipped_curve_shape():
    c = load_shipped_curve()
    assert c.I_uA[0] == 40 and c.I_uA[-1] == 160
    assert c.monotone_within_ci()
    assert c.metadata["n_trials"] == 10_000
    assert c.metadata["torque_scale"] == DeviceParams.calibrated().torque_scale


def test_torque_calibration_bisects_with_common_numbers():
    from spinhall_ising.magnetics import Macrospin

    m = Macrospin.from_params(DeviceParams.reference())
    cal = calibrate_torque_scale(m, seed=1, n_trials=40, bracket=(2.0, 6.0), rel_tol=0.05)
    assert 2.0 < cal.scale < 6.0
    flips = [f for _, f in sorted(cal.history)]
    # same trials at every scale: the count is close to non-decreasing in the scale
    assert all(b >= a - 2 for a, b in zip(flips, flips[1:]))
    with pytest.raises(ValueError, match="straddle"):
        calibrate_torque_scale(m, seed=1, n_trials=20, bracket=(0.5, 0.6))


# ---------------------------------------------------------------- energy


def test_energy_examples():
    e = account_energy(90e-6, 38e-6, (3e-9, 6e-9, 1e-9), 1.0)
    assert e.write_J * 1e12 == pytest.approx(0.27, abs=1e-12)
    assert e.read_J * 1e12 == pytest.approx(0.038, abs=1e-12)
    assert e.total_J * 1e12 == pytest.approx(0.318, abs=1e-12)
    assert abs(e.total_J * 1e12 - 0.32) <= 0.005
    assert params_energy(DeviceParams.reference(), 90e-6).total_J == pytest.approx(e.total_J)


@given(
    i=st.floats(0, 1e-3), j=st.floats(0, 1e-3), tw=st.floats(0, 1e-8), tr=st.floats(0, 1e-8),
    v=st.floats(0, 2.0),
)
@settings(max_examples=100, deadline=None)
def test_energy_properties(i, j, tw, tr, v):
    e = account_energy(i, j, (tw, 6e-9, tr), v)
    assert e.write_J >= 0 and e.read_J >= 0
    assert e.total_J == pytest.approx(e.write_J + e.read_J + e.relax_J + e.overhead_J)
    double = account_energy(2 * i, j, (tw, 6e-9, tr), v)
    assert double.write_J == pytest.approx(2 * e.write_J)


def test_energy_rejects_negative():
    with pytest.raises(ValueError):
        account_energy(-1e-6, 0, (1e-9, 0, 0), 1.0)


def test_ledger_accumulation():
    e = account_energy(90e-6, 38e-6, (3e-9, 6e-9, 1e-9), 1.0)
    total = EnergyLedger()
    for _ in range(4):
        total.add(e)
    assert total.updates == 4
    assert total.total_J == pytest.approx(4 * e.total_J)
    assert (e + e).to_dict()["total_pJ"] == pytest.approx(0.636)
