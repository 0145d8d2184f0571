import pytest

from spinhall_ising.params import (
    CALIBRATED_TORQUE_SCALE,
    DeviceParams,
    ParamFileError,
    format_params,
    load_params,
    parse_params,
    resolve_params_path,
    save_params,
)


def test_defaults_in_si(reference_params):
    assert reference_params.fl_long_axis == pytest.approx(112.5e-9)
    assert reference_params.M_s == pytest.approx(1.2573e6)
    assert reference_params.R_AP == pytest.approx(18.31e3)
    assert reference_params.rho_HM == pytest.approx(2.0e-6)
    assert reference_params.torque_scale == 1.0
    assert DeviceParams.calibrated().torque_scale == CALIBRATED_TORQUE_SCALE


def test_spin_hall_gain(reference_params):
    assert reference_params.spin_hall_gain == pytest.approx(0.3 * 45 / 2.3, rel=1e-14)


def test_round_trip(tmp_path):
    p = DeviceParams.calibrated().replace(T=77.0, polarization="y", I_read=40e-6)
    path = tmp_path / "p.txt"
    save_params(p, path)
    q = load_params(path)
    for key, value in p.to_dict().items():
        if isinstance(value, str):
            assert getattr(q, key) == value
        else:
            assert getattr(q, key) == pytest.approx(value, rel=1e-11)


def test_units_are_converted():
    p = parse_params("M_s = 1257.3 kA/m\nfree_layer_long_axis = 0.1125 um\nt_PW = 3000 ps\nR_P = 8560 Ohm\n")
    assert p.M_s == pytest.approx(1.2573e6)
    assert p.fl_long_axis == pytest.approx(112.5e-9)
    assert p.t_PW == pytest.approx(3e-9)
    assert p.R_P == pytest.approx(8.56e3)


def test_bare_number_uses_display_unit():
    assert parse_params("t_FL = 2\n").t_FL == pytest.approx(2e-9)


def test_comments_and_blank_lines():
    p = parse_params("# header\n\nalpha = 0.05  # lower damping\n")
    assert p.alpha == 0.05


@pytest.mark.parametrize(
    "text, line, match",
    [
        ("alpha = 0.1\nbogus = 1\n", 2, "unknown parameter"),
        ("alpha 0.1\n", 1, "expected"),
        ("\n\nM_s = 12 furlongs\n", 3, "unit"),
        ("alpha = abc\n", 1, "not a number"),
        ("alpha = 0.1\nalpha = 0.2\n", 2, "duplicate"),
        ("T = nan K\n", 1, "non-finite"),
    ],
)
def test_parse_errors_report_line(text, line, match):
    with pytest.raises(ParamFileError, match=match) as info:
        parse_params(text, path="dev.txt")
    assert info.value.line == line
    assert str(info.value).startswith(f"dev.txt:{line}:")


def test_invalid_values_rejected():
    with pytest.raises(ParamFileError, match="alpha"):
        parse_params("alpha = 1.5\n")
    with pytest.raises(ValueError):
        DeviceParams(R_P=2e4)
    with pytest.raises(ValueError):
        DeviceParams(polarization="w")


def test_missing_file(tmp_path):
    with pytest.raises(ParamFileError, match="cannot read"):
        load_params(tmp_path / "absent.txt")


def test_params_dir_env(tmp_path, monkeypatch):
    save_params(DeviceParams(T=10.0), tmp_path / "cold.txt")
    monkeypatch.setenv("SPINHALL_ISING_PARAMS_DIR", str(tmp_path))
    assert resolve_params_path("cold.txt") == tmp_path / "cold.txt"
    assert load_params("cold.txt").T == 10.0


def test_digest_tracks_values():
    a = DeviceParams.reference()
    assert a.digest() == DeviceParams.reference().digest()
    assert a.digest() != a.replace(T=301.0).digest()
    assert "torque_scale" in format_params(a)


def test_digest_survives_file_round_trip(tmp_path):
    p = DeviceParams.calibrated().replace(V_DD=0.5)
    save_params(p, tmp_path / "p.txt")
    assert load_params(tmp_path / "p.txt").digest() == p.digest()
