import json

import pytest

from nearfield_om import __version__
from nearfield_om.cli import main
from nearfield_om.config import ConfigError, config_hash, defaults, load_config, load_raw, merge
from nearfield_om.constants import TWO_PI
from nearfield_om.output import read_csv


def write(tmp_path, obj, name="c.json"):
    p = tmp_path / name
    p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return str(p)


def test_default_units(cfg):
    assert cfg.membrane.l_x == pytest.approx(40e-6, rel=1e-15) and cfg.toroid.z0 == pytest.approx(15e-9)
    assert cfg.optics.kappa == pytest.approx(TWO_PI * 5e6)
    assert cfg.kappa_ext == pytest.approx(TWO_PI * 2.5e6)
    assert cfg.mode().gamma_m == pytest.approx(TWO_PI * 1.0)


def test_presets_load():
    table = load_config("table1")
    assert table.membrane.l_x == pytest.approx(50e-6)
    assert (table.j, table.k) == (1, 2)
    assert load_config("quadratic").quality_factor == 1.2e7


def test_merge_replaces_mode_block():
    out = merge(defaults(), {"mode": {"j": 2, "k": 1, "Q_m": 5.0}})
    assert out["mode"] == {"j": 2, "k": 1, "Q_m": 5.0}
    assert merge({"a": {"b": 1, "c": 2}}, {"a": {"b": 3}}) == {"a": {"b": 3, "c": 2}}


def test_nominal_override(tmp_path):
    cfg = load_config(write(tmp_path, {"mode": {"j": 1, "k": 1, "gamma_m_Hz": 1.0, "nominal_freq_MHz": 10.0}}))
    assert cfg.mode().omega_m == pytest.approx(TWO_PI * 10e6)
    assert cfg.mode(1, 2).omega_m != pytest.approx(TWO_PI * 10e6)


def test_hash_is_canonical():
    a = {"x": 1, "y": [1, 2]}
    assert config_hash(a) == config_hash({"y": [1, 2], "x": 1})
    assert config_hash(a) != config_hash({"x": 2, "y": [1, 2]})


@pytest.mark.parametrize(
    "overlay,where",
    [
        ({"geometry": {"l_x_um": -4.0}}, "geometry.l_x_um"),
        ({"optics": {"kappa_ext_MHz": 9.0}}, "kappa_ext"),
        ({"field": {"preset": "d9.9"}}, "field.preset"),
        ({"mode": {"j": 1, "k": 1}}, "mode"),
        ({"sweep": {"coupling": {"lx_um": [30.0, 30.0, 5]}}}, "sweep.coupling.lx_um"),
        ({"bogus": 1}, "bogus"),
    ],
)
def test_validation_errors_name_the_field(tmp_path, overlay, where):
    with pytest.raises(ConfigError, match=where.replace(".", r"\.")):
        load_config(write(tmp_path, overlay))


def test_bad_json_reports_line(tmp_path):
    with pytest.raises(ConfigError, match="line 2"):
        load_raw(write(tmp_path, '{\n "geometry": }'))


def test_cli_modes_csv(tmp_path, capsys):
    assert main(["modes", "--out", str(tmp_path)]) == 0
    prov, cols, rows = read_csv(tmp_path / "modes.csv")
    assert cols == ["j_index", "k_index", "omega_m_MHz", "m_eff_kg", "x_zpf_fm", "gamma_m_Hz"]
    assert f"config_sha256={load_config().hash}" in prov and __version__ in prov
    assert rows[0][2] == pytest.approx(10.758287, rel=1e-6)
    assert b"\r" not in (tmp_path / "modes.csv").read_bytes()
    meta = json.loads((tmp_path / "modes.meta.json").read_text())
    assert meta["config_sha256"] == load_config().hash and meta["rows"] == 9


def test_cli_empty_mode_range(tmp_path):
    cfgp = write(tmp_path, {"sweep": {"modes": {"j_max": 0, "k_max": 3}}})
    assert main(["modes", "--config", cfgp, "--out", str(tmp_path)]) == 0
    assert read_csv(tmp_path / "modes.csv")[2] == []


def test_cli_static_json(tmp_path):
    assert main(["static", "--format", "json", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "static.json").read_text())
    rows = data["data"]
    assert list(rows[0]) == ["dks_MHz", "dws_abs_GHz", "z0_nm"]
    vals = [r["dws_abs_GHz"] for r in rows]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_cli_static_row_at_15nm(tmp_path):
    cfgp = write(tmp_path, {"sweep": {"static": {"start_nm": 15.0, "stop_nm": 20.0, "steps": 2}}})
    assert main(["static", "--config", cfgp, "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "static.csv")[2]
    assert rows[0][1] == pytest.approx(408.33, rel=1e-4)


def test_cli_threads_do_not_change_output(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["misalign", "--threads", "1", "--out", str(a)]) == 0
    assert main(["misalign", "--threads", "4", "--out", str(b)]) == 0
    for name in ("misalign_displacement.csv", "misalign_displacement_thresholds.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_cli_coupling_mode_flag(tmp_path):
    cfgp = write(tmp_path, {"sweep": {"coupling": {"lx_um": [40.0, 45.0, 2], "ly_um": [40.0, 45.0, 2]}}})
    assert main(["coupling", "--mode", "1", "2", "--config", cfgp, "--out", str(tmp_path)]) == 0
    _, cols, rows = read_csv(tmp_path / "coupling_j1k2.csv")
    g1, g2 = cols.index("g1_kHz"), cols.index("g2_mHz")
    assert rows[0][g2] == pytest.approx(0.5915, rel=1e-3)
    assert all(abs(r[g1]) < 1e-9 for r in rows)


def test_cli_config_errors_exit_2(tmp_path):
    assert main(["modes", "--config", "no-such-preset", "--out", str(tmp_path)]) == 2
    assert main(["modes", "--config", write(tmp_path, {"geometry": {"l_x_um": -1}}), "--out", str(tmp_path)]) == 2
    assert main(["modes", "--threads", "0", "--out", str(tmp_path)]) == 2


def test_cli_global_flags_before_command(tmp_path):
    assert main(["--out", str(tmp_path), "--format", "json", "switch"]) == 0
    assert (tmp_path / "switch.json").exists()


def test_cli_validate_injected_fault(tmp_path, capsys):
    cfgp = write(tmp_path, {"materials": {"tension_GPa": 2.0}})
    assert main(["validate", "--config", cfgp, "--out", str(tmp_path)]) == 1
    rep = json.loads((tmp_path / "validation.json").read_text())
    check = next(c for c in rep["checks"] if c["id"] == "11a")
    assert check["status"] == "fail"
    assert check["detail"]["delta_MHz"] == pytest.approx(10.758287 * 2**0.5 - 10.758, rel=1e-5)


def test_cli_validate_report_shape(tmp_path):
    main(["validate", "--out", str(tmp_path)])
    rep = json.loads((tmp_path / "validation.json").read_text())
    assert {"config_sha256", "passed", "hard_failures", "soft_failures", "checks"} <= set(rep)
    for c in rep["checks"]:
        assert {"id", "hard", "computed", "expected", "tolerance", "status"} <= set(c)


def test_cli_entangle_flags_unstable(tmp_path):
    cfgp = write(tmp_path, {"apps": {"entangle": {"detuning_over_omega_m": -1.0}}})
    assert main(["entangle", "--config", cfgp, "--out", str(tmp_path)]) == 0
    _, cols, rows = read_csv(tmp_path / "entangle.csv")
    assert all(r[cols.index("status_flag")] == "unstable" for r in rows)
