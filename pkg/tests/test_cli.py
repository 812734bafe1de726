import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from starklp import cli, ledger

from conftest import KAPPA_REF


def _run(tmp_path, cmd, cfg, name="run"):
    out = tmp_path / name
    cfg = dict(cfg, output=dict(cfg.get("output", {}), directory=str(out)))
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(cfg))
    code = cli.main([cmd, str(path)])
    return code, out


def _read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


BROAD = {"model": {"field_strength": 1.0, "coupling": 2.0}}


def test_exit_code_malformed_json(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"model": {"field_strength": 1.0,, }')
    assert cli.main(["pole", str(p)]) == 1
    assert "bad.json:1:" in capsys.readouterr().err


def test_exit_code_bad_field(tmp_path, capsys):
    code, _ = _run(tmp_path, "smatrix", {"model": {"field_strength": -1.0, "coupling": 2.0}})
    assert code == 1
    assert "model.field_strength" in capsys.readouterr().err


def test_unknown_key_rejected(tmp_path, capsys):
    code, _ = _run(tmp_path, "smatrix", dict(BROAD, smatrix={"samples": 11, "xmax": 3}))
    assert code == 1
    assert "smatrix" in capsys.readouterr().err


def test_pole_zero_coupling_exits_2(tmp_path, capsys):
    code, _ = _run(tmp_path, "pole", {"model": {"field_strength": 1.0, "coupling": 0.0}})
    assert code == 2
    assert "no pole" in capsys.readouterr().err


def test_pole_record_reference_comparison(tmp_path):
    code, out = _run(tmp_path, "pole", {"model": {"field_strength": 1.0, "coupling": -KAPPA_REF}})
    assert code == 0
    rec = json.loads((out / "pole.json").read_text())
    cmp = rec["reference_comparison"]
    assert cmp["reference_z0"][0] == pytest.approx(-4.446)
    assert not cmp["within_1e-3"]      # kappa = +11 lands on the mirror root
    assert cmp["nearest_root"][0] == pytest.approx(-1.3591, abs=1e-3)
    assert rec["certificate"]["window_count"] == 3
    assert rec["residue"]["formula"] is not None and rec["residue"]["contour"] is not None
    meta = json.loads((out / "pole.meta.json").read_text())
    assert set(meta["conventions"]) == set(cli.SIDECAR_KEYS)


def test_pole_record_adopted_convention(tmp_path):
    code, out = _run(tmp_path, "pole", {"model": {"field_strength": 1.0, "coupling": KAPPA_REF}})
    assert code == 0
    rec = json.loads((out / "pole.json").read_text())
    assert rec["reference_comparison"]["within_1e-3"]
    assert rec["model"]["kappa"] == pytest.approx(-11.0)


def test_survival_header_exact(tmp_path):
    code, out = _run(tmp_path, "survival", dict(BROAD, survival={"t_max": 1.0, "t_steps": 5}))
    assert code == 0
    header, data = _read_csv(out / "survival.csv")
    assert header == ["t", "re_contour", "im_contour", "re_pole", "im_pole", "re_oracle", "im_oracle",
                      "abs_contour", "abs_pole", "abs_oracle"]
    assert data.shape == (5, 10)


def test_survival_method_filter(tmp_path):
    code, out = _run(tmp_path, "survival",
                     dict(BROAD, survival={"t_max": 1.0, "t_steps": 3, "methods": ["PoleApprox"]}))
    assert code == 0
    header, _ = _read_csv(out / "survival.csv")
    assert header == ["t", "re_pole", "im_pole", "abs_pole"]


def test_survival_single_time(tmp_path):
    code, out = _run(tmp_path, "survival",
                     dict(BROAD, survival={"t_max": 0.0, "t_steps": 1, "methods": ["Oracle"]}))
    assert code == 0
    header, data = _read_csv(out / "survival.csv")
    assert data.shape == (1, 4)
    assert data[0, header.index("abs_oracle")] == pytest.approx(1.0, abs=1e-10)


def test_smatrix_free_is_one(tmp_path):
    code, out = _run(tmp_path, "smatrix", {"model": {"field_strength": 1.0, "coupling": 0.0}})
    assert code == 0
    header, data = _read_csv(out / "smatrix.csv")
    assert header == ["x", "re_S", "im_S", "abs_S", "phase_unwrapped"]
    assert np.all(data[:, 3] == 1.0) and len(data) == 2001


def test_smatrix_json_format(tmp_path):
    code, out = _run(tmp_path, "smatrix", dict(BROAD, smatrix={"samples": 21},
                                               output={"format": "json"}))
    assert code == 0
    payload = json.loads((out / "smatrix.json").read_text())
    assert len(payload["abs_S"]) == 21
    assert max(abs(v - 1) for v in payload["abs_S"]) <= 1e-10


def test_scan_monotone(tmp_path):
    code, out = _run(tmp_path, "scan", {"model": {"field_strength": 1.0, "coupling": KAPPA_REF}})
    assert code == 0
    header, data = _read_csv(out / "scan.csv")
    assert header == ["E", "re_z0", "im_z0", "re_residue", "im_residue"]
    assert np.all(np.diff(data[:, 1]) < 0)
    meta = json.loads((out / "scan.meta.json").read_text())
    assert meta["diagnostics"]["re_decreasing_violations"] == 0


def test_scan_rejects_unsorted(tmp_path):
    code, _ = _run(tmp_path, "scan", dict(BROAD, scan={"E_values": [1.0, 0.5]}))
    assert code == 1


def test_profile_trapezoid_mass(tmp_path):
    code, out = _run(tmp_path, "profile", BROAD)
    assert code == 0
    header, data = _read_csv(out / "profile.csv")
    assert header == ["x", "intensity"]
    meta = json.loads((out / "profile.meta.json").read_text())["diagnostics"]
    mass = np.trapezoid(data[:, 1], data[:, 0])
    assert mass == pytest.approx(math.pi / meta["half_width"], rel=1e-4)


def test_profile_narrow_pole_unrepresentable(tmp_path, capsys):
    code, _ = _run(tmp_path, "profile", {"model": {"field_strength": 1.0, "coupling": KAPPA_REF}})
    assert code == 2
    assert "floating-point resolution" in capsys.readouterr().err


@pytest.mark.parametrize("cmd,cfg", [
    ("smatrix", BROAD),
    ("survival", dict(BROAD, survival={"t_max": 2.0, "t_steps": 9})),
    ("scan", BROAD),
    ("profile", BROAD),
    ("pole", BROAD),
])
def test_byte_identical_reruns(tmp_path, cmd, cfg):
    _, a = _run(tmp_path, cmd, cfg, "a")
    _, b = _run(tmp_path, cmd, cfg, "b")
    files = sorted(p.name for p in a.iterdir() if ".meta." not in p.name)
    assert files
    for name in files:
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_sidecar_contents(tmp_path):
    _, out = _run(tmp_path, "smatrix", BROAD)
    meta = json.loads((out / "smatrix.meta.json").read_text())
    assert meta["config"]["model"] == BROAD["model"]
    assert meta["version"]
    assert meta["conventions"]["phi-normalization"]["adopted"] == "(2/π)^{1/4} e^{−x²}"
    assert meta["conventions"]["s-matrix-sign"]["adopted"] == ledger.entry("s-matrix-sign").adopted


def test_selftest_passes(tmp_path):
    before = ledger.DATA_FILE.read_bytes()
    code, out = _run(tmp_path, "selftest", {})
    assert code == 0
    rec = json.loads((out / "selftest.json").read_text())
    assert rec["problems"] == []
    assert set(ledger.MANDATORY) <= set(rec["entries"])
    assert ledger.DATA_FILE.read_bytes() == before


def test_console_entry_point(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"model": {"field_strength": 1.0, "coupling": 0.0},
                               "output": {"directory": str(tmp_path / "o")}}))
    res = subprocess.run([sys.executable, "-m", "starklp.cli", "pole", str(cfg)],
                         capture_output=True, text=True)
    assert res.returncode == 2
