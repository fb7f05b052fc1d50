from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
import pytest
import yaml

from conftau.cli import load_config, main, parse_config, potential_from_spec
from conftau.errors import ConfigError

DEFAULT = Path(__file__).resolve().parents[1] / "configs" / "default.yaml"


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def write_cfg(tmp_path, data, name="cfg.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(data))
    return p


def ellipse_cfg(**extra):
    d = {
        "bases": [{"name": "ell", "shape": {"r": 1.0, "u": [[0, 0], [0.1, 0]]}, "potential": "sigma=1"}],
        "convergence": False,
    }
    d.update(extra)
    return d


def disk_cfg(**extra):
    d = {"bases": [{"name": "disk", "shape": {"r": 1.0, "u": []}, "potential": "sigma=1"}]}
    d.update(extra)
    return d


def test_default_config_passes(tmp_path):
    rep = tmp_path / "report.txt"
    assert main(["verify", "--config", str(DEFAULT), "--report", str(rep)]) == 0
    header, rows = read_csv(tmp_path / "report.csv")
    ids = {r[header.index("id")] for r in rows}
    assert len(ids) >= 18
    assert all(r[header.index("status")] == "PASS" for r in rows)
    assert (tmp_path / "report.config.yaml").exists()


def test_tight_tolerance_fails(tmp_path):
    cfg = write_cfg(tmp_path, ellipse_cfg(tolerances={"HIR_TODA": 1e-12}))
    code = main(["verify", "--config", str(cfg), "--suite", "HIR_TODA", "--report", str(tmp_path / "r.txt")])
    assert code == 1


@pytest.mark.parametrize(
    "data",
    [
        {"bases": [{"name": "x", "potential": "sigma=1"}]},
        {"bases": [{"name": "x", "shape": {"r": 1.0}, "potential": "sigma=1"}], "colour": "red"},
        {"bases": [{"name": "x", "shape": {"r": 1.0, "u": [[0, 0], [0, 0], [0.5, 0]]}, "potential": "sigma=1"}]},
        {"bases": [{"name": "x", "shape": {"r": 1.0}, "potential": "sigma=|z|^3"}]},
        {"bases": [{"name": "x", "shape": {"r": 1.0}, "potential": "sigma=1"}], "truncations": {"K": "eight"}},
        {"bases": []},
        [1, 2, 3],
    ],
)
def test_bad_config_exit_2(tmp_path, data):
    cfg = write_cfg(tmp_path, data)
    assert main(["verify", "--config", str(cfg), "--report", str(tmp_path / "r.txt")]) == 2


def test_malformed_yaml_and_missing_file(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("bases: [unclosed\n")
    assert main(["verify", "--config", str(bad)]) == 2
    assert main(["verify", "--config", str(tmp_path / "absent.yaml")]) == 2


def test_bad_arguments_exit_2(tmp_path):
    assert main([]) == 2
    assert main(["export", "--config", str(DEFAULT), "--what", "pictures", "--out", "x.csv"]) == 2
    cfg = write_cfg(tmp_path, disk_cfg())
    assert main(["verify", "--config", str(cfg), "--suite", "NOPE"]) == 2


def test_presets_expand():
    assert potential_from_spec("sigma=1").T.tolist() == [[-1.0]]
    T = potential_from_spec("sigma=|z|^2").T
    assert T.shape == (2, 2) and T[1, 1] == -0.25
    explicit = {"name": "x", "shape": {"r": 1.0}, "potential": {"T": [[[0, 0], [0, 0]], [[0, 0], [-0.25, 0]]]}}
    (base,) = parse_config({"bases": [explicit]}).materialize()
    assert base.pot.key() == potential_from_spec("sigma=|z|^2").key()
    with pytest.raises(ConfigError):
        potential_from_spec("sigma=cos")


def test_config_round_trip():
    cfg = load_config(DEFAULT)
    assert parse_config(cfg.to_dict()) == cfg
    assert parse_config(yaml.safe_load(yaml.safe_dump(cfg.to_dict()))) == cfg


def test_echo_reproduces_report(tmp_path):
    cfg = write_cfg(tmp_path, ellipse_cfg(identities=["DTODA", "SYMM", "HOMOG"]))
    r1, r2 = tmp_path / "a" / "r.txt", tmp_path / "b" / "r.txt"
    assert main(["verify", "--config", str(cfg), "--report", str(r1)]) == 0
    assert main(["verify", "--config", str(r1.with_name("r.config.yaml")), "--report", str(r2)]) == 0
    body = lambda p: p.read_text().split("\n", 1)[1]
    assert body(r1) == body(r2)


def test_export_curve(tmp_path):
    cfg = write_cfg(tmp_path, ellipse_cfg())
    out = tmp_path / "curve.csv"
    assert main(["export", "--config", str(cfg), "--what", "curve", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["theta", "re_z", "im_z"] and len(rows) == 512
    z = np.array([[float(r[1]), float(r[2])] for r in rows])
    gaps = np.linalg.norm(np.diff(np.vstack([z, z[:1]]), axis=0), axis=1)
    assert gaps.max() < 2 * gaps.min()


def test_export_moments_disk(tmp_path):
    cfg = write_cfg(tmp_path, disk_cfg())
    out = tmp_path / "m.csv"
    assert main(["export", "--config", str(cfg), "--what", "moments", "--out", str(out)]) == 0
    header, rows = read_csv(out)
    assert float(rows[0][1]) == pytest.approx(1.0, abs=1e-14)
    assert all(abs(float(r[1])) < 1e-14 and abs(float(r[2])) < 1e-14 for r in rows[1:])


def test_export_fgrid_disk(tmp_path):
    cfg = write_cfg(tmp_path, disk_cfg(export={"t0_min": 0.5, "t0_max": 2.0, "n_t0": 7}))
    out = tmp_path / "f.csv"
    assert main(["export", "--config", str(cfg), "--what", "fgrid", "--out", str(out)]) == 0
    _, rows = read_csv(out)
    t0 = np.array([float(r[0]) for r in rows])
    F = np.array([float(r[1]) for r in rows])
    assert np.allclose(F, 0.5 * t0**2 * np.log(t0) - 0.75 * t0**2, atol=1e-10)
    # full 17-digit output
    assert len(rows[1][1].lstrip("-").replace(".", "").lstrip("0")) >= 15


def test_export_green(tmp_path):
    cfg = write_cfg(tmp_path, ellipse_cfg(export={"green_radii": 4, "green_angles": 8}))
    out = tmp_path / "g.csv"
    assert main(["export", "--config", str(cfg), "--what", "green", "--out", str(out)]) == 0
    _, rows = read_csv(out)
    G = np.array([float(r[2]) for r in rows])
    assert len(rows) == 32 and np.all(G < 0)


def test_export_unknown_base(tmp_path):
    cfg = write_cfg(tmp_path, disk_cfg(export={"base": "nowhere"}))
    assert main(["export", "--config", str(cfg), "--what", "curve", "--out", str(tmp_path / "c.csv")]) == 2
