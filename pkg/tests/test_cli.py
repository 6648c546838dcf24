import csv
import json
import subprocess
import sys

import pytest

from isqlab.cli import EXIT_CONFIG, EXIT_HORIZON, EXIT_OK, main
from isqlab.io import SCHEMA, load_config, read_manifests

SMALL = """
[run]
seed = 3

[selftest]
size = 128

[scatter]
a = 0.0
radius = 300.0
size = 512

[propagate]
a = 0.0
radius = 300.0
size = 768

[critical]
radius = 300.0
size = 512

[inequalities]
dimensions = (3,)
couplings = (1.0,)
s_values = (1.0,)
size = 256
refine = False
spans = (8.0, 128.0)

[criterion]
size = 400
wave_size = 1000
wave_radius = 100.0
"""


@pytest.fixture(scope="module")
def small(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "small.ini"
    path.write_text(SMALL)
    return path


def run(cmd, cfg, out, *extra):
    return main([cmd, "--config", str(cfg), "--out", str(out), *extra])


def rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


OUTPUTS = {
    "selftest": ["selftest.csv", "selftest.json"],
    "propagate": ["propagate.csv", "propagate.json"],
    "scatter": ["scatter.csv", "scatter.json"],
    "critical": ["critical_radial.csv", "critical_scattered.csv", "critical.json"],
    "inequalities": ["hardy.csv", "hardy_sharpness.csv", "sobolev.csv", "norm_sweep.csv",
                     "norm_sweep_summary.csv", "kato.csv", "inequalities.json"],
    "criterion": ["criterion_wave.csv", "criterion_h2.csv", "criterion.json"],
}


@pytest.mark.parametrize("cmd", sorted(OUTPUTS))
def test_every_command_runs(cmd, small, tmp_path):
    assert run(cmd, small, tmp_path) == EXIT_OK
    for name in OUTPUTS[cmd]:
        assert (tmp_path / name).exists(), name
    (m,) = read_manifests(tmp_path)
    assert m["status"] == "ok" and m["experiment"] == cmd
    assert sorted(m["outputs"]) == sorted(OUTPUTS[cmd])
    for name in OUTPUTS[cmd]:
        if name.endswith(".csv"):
            with open(tmp_path / name) as fh:
                assert fh.readline().startswith("manifest_id,")
            assert all(r["manifest_id"] == m["manifest_id"] for r in rows(tmp_path / name))
        else:
            body = json.loads((tmp_path / name).read_text())
            assert body["schema_version"] == "1.0" and body["manifest_id"] == m["manifest_id"]


def test_report_collects_outputs(small, tmp_path):
    run("selftest", small, tmp_path)
    run("criterion", small, tmp_path)
    assert main(["report", "--out", str(tmp_path)]) == EXIT_OK
    got = rows(tmp_path / "summary.csv")
    assert {r["quantity"] for r in got} >= {"all_pass", "min_eigenvalue"}
    assert len(read_manifests(tmp_path)) == 3


@pytest.mark.parametrize("cmd", ["inequalities", "criterion", "scatter", "critical"])
def test_outputs_are_byte_identical(cmd, small, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run(cmd, small, a)
    run(cmd, small, b, "--threads", "2")
    for name in OUTPUTS[cmd]:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
    ma, mb = read_manifests(a)[0], read_manifests(b)[0]
    assert ma["manifest_id"] == mb["manifest_id"]


def test_seed_changes_the_manifest(small, tmp_path):
    run("selftest", small, tmp_path / "a")
    run("selftest", small, tmp_path / "b", "--seed", "11")
    assert read_manifests(tmp_path / "a")[0]["manifest_id"] != read_manifests(tmp_path / "b")[0]["manifest_id"]


def test_unknown_keys_are_rejected(tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[scatter]\nsize = 512\nsizee = 3\n[bogus]\nx = 1\n")
    out = tmp_path / "out"
    assert run("scatter", cfg, out) == EXIT_CONFIG
    err = json.loads((out / "error.json").read_text())
    assert err["exit_code"] == EXIT_CONFIG
    assert "scatter.sizee" in err["message"] and "[bogus]" in err["message"]


def test_bad_types_are_rejected(tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[scatter]\nsize = 'many'\n")
    assert run("scatter", cfg, tmp_path / "out") == EXIT_CONFIG
    assert main(["selftest", "--out", str(tmp_path / "o2"), "--threads", "0"]) == EXIT_CONFIG


def test_strict_horizon(tmp_path):
    cfg = tmp_path / "tight.ini"
    cfg.write_text("[scatter]\nradius = 60.0\nsize = 600\n")
    assert run("scatter", cfg, tmp_path / "loose") == EXIT_OK
    got = rows(tmp_path / "loose" / "scatter.csv")
    assert any(r["flagged"] == "True" for r in got)
    out = tmp_path / "strict"
    assert run("scatter", cfg, out, "--strict") == EXIT_HORIZON
    (m,) = read_manifests(out)
    assert m["status"] == "horizon" and "error.json" in m["outputs"]


def test_radial_critical_field(small, tmp_path):
    run("critical", small, tmp_path)
    assert rows(tmp_path / "critical_scattered.csv") == []
    res = [float(r["conjugation_residual"]) for r in rows(tmp_path / "critical_radial.csv")]
    assert len(res) == 2 and max(res) <= 1e-12


def test_offset_critical_field(tmp_path):
    cfg = tmp_path / "offset.ini"
    cfg.write_text("[critical]\nfield = 'offset_gaussian'\nalpha = 0.5\noffset = 0.5\nmax_l = 2\n"
                   "radius = 400.0\nsize = 1024\n")
    assert run("critical", cfg, tmp_path / "out") == EXIT_OK
    body = json.loads((tmp_path / "out" / "critical.json").read_text())
    assert set(body["components"]) == {"0", "1", "2"}
    assert set(body["scattered_channel"]) == {"1", "2"}


def test_zero_coupling_scatter_is_exact(small, tmp_path):
    run("scatter", small, tmp_path)
    assert all(float(r["residual"]) == 0.0 for r in rows(tmp_path / "scatter.csv"))
    body = json.loads((tmp_path / "scatter.json").read_text())
    assert body["limit_input_gap"] == 0.0


def test_default_schema_roundtrip():
    cfg = load_config()
    assert cfg.keys() == SCHEMA.keys()
    assert cfg["scatter"]["schedule"] == (10.0, 20.0, 40.0, 80.0)


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "isqlab", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "selftest" in proc.stdout
