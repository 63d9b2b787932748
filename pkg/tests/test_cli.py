import json
import math
import subprocess
import sys

import numpy as np
import pytest

from multipoint.cli import main
from multipoint.model import Configuration, load_configuration, make_polygon, save_configuration


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    def write(name, config):
        path = tmp_path / name
        path.write_text(save_configuration(config))
        return path
    return write


@pytest.fixture
def tetra(tmp_path, capsys):
    path = tmp_path / "tetra.json"
    assert run(capsys, "gen", "tetrahedron", "--edge", 1, "-o", path)[0] == 0
    return path


def _csv(text):
    lines = text.strip().splitlines()
    return lines[0].split(","), [line.split(",") for line in lines[1:]]


# --- gen ----------------------------------------------------------------------

def test_gen_tetrahedron_stdout(capsys):
    code, out, _ = run(capsys, "gen", "tetrahedron", "--edge", 1)
    assert code == 0
    config = load_configuration(out)
    assert config.n == 4
    assert config.alphas == pytest.approx([-1 / (4 * math.pi)] * 4, rel=1e-15)
    assert config.alphas[0] == pytest.approx(-0.0795774715, abs=1e-10)


def test_gen_polygon_in_plane(capsys):
    code, out, _ = run(capsys, "gen", "polygon", "--m", 3, "--r0", 1)
    assert code == 0
    doc = json.loads(out)
    assert list(doc) == ["scatterers"]
    assert len(doc["scatterers"]) == 6
    assert all(s["position"][2] == 0 for s in doc["scatterers"])
    assert all(set(s) == {"position", "alpha"} for s in doc["scatterers"])


@pytest.mark.parametrize("argv", [
    ["gen", "polygon", "--m", "0"],
    ["gen", "polygon", "--m", "2", "--r0", "-1"],
    ["gen", "tetrahedron", "--edge", "0"],
])
def test_gen_invalid_params(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == "" and err.startswith("error:")


def test_argparse_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["gen", "polygon"])
    assert info.value.code == 2


# --- boundstates --------------------------------------------------------------

def test_boundstates_tetrahedron(capsys, tetra):
    code, out, _ = run(capsys, "boundstates", tetra)
    assert code == 0
    report = json.loads(out)
    assert report["multiplicity"] == 3
    assert len(report["basis"]) == 3
    assert len(report["singular_values"]) == 4
    assert report["margin"] >= 1e6
    man = report["manifest"]
    assert man["command"] == "boundstates" and man["rank_tolerance"] == 1e-8
    assert "timestamp" not in man


def test_boundstates_square(capsys, files):
    code, out, _ = run(capsys, "boundstates", files("sq.json", make_polygon(2, 1.0)))
    assert code == 0
    report = json.loads(out)
    assert report["multiplicity"] == 1
    assert report["basis"] == [pytest.approx([0.5, -0.5, 0.5, -0.5], abs=1e-14)]


def test_boundstates_generic_is_success(capsys, files):
    from oracles import mp_multiplicity

    rng = np.random.default_rng(8)
    config = Configuration.from_arrays(rng.uniform(-1, 1, (5, 3)), rng.uniform(-1, 1, 5))
    assert mp_multiplicity(config) == 0
    code, out, _ = run(capsys, "boundstates", files("g.json", config))
    assert code == 0
    report = json.loads(out)
    assert report["multiplicity"] == 0 and report["basis"] == []
    assert report["sigma_max_discarded"] is None  # nan serializes as null


def test_boundstates_bad_inputs(capsys, tmp_path):
    assert run(capsys, "boundstates", tmp_path / "missing.json")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"scatterers": [{"position": [0, 0], "alpha": 1}]}')
    code, _, err = run(capsys, "boundstates", bad)
    assert code == 2 and "scatterers[0].position" in err
    bad.write_text("not json")
    assert run(capsys, "boundstates", bad)[0] == 2


def test_boundstates_coincident_points(capsys, tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"scatterers": [{"position": [0, 0, 0], "alpha": 1},
                                               {"position": [0, 0, 0], "alpha": 1}]}))
    assert run(capsys, "boundstates", path)[0] == 2


# --- scan ---------------------------------------------------------------------

def test_scan_single_row(capsys):
    code, out, _ = run(capsys, "scan", "--m-max", 1)
    assert code == 0
    header, rows = _csv(out)
    assert header == ["m", "multiplicity", "sigma_min_retained", "sigma_max_discarded", "margin"]
    assert len(rows) == 1 and rows[0][:2] == ["1", "1"]


def test_scan_rejects_zero(capsys):
    assert run(capsys, "scan", "--m-max", 0)[0] == 2


def test_scan_threads_same_output(capsys):
    serial = run(capsys, "scan", "--m-max", 10)[1]
    threaded = run(capsys, "--threads", 4, "scan", "--m-max", 10)[1]
    assert serial == threaded


# --- scatter ------------------------------------------------------------------

def test_scatter_single_closed_form(capsys, files):
    z, alpha, E = [0.3, -0.2, 0.7], -0.37, 2.0
    path = files("one.json", Configuration.from_arrays([z], alpha))
    code, out, _ = run(capsys, "scatter", path, "--energy", E, "--dir", "0,0,2")
    assert code == 0
    report = json.loads(out)
    q = complex(report["q_re"][0], report["q_im"][0])
    k = math.sqrt(E)
    expected = -np.exp(1j * k * z[2]) / (alpha - 1j * k / (4 * math.pi))
    assert abs(q - expected) <= 1e-14 * abs(expected)
    assert report["manifest"]["command"] == "scatter"


def test_scatter_tetrahedron_resonance(capsys, tetra):
    code, out, err = run(capsys, "scatter", tetra, "--energy", 0, "--constant", 1)
    assert code == 3
    assert "smallest singular value" in err


@pytest.mark.parametrize("extra", [
    ["--energy", "-1"],
    ["--energy", "1", "--constant", "1"],
    ["--dir", "1,2"],
    ["--grid", "0:1:2,0:1"],
])
def test_scatter_usage_errors(capsys, files, extra):
    path = files("one.json", Configuration.from_arrays([[0, 0, 0]], 0.5))
    assert run(capsys, "scatter", path, *extra)[0] == 2


def test_scatter_grid(capsys, files, tmp_path):
    path = files("seg.json", make_polygon(1, 0.5).with_alphas(0.3))
    grid_out = tmp_path / "grid.csv"
    code, _, _ = run(capsys, "scatter", path, "--energy", 1, "--grid=-1:1:3,0:0:1,0:0:1",
                     "--grid-output", grid_out)
    assert code == 0
    header, rows = _csv(grid_out.read_text())
    assert header == ["x", "y", "z", "re_psi", "im_psi", "abs_psi"]
    assert [r[0] for r in rows] == ["-1", "0", "1"]
    assert all(r[3] != "nan" for r in rows)


def test_scatter_grid_hits_scatterer(capsys, files):
    path = files("seg.json", make_polygon(1, 0.5).with_alphas(0.3))
    code, out, _ = run(capsys, "scatter", path, "--energy", 1, "--grid", "0.5:0.5:1,0:0:1,0:0:1")
    assert code == 0
    assert out.strip().splitlines()[-1].endswith("nan,nan,nan")


# --- decay --------------------------------------------------------------------

@pytest.mark.parametrize("polygon,expected", [("3,1", 4.0), ("1,0.5", 2.0)])
def test_decay_polygon(capsys, tmp_path, polygon, expected):
    out_path = tmp_path / "decay.csv"
    code, out, _ = run(capsys, "decay", "--polygon", polygon, "-o", out_path)
    assert code == 0
    label, value = out.split()
    assert label == "fitted_exponent"
    assert float(value) == pytest.approx(expected, abs=0.05)
    header, rows = _csv(out_path.read_text())
    assert header == ["R", "F_R", "log_R", "log_F"]
    assert len(rows) == 21


def test_decay_from_file_matches_polygon(capsys, files):
    code, _, err = run(capsys, "decay", files("hex.json", make_polygon(3, 1.0)))
    assert code == 0
    assert float(err.split()[1]) == pytest.approx(4.0, abs=0.05)


def test_decay_no_bound_state(capsys, files):
    path = files("two.json", Configuration.from_arrays([[0, 0, 0], [1, 0, 0]], [0.3, -0.2]))
    code, out, err = run(capsys, "decay", path)
    assert code == 4
    assert "no bound state to analyze" in err


def test_decay_multipoles(capsys, tmp_path):
    mp = tmp_path / "c.csv"
    code, _, _ = run(capsys, "decay", "--polygon", "2,1", "--ndirs", 32, "-o", tmp_path / "d.csv",
                     "--multipoles", mp)
    assert code == 0
    header, rows = _csv(mp.read_text())
    assert header == ["l", "theta", "phi", "C_l"]


@pytest.mark.parametrize("argv", [
    ["decay"],
    ["decay", "--polygon", "3"],
    ["decay", "--polygon", "3,1", "--index", "1"],
    ["decay", "--polygon", "3,1", "--rmin", "10", "--rmax", "1"],
])
def test_decay_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


# --- verify -------------------------------------------------------------------

def test_verify_bound_states(capsys, tetra):
    code, out, _ = run(capsys, "verify", tetra, "--boundstates")
    assert code == 0
    report = json.loads(out)
    assert report["passed"] is True
    assert len(report["checks"]) == 12
    assert report["max_residual"] <= 1e-6


def test_verify_scattering(capsys, files):
    rng = np.random.default_rng(1)
    config = Configuration.from_arrays(rng.uniform(-1, 1, (4, 3)), rng.uniform(-1, 1, 4))
    code, out, _ = run(capsys, "verify", files("r.json", config), "--energy", 4, "--dir", "1,1,0")
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_verify_failure_exit_1(capsys, files):
    config = Configuration.from_arrays([[0, 0, 0], [1, 0, 0]], [0.3, -0.2])
    code, out, _ = run(capsys, "verify", files("two.json", config), "--energy", 1, "--tol", 1e-30)
    assert code == 1
    assert json.loads(out)["passed"] is False


def test_verify_boundstates_empty(capsys, files):
    config = Configuration.from_arrays([[0, 0, 0], [1, 0, 0]], [0.3, -0.2])
    assert run(capsys, "verify", files("two.json", config), "--boundstates")[0] == 4


# --- determinism and manifests ------------------------------------------------

@pytest.mark.parametrize("verb", [
    ["boundstates", "{tetra}"],
    ["scan", "--m-max", "6"],
    ["scatter", "{tetra}", "--energy", "1", "--dir", "1,0,0", "--grid=-1:1:3,-1:1:2,0:1:2"],
    ["decay", "--polygon", "2,1"],
    ["verify", "{tetra}", "--boundstates"],
    ["gen", "polygon", "--m", "5"],
])
def test_byte_identical_outputs(capsys, tmp_path, tetra, verb):
    argv = [a.format(tetra=tetra) for a in verb]
    first = tmp_path / "a.out"
    second = tmp_path / "b.out"
    assert run(capsys, *argv, "-o", first)[0] == 0
    assert run(capsys, *argv, "-o", second)[0] == 0
    assert first.read_bytes() == second.read_bytes()


def test_sidecar_manifest(capsys, tmp_path, tetra):
    out_path = tmp_path / "bs.json"
    assert run(capsys, "boundstates", tetra, "--rtol", 1e-9, "-o", out_path)[0] == 0
    man = json.loads((tmp_path / "bs.json.manifest.json").read_text())
    assert man["command"] == "boundstates"
    assert man["parameters"]["rtol"] == 1e-9
    assert man["rank_tolerance"] == 1e-9
    assert "version" in man and "timestamp" in man
    assert man["parameters"]["output"] == str(out_path)


def test_manifest_reproduces_run(capsys, tmp_path, tetra):
    # re-running with the recorded parameters gives the same bytes
    out_path = tmp_path / "scan.csv"
    assert run(capsys, "scan", "--m-max", 4, "--r0", 2, "-o", out_path)[0] == 0
    params = json.loads((tmp_path / "scan.csv.manifest.json").read_text())["parameters"]
    code, out, _ = run(capsys, "scan", "--m-max", params["m_max"], "--r0", params["r0"], "--rtol", params["rtol"])
    assert code == 0 and out == out_path.read_text()


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "multipoint.cli", "gen", "polygon", "--m", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert load_configuration(proc.stdout).n == 2
    proc = subprocess.run([sys.executable, "-m", "multipoint.cli", "scan", "--m-max", "0"],
                          capture_output=True, text=True)
    assert proc.returncode == 2
