import io
import json
import subprocess
import sys

import numpy as np
import pytest

from horoball.cli import ConfigError, main, parse_config, parse_dims


def write_config(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg) if not isinstance(cfg, str) else cfg)
    return str(path)


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out=out, err=err)
    return code, out.getvalue(), err.getvalue()


SIEGEL_1D = {
    "dimension": 1,
    "map": {"type": "siegel_affine", "B": 1.0, "a": 1.0, "tau": [[1, 0]]},
    "tau": [[1, 0]],
    "z0": [[[0, 0]]],
    "n_max": 100,
    "seed": 0,
}


def test_iterate_constant_map(tmp_path):
    cfg = {"dimension": 2, "map": {"type": "constant", "c": [[0.5, 0], [0, 0]]}, "z0": [[[0, 0], [0.1, 0]]], "n_max": 10}
    out = tmp_path / "trace.csv"
    code, text, _ = run(["iterate", "--config", write_config(tmp_path, cfg), "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 3
    assert lines[0].startswith("n,re_1,im_1,re_2,im_2,norm")
    assert "outcome=fixed steps=2" in text


def test_iterate_parabolic_telescoping(tmp_path):
    out = tmp_path / "t.csv"
    code, _, _ = run(["iterate", "--config", write_config(tmp_path, SIEGEL_1D), "--out", str(out)])
    assert code == 0
    rows = out.read_text().splitlines()
    assert len(rows) == 102
    header = rows[0].split(",")
    last = dict(zip(header, rows[-1].split(",")))
    assert 1.0 / float(last["d_to_tau"]) == pytest.approx(101.0, abs=1e-8)
    assert float(last["alpha_bound"]) * 1.0 == pytest.approx(float(last["d_to_tau"]), rel=1e-9)


def test_malformed_json_exit_1(tmp_path):
    code, _, err = run(["iterate", "--config", write_config(tmp_path, "{not json")])
    assert code == 1 and "malformed JSON" in err


@pytest.mark.parametrize(
    "patch, field",
    [
        ({"dimension": "two"}, "dimension"),
        ({"z0": [[[2, 0]]]}, "z0[0]"),
        ({"tau": [[0.5, 0]]}, "tau"),
        ({"map": {"type": "siegel_affine", "B": 0.5, "a": 1, "tau": [[1, 0]]}}, "map"),
        ({"map": {"type": "mobius"}}, "map.a"),
        ({"tolerances": {"eps_bogus": 1}}, "tolerances.eps_bogus"),
        ({"n_max": -3}, "n_max"),
    ],
)
def test_config_errors_name_the_field(tmp_path, patch, field):
    cfg = dict(SIEGEL_1D, **patch)
    code, _, err = run(["iterate", "--config", write_config(tmp_path, cfg)])
    assert code == 1
    assert f"error: {field}" in err


def test_missing_config_file_and_bad_arguments(tmp_path):
    assert run(["iterate", "--config", str(tmp_path / "nope.json")])[0] == 1
    assert run(["frobnicate"])[0] == 1
    assert run(["verify", "--suite", "nonsense"])[0] == 1
    assert run(["verify", "--dims", "1,x"])[0] == 1
    with pytest.raises(ConfigError):
        parse_dims("0")
    with pytest.raises(ConfigError):
        parse_config([])


def test_rates_equality_case(tmp_path):
    out = tmp_path / "r.csv"
    code, text, _ = run(["rates", "--config", write_config(tmp_path, SIEGEL_1D), "--out", str(out)])
    assert code == 0 and "PASS" in text
    rows = [r.split(",") for r in out.read_text().splitlines()]
    assert rows[0] == ["n", "d_to_tau", "alpha_bound", "ratio"]
    assert rows[1][3] == "1"
    ratios = np.array([float(r[3]) for r in rows[1:]])
    assert np.all(np.abs(ratios - 1) < 1e-9)


def test_rates_hyperbolic_case(tmp_path):
    cfg = dict(SIEGEL_1D, map={"type": "siegel_affine", "B": 2.0, "a": 1.0, "tau": [[1, 0]]}, z0=[[[0.3, 0.2]]])
    out = tmp_path / "r.csv"
    code, _, _ = run(["rates", "--config", write_config(tmp_path, cfg), "--out", str(out)])
    assert code == 0
    ratios = np.array([float(r.split(",")[3]) for r in out.read_text().splitlines()[1:]])
    assert np.all(ratios <= 1 + 1e-7)


def test_rates_exit_3_on_violated_bound(tmp_path):
    # claiming a larger k than the map provides makes the bound too strong
    cfg = dict(SIEGEL_1D, beta=1.0, k=4.0)
    code, text, _ = run(["rates", "--config", write_config(tmp_path, cfg)])
    assert code == 3 and "FAIL" in text


def test_rates_without_certificate_is_config_error(tmp_path):
    cfg = dict(SIEGEL_1D, map={"type": "identity"})
    assert run(["rates", "--config", write_config(tmp_path, cfg)])[0] == 1


def test_classify_outcomes(tmp_path):
    contraction = {
        "dimension": 2,
        "map": {"type": "linear", "matrix": [[[0.5, 0], [0.1, 0]], [[0, 0], [0.25, 0]]]},
        "z0": [[[0.3, 0], [0, 0.1]]],
        "n_max": 2000,
        "seed": 5,
    }
    code, text, _ = run(["classify", "--config", write_config(tmp_path, contraction)])
    report = json.loads(text)
    assert code == 0 and report["outcome"] == "interior" and report["spectral_radius"] < 1

    code, text, _ = run(["classify", "--config", write_config(tmp_path, SIEGEL_1D)])
    report = json.loads(text)
    assert report["outcome"] == "sink"
    assert report["beta"] == pytest.approx(1.0, abs=1e-6) and report["k"] == pytest.approx(2.0, rel=1e-3)

    rotation = dict(contraction, map={"type": "unitary", "matrix": [[[0, 0], [1, 0]], [[-1, 0], [0, 0]]]})
    out = tmp_path / "c.json"
    code, text, _ = run(["classify", "--config", write_config(tmp_path, rotation), "--out", str(out)])
    assert json.loads(text)["outcome"] == "undetermined"
    assert out.read_text() == text


def test_outputs_are_deterministic(tmp_path):
    path = write_config(tmp_path, SIEGEL_1D)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(["iterate", "--config", path, "--out", str(a)])
    run(["iterate", "--config", path, "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
    c1 = run(["classify", "--config", path, "--seed", "7"])[1]
    c2 = run(["classify", "--config", path, "--seed", "7"])[1]
    assert c1 == c2


def test_verify_single_suite(tmp_path):
    out = tmp_path / "report.txt"
    code, text, _ = run(["verify", "--suite", "geometry", "--seed", "3", "--dims", "1,2", "--out", str(out)])
    assert code == 0
    assert text == out.read_text()
    assert text.splitlines()[0] == "horoball verify seed=3 dims=1,2"
    assert all(line.startswith("PASS geometry") for line in text.splitlines()[1:-1])


def test_verify_siegel_suite_routing():
    code, text, _ = run(["verify", "--suite", "siegel", "--dims", "2"])
    assert code == 0
    body = text.splitlines()[1:-1]
    assert all(" siegel " in line for line in body)
    for name in (
        "S(C(z)) d(z,tau) = 1",
        "S(x + a tau) = S(x) + a",
        "sigma via Siegel",
        "T(x-a tau, y-a tau)",
        "Re T(x,y) >= S(x) + S(y)",
        "|T-2a|^2",
        "|x-y|^2 >= |<x-y,tau>|^2",
    ):
        assert any(name in line for line in body)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "horoball", "verify", "--suite", "nonsense"], capture_output=True, text=True)
    assert proc.returncode == 1 and "unknown suite" in proc.stderr
