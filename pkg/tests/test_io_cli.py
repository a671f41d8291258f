import json
import math

import numpy as np
import pytest

from rplscl import cli
from rplscl.grid import DensityGrid, energy_grid
from rplscl.io import format_csv, read_csv, to_json


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_csv_round_trip():
    text = format_csv({"x": [1.0, 2.5], "name": ["a", "b"], "k": [1, 2]},
                      {"alpha": 6.0, "arr": np.array([1, 2]), "z": 1 + 2j})
    meta, cols = read_csv(text)
    assert meta == {"alpha": 6.0, "arr": [1, 2], "z": {"re": 1.0, "im": 2.0}}
    assert cols["x"].tolist() == [1.0, 2.5]
    assert cols["name"] == ["a", "b"]
    with pytest.raises(ValueError):
        format_csv({"x": [1], "y": [1, 2]})


def test_csv_full_precision():
    v = math.pi / 7
    _, cols = read_csv(format_csv({"v": [v]}))
    assert cols["v"][0] == pytest.approx(v, rel=1e-15)


def test_json_handles_numpy():
    assert json.loads(to_json({"a": np.float64(1.5), "b": np.arange(2)})) == {"a": 1.5, "b": [0, 1]}


def test_density_grid_validation():
    with pytest.raises(ValueError):
        DensityGrid("t", np.array([1.0]), np.array([1.0]))
    with pytest.raises(ValueError):
        DensityGrid("E", np.array([2.0, 1.0]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        DensityGrid("E", np.array([1.0, 2.0]), np.array([1.0, np.nan]))
    a = DensityGrid("E", np.array([1.0, 2.0]), np.array([3.0, 4.0]))
    assert (a - a).rms() == 0.0
    assert energy_grid(0, 1, 0.25).tolist() == [0, 0.25, 0.5, 0.75, 1.0]


def test_po_table(capsys):
    code, out, _ = run(capsys, "po-table", "--alpha", "8", "--tau-max", "13")
    assert code == 0
    meta, cols = read_csv(out)
    assert meta["command"] == "po-table" and meta["program"] == "rplscl"
    assert "P" in cols["family"]
    i = cols["family"].index("P")
    assert cols["tau"][i] == pytest.approx(6.48016151627588, rel=1e-10)
    assert list(cols["tau"]) == sorted(cols["tau"])


def test_bif_diagram(capsys):
    code, out, _ = run(capsys, "bif-diagram", "--alpha-range", "6.5:7.5:0.5", "--tau-max", "7")
    assert code == 0
    meta, cols = read_csv(out)
    assert [m["label"] for m in meta["bifurcations"]] == ["P(3,1)"]
    assert meta["bifurcations"][0]["alpha_bif"] == 7.0
    assert set(cols["label"]) == {"1D", "1C", "1P(3,1)"}


def test_trace_per_po(capsys):
    code, out, _ = run(capsys, "trace", "--alpha", "6", "--eps-range", "10:12:0.5", "--per-po")
    assert code == 0
    meta, cols = read_csv(out)
    assert meta["po_set"] == ["1P(5,2)", "1D", "1C"]
    total = cols["1P(5,2)"] + cols["1D"] + cols["1C"]
    assert np.allclose(total, cols["value"], rtol=1e-12, atol=1e-12)


def test_trace_json(capsys):
    code, out, _ = run(capsys, "trace", "--alpha", "6", "--eps-range", "10:11:0.5", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["data"]["value"]) == 3


def test_output_is_deterministic(capsys, tmp_path):
    f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
    for f in (f1, f2):
        assert run(capsys, "trace", "--alpha", "7", "--eps-range", "5:8:0.5", "-o", str(f))[0] == 0
    assert f1.read_text() == f2.read_text()
    meta, _ = read_csv(str(f1))
    assert len(meta["config_digest"]) == 16


def test_spectrum_command(capsys):
    code, out, _ = run(capsys, "spectrum", "--alpha", "2", "--eps-max", "8")
    assert code == 0
    meta, cols = read_csv(out)
    assert cols["eps"][0] == pytest.approx(1.5 * math.sqrt(2), abs=1e-7)
    assert meta["levels"] == len(cols["eps"])


def test_fourier_scl_command(capsys):
    code, out, _ = run(capsys, "fourier", "--alpha", "6", "--source", "scl", "--po-set", "1D",
                       "--gamma-cut", "20", "--tau-range", "4.7:5.7:0.01")
    assert code == 0
    _, cols = read_csv(out)
    assert cols["tau"][np.argmax(cols["absF"])] == pytest.approx(5.152, abs=0.02)


def test_compare_command(capsys):
    code, out, _ = run(capsys, "compare", "--alpha", "6", "--eps-range", "10:20:0.05")
    assert code == 0
    meta, cols = read_csv(out)
    assert set(cols) == {"scaled_energy", "dG_qm_over_eps", "dG_scl_over_eps"}
    assert 0 < meta["rms_ratio"] < 0.3


def test_catastrophe_demo(capsys):
    code, out, _ = run(capsys, "catastrophe-demo", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    for case in doc["cases"].values():
        assert case["relative_difference"] < 1e-6
    assert doc["phase_shift_minus_half_pi"] > 0
    code, out, _ = run(capsys, "catastrophe-demo", "--format", "csv")
    assert code == 0 and "phase_shift" in read_csv(out)[1]["quantity"]


@pytest.mark.parametrize("argv", [
    ["trace", "--alpha", "1"],
    ["trace", "--alpha", "6", "--eps-range", "5:4:0.1"],
    ["trace", "--alpha", "6", "--po-set", "Q:M<=1"],
    ["trace", "--alpha", "6", "--eps-range", "abc"],
    ["po-table"],
    ["nonsense"],
    ["catastrophe-demo", "--a", "0"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_numerical_failure_exit_1(capsys):
    # the direct quadrature refuses to resolve kappa = 1e12 oscillations
    code, _, err = run(capsys, "catastrophe-demo", "--kappa", "1e12")
    assert code == 1
    assert "numerical failure" in err


def test_help_exits_zero(capsys):
    assert run(capsys, "--help")[0] == 0
