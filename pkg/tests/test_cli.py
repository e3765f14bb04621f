import json

import numpy as np
import pytest

from bowtie_mbqc.cli import main, parse_inputs


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_toffoli_logical_example(capsys):
    code, out, _ = run(capsys, "toffoli", "--in", "one,one,zero", "--outcomes", "0000000000")
    data = json.loads(out)
    assert code == 0
    assert data["fidelity_vs_oracle"] == pytest.approx(1.0, abs=1e-12)
    assert abs(complex(*data["oracle"][7])) == pytest.approx(1.0)
    assert data["frame"] == {"x": {}, "z": {}, "cp": []}


def test_toffoli_keep_dressing(capsys):
    code, out, _ = run(capsys, "toffoli", "--in", "plus;0.6,0.8j;one", "--outcomes", "1011001110", "--keep-dressing")
    assert code == 0 and json.loads(out)["dressing"] == "kept"


def test_toffoli_seeded_output_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["toffoli", "--in", "zero,zero,zero", "--sample", "--seed", "7", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert not list(tmp_path.glob(".*.tmp"))


def test_toffoli_missing_input_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["toffoli"])
    assert exc.value.code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["toffoli", "--in", "one,one"],
        ["toffoli", "--in", "one,one,banana"],
        ["toffoli", "--in", "one,one,zero", "--outcomes", "0101"],
        ["toffoli", "--in", "one,one,zero", "--outcomes", "01010101x1"],
        ["toffoli", "--in", "one,one,zero", "--seed", "-1"],
        ["toffoli", "--in", "one,one,zero", "--format", "csv"],
        ["sweep", "--eps-index", "9"],
        ["sweep", "--tau", "1", "0", "0.1"],
        ["lattice-map", "--resolution", "1"],
        ["lattice-map", "--x-range", "3,1"],
        ["lattice-map", "--format", "json", "--graph", "nonexistent"],
        ["estimate", "--n", "2"],
        ["wire", "--length", "0"],
    ],
)
def test_config_errors_exit_2(capsys, argv, tmp_path):
    assert main(argv + ["--out", str(tmp_path / "o")]) == 2
    assert not (tmp_path / "o").exists()


def test_sweep_contains_ideal_row(capsys):
    code, out, _ = run(capsys, "sweep", "--eps-index", "2")
    assert code == 0
    assert "1,0,1.000000000000" in out.splitlines()
    assert len(out.splitlines()) == 1 + 101 * 41


def test_sweep_custom_grid(capsys):
    code, out, _ = run(capsys, "sweep", "--eps-index", "1", "--tau", "0", "1", "0.5", "--eps", "-0.1", "0.1", "0.1")
    assert code == 0 and len(out.splitlines()) == 1 + 3 * 3


def test_lattice_map_pgm(tmp_path):
    path = tmp_path / "v.pgm"
    assert main(["lattice-map", "--format", "pgm", "--resolution", "16", "--out", str(path)]) == 0
    lines = path.read_text().splitlines()
    assert lines[:3] == ["P2", "16 16", "255"]


def test_lattice_map_csv_origin(capsys):
    code, out, _ = run(capsys, "lattice-map", "--v1", "0.5", "--v2", "1.5", "--resolution", "4")
    x, y, v = out.splitlines()[1].split(",")
    assert (float(x), float(y), float(v)) == (0.0, 0.0, 3.0)


def test_lattice_map_graph_json(capsys, tmp_path):
    code, out, _ = run(capsys, "lattice-map", "--format", "json", "--graph", "toffoli")
    data = json.loads(out)
    assert code == 0 and len(data["sites"]) == 13
    path = tmp_path / "g.json"
    path.write_text(out)
    code, out2, _ = run(capsys, "lattice-map", "--format", "json", "--graph", str(path))
    assert json.loads(out2) == data


def test_estimate(capsys):
    code, out, _ = run(capsys, "estimate", "--n", "4")
    data = json.loads(out)
    assert code == 0
    assert {k: data[k] for k in ("toffolis_per_nCNOT", "cluster_qubits_per_toffoli", "compact_qubits_per_toffoli")} == {
        "toffolis_per_nCNOT": 4,
        "cluster_qubits_per_toffoli": 65,
        "compact_qubits_per_toffoli": 13,
    }
    _, out, _ = run(capsys, "estimate", "--n", "3")
    assert json.loads(out)["three_qubit_search_cluster_qubits"] == 245


def test_verify_only(capsys):
    code, out, _ = run(capsys, "verify", "--only", "byproduct", "--only", "resources")
    assert code == 0
    assert "byproduct" in out and "2/2 checks passed" in out


def test_verify_reports_failure(capsys):
    code, out, _ = run(capsys, "verify", "--only", "bridging")
    assert code == 1 and "[FAIL]" in out


@pytest.mark.parametrize("s", ["0", "1"])
def test_enlarge(capsys, s):
    code, out, _ = run(capsys, "enlarge", "--in", "plus;1,1j;0.6,0.8", "--outcomes", s * 4)
    assert code == 0 and json.loads(out)["fidelity_vs_oracle"] > 1 - 1e-9


def test_wire(capsys):
    code, out, _ = run(capsys, "wire", "--in", "1,1j", "--length", "3", "--sample", "--seed", "2")
    assert code == 0 and json.loads(out)["fidelity_vs_oracle"] > 1 - 1e-9


@pytest.mark.parametrize("topology", ["triangle", "bowtie"])
def test_bridge(capsys, topology):
    code, out, _ = run(capsys, "bridge", "--topology", topology, "--outcomes", "1")
    data = json.loads(out)
    assert code == 0 and data["s"] == 1 and data["classification"]["diagonal"]


def test_bridge_break_link(capsys):
    code, out, _ = run(capsys, "bridge", "--basis", "Z", "--outcomes", "0", "--in", "one,one")
    data = json.loads(out)
    assert code == 0
    assert np.allclose(np.array(data["output"])[:, 0], [0, 0, 0, 1])


def test_parse_inputs_forms():
    states = parse_inputs("zero;1,1j;plus", 3)
    assert np.allclose(states[1].amps, np.array([1, 1j]) / np.sqrt(2))
    assert len(parse_inputs("one,one,zero", 3)) == 3
    assert np.allclose(parse_inputs("3,4", 1)[0].amps, [0.6, 0.8])


def test_parallel_map_keeps_order(monkeypatch):
    from bowtie_mbqc.parallel import parallel_map, worker_count

    monkeypatch.setenv("BOWTIE_MBQC_THREADS", "4")
    assert worker_count() == 4
    assert parallel_map(lambda x: x * x, range(20)) == [x * x for x in range(20)]
    monkeypatch.setenv("BOWTIE_MBQC_THREADS", "junk")
    assert worker_count() == 1


def test_verify_subset_toffoli_threaded(capsys, monkeypatch):
    monkeypatch.setenv("BOWTIE_MBQC_THREADS", "2")
    code, out, _ = run(capsys, "verify", "--only", "toffoli")
    assert code == 0 and "subset" in out
