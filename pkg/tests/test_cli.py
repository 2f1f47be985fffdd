import json
import math

import numpy as np
import pytest

from ibits.cli import fmt12, main
from ibits.gates import hadamard, qft
from ibits.matrixcore import format_matrix_text, permutation_matrix
from ibits.protocols import teleportation_trace


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_fmt12_has_twelve_significant_digits():
    assert fmt12(1.0) == "1.00000000000"
    assert fmt12(4080.0) == "4080.00000000"
    assert float(fmt12(7.8134765625)) == pytest.approx(7.8134765625, abs=1e-9)


def test_scenario_teleport_csv(capsys):
    code, out, _ = run_cli(capsys, "scenario", "teleport")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "step,label,interference,ibits"
    assert len(lines) == 7
    first = lines[1].split(",")
    assert first[0] == "1" and float(first[2]) == pytest.approx(4.0, abs=1e-9)


def test_scenario_output_is_byte_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["scenario", "grover", "--qubits", "4", "-o", str(a)]) == 0
    assert main(["scenario", "grover", "--qubits", "4", "--seed", "0", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_scenario_grover_csv(capsys):
    code, out, _ = run_cli(capsys, "scenario", "grover", "--qubits", "8")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 26  # header + 25 records
    assert float(lines[1].split(",")[2]) == pytest.approx(255.0, abs=1e-9)


def test_scenario_csv_round_trips_against_trace(capsys):
    code, out, _ = run_cli(capsys, "scenario", "teleport")
    assert code == 0
    rows = [line.split(",") for line in out.strip().splitlines()[1:]]
    for row, record in zip(rows, teleportation_trace().records):
        assert int(row[0]) == record.step
        assert row[1] == record.label
        assert float(row[2]) == pytest.approx(record.interference, abs=1e-9)
        assert float(row[3]) == pytest.approx(record.ibits, abs=1e-9)


def test_scenario_json_mirrors_csv(capsys):
    code, out, _ = run_cli(capsys, "scenario", "teleport", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert len(payload) == 6
    assert set(payload[0]) == {"step", "label", "interference", "ibits"}
    assert payload[3]["interference"] == pytest.approx(6.0, abs=1e-9)


def test_scenario_beamsplitter_scan(capsys):
    code, out, _ = run_cli(
        capsys, "scenario", "beamsplitter-scan", "--photons", "1", "--points", "9"
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "photons,theta,interference"
    assert len(lines) == 10
    quarter_pi = [l for l in lines[1:] if abs(float(l.split(",")[1]) - math.pi / 4) < 1e-9]
    assert len(quarter_pi) == 1
    assert float(quarter_pi[0].split(",")[2]) == pytest.approx(1.0, abs=1e-9)


def test_scenario_mz_error_scan(capsys):
    code, out, _ = run_cli(capsys, "scenario", "mz-error-scan", "--points", "8")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "phi,p,interference"
    assert len(lines) == 65
    for line in lines[1:]:
        phi, p, value = (float(v) for v in line.split(","))
        assert value == pytest.approx((math.sin(phi) * (1 - 2 * p)) ** 2, abs=1e-9)


def test_scenario_decoherence_scan(capsys):
    code, out, _ = run_cli(capsys, "scenario", "decoherence-scan", "--points", "11")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "channel,p,interference"
    rows = [line.split(",") for line in lines[1:]]
    assert len(rows) == 44
    for name, p, value in rows:
        p, value = float(p), float(value)
        if name in ("bitflip", "phaseflip"):
            assert value == pytest.approx(0.0, abs=1e-9)
        elif name == "bitflip-after-h":
            assert value == pytest.approx((1 - 2 * p) ** 2, abs=1e-9)
        else:
            assert value == pytest.approx(1.0, abs=1e-9)


@pytest.mark.slow
def test_scenario_shor_csv(capsys):
    code, out, _ = run_cli(capsys, "scenario", "shor", "--a", "7")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 25  # header + 24 records
    assert float(lines[8].split(",")[2]) == pytest.approx(4080.0, abs=1e-9)


def test_unknown_scenario_exits_2(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["scenario", "frobnicate"])
    assert excinfo.value.code == 2
    assert "usage" in capsys.readouterr().err.lower()


def test_scenario_capacity_guard(capsys):
    code, _, err = run_cli(capsys, "scenario", "shor", "--modulus", "33")
    assert code == 3
    assert "capacity" in err


def test_run_valid_file(tmp_path, capsys):
    path = tmp_path / "h.iqc"
    path.write_text("QUBITS 1\nH 0\n")
    code, out, _ = run_cli(capsys, "run", str(path))
    assert code == 0
    lines = out.strip().splitlines()
    assert float(lines[1].split(",")[2]) == pytest.approx(1.0, abs=1e-9)


def test_run_reports_diagnostics(tmp_path, capsys):
    path = tmp_path / "bad.iqc"
    path.write_text("QUBITS 2\nH 5\n")
    code, _, err = run_cli(capsys, "run", str(path))
    assert code == 1
    assert err.count("line") == 1
    assert "out of range" in err


def test_run_missing_file(capsys):
    code, _, err = run_cli(capsys, "run", "/nonexistent/x.iqc")
    assert code == 4
    assert "cannot read" in err


def test_run_teleportation_prefix_matches_builtin(tmp_path, capsys):
    path = tmp_path / "teleport_prefix.iqc"
    path.write_text("QUBITS 3\nH 2\nCNOT 2 1\nCNOT 0 1\nH 0\nMEASURE 0 1\n")
    code, out, _ = run_cli(capsys, "run", str(path))
    assert code == 0
    values = [float(line.split(",")[2]) for line in out.strip().splitlines()[1:]]
    expected = [r.interference for r in teleportation_trace().records[:5]]
    assert np.allclose(values, expected, atol=1e-9)


def test_measure_hadamard_matrix(tmp_path, capsys):
    path = tmp_path / "h.txt"
    path.write_text(format_matrix_text(hadamard()))
    code, out, _ = run_cli(capsys, "measure", "--matrix", str(path))
    assert code == 0
    first, second = out.split()
    assert first == "1.00000000000"
    assert second == "1.00000000000"


def test_measure_qft16_matrix(tmp_path, capsys):
    path = tmp_path / "qft16.txt"
    path.write_text(format_matrix_text(qft(4)))
    code, out, _ = run_cli(capsys, "measure", "--matrix", str(path))
    assert code == 0
    assert float(out.split()[0]) == pytest.approx(15.0, abs=1e-9)


def test_measure_permutation_matrix(tmp_path, capsys):
    path = tmp_path / "perm.txt"
    path.write_text(format_matrix_text(permutation_matrix([2, 0, 1, 3])))
    code, out, _ = run_cli(capsys, "measure", "--matrix", str(path))
    assert code == 0
    assert float(out.split()[0]) == 0.0


def test_measure_rejects_non_unitary_without_kraus(tmp_path, capsys):
    path = tmp_path / "half.txt"
    path.write_text(format_matrix_text(np.diag([1.0, 0.5])))
    code, _, err = run_cli(capsys, "measure", "--matrix", str(path))
    assert code == 5
    assert "not unitary" in err


def test_measure_kraus_mode(tmp_path, capsys):
    p = 0.3
    k0 = tmp_path / "k0.txt"
    k1 = tmp_path / "k1.txt"
    k0.write_text(format_matrix_text(math.sqrt(p) * np.eye(2)))
    k1.write_text(format_matrix_text(math.sqrt(1 - p) * np.array([[0, 1], [1, 0]])))
    code, out, _ = run_cli(capsys, "measure", "--kraus", str(k0), str(k1))
    assert code == 0
    assert float(out.split()[0]) == pytest.approx(0.0, abs=1e-9)


def test_output_file_io_error(tmp_path, capsys):
    code, _, err = run_cli(
        capsys, "scenario", "teleport", "-o", str(tmp_path / "missing" / "out.csv")
    )
    assert code == 4
    assert "cannot write" in err
