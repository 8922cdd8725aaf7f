"""End-to-end CLI behaviour: exit codes, JSON output, reproducibility."""

import json
import subprocess
import sys

import pytest

PRODUCT_CIRCUIT = """\
system a = elem 2
system b = elem 2
system ab = a * b
state x : a = (1)
state y : b = (1)
effect probe : ab = ((1,1);0)
gate ident : a -> a = id
gate shift : a -> a = atomic 1 -> 2 tau 1 w 1
circuit p = x | y ; probe
eval p
"""


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "bctk", *args],
        capture_output=True,
        text=True,
        cwd=cwd,
    )


@pytest.fixture()
def circuit_file(tmp_path):
    path = tmp_path / "product.bct"
    path.write_text(PRODUCT_CIRCUIT)
    return path


def test_eval_product_circuit(circuit_file):
    proc = run_cli("eval", str(circuit_file))
    assert proc.returncode == 0, proc.stderr
    payload = json.loads(proc.stdout)
    assert payload["bct"] == [1, 2]
    assert payload["ontic"] == [1, 2]
    assert payload["diff"] == [0, 1]


def test_eval_empty_file(tmp_path):
    path = tmp_path / "empty.bct"
    path.write_text("\n")
    proc = run_cli("eval", str(path))
    assert proc.returncode == 1
    assert "empty" in proc.stderr


def test_eval_parse_error_diagnostics(tmp_path):
    path = tmp_path / "bad.bct"
    path.write_text("system a = elem 2\ncircuit p = ghost\n")
    proc = run_cli("eval", str(path))
    assert proc.returncode == 1
    assert "ghost" in proc.stderr


def test_verify_small_run_passes(tmp_path):
    report = tmp_path / "report.json"
    proc = run_cli(
        "verify", "--suite", "codec", "--trials", "5", "--max-dim", "3",
        "--seed", "7", "--report", str(report),
    )
    assert proc.returncode == 0, proc.stderr
    payload = json.loads(proc.stdout)
    assert payload["reports"][0]["suite"] == "codec"
    assert payload["reports"][0]["failures"] == []
    assert json.loads(report.read_text()) == payload


def test_verify_reports_are_byte_identical_for_equal_configs():
    args = ("verify", "--suite", "swap", "--trials", "4", "--max-dim", "3", "--seed", "21")
    first = run_cli(*args)
    second = run_cli(*args)
    assert first.returncode == second.returncode == 0
    assert first.stdout == second.stdout
    third = run_cli("verify", "--suite", "swap", "--trials", "4", "--max-dim", "3",
                    "--seed", "22")
    assert third.stdout != first.stdout


def test_verify_corrupted_swap_exits_three():
    proc = run_cli(
        "verify", "--suite", "diagram", "--trials", "2", "--max-dim", "3",
        "--corrupt", "swap",
    )
    assert proc.returncode == 3
    payload = json.loads(proc.stdout)
    failures = payload["reports"][0]["failures"]
    assert failures and "witness" in failures[0]


def test_embed_identity_gate(circuit_file):
    proc = run_cli("embed", str(circuit_file), "--gate", "ident")
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["map"]["in"] == 4 and payload["map"]["out"] == 4
    entries = payload["map"]["entries"]
    assert [entries[i * 4 + i] for i in range(4)] == [[1, 1]] * 4
    assert payload["in_wires"][0] == [1, 0]


def test_embed_atomic_gate_two_entries(circuit_file):
    proc = run_cli("embed", str(circuit_file), "--gate", "shift")
    payload = json.loads(proc.stdout)
    entries = payload["map"]["entries"]
    nonzero = [i for i, v in enumerate(entries) if v != [0, 1]]
    # (1, b) -> (2, b^1): positions (row 3, col 0) and (row 2, col 1)
    assert sorted(nonzero) == [2 * 4 + 1, 3 * 4 + 0]


def test_embed_unknown_gate(circuit_file):
    proc = run_cli("embed", str(circuit_file), "--gate", "nope")
    assert proc.returncode == 1


def test_lct_demo_annihilation_table():
    proc = run_cli("lct", "demo")
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["pairing"] == [1, 1]
    assert payload["max_violation"] == [0, 1]
    assert all(row["value"] == [0, 1] for row in payload["annihilation_table"])


def test_lct_refute_builtin_candidate():
    proc = run_cli("lct", "refute", "--candidate", "builtin:bct-style")
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["violations"] == 1
    assert payload["violations_by_axiom"] == {"jellyfish-nullity": 1}


def test_lct_refute_random_sweep():
    proc = run_cli("lct", "refute", "--random", "100", "--seed", "3")
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["candidates"] == 100
    assert payload["violations"] == 100
    assert payload["fatal_inconsistencies"] == 0


def test_lct_fabricated_candidate_exits_four(tmp_path):
    path = tmp_path / "noviolation.json"
    path.write_text(json.dumps({
        "L1": 2, "L2": 2,
        "xi_beta": [[1, 2], [1, 2], [0, 1], [0, 1]],
        "xi_b": [[0, 1], [0, 1], [1, 1], [1, 1]],
        "theory_pairing": [0, 1],
    }))
    proc = run_cli("lct", "refute", "--model", str(path))
    assert proc.returncode == 4
    payload = json.loads(proc.stdout)
    assert payload["fatal_inconsistencies"] == 1


def test_lct_custom_instance():
    proc = run_cli("lct", "demo", "--d1", "3", "--d2", "2", "--dl", "3",
                   "--kappa", "1/2,1/2,0")
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["instance"]["kappa_perp"] == [[0, 1], [0, 1], [1, 1]]
    assert len(payload["annihilation_table"]) == 6


def test_lct_rejects_full_rank_kappa():
    proc = run_cli("lct", "demo", "--kappa", "1/2,1/2")
    assert proc.returncode == 1
