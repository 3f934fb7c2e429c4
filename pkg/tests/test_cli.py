import json
from pathlib import Path

import numpy as np
import pytest

from bincluster.bitcore import CenterSet, Dataset, cost
from bincluster.cli import EXIT_BUDGET, EXIT_INPUT, EXIT_OK, main, run
from bincluster.formats import (
    InputError,
    emit_solution,
    load_dataset,
    load_matrix,
    load_relations,
)
from bincluster.relations import Relation, RelationFamily, satisfies
from bincluster.solver import solve


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_parse_dataset_examples():
    X = load_dataset("3 2\n00\n01\n11\n")
    assert X.n == 3 and X.dim == 2 and X.to_strings() == ["00", "01", "11"]
    empty = load_dataset("0 5\n")
    assert empty.n == 0 and empty.dim == 5


@pytest.mark.parametrize(
    "text, line, col, fragment",
    [
        ("2 2\n001\n00\n", 2, None, "wrong line length"),
        ("2 2\n0a\n00\n", 2, 2, "illegal character"),
        ("2\n00\n", 1, None, "malformed header"),
        ("x 2\n00\n", 1, 1, "nonnegative integer"),
        ("2 2\n00\n", 3, None, "unexpected end"),
        ("1 2\n00\n11\n", 3, None, "trailing"),
        ("1 99999999999\n0\n", 1, 2, "exceeds"),
    ],
)
def test_parse_dataset_errors(text, line, col, fragment):
    with pytest.raises(InputError) as err:
        load_dataset(text)
    assert err.value.line == line and err.value.col == col and fragment in str(err.value)


def test_parse_relations_examples():
    F = load_relations("SHARED 2 2\n00\n01\n", m=3)
    assert F.is_shared and F.m == 3 and F.relation(0) == Relation.from_strings(["00", "01"])
    F = load_relations("PERCOORD 1 2\n1\n01\n")
    assert F.m == 1 and F.relation(0) == Relation.from_strings(["01"])


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("SHARED 2 0\n", "empty relation"),
        ("SHARED 2 2\n01\n01\n", "duplicate"),
        ("SHARED 2 1\n011\n", "wrong line length"),
        ("PERCOORD 2 2\n1\n01\n0\n", "empty relation"),
        ("MIXED 2 2\n", "malformed header"),
        ("PERCOORD 2 2\n1\n01\n", "unexpected end"),
    ],
)
def test_parse_relations_errors(text, fragment):
    with pytest.raises(InputError, match=fragment):
        load_relations(text)


def test_percoord_dimension_must_match_data():
    with pytest.raises(InputError, match="dimension"):
        load_relations("PERCOORD 1 2\n1\n01\n", m=2)


def test_matrix_is_loaded_row_major():
    A = load_matrix("2 3\n110\n011\n")
    assert A.rows == 2 and A.cols == 3
    assert A.columns().to_strings() == ["10", "11", "01"]


def test_emit_solution_round_trip():
    X = Dataset.from_strings(["0110", "1111", "0000"])
    F = RelationFamily.shared(4, Relation.from_strings(["00", "01", "11"]))
    sol = solve(X, 2, F, 0.5, seed=4)
    payload = json.loads(emit_solution(sol))
    assert list(payload) == ["cost", "centers", "index_set", "assignment", "seed", "trials_used", "mode", "truncated"]
    C = CenterSet.from_strings(payload["centers"])
    assert satisfies(C, F) and cost(X, C) == payload["cost"]
    assert payload["truncated"] is False


def test_emit_forced_and_empty():
    F = RelationFamily.shared(2, Relation.from_strings(["01"]))
    X = Dataset.from_strings(["00", "11"])
    payload = json.loads(emit_solution(solve(X, 2, F, 0.5)))
    assert payload["truncated"] is False and payload["cost"] == 0
    payload = json.loads(emit_solution(solve(Dataset.from_strings([], dim=2), 2, F, 0.5)))
    assert payload["cost"] == 0 and payload["assignment"] == []


@pytest.fixture
def files(tmp_path):
    rng = np.random.default_rng(8)
    rows = ["".join(map(str, r)) for r in rng.integers(0, 2, (7, 5))]
    return {
        "data": write(tmp_path, "x.txt", "7 5\n" + "\n".join(rows) + "\n"),
        "rel": write(tmp_path, "r.txt", "SHARED 3 4\n000\n011\n101\n110\n"),
        "mat": write(tmp_path, "a.txt", "4 5\n" + "\n".join(rows[:4]) + "\n"),
        "lab": write(tmp_path, "lab.json", json.dumps({"random": 3, "trials": 500, "seed": 2, "c_values": [1, 2]})),
        "dir": tmp_path,
    }


def test_solve_modes_and_ordering(files, capsys):
    out = {}
    for mode in ("oracle", "randomized", "ptas"):
        assert main(["solve", files["data"], files["rel"], "--mode", mode, "--epsilon", "1", "--c", "1"]) == EXIT_OK
        out[mode] = json.loads(capsys.readouterr().out)
    assert out["randomized"]["cost"] >= out["oracle"]["cost"]
    assert out["ptas"]["cost"] <= 2 * out["oracle"]["cost"]
    assert out["oracle"]["mode"] == "oracle"


def test_commands_are_deterministic(files):
    commands = [
        ["solve", files["data"], files["rel"], "--seed", "3", "--trials", "3"],
        ["kmeans", files["data"], "--k", "2", "--seed", "3"],
        ["lowrank", files["mat"], "--rank", "1", "--field", "boolean"],
        ["baseline", files["mat"]],
        ["oracle", files["data"], files["rel"]],
        ["ptas", files["data"], files["rel"], "--epsilon", "1", "--c", "1"],
        ["lemma-lab", files["lab"]],
    ]
    for cmd in commands:
        assert run(cmd) == run(cmd)
    parallel = ["solve", files["data"], files["rel"], "--seed", "3", "--trials", "3", "--workers", "2"]
    assert run(parallel) == run(commands[0])


def test_lowrank_output(files):
    payload = json.loads(run(["lowrank", files["mat"], "--rank", "1"]))
    B = np.array([[int(ch) for ch in row] for row in payload["matrix"]])
    A = load_matrix(Path(files["mat"]).read_text()).entries
    assert B.shape == A.shape and int((A != B).sum()) == payload["cost"]


def test_lemma_lab_csv(files):
    out = run(["lemma-lab", files["lab"]])
    lines = out.strip().splitlines()
    assert lines[0].startswith("problem,c,k,")
    assert len(lines) == 1 + 6
    target = files["dir"] / "out.csv"
    assert run(["lemma-lab", files["lab"], "--output", str(target)]) == ""
    assert target.read_text() == out


def test_exit_codes(files, tmp_path, capsys):
    bad = write(tmp_path, "bad.txt", "2 2\n001\n00\n")
    assert main(["solve", bad, files["rel"]]) == EXIT_INPUT
    assert "line length" in capsys.readouterr().err
    assert main(["solve", files["data"], files["rel"], "--k", "2"]) == EXIT_INPUT
    assert main(["solve", str(tmp_path / "missing.txt"), files["rel"]]) == EXIT_INPUT
    big = write(tmp_path, "big.txt", "14 1\n" + "0\n" * 14)
    assert main(["oracle", big, write(tmp_path, "r4.txt", "SHARED 4 1\n0000\n")]) == EXIT_BUDGET
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--mode", "nope"])
    assert exc.value.code == 2
