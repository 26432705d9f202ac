import json

import numpy as np
import pytest

from coherence_audit.cli import main
from coherence_audit.serialize import matrix_to_json, vector_to_json

from conftest import ladder_state


@pytest.fixture
def write(tmp_path):
    def _write(name, doc):
        p = tmp_path / name
        p.write_text(json.dumps(doc))
        return str(p)
    return _write


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


class TestQfi:
    def test_ladder_vector(self, capsys, write):
        path = write("psi.json", vector_to_json(ladder_state(6)))
        code, out, _ = run(capsys, "qfi", path, "--equal-spacing", 5)
        doc = json.loads(out)
        assert code == 0 and doc["method"] == "pure"
        assert doc["qfi"] == pytest.approx(1.0, abs=1e-12)

    def test_basis_vector(self, capsys, write):
        path = write("e2.json", vector_to_json(np.eye(4)[2]))
        code, out, _ = run(capsys, "qfi", path, "--equal-spacing", 3)
        assert code == 0 and json.loads(out)["qfi"] == 0.0

    def test_mixed_matrix(self, capsys, write):
        path = write("mix.json", matrix_to_json(np.eye(3) / 3))
        code, out, _ = run(capsys, "qfi", path, "--equal-spacing", 2)
        doc = json.loads(out)
        assert code == 0 and doc["method"] == "spectral" and doc["qfi"] == 0.0

    def test_hamiltonian_file(self, capsys, write):
        s = write("psi.json", vector_to_json(ladder_state(3, 2)))
        h = write("h.json", matrix_to_json(np.diag([0.0, 1.0, 2.0])))
        code, out, _ = run(capsys, "qfi", s, "--hamiltonian", h)
        assert code == 0 and json.loads(out)["qfi"] == pytest.approx(4.0)

    def test_dimension_error(self, capsys, write):
        path = write("psi.json", vector_to_json(ladder_state(2)))
        code, _, err = run(capsys, "qfi", path, "--equal-spacing", 5)
        assert code == 1 and "DimensionMismatch" in err

    def test_bad_trace_names_invariant(self, capsys, write):
        path = write("bad.json", matrix_to_json(np.diag([0.5, 0.6])))
        code, _, err = run(capsys, "qfi", path, "--equal-spacing", 1)
        assert code == 1 and "TraceDeviation" in err

    def test_unreadable(self, capsys, tmp_path):
        bad = tmp_path / "x.json"
        bad.write_text("{not json")
        code, _, err = run(capsys, "qfi", bad, "--equal-spacing", 1)
        assert code == 1 and "FormatError" in err
        code, _, _ = run(capsys, "qfi", tmp_path / "missing.json", "--equal-spacing", 1)
        assert code == 1


class TestMeasure:
    def test_l1(self, capsys, write):
        path = write("psi.json", vector_to_json(ladder_state(2)))
        code, out, _ = run(capsys, "measure", path, "--measure", "l1")
        assert code == 0 and json.loads(out)["value"] == pytest.approx(1.0)

    def test_qfi_defaults_need_hamiltonian(self, capsys, write):
        path = write("psi.json", vector_to_json(ladder_state(2)))
        code, _, _ = run(capsys, "measure", path, "--measure", "qfi")
        assert code == 1

    def test_unknown_measure_is_usage_error(self, capsys, write):
        path = write("psi.json", vector_to_json(ladder_state(2)))
        code, _, _ = run(capsys, "measure", path, "--measure", "nope")
        assert code == 1


class TestCounterexample:
    def test_n4(self, capsys, tmp_path):
        out_path = tmp_path / "w.json"
        code, out, _ = run(capsys, "counterexample", "--n", 4, "--format", "table", "--out", out_path)
        assert code == 0 and "after 16" in out and "delta 15" in out
        w = json.loads(out_path.read_text())
        assert w["value_before"] == pytest.approx(1) and w["value_after"] == pytest.approx(16)

    def test_n2_json(self, capsys):
        code, out, err = run(capsys, "counterexample", "--n", 2)
        assert code == 0 and json.loads(out)["delta"] == pytest.approx(3.0)
        assert "delta 3" in err

    def test_n1_rejected(self, capsys):
        code, _, err = run(capsys, "counterexample", "--n", 1)
        assert code == 1 and "N > 1" in err


class TestAudit:
    def test_controls_pass(self, capsys):
        code, out, _ = run(capsys, "audit", "--measure", "l1", "--axiom", "all", "--dim", 4,
                           "--trials", 1000, "--seed", 7)
        assert code == 0
        assert [r["n_violations"] for r in json.loads(out)] == [0, 0, 0, 0]

    def test_qfi_c2a_fails(self, capsys):
        code, out, _ = run(capsys, "audit", "--measure", "qfi", "--axiom", "c2a", "--dim", 4,
                           "--trials", 100)
        assert code == 2 and json.loads(out)["worst_witness"]["delta"] >= 8 - 1e-9

    def test_qfi_c3_passes(self, capsys):
        code, _, _ = run(capsys, "audit", "--measure", "qfi", "--axiom", "c3", "--dim", 4,
                         "--trials", 500)
        assert code == 0

    @pytest.mark.parametrize("argv", [
        ["--measure", "bogus", "--axiom", "c1", "--dim", 3],
        ["--measure", "l1", "--axiom", "c9", "--dim", 3],
        ["--measure", "l1", "--dim", 0],
        ["--measure", "l1", "--dim", 1],
        ["--measure", "l1", "--dim", 3, "--trials", -5],
        ["--measure", "l1", "--dim", 3, "--seed", -1],
        ["--measure", "l1", "--dim", 3, "--tol", "nan"],
    ])
    def test_usage_errors(self, capsys, argv):
        code, _, _ = run(capsys, "audit", *argv)
        assert code == 1

    def test_byte_identical(self, capsys):
        argv = ["audit", "--measure", "qfi", "--axiom", "all", "--dim", 3, "--trials", 50,
                "--seed", 11]
        _, a, _ = run(capsys, *argv)
        _, b, _ = run(capsys, *argv)
        assert a == b


class TestSearch:
    def test_exhaustive(self, capsys, write):
        path = write("psi.json", vector_to_json(ladder_state(4)))
        code, out, _ = run(capsys, "search", path, "--equal-spacing", 3, "--exhaustive")
        assert code == 2 and json.loads(out)["delta"] == pytest.approx(8.0)

    def test_diagonal_not_found(self, capsys, write):
        path = write("d.json", matrix_to_json(np.diag([0.1, 0.2, 0.3, 0.4])))
        code, out, _ = run(capsys, "search", path, "--equal-spacing", 3)
        assert code == 0 and json.loads(out)["result"] == "NoViolationFound"

    def test_too_large_for_exhaustive(self, capsys, write):
        path = write("psi.json", vector_to_json(ladder_state(12)))
        code, _, err = run(capsys, "search", path, "--equal-spacing", 11, "--exhaustive")
        assert code == 1 and "--random" in err

    def test_random(self, capsys, write):
        path = write("psi.json", vector_to_json(ladder_state(12)))
        code, out, _ = run(capsys, "search", path, "--equal-spacing", 11, "--random",
                           "--samples", 500, "--seed", 1)
        assert code == 2 and json.loads(out)["delta"] > 1


class TestRoundTrip:
    def test_witness_written_then_replayed(self, capsys, tmp_path):
        w = tmp_path / "w.json"
        run(capsys, "counterexample", "--n", 5, "--out", w)
        code, out, _ = run(capsys, "replay", w, "--equal-spacing", 5)
        assert code == 0 and json.loads(out)["reproduced"] is True

    def test_witness_state_readable_as_input(self, capsys, tmp_path, write):
        w = tmp_path / "w.json"
        run(capsys, "counterexample", "--n", 3, "--out", w)
        state = write("state.json", json.loads(w.read_text())["input_state"])
        code, out, _ = run(capsys, "qfi", state, "--equal-spacing", 3)
        assert code == 0 and json.loads(out)["qfi"] == pytest.approx(1.0, abs=1e-9)

    def test_search_witness_replays(self, capsys, tmp_path, write):
        path = write("psi.json", vector_to_json(ladder_state(5)))
        w = tmp_path / "w.json"
        run(capsys, "search", path, "--equal-spacing", 4, "--out", w)
        code, out, _ = run(capsys, "replay", w, "--equal-spacing", 4)
        assert code == 0 and json.loads(out)["reproduced"] is True

    def test_audit_out_file_matches_stdout(self, capsys, tmp_path):
        out_path = tmp_path / "r.json"
        argv = ["audit", "--measure", "l1", "--axiom", "c3", "--dim", 3, "--trials", 20]
        _, stdout, _ = run(capsys, *argv)
        run(capsys, *argv, "--out", out_path)
        assert out_path.read_text() == stdout
