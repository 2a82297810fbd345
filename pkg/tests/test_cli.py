"""Tests for the command-line surface: output shapes and exit codes."""
import json

import pytest

from ineqlab.cli import main
from ineqlab.core import SeededRng, save_instance
from ineqlab.sweep import instance_regular, rows_from_json


@pytest.fixture()
def instance_file(tmp_path):
    inst = instance_regular(SeededRng(3).spawn("demo").stream, 16, 2)
    path = tmp_path / "instance.txt"
    save_instance(inst, path)
    return str(path)


def write_config(tmp_path, **overrides):
    raw = {
        "N": [16],
        "t": [2],
        "S": {"kind": "absolute", "value": 8},
        "modes": ["classical"],
        "seeds": 2,
        "family": "regular",
    }
    raw.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(raw), encoding="utf-8")
    return str(path)


class TestSolve:
    def test_exact_mode_emits_json_summary(self, instance_file, capsys):
        code = main(["solve", "--instance", instance_file, "--space", "8",
                     "--mode", "exact", "--seed", "5"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert set(payload) == {
            "N", "t", "S", "mode", "seed", "correct",
            "queries_x", "queries_b", "space_high_water", "per_subroutine",
        }
        assert payload["N"] == 16 and payload["t"] == 2 and payload["S"] == 8
        assert payload["correct"] is True
        assert isinstance(payload["per_subroutine"], dict)

    def test_classical_mode(self, instance_file, capsys):
        code = main(["solve", "--instance", instance_file, "--space", "8",
                     "--mode", "classical", "--seed", "0"])
        assert code == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["mode"] == "classical"
        assert payload["queries_x"] > 0

    def test_deterministic_per_seed(self, instance_file, capsys):
        argv = ["solve", "--instance", instance_file, "--space", "8",
                "--mode", "cost-model", "--seed", "9"]
        main(argv)
        first = capsys.readouterr().out
        main(argv)
        assert capsys.readouterr().out == first

    def test_missing_instance_is_usage_error(self, tmp_path, capsys):
        code = main(["solve", "--instance", str(tmp_path / "nope.txt"),
                     "--space", "8", "--mode", "exact", "--seed", "0"])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_bad_mode_rejected_by_parser(self, instance_file):
        with pytest.raises(SystemExit) as info:
            main(["solve", "--instance", instance_file, "--space", "8",
                  "--mode", "warp", "--seed", "0"])
        assert info.value.code == 2


class TestSweep:
    def test_csv_output_and_rerun_identical(self, tmp_path, capsys):
        config = write_config(tmp_path)
        out = tmp_path / "rows.csv"
        assert main(["sweep", "--config", config, "--out", str(out)]) == 0
        first = out.read_bytes()
        assert first.startswith(b"N,t,S,mode,seed,T,queries_x,queries_b,space,correct\n")
        assert len(first.splitlines()) == 3   # header + 2 seeds
        assert main(["sweep", "--config", config, "--out", str(out)]) == 0
        assert out.read_bytes() == first

    def test_json_round_trip(self, tmp_path, capsys):
        config = write_config(tmp_path)
        out = tmp_path / "rows.json"
        code = main(["sweep", "--config", config, "--out", str(out),
                     "--format", "json"])
        assert code == 0
        rows = rows_from_json(out.read_text(encoding="utf-8"))
        assert len(rows) == 2
        assert rows[0].n == 16 and rows[0].mode == "classical"

    def test_out_path_from_config(self, tmp_path, capsys):
        out = tmp_path / "from-config.csv"
        config = write_config(tmp_path, out=str(out))
        assert main(["sweep", "--config", config]) == 0
        assert out.exists()

    def test_missing_out_is_usage_error(self, tmp_path, capsys):
        config = write_config(tmp_path)
        assert main(["sweep", "--config", config]) == 2

    def test_missing_key_is_usage_error(self, tmp_path, capsys):
        config = write_config(tmp_path)
        raw = json.loads(open(config, encoding="utf-8").read())
        del raw["seeds"]
        broken = tmp_path / "broken.json"
        broken.write_text(json.dumps(raw), encoding="utf-8")
        assert main(["sweep", "--config", str(broken), "--out",
                     str(tmp_path / "x.csv")]) == 2

    def test_unknown_mode_is_usage_error(self, tmp_path, capsys):
        config = write_config(tmp_path, modes=["warp"])
        assert main(["sweep", "--config", config, "--out",
                     str(tmp_path / "x.csv")]) == 2


class TestSubspaceVerify:
    def test_small_cell_passes_and_dumps_json(self, tmp_path, capsys):
        dump = tmp_path / "lines.json"
        code = main(["subspace", "verify", "--n", "4", "--t", "2", "--k", "1",
                     "--json", str(dump)])
        assert code == 0
        out = capsys.readouterr().out
        assert "[PASS]" in out and "[FAIL]" not in out
        detail = json.loads(dump.read_text(encoding="utf-8"))
        assert len(detail) == 11
        assert all(entry["passed"] for entry in detail)

    def test_infeasible_cell_is_usage_error(self, capsys):
        assert main(["subspace", "verify", "--n", "4", "--t", "3", "--k", "1"]) == 2


class TestPolyVerify:
    def test_blocks_suite_with_csv_dump(self, tmp_path, capsys):
        dump = tmp_path / "blocks.csv"
        code = main(["poly", "verify", "--suite", "blocks", "--out", str(dump)])
        assert code == 0
        lines = dump.read_text(encoding="utf-8").splitlines()
        assert lines[0].startswith("k,t,n,samples")
        assert len(lines) == 2


class TestReport:
    def test_summary_over_csv(self, tmp_path, capsys):
        config = write_config(tmp_path)
        out = tmp_path / "rows.csv"
        main(["sweep", "--config", config, "--out", str(out)])
        capsys.readouterr()
        assert main(["report", "--in", str(out)]) == 0
        text = capsys.readouterr().out
        assert "rows: 2" in text
        assert "correct: 2/2" in text

    def test_summary_over_json(self, tmp_path, capsys):
        config = write_config(tmp_path)
        out = tmp_path / "rows.json"
        main(["sweep", "--config", config, "--out", str(out), "--format", "json"])
        capsys.readouterr()
        assert main(["report", "--in", str(out)]) == 0
        assert "rows: 2" in capsys.readouterr().out

    def test_missing_file_is_usage_error(self, tmp_path, capsys):
        assert main(["report", "--in", str(tmp_path / "gone.csv")]) == 2


class TestUsage:
    def test_no_command_is_usage_error(self):
        with pytest.raises(SystemExit) as info:
            main([])
        assert info.value.code == 2
