from __future__ import annotations

import pytest

from main import EXIT_ERROR, EXIT_FAILED, EXIT_OK, main
from tools import dumps, read_json


@pytest.fixture
def spec_file(tmp_path, experiment_document):
    path = tmp_path / "experiment.json"
    path.write_bytes(dumps(experiment_document))
    return path


def run(tmp_path, *argv):
    out = tmp_path / "out.json"
    code = main(["--out", str(out), "-q", *argv])
    return code, (read_json(out) if out.exists() and out.suffix == ".json" else None)


class TestCommands:
    def test_trees(self, tmp_path):
        code, document = run(tmp_path, "trees", "--max-nodes", "3")
        assert code == EXIT_OK
        assert document["count"] == 11

    def test_moment(self, tmp_path):
        code, document = run(tmp_path, "moment", "--alpha", "1,1", "--hurst", "0.75")
        assert code == EXIT_OK
        assert document["value"] == pytest.approx(0.5)

    def test_expand(self, tmp_path, spec_file):
        code, document = run(tmp_path, "expand", str(spec_file), "--order", "2")
        assert code == EXIT_OK
        assert document["order"] == 2

    def test_expand_words(self, tmp_path, spec_file):
        code, document = run(tmp_path, "expand", str(spec_file), "--order", "2", "--form", "words")
        assert code == EXIT_OK
        assert document["form"] == "words"

    def test_text_output(self, tmp_path):
        out = tmp_path / "trees.txt"
        code = main(["--format", "text", "--out", str(out), "-q", "trees"])
        assert code == EXIT_OK
        assert out.read_text()

    def test_csv_path(self, tmp_path):
        out = tmp_path / "path.csv"
        argv = ["--format", "csv", "--out", str(out), "--seed", "3", "-q"]
        code = main([*argv, "simulate-path", "--hurst", "0.7", "--steps", "8"])
        assert code == EXIT_OK
        lines = out.read_text().splitlines()
        assert lines[0] == "time,B1"
        assert len(lines) == 10


class TestExitCodes:
    def test_empty_suite(self, tmp_path):
        code, document = run(tmp_path, "suite", "--criteria")
        assert code == EXIT_OK
        assert document["passed"] is True

    def test_failed_criterion(self, tmp_path):
        config = tmp_path / "suite.json"
        config.write_bytes(dumps({"criteria": ["moment-golden"], "moment_overrides": {"1,1": 0.4}}))
        code, document = run(tmp_path, "suite", str(config))
        assert code == EXIT_FAILED
        assert document["failed"] == ["moment-golden"]

    def test_unknown_criterion(self, tmp_path):
        code, _ = run(tmp_path, "suite", "--criteria", "no-such-check")
        assert code == EXIT_ERROR

    def test_bad_expression(self, tmp_path, experiment_document):
        path = tmp_path / "broken.json"
        path.write_bytes(dumps({**experiment_document, "f": "x1 +* 2"}))
        code, _ = run(tmp_path, "expand", str(path))
        assert code == EXIT_ERROR

    def test_missing_file(self, tmp_path):
        code, _ = run(tmp_path, "expand", str(tmp_path / "missing.json"))
        assert code == EXIT_ERROR

    def test_bad_hurst(self, tmp_path):
        code, _ = run(tmp_path, "moment", "--alpha", "1,1", "--hurst", "1.5")
        assert code == EXIT_ERROR


class TestSeeds:
    def write(self, tmp_path, document, name, seed):
        path = tmp_path / name
        path.write_bytes(dumps({**document, "mc": {**document["mc"], "seed": seed}}))
        return path

    def test_file_seed_used_without_flag(self, tmp_path, experiment_document):
        seven = self.write(tmp_path, experiment_document, "seven.json", 7)
        zero = self.write(tmp_path, experiment_document, "zero.json", 0)
        _, first = run(tmp_path, "solve", str(seven), "--steps", "32")
        _, second = run(tmp_path, "solve", str(zero), "--steps", "32")
        assert first["seed"] == 7
        assert second["seed"] == 0
        assert first["states"] != second["states"]

    def test_flag_overrides_file_seed(self, tmp_path, experiment_document):
        seven = self.write(tmp_path, experiment_document, "seven.json", 7)
        zero = self.write(tmp_path, experiment_document, "zero.json", 0)
        _, first = run(tmp_path, "--seed", "5", "solve", str(seven), "--steps", "32")
        _, second = run(tmp_path, "--seed", "5", "solve", str(zero), "--steps", "32")
        assert first["seed"] == second["seed"] == 5
        assert first["states"] == second["states"]

    def test_validate_keeps_file_seed(self, tmp_path, spec_file):
        code, document = run(tmp_path, "validate", str(spec_file), "--orders", "1")
        assert code == EXIT_OK
        assert document["seed"] == 3

    def test_suite_config_seed(self, tmp_path):
        config = tmp_path / "suite.json"
        config.write_bytes(dumps({"criteria": [], "seed": 7}))
        _, document = run(tmp_path, "suite", str(config))
        assert document["seed"] == 7
        _, document = run(tmp_path, "--seed", "2", "suite", str(config))
        assert document["seed"] == 2
