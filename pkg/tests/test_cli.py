import json

import pytest

from sblorec.cli import main
from sblorec.errors import EXIT_CONFIG, EXIT_DATA, EXIT_OK

from conftest import make_config


@pytest.fixture
def config_path(tmp_path, dataset_files):
    social_path, ratings_path = dataset_files
    return make_config(tmp_path, social_path, ratings_path,
                       selected=["md", "grm"], seed_count=1)


class TestIngestCommand:
    def test_prints_stats(self, config_path, capsys):
        code = main(["ingest", "--config", str(config_path)])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "m=20" in out and "n=15" in out

    def test_json_mode(self, config_path, capsys):
        code = main(["--json", "ingest", "--config", str(config_path)])
        assert code == EXIT_OK
        body = json.loads(capsys.readouterr().out)
        assert body["stats"]["m"] == 20

    def test_missing_config_exit_code(self, tmp_path, capsys):
        code = main(["ingest", "--config", str(tmp_path / "nope.toml")])
        assert code == EXIT_CONFIG
        assert "error (config)" in capsys.readouterr().err


class TestSplitCommand:
    def test_split(self, config_path, capsys):
        code = main(["split", "--config", str(config_path), "--seed", "3"])
        assert code == EXIT_OK
        assert "probe" in capsys.readouterr().out


class TestFitCommand:
    def test_fit(self, config_path, capsys):
        code = main(["fit", "--config", str(config_path), "--algo", "md",
                     "--no-dump"])
        assert code == EXIT_OK
        assert "fitted md" in capsys.readouterr().out


class TestEvaluateCommand:
    def test_evaluate(self, config_path, capsys):
        code = main(["evaluate", "--config", str(config_path)])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "AUPR=" in out

    def test_single_algo_and_length(self, config_path, capsys):
        code = main(["evaluate", "--config", str(config_path),
                     "--algo", "grm", "--L", "3"])
        out = capsys.readouterr().out
        assert code == EXIT_OK
        assert "grm" in out and "md" not in out.replace("md ", "")


class TestGridCommand:
    def test_grid(self, tmp_path, dataset_files, capsys):
        social_path, ratings_path = dataset_files
        path = make_config(tmp_path, social_path, ratings_path, seed_count=1,
                           extra="[grids.hhp]\nhhp_lambda = [0.5, 1.0]")
        code = main(["grid", "--config", str(path), "--algo", "hhp"])
        assert code == EXIT_OK
        assert "best params" in capsys.readouterr().out


class TestRewireCurveCommand:
    def test_single_sigma(self, tmp_path, dataset_files, capsys):
        social_path, ratings_path = dataset_files
        path = make_config(
            tmp_path, social_path, ratings_path, seed_count=1,
            extra="[analysis]\nrewire_seed_count = 1",
        )
        code = main(["rewire-curve", "--config", str(path), "--sigma", "0.5"])
        assert code == EXIT_OK
        assert "sigma=0.50" in capsys.readouterr().out


class TestAnalyzeCommand:
    def test_analyze(self, config_path, capsys):
        code = main(["analyze", "--config", str(config_path)])
        assert code == EXIT_OK
        assert "share h = 0" in capsys.readouterr().out


class TestErrors:
    def test_data_error_exit_code(self, tmp_path, capsys):
        social = tmp_path / "s.txt"
        social.write_text("u1\n")  # malformed
        ratings = tmp_path / "r.txt"
        ratings.write_text("u1 o1 5\n")
        path = make_config(tmp_path, social, ratings)
        code = main(["ingest", "--config", str(path)])
        assert code == EXIT_DATA
        assert "error (data)" in capsys.readouterr().err
