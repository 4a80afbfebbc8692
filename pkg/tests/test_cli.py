from __future__ import annotations

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from act.cli import main
from act.config import ConfigError, load_config, validate_config
from helpers import raw, write_corpus

SHIPPED_CONFIG = Path("data/config.toml").resolve()


def write_config(path: Path, body: str) -> Path:
    path.write_text(body, encoding="utf-8")
    return path


class TestConfigLoading:
    def test_shipped_config_loads_and_validates(self):
        cfg = load_config(SHIPPED_CONFIG)
        assert validate_config(cfg) == []
        assert cfg.paths.corpus is not None and cfg.paths.corpus.is_file()
        assert "nswrfs" in cfg.track.accounts

    def test_unknown_key_reported(self, tmp_path):
        path = write_config(tmp_path / "c.toml", "[pipeline]\nthetaa = 0.5\n")
        with pytest.raises(ConfigError) as err:
            load_config(path)
        assert any(i.field == "pipeline.thetaa" for i in err.value.issues)

    def test_missing_gazetteer_file_names_field(self, tmp_path):
        path = write_config(tmp_path / "c.toml", '[paths]\ngazetteer = "missing.csv"\n')
        cfg = load_config(path)
        issues = validate_config(cfg)
        assert any(i.field == "paths.gazetteer" for i in issues)

    def test_bad_port_rejected(self, tmp_path):
        path = write_config(tmp_path / "c.toml", "[server]\nport = 99999\n")
        issues = validate_config(load_config(path))
        assert any(i.field == "server.port" for i in issues)

    def test_uppercase_keywords_normalized(self, tmp_path):
        path = write_config(tmp_path / "c.toml", '[track]\nkeywords = ["Fire"]\n')
        cfg = load_config(path)
        assert "fire" in cfg.track.keywords

    def test_relative_paths_resolve_against_config_dir(self, tmp_path):
        (tmp_path / "corpus.jsonl").write_text("", encoding="utf-8")
        path = write_config(tmp_path / "c.toml", '[paths]\ncorpus = "corpus.jsonl"\n')
        cfg = load_config(path)
        assert cfg.paths.corpus == tmp_path / "corpus.jsonl"


class TestValidateConfigCommand:
    def test_shipped_config_exits_zero(self):
        result = CliRunner().invoke(main, ["validate-config", "--config", str(SHIPPED_CONFIG)])
        assert result.exit_code == 0, result.output
        assert "config ok" in result.output

    def test_missing_gazetteer_exits_one_naming_field(self, tmp_path):
        path = write_config(tmp_path / "c.toml", '[paths]\ngazetteer = "missing.csv"\n')
        result = CliRunner().invoke(main, ["validate-config", "--config", str(path)])
        assert result.exit_code == 1
        assert "paths.gazetteer" in result.output

    def test_no_config_exits_one(self):
        result = CliRunner().invoke(main, ["validate-config"], env={"ACT_CONFIG": None})
        assert result.exit_code == 1

    def test_env_var_fallback(self, tmp_path):
        result = CliRunner().invoke(
            main, ["validate-config"], env={"ACT_CONFIG": str(SHIPPED_CONFIG)}
        )
        assert result.exit_code == 0


class TestReplayCommand:
    def test_batch_export_is_deterministic(self, tmp_path):
        posts = [raw(f"p{i}", f"bushfire front near ridge {i % 5}", minutes=float(i)) for i in range(80)]
        corpus = write_corpus(tmp_path / "corpus.jsonl", posts)
        runner = CliRunner()
        args = ["replay", "--input", str(corpus), "--no-serve"]
        first = runner.invoke(main, args, env={"ACT_CONFIG": None})
        second = runner.invoke(main, args, env={"ACT_CONFIG": None})
        assert first.exit_code == 0, first.output
        assert first.output == second.output
        payload = json.loads(first.output)
        assert payload["posts_ingested"] == 80
        assert payload["events_count"] == len(payload["events"])

    def test_export_counts_skipped_lines(self, tmp_path):
        posts = [raw(f"p{i}", "storm cell inbound", minutes=float(i)) for i in range(3)]
        corpus = write_corpus(tmp_path / "corpus.jsonl", posts, malformed_lines=["{oops"])
        result = CliRunner().invoke(
            main, ["replay", "--input", str(corpus), "--no-serve"], env={"ACT_CONFIG": None}
        )
        payload = json.loads(result.output)
        assert payload["skipped_lines"] == 1

    def test_missing_input_is_error(self, tmp_path):
        result = CliRunner().invoke(
            main,
            ["replay", "--input", str(tmp_path / "nope.jsonl"), "--no-serve"],
            env={"ACT_CONFIG": None},
        )
        assert result.exit_code != 0

    def test_bad_flag_is_error(self):
        result = CliRunner().invoke(main, ["replay", "--nope"], env={"ACT_CONFIG": None})
        assert result.exit_code != 0

    def test_bad_config_reports_and_exits(self, tmp_path):
        cfg = write_config(tmp_path / "c.toml", "[nope]\nx = 1\n")
        result = CliRunner().invoke(
            main,
            ["replay", "--config", str(cfg), "--input", "x.jsonl", "--no-serve"],
        )
        assert result.exit_code == 1
