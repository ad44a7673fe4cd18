"""Configuration layering: defaults, TOML file, environment variables,
then command-line overrides."""

from __future__ import annotations

from pathlib import Path

import pytest

from retraj.config import ConfigError, RunConfig, load_config
from retraj.ingest import DEFAULT_ACCEPT, DEFAULT_REJECT


def test_defaults():
    config = load_config(env={})
    assert config.issues is None
    assert config.output_dir == Path("retraj-out")
    assert config.accept == DEFAULT_ACCEPT
    assert config.reject == DEFAULT_REJECT
    assert config.positions == 100
    assert config.indel == 1.0
    assert config.k == 6
    assert config.min_size == 5
    assert config.om_mode == "normalized"
    assert config.modal_mode == "dss"
    assert config.linkage == "ward"
    assert config.flavor == "issues"


def test_toml_file_overrides_defaults(tmp_path):
    toml = tmp_path / "run.toml"
    toml.write_text(
        'issues = "data/issues.jsonl"\n'
        "positions = 50\n"
        "indel = 0.8\n"
        'accept = ["Fixed", "Shipped"]\n'
        'linkage = "average"\n',
        encoding="utf-8",
    )
    config = load_config(config_file=toml, env={})
    assert config.issues == Path("data/issues.jsonl")
    assert config.positions == 50
    assert config.indel == 0.8
    assert config.accept == frozenset({"fixed", "shipped"})
    assert config.linkage == "average"
    # Untouched fields stay at their defaults.
    assert config.k == 6


def test_env_overrides_toml(tmp_path):
    toml = tmp_path / "run.toml"
    toml.write_text("positions = 50\nk = 3\n", encoding="utf-8")
    env = {
        "RTK_POSITIONS": "200",
        "RTK_INDEL": "1.5",
        "RTK_ACCEPT": "fixed, done ,shipped",
        "RTK_OUTPUT_DIR": "elsewhere",
        "UNRELATED": "ignored",
    }
    config = load_config(config_file=toml, env=env)
    assert config.positions == 200
    assert config.k == 3
    assert config.indel == 1.5
    assert config.accept == frozenset({"fixed", "done", "shipped"})
    assert config.output_dir == Path("elsewhere")


def test_cli_overrides_env(tmp_path):
    toml = tmp_path / "run.toml"
    toml.write_text("positions = 50\n", encoding="utf-8")
    env = {"RTK_POSITIONS": "200", "RTK_LINKAGE": "single"}
    config = load_config(
        config_file=toml,
        env=env,
        overrides={"positions": 75, "linkage": None, "k": 4},
    )
    # None entries mean "flag not given" and must not clobber the env.
    assert config.positions == 75
    assert config.linkage == "single"
    assert config.k == 4


def test_unknown_toml_key(tmp_path):
    toml = tmp_path / "run.toml"
    toml.write_text("positons = 50\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="positons"):
        load_config(config_file=toml, env={})


def test_broken_toml(tmp_path):
    toml = tmp_path / "run.toml"
    toml.write_text("positions = [unclosed\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(config_file=toml, env={})


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(config_file=tmp_path / "absent.toml", env={})


def test_unknown_env_variable():
    with pytest.raises(ConfigError, match="RTK_POSTIONS"):
        load_config(env={"RTK_POSTIONS": "10"})


def test_bad_env_int():
    with pytest.raises(ConfigError, match="positions"):
        load_config(env={"RTK_POSITIONS": "many"})


def test_bad_toml_types(tmp_path):
    toml = tmp_path / "run.toml"
    toml.write_text("positions = true\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(config_file=toml, env={})
    toml.write_text("accept = 3\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(config_file=toml, env={})


def test_validation_rules():
    with pytest.raises(ConfigError, match="positions"):
        load_config(env={"RTK_POSITIONS": "0"})
    with pytest.raises(ConfigError, match="indel"):
        load_config(env={"RTK_INDEL": "-0.5"})
    with pytest.raises(ConfigError, match="om_mode"):
        load_config(env={"RTK_OM_MODE": "fuzzy"})
    with pytest.raises(ConfigError, match="linkage"):
        load_config(env={"RTK_LINKAGE": "centroid"})
    with pytest.raises(ConfigError, match="flavor"):
        load_config(env={"RTK_FLAVOR": "merged"})
    with pytest.raises(ConfigError, match="accept"):
        load_config(env={"RTK_ACCEPT": " , "})
    with pytest.raises(ConfigError, match="k must"):
        load_config(env={"RTK_K": "0"})
    with pytest.raises(ConfigError, match="min_size"):
        load_config(env={"RTK_MIN_SIZE": "0"})


def test_validate_called_directly():
    config = RunConfig(positions=0)
    with pytest.raises(ConfigError):
        config.validate()
    RunConfig().validate()


def test_reject_set_may_be_empty():
    config = load_config(env={"RTK_REJECT": ""})
    assert config.reject == frozenset()
    config.validate()
