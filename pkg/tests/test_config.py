"""Tests for configuration module."""

import json
from pathlib import Path

import pytest

from acdgcl.augment import AugmentationKind
from acdgcl.config import (
    DATA_DIR_ENV,
    ConfigError,
    PgdConfig,
    PgdInit,
    TrainConfig,
    get_default_config,
    load_config,
    parse_config,
    resolve_data_dir,
    save_config,
)


class TestDefaultConfig:
    """Tests for default configuration when no file is given."""

    def test_default_config_returns_valid_config(self):
        """Default config should return a valid TrainConfig object."""
        assert isinstance(get_default_config(), TrainConfig)

    def test_default_loss_weights(self):
        config = get_default_config()
        assert config.temperature == 0.2
        assert config.lambda_r == 5.0
        assert config.lambda_a == 0.5

    def test_default_family_has_every_kind(self):
        """The default family applies each augmentation at strength 0.2."""
        config = get_default_config()
        kinds = {spec.kind: spec.ratio for spec in config.augmentations}
        assert set(kinds) == set(AugmentationKind)
        assert kinds[AugmentationKind.NODE_DROP] == 0.2
        assert kinds[AugmentationKind.SUBGRAPH] == 0.8

    def test_default_probe_protocol(self):
        probe = get_default_config().probe
        assert probe.folds == 10
        assert probe.seeds == [0, 1, 2, 3, 4]

    def test_load_none_returns_defaults(self):
        assert load_config(None) == get_default_config()


class TestPgdConfig:
    """Tests for attack settings."""

    def test_derived_step_size(self):
        assert PgdConfig(epsilon=0.01, steps=5).effective_step_size == pytest.approx(0.005)

    def test_explicit_step_size_wins(self):
        assert PgdConfig(epsilon=0.01, steps=5, step_size=0.1).effective_step_size == 0.1

    def test_non_positive_step_size_rejected(self):
        with pytest.raises(ValueError):
            PgdConfig(step_size=0.0)

    def test_init_parsed_from_string(self):
        assert PgdConfig.model_validate({"init": "uniform"}).init is PgdInit.UNIFORM


class TestParseConfig:
    """Tests for validating raw mappings."""

    def test_partial_sections_fill_defaults(self):
        config = parse_config({"epochs": 5, "pgd": {"epsilon": 0.05}})
        assert config.epochs == 5
        assert config.pgd.epsilon == 0.05
        assert config.pgd.steps == 3

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="lambda_x"):
            parse_config({"lambda_x": 1.0})

    def test_nested_error_location(self):
        with pytest.raises(ConfigError, match=r"model\.hidden_dim"):
            parse_config({"model": {"hidden_dim": 0}})

    def test_batch_size_minimum(self):
        with pytest.raises(ConfigError, match="batch_size"):
            parse_config({"batch_size": 1})

    def test_empty_family_rejected(self):
        with pytest.raises(ConfigError, match="augmentations"):
            parse_config({"augmentations": []})

    def test_subgraph_must_keep_nodes(self):
        with pytest.raises(ConfigError, match="subgraph"):
            parse_config({"augmentations": [{"kind": "subgraph", "ratio": 0.0}]})

    def test_with_overrides_validates(self):
        config = get_default_config()
        assert config.with_overrides(lambda_a=0.0).lambda_a == 0.0
        with pytest.raises(ValueError):
            config.with_overrides(temperature=-1.0)


class TestLoadConfigFile:
    """Tests for loading config files from disk."""

    def test_load_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"epochs": 7, "model": {"embed_dim": 16}}))
        config = load_config(path)
        assert config.epochs == 7
        assert config.model.embed_dim == 16

    def test_load_toml(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text('epochs = 3\nlambda_a = 0.0\n\n[pgd]\nsteps = 1\ninit = "uniform"\n')
        config = load_config(path)
        assert config.epochs == 3
        assert config.lambda_a == 0.0
        assert config.pgd.init is PgdInit.UNIFORM

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{epochs: 3")
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(path)

    def test_top_level_must_be_object(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError, match="object"):
            load_config(path)

    def test_save_then_load(self, tmp_path, tiny_config):
        path = save_config(tiny_config, tmp_path / "nested" / "config.json")
        assert load_config(path) == tiny_config

    def test_shipped_config_is_valid(self):
        path = Path(__file__).parent.parent / "configs" / "mutag.json"
        config = load_config(path)
        assert config.lambda_r == 5.0


class TestResolveDataDir:
    """Tests for dataset location resolution."""

    def test_explicit_path_wins(self, monkeypatch, tmp_path):
        monkeypatch.setenv(DATA_DIR_ENV, "/elsewhere")
        assert resolve_data_dir(tmp_path) == tmp_path

    def test_environment_fallback(self, monkeypatch, tmp_path):
        monkeypatch.setenv(DATA_DIR_ENV, str(tmp_path))
        assert resolve_data_dir(None) == tmp_path

    def test_nothing_set(self, monkeypatch):
        monkeypatch.delenv(DATA_DIR_ENV, raising=False)
        with pytest.raises(ConfigError, match=DATA_DIR_ENV):
            resolve_data_dir(None)
