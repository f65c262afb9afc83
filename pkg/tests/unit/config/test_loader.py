import os
from pathlib import Path
from unittest.mock import patch

import pytest
import yaml
from pydantic import ValidationError

from fieldcover.config import loader
from fieldcover.config.loader import (
    _expand_env_vars,
    _find_config_file,
    _process_config_dict,
    get_config_value,
    load_config,
    save_config,
    set_config_value,
)
from fieldcover.config.schema import FieldCoverConfig


def test_expand_env_vars():
    """Test expanding environment variables in strings."""
    with patch.dict(os.environ, {"FC_LEVEL": "DEBUG"}):
        assert _expand_env_vars("${FC_LEVEL}") == "DEBUG"
        assert _expand_env_vars("level $FC_LEVEL") == "level DEBUG"

    assert _expand_env_vars("${FC_NON_EXISTENT_VAR}") == ""
    assert _expand_env_vars("Plain value") == "Plain value"
    assert _expand_env_vars(123) == 123


def test_process_config_dict():
    """Test that nested strings are expanded and other values kept."""
    with patch.dict(os.environ, {"FC_COLOR": "#123456"}):
        processed = _process_config_dict(
            {
                "render": {"track_color": "${FC_COLOR}", "width_in": 6.0},
                "colors": [{"name": "$FC_COLOR"}, "plain"],
            }
        )

    assert processed["render"]["track_color"] == "#123456"
    assert processed["render"]["width_in"] == 6.0
    assert processed["colors"] == [{"name": "#123456"}, "plain"]


def test_find_config_file_prefers_local(temp_dir):
    """Test that ./.fieldcover/config.yaml wins over the other locations."""
    local = temp_dir / ".fieldcover" / "config.yaml"
    local.parent.mkdir()
    local.write_text("planner:\n  seed: 1\n")

    assert _find_config_file().resolve() == local.resolve()


def test_find_config_file_falls_back_to_bundled(temp_dir):
    with patch.object(loader, "USER_CONFIG_PATH", temp_dir / "missing.yaml"):
        assert _find_config_file() == loader.DEFAULT_CONFIG_PATH


def test_find_config_file_none(temp_dir):
    with patch.object(loader, "USER_CONFIG_PATH", temp_dir / "missing.yaml"), patch.object(
        loader, "DEFAULT_CONFIG_PATH", temp_dir / "also-missing.yaml"
    ):
        with pytest.raises(FileNotFoundError):
            _find_config_file()


def test_load_config_from_path(temp_dir):
    path = temp_dir / "config.yaml"
    path.write_text("planner:\n  exact_threshold: 12\nlogging:\n  level: INFO\n")

    config = load_config(path)

    assert config.planner.exact_threshold == 12
    assert config.logging.level == "INFO"
    assert config.render.width_in == 8.0


def test_load_config_expands_env(temp_dir):
    path = temp_dir / "config.yaml"
    path.write_text("logging:\n  level: ${FC_TEST_LEVEL}\n")

    with patch.dict(os.environ, {"FC_TEST_LEVEL": "ERROR"}):
        assert load_config(path).logging.level == "ERROR"


def test_load_config_empty_file(temp_dir):
    path = temp_dir / "config.yaml"
    path.write_text("")
    assert load_config(path) == FieldCoverConfig()


def test_load_config_invalid_value(temp_dir):
    path = temp_dir / "config.yaml"
    path.write_text("planner:\n  exact_threshold: 40\n")
    with pytest.raises(ValidationError):
        load_config(path)


def test_load_config_invalid_yaml(temp_dir):
    path = temp_dir / "config.yaml"
    path.write_text("planner: [unclosed\n")
    with pytest.raises(yaml.YAMLError):
        load_config(path)


def test_load_config_missing_file(temp_dir):
    with pytest.raises(FileNotFoundError):
        load_config(temp_dir / "nope.yaml")


def test_load_config_without_any_file(temp_dir):
    """Test that defaults are used when no configuration exists anywhere."""
    with patch.object(loader, "_find_config_file", side_effect=FileNotFoundError("none")):
        assert load_config() == FieldCoverConfig()


def test_bundled_config_matches_defaults():
    assert load_config(loader.DEFAULT_CONFIG_PATH) == FieldCoverConfig()


def test_get_config_value():
    config = FieldCoverConfig()

    assert get_config_value(config, "planner.exact_threshold") == (15, "int")
    assert get_config_value(config, "planner.tee_formula") == ("paper", "str")
    with pytest.raises(KeyError):
        get_config_value(config, "planner.nope")


def test_set_config_value_parses_scalars():
    config_dict = FieldCoverConfig().model_dump(mode="json")

    updated = set_config_value(config_dict, "planner.headland_margin", "1.5")
    assert updated["planner"]["headland_margin"] == 1.5

    updated = set_config_value(updated, "render.show_cell_ids", "false")
    assert updated["render"]["show_cell_ids"] is False


def test_set_config_value_rejects_invalid():
    config_dict = FieldCoverConfig().model_dump(mode="json")
    with pytest.raises(ValueError):
        set_config_value(config_dict, "planner.exact_threshold", "100")


def test_save_config_round_trip(temp_dir):
    path = temp_dir / "out" / "config.yaml"
    config = FieldCoverConfig(planner={"seed": 42})

    saved = save_config(config, path)

    assert saved == path
    assert load_config(path).planner.seed == 42
    assert isinstance(yaml.safe_load(Path(path).read_text()), dict)
