"""Tests for config loading, saving, and edge cases."""

import json
import os
from fractions import Fraction

from kissing.config import VerifierConfig, _load_config_json_file, load_config, save_config


class TestLoadConfigJsonFile:
    def test_missing_file_returns_defaults(self, tmp_path):
        path = str(tmp_path / "sub" / "config.json")
        assert _load_config_json_file(path, {"key": "default"}) == {"key": "default"}
        assert not os.path.exists(path)

    def test_reads_valid_json(self, tmp_path):
        path = str(tmp_path / "config.json")
        with open(path, "w") as f:
            json.dump({"seed": 3}, f)
        assert _load_config_json_file(path, {}) == {"seed": 3}

    def test_invalid_json_returns_defaults(self, tmp_path):
        path = str(tmp_path / "config.json")
        with open(path, "w") as f:
            f.write("not valid json {{{")
        assert _load_config_json_file(path, {"seed": 1}) == {"seed": 1}

    def test_empty_file_returns_defaults(self, tmp_path):
        path = str(tmp_path / "config.json")
        with open(path, "w") as f:
            f.write("")
        assert _load_config_json_file(path, {"key": "val"}) == {"key": "val"}

    def test_non_object_returns_defaults(self, tmp_path):
        path = str(tmp_path / "config.json")
        with open(path, "w") as f:
            json.dump([1, 2, 3], f)
        assert _load_config_json_file(path, {}) == {}


class TestVerifierConfig:
    def test_defaults(self):
        config = VerifierConfig()
        assert config.enclosure_width == Fraction(1, 2**67)
        assert config.enclosure_width < Fraction(1, 10**20)
        assert config.bnb_eps == Fraction(1, 10**9)
        assert config.isolation_width == Fraction(1, 2**40)
        assert config.workers == 1


class TestLoadConfig:
    def test_no_path_gives_defaults(self):
        assert load_config() == VerifierConfig()

    def test_returns_defaults_for_missing_file(self, tmp_path):
        assert load_config(str(tmp_path / "config.json")) == VerifierConfig()

    def test_loads_saved_values(self, tmp_path):
        path = str(tmp_path / "config.json")
        with open(path, "w") as f:
            json.dump({"bnb_max_depth": 80, "seed": 11}, f)
        config = load_config(path)
        assert config.bnb_max_depth == 80
        assert config.seed == 11
        assert config.enclosure_bits == 67

    def test_ignores_unknown_keys(self, tmp_path):
        path = str(tmp_path / "config.json")
        with open(path, "w") as f:
            json.dump({"seed": 5, "unknown_future_key": True}, f)
        config = load_config(path)
        assert config.seed == 5
        assert not hasattr(config, "unknown_future_key")

    def test_ignores_non_integer_values(self, tmp_path):
        path = str(tmp_path / "config.json")
        with open(path, "w") as f:
            json.dump({"seed": "seven", "workers": 1.5}, f)
        assert load_config(path) == VerifierConfig()


class TestSaveConfig:
    def test_roundtrip(self, tmp_path):
        path = str(tmp_path / "config.json")
        save_config(VerifierConfig(refine_rounds=3, workers=4), path)
        with open(path) as f:
            data = json.load(f)
        assert data["refine_rounds"] == 3
        assert load_config(path) == VerifierConfig(refine_rounds=3, workers=4)

    def test_creates_parent_dirs(self, tmp_path):
        path = str(tmp_path / "nested" / "dir" / "config.json")
        save_config(VerifierConfig(), path)
        assert os.path.exists(path)

    def test_atomic_write_no_partial_on_error(self, tmp_path, monkeypatch):
        path = str(tmp_path / "config.json")
        with open(path, "w") as f:
            json.dump({"seed": 99}, f)

        def boom(*args, **kwargs):
            raise RuntimeError("serialize error")

        monkeypatch.setattr("kissing.config.json.dump", boom)
        try:
            save_config(VerifierConfig(), path)
        except RuntimeError:
            pass
        with open(path) as f:
            assert json.load(f) == {"seed": 99}
        assert os.listdir(tmp_path) == ["config.json"]
