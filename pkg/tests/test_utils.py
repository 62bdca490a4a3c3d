"""
Unit tests for configuration, preset lookup and report helpers
"""

import json
import pytest
import sys
import os

# Add parent directory to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from src.errors import ParseError
from src.utils import (
    format_report, get_default_config, list_presets, load_preset, resolve_spec_path,
    save_results_to_file,
)


class TestConfig:
    """Defaults and environment overrides"""

    def test_defaults(self, monkeypatch):
        for name in ("CFKIT_PRESET_DIR", "CFKIT_LOG_LEVEL", "CFKIT_DMAX", "CFKIT_F1MAX"):
            monkeypatch.delenv(name, raising=False)
        config = get_default_config()
        assert config['dmax'] == 200
        assert config['f1max'] == 30
        assert config['log_level'] == "WARNING"
        assert config['truncation_depth'] == 64
        assert os.path.isdir(config['preset_dir'])

    def test_environment(self, monkeypatch, tmp_path):
        monkeypatch.setenv("CFKIT_DMAX", "50")
        monkeypatch.setenv("CFKIT_LOG_LEVEL", "debug")
        monkeypatch.setenv("CFKIT_PRESET_DIR", str(tmp_path))
        config = get_default_config()
        assert config['dmax'] == 50
        assert config['log_level'] == "DEBUG"
        assert list_presets() == []

    def test_bad_integer(self, monkeypatch):
        monkeypatch.setenv("CFKIT_F1MAX", "many")
        with pytest.raises(ParseError):
            get_default_config()


class TestPresets:
    """Lookup by name or path"""

    def test_names(self):
        assert "farey" in list_presets()
        assert list_presets("/nonexistent/dir") == []

    def test_path_passes_through(self, tmp_path):
        path = tmp_path / "mine.json"
        path.write_text("{}", encoding="utf-8")
        assert resolve_spec_path(str(path)) == str(path)

    def test_unknown_name(self):
        with pytest.raises(ParseError) as info:
            resolve_spec_path("nope")
        assert "farey" in str(info.value)

    def test_load_by_name(self):
        assert load_preset("ceiling").name == "ceiling"


class TestReports:
    """Formatting and saving"""

    def test_format_report(self):
        text = format_report("Title", [("A", 1), ("Longer", "x")])
        assert text.splitlines() == ["Title", "=====", "A      : 1", "Longer : x"]

    def test_save(self, tmp_path):
        path = tmp_path / "out.json"
        save_results_to_file({"ok": True, "name": "τ"}, str(path))
        assert json.loads(path.read_text(encoding="utf-8")) == {"ok": True, "name": "τ"}


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
