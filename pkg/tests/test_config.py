import json

import pytest

from src.config import AppConfig, Settings


def test_missing_defaults_file(tmp_path):
    with pytest.raises(FileNotFoundError, match="Defaults configuration not found"):
        AppConfig(tmp_path / "defaults.json")


def test_default_q_mesh():
    mesh = AppConfig().q_mesh
    assert len(mesh) == 21
    assert mesh[0] == -5.0
    assert mesh[-1] == 5.0
    assert 0.0 in mesh
    assert -4.5 in mesh


def test_analysis_defaults():
    app = AppConfig()
    assert app.ellipse_levels == [0.10, 0.90]
    assert app.lr_significance == (2, 0.99)
    assert app.plot_style["width"] == 960


def test_custom_defaults_file(tmp_path):
    path = tmp_path / "defaults.json"
    path.write_text(json.dumps({"analysis": {"q_mesh": {"min": -1.0, "max": 1.0, "count": 5}}}))

    app = AppConfig(path)

    assert app.q_mesh == [-1.0, -0.5, 0.0, 0.5, 1.0]
    assert app.ellipse_levels == [0.10, 0.90]
    assert app.plot_style == {}


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("SHRINK_STEPS", "20")
    monkeypatch.setenv("SHRINK_MODE", "unbiased")
    monkeypatch.setenv("SHRINK_EXPORT_FORMAT", "json")

    settings = Settings()

    assert settings.steps == 20
    assert settings.mode == "unbiased"
    assert settings.export_format == "json"


def test_invalid_environment_value(monkeypatch):
    monkeypatch.setenv("SHRINK_MODE", "bayes")
    with pytest.raises(ValueError):
        Settings()
