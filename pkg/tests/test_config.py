# tests/test_config.py
from torsionkit.config import get_settings


def test_defaults(monkeypatch):
    for name in ("TORSIONKIT_TRIALS", "TORSIONKIT_SEED", "TORSIONKIT_LOG_LEVEL", "TORSIONKIT_ORACLE_MAX_DIM"):
        monkeypatch.delenv(name, raising=False)
    settings = get_settings()
    assert settings.trials == 25
    assert settings.seed == 0
    assert settings.log_level == "WARNING"
    assert settings.oracle_max_dim == 12


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("TORSIONKIT_TRIALS", "7")
    monkeypatch.setenv("TORSIONKIT_LOG_LEVEL", "debug")
    settings = get_settings()
    assert settings.trials == 7
    assert settings.log_level == "DEBUG"


def test_bad_values_fall_back(monkeypatch):
    monkeypatch.setenv("TORSIONKIT_TRIALS", "many")
    monkeypatch.setenv("TORSIONKIT_SEED", "-3")
    monkeypatch.setenv("TORSIONKIT_LOG_LEVEL", "LOUD")
    settings = get_settings()
    assert settings.trials == 25
    assert settings.seed == 0
    assert settings.log_level == "WARNING"
