import json

import pytest

from initialize import initialize
from python.helpers import runtime, settings
from python.helpers.errors import ParameterError, error_text, format_error


@pytest.fixture
def no_settings_file(tmp_path, monkeypatch):
    monkeypatch.setattr(settings, "SETTINGS_FILE", str(tmp_path / "settings.json"))
    monkeypatch.setattr(settings, "_settings", None)
    monkeypatch.delenv("CERTIFIER_JOBS", raising=False)
    monkeypatch.delenv("CERTIFIER_CACHE_DIR", raising=False)
    return tmp_path / "settings.json"


def test_normalize_settings_coerces_and_drops():
    normalized = settings.normalize_settings({"level": "3", "jobs": "many", "bogus": 1})  # type: ignore
    assert normalized["level"] == 3
    assert normalized["jobs"] == 1
    assert normalized["precision"] == 2
    assert "bogus" not in normalized


def test_settings_file_overrides_defaults(no_settings_file):
    no_settings_file.write_text(json.dumps({"precision": 3, "witnesses": "5"}))
    current = settings.get_settings()
    assert current["precision"] == 3
    assert current["witnesses"] == 5
    assert current["degree_cap"] == 8


def test_defaults_without_file(no_settings_file):
    runtime.initialize(["check", "7"])
    config = initialize()
    assert (config.level, config.precision, config.degree_cap, config.witnesses) == (1, 2, 8, 8)
    assert config.output_format == "json"
    assert config.cache_dir == "tmp/certificates"
    assert config.no_cache is False


def test_environment_beats_settings(no_settings_file, monkeypatch):
    no_settings_file.write_text(json.dumps({"jobs": 2}))
    monkeypatch.setenv("CERTIFIER_JOBS", "3")
    monkeypatch.setenv("CERTIFIER_CACHE_DIR", "/tmp/elsewhere")
    runtime.initialize(["check", "7"])
    config = initialize()
    assert config.jobs == 3
    assert config.cache_dir == "/tmp/elsewhere"


def test_flags_beat_environment(no_settings_file, monkeypatch):
    monkeypatch.setenv("CERTIFIER_JOBS", "3")
    runtime.initialize(["scan", "50", "--jobs", "2", "--prec", "1", "--format", "csv", "--no-cache"])
    config = initialize()
    assert config.jobs == 2
    assert config.precision == 1
    assert config.output_format == "csv"
    assert config.no_cache is True


def test_koszul_levels_from_flags(no_settings_file):
    runtime.initialize(["koszul", "module.json", "--level", "2", "--max-level", "5"])
    config = initialize()
    assert (config.koszul_level, config.koszul_max_level) == (2, 5)


def test_jobs_floor_is_one(no_settings_file, monkeypatch):
    monkeypatch.setenv("CERTIFIER_JOBS", "0")
    runtime.initialize(["check", "7"])
    assert runtime.get_jobs() == 1


def test_error_text_names_domain_errors():
    assert error_text(ParameterError("bad p")) == "ParameterError: bad p"
    assert error_text(ValueError("plain")) == "plain"


def test_format_error_keeps_message():
    try:
        raise ParameterError("91 is not prime")
    except ParameterError as e:
        text = format_error(e)
    assert "Traceback" in text
    assert text.rstrip().endswith("ParameterError: 91 is not prime")
