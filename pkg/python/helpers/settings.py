import json
import os
from typing import TypedDict

from . import files

SETTINGS_FILE = files.get_abs_path("tmp/settings.json")


class Settings(TypedDict):
    level: int
    precision: int
    degree_cap: int
    witnesses: int
    output_format: str
    cache_dir: str
    jobs: int
    koszul_level: int
    koszul_max_level: int
    verify_fraction: float


_settings: Settings | None = None


def get_settings() -> Settings:
    global _settings
    if not _settings:
        _settings = _read_settings_file()
    if not _settings:
        _settings = get_default_settings()
    return normalize_settings(_settings)


def normalize_settings(settings: Settings) -> Settings:
    """Defaults for missing keys, values coerced to the default's type, unknown keys dropped."""
    normalized = get_default_settings()
    for key, default in list(normalized.items()):
        if key in settings:
            try:
                normalized[key] = type(default)(settings[key])  # type: ignore
            except (ValueError, TypeError):
                pass
    return normalized


def _read_settings_file() -> Settings | None:
    if os.path.exists(SETTINGS_FILE):
        content = files.read_file(SETTINGS_FILE)
        parsed = json.loads(content)
        return normalize_settings(parsed)
    return None


def get_default_settings() -> Settings:
    return Settings(
        level=1,
        precision=2,
        degree_cap=8,
        witnesses=8,
        output_format="json",
        cache_dir="tmp/certificates",
        jobs=1,
        koszul_level=1,
        koszul_max_level=4,
        verify_fraction=0.05,
    )
