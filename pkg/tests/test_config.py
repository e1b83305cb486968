from __future__ import annotations

from pathlib import Path

import pytest

from descoord.config import SETTINGS_ENV, Settings, load_settings, locate_settings


@pytest.fixture(autouse=True)
def clear_environment(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv(SETTINGS_ENV, raising=False)
    monkeypatch.chdir(tmp_path)


def write_settings(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def test_defaults_without_any_file() -> None:
    assert locate_settings() is None
    settings = load_settings()
    assert settings.logging.level == "WARNING"
    assert settings.logging.file is None
    assert settings.synthesis.observation == "full"
    assert settings.synthesis.assert_distributed
    assert settings.synthesis.trim_specs
    assert settings.alphabet.strategy == "cd"
    assert not settings.alphabet.ensure_observer
    assert settings.report.format == "text"
    assert settings.report.enumerate_limit == 6


def test_load_reads_every_section(tmp_path: Path) -> None:
    path = write_settings(
        tmp_path / "settings.yaml",
        """
logging:
  level: DEBUG
  file: logs/coordctl.log
synthesis:
  observation: partial
  assert_distributed: false
  trim_specs: false
alphabet:
  strategy: observer-cd
report:
  format: json
  enumerate_limit: 3
""",
    )
    settings = Settings.load(path)
    assert settings.logging.level == "DEBUG"
    assert settings.logging.file == Path("logs/coordctl.log")
    assert settings.synthesis.observation == "partial"
    assert not settings.synthesis.assert_distributed
    assert not settings.synthesis.trim_specs
    assert settings.alphabet.ensure_observer
    assert settings.report.format == "json"
    assert settings.report.enumerate_limit == 3


def test_empty_file_gives_defaults(tmp_path: Path) -> None:
    settings = Settings.load(write_settings(tmp_path / "empty.yaml", ""))
    assert settings == Settings()


def test_empty_sections_give_defaults(tmp_path: Path) -> None:
    path = write_settings(tmp_path / "sections.yaml", "logging:\nsynthesis:\nalphabet:\nreport:\n")
    assert Settings.load(path) == Settings()


@pytest.mark.parametrize(
    "text, section",
    [
        ("synthesis:\n  observation: sometimes\n", "synthesis.observation"),
        ("alphabet:\n  strategy: random\n", "alphabet.strategy"),
        ("report:\n  format: xml\n", "report.format"),
    ],
)
def test_invalid_choices_are_rejected(tmp_path: Path, text: str, section: str) -> None:
    path = write_settings(tmp_path / "bad.yaml", text)
    with pytest.raises(ValueError, match=section):
        Settings.load(path)


def test_locate_settings_precedence(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    example = write_settings(tmp_path / "config" / "settings.example.yaml", "report:\n  enumerate_limit: 1\n")
    assert locate_settings() == Path("config/settings.example.yaml")
    assert load_settings().report.enumerate_limit == 1

    write_settings(tmp_path / "config" / "settings.yaml", "report:\n  enumerate_limit: 2\n")
    assert locate_settings() == Path("config/settings.yaml")
    assert load_settings().report.enumerate_limit == 2

    from_env = write_settings(tmp_path / "env.yaml", "report:\n  enumerate_limit: 3\n")
    monkeypatch.setenv(SETTINGS_ENV, str(from_env))
    assert locate_settings() == from_env
    assert load_settings().report.enumerate_limit == 3

    assert locate_settings(example) == example
    assert load_settings(example).report.enumerate_limit == 1
