from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

SETTINGS_ENV = "DESCOORD_SETTINGS"
CONFIG_PATH = Path("config/settings.yaml")
EXAMPLE_CONFIG_PATH = Path("config/settings.example.yaml")

OBSERVATION_MODES = ("full", "partial")
ALPHABET_STRATEGIES = ("cd", "observer-cd")
REPORT_FORMATS = ("text", "json")


@dataclass
class LoggingConfig:
    level: str = "WARNING"
    file: Optional[Path] = None


@dataclass
class SynthesisConfig:
    observation: str = "full"
    assert_distributed: bool = True
    trim_specs: bool = True


@dataclass
class AlphabetConfig:
    strategy: str = "cd"

    @property
    def ensure_observer(self) -> bool:
        return self.strategy == "observer-cd"


@dataclass
class ReportConfig:
    format: str = "text"
    enumerate_limit: int = 6


def _choice(value: Any, allowed: tuple, section: str) -> str:
    text = str(value)
    if text not in allowed:
        raise ValueError(f"{section} must be one of {', '.join(allowed)}, got {text!r}")
    return text


@dataclass
class Settings:
    logging: LoggingConfig = field(default_factory=LoggingConfig)
    synthesis: SynthesisConfig = field(default_factory=SynthesisConfig)
    alphabet: AlphabetConfig = field(default_factory=AlphabetConfig)
    report: ReportConfig = field(default_factory=ReportConfig)

    @classmethod
    def load(cls, path: Path) -> "Settings":
        with path.open("r", encoding="utf-8") as config_file:
            data: Dict[str, Any] = yaml.safe_load(config_file) or {}

        logging_cfg = data.get("logging") or {}
        logging_config = LoggingConfig(
            level=str(logging_cfg.get("level", "WARNING")),
            file=Path(logging_cfg["file"]) if logging_cfg.get("file") else None,
        )

        synthesis_cfg = data.get("synthesis") or {}
        synthesis = SynthesisConfig(
            observation=_choice(
                synthesis_cfg.get("observation", "full"), OBSERVATION_MODES, "synthesis.observation"
            ),
            assert_distributed=bool(synthesis_cfg.get("assert_distributed", True)),
            trim_specs=bool(synthesis_cfg.get("trim_specs", True)),
        )

        alphabet_cfg = data.get("alphabet") or {}
        alphabet = AlphabetConfig(
            strategy=_choice(
                alphabet_cfg.get("strategy", "cd"), ALPHABET_STRATEGIES, "alphabet.strategy"
            ),
        )

        report_cfg = data.get("report") or {}
        report = ReportConfig(
            format=_choice(report_cfg.get("format", "text"), REPORT_FORMATS, "report.format"),
            enumerate_limit=int(report_cfg.get("enumerate_limit", 6)),
        )

        return cls(logging=logging_config, synthesis=synthesis, alphabet=alphabet, report=report)


def locate_settings(explicit: Optional[Path] = None) -> Optional[Path]:
    """Settings file to use: explicit path, then $DESCOORD_SETTINGS, then config/."""

    if explicit is not None:
        return explicit
    from_env = os.getenv(SETTINGS_ENV)
    if from_env:
        return Path(from_env)
    for candidate in (CONFIG_PATH, EXAMPLE_CONFIG_PATH):
        if candidate.exists():
            return candidate
    return None


def load_settings(explicit: Optional[Path] = None) -> Settings:
    path = locate_settings(explicit)
    if path is None:
        return Settings()
    return Settings.load(path)
