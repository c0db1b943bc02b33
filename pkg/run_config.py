#!/usr/bin/env python3
"""
GW/H calculator runtime configuration

Loads config.json from the repository root, applies an optional TOML override
file and command-line overrides, and validates the result.

Usage:
    python run_config.py --create-template config.json
    python run_config.py --show
"""
from __future__ import annotations

import argparse
import copy
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from partitions import GWHError

try:
    import toml
    TOML_AVAILABLE = True
except ImportError:
    TOML_AVAILABLE = False

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent / "config.json"


class RunConfig:
    """Runtime knobs for the calculator and the verification suites."""

    DEFAULTS: Dict[str, Any] = {
        "log_level": "INFO",
        "workers": 4,
        "bruteforce_max_degree": 6,
        "random_products": 100,
        "random_seed": 0,
        "fock_degree_cap": 5,
        "fock_genus_cap": 2,
        "verify_budgets": {
            "quick": {"d_max": 3, "genus_max": 1, "insertions_max": 2, "profiles_max": 3,
                      "elliptic_d_max": 2, "cut_join_r_max": 3, "completion_k_max": 3},
            "full": {"d_max": 5, "genus_max": 2, "insertions_max": 3, "profiles_max": 4,
                     "elliptic_d_max": 3, "cut_join_r_max": 6, "completion_k_max": 4},
        },
    }

    LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
    BUDGET_KEYS = ("d_max", "genus_max", "insertions_max", "profiles_max",
                   "elliptic_d_max", "cut_join_r_max", "completion_k_max")

    def __init__(self, values: Optional[Mapping[str, Any]] = None, source: Optional[Path] = None):
        self.values: Dict[str, Any] = copy.deepcopy(self.DEFAULTS)
        self.source = source
        if values:
            self.merge(values)

    @classmethod
    def load(cls, path: Optional[Path] = None, overrides: Optional[Path] = None) -> "RunConfig":
        path = Path(path) if path else DEFAULT_CONFIG_PATH
        config = cls(source=path)
        if path.exists():
            try:
                config.merge(json.loads(path.read_text()))
            except json.JSONDecodeError as e:
                raise GWHError(f"config file {path} is not valid JSON: {e}") from e
            logger.debug(f"[CONFIG] loaded {path}")
        else:
            logger.info(f"[CONFIG] {path} not found, using defaults")
        if overrides:
            config.merge_toml(Path(overrides))
        config.validate()
        return config

    def merge_toml(self, path: Path) -> None:
        if not TOML_AVAILABLE:
            raise GWHError("TOML overrides need the toml package (pip install toml)")
        try:
            self.merge(toml.load(path))
        except toml.TomlDecodeError as e:
            raise GWHError(f"override file {path} is not valid TOML: {e}") from e
        logger.debug(f"[CONFIG] applied overrides from {path}")

    def merge(self, values: Mapping[str, Any]) -> None:
        for key, value in values.items():
            if key not in self.DEFAULTS:
                logger.warning(f"[CONFIG] ignoring unknown key {key!r}")
                continue
            if value is None:
                continue
            if key == "verify_budgets":
                for name, budget in value.items():
                    self.values["verify_budgets"].setdefault(name, {}).update(budget)
            else:
                self.values[key] = value

    def validate(self) -> None:
        level = self.values["log_level"]
        if not isinstance(level, str) or level.upper() not in self.LOG_LEVELS:
            raise GWHError(f"log_level must be one of {', '.join(self.LOG_LEVELS)}, got {level!r}")
        self.values["log_level"] = level.upper()
        for key in ("workers", "bruteforce_max_degree", "random_products", "random_seed",
                    "fock_degree_cap", "fock_genus_cap"):
            value = self.values[key]
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise GWHError(f"{key} must be a non-negative integer, got {value!r}")
        if self.values["workers"] < 1:
            raise GWHError("workers must be at least 1")
        for name, budget in self.values["verify_budgets"].items():
            missing = [k for k in self.BUDGET_KEYS if k not in budget]
            if missing:
                raise GWHError(f"verify budget {name!r} is missing {', '.join(missing)}")
            for k, v in budget.items():
                if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                    raise GWHError(f"verify budget {name!r}: {k} must be a non-negative integer")

    def budget(self, name: str) -> Dict[str, int]:
        try:
            return dict(self.values["verify_budgets"][name])
        except KeyError:
            raise GWHError(f"unknown verify budget {name!r}") from None

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    def to_json(self) -> Dict[str, Any]:
        return copy.deepcopy(self.values)

    @classmethod
    def create_template(cls, path: Path) -> Path:
        path = Path(path)
        path.write_text(json.dumps(cls.DEFAULTS, indent=2) + "\n")
        logger.info(f"[CONFIG] template written to {path}")
        return path


def load_config(path: Optional[Path] = None, overrides: Optional[Path] = None) -> RunConfig:
    return RunConfig.load(path, overrides)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="GW/H calculator configuration")
    parser.add_argument("--config", type=Path, default=None, help="config.json to load")
    parser.add_argument("--overrides", type=Path, default=None, help="TOML override file")
    parser.add_argument("--create-template", type=Path, metavar="PATH", help="write the default config")
    parser.add_argument("--show", action="store_true", help="print the effective configuration")
    args = parser.parse_args(argv)

    logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(message)s')
    try:
        if args.create_template:
            RunConfig.create_template(args.create_template)
            return 0
        config = load_config(args.config, args.overrides)
    except GWHError as e:
        print(json.dumps({"error": {"type": type(e).__name__, "message": str(e)}}))
        return 1
    print(json.dumps(config.to_json(), indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
