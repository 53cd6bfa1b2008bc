"""
concurrex Configuration Module
Handles numerical tolerances and convex-roof optimizer defaults.
Supports environment variables for configuration.
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

logger = logging.getLogger(__name__)

CONFIG_DIR = Path.home() / ".concurrex"
CONFIG_FILE = CONFIG_DIR / "config.json"

# Environment variable prefixes
ENV_PREFIX = "CONCURREX_"

# Tolerances shared by the library modules
NORM_TOL = 1e-10
PSD_TOL = 1e-9
RANK_CUTOFF = 1e-12
PHC_TOL = 1e-9

FUNCTIONALS = ("concurrence", "tangle", "phc")

DEFAULT_CONFIG: Dict[str, Any] = {
    "norm_tol": NORM_TOL,
    "psd_tol": PSD_TOL,
    "rank_cutoff": RANK_CUTOFF,
    "phc_tol": PHC_TOL,
    "restarts": 32,
    "max_iters": 500,
    "step_tol": 1e-8,
    "value_tol": 1e-7,
    "workers": 4,
    "functional": "concurrence",
}

# env var suffix -> (config key, parser)
_ENV_OVERRIDES = {
    "RESTARTS": ("restarts", int),
    "MAX_ITERS": ("max_iters", int),
    "WORKERS": ("workers", int),
    "FUNCTIONAL": ("functional", str),
    "NORM_TOL": ("norm_tol", float),
    "PSD_TOL": ("psd_tol", float),
    "PHC_TOL": ("phc_tol", float),
}


def ensure_config_dir():
    """Ensure config directory exists."""
    if not CONFIG_DIR.exists():
        CONFIG_DIR.mkdir(mode=0o755, parents=True)


def load_config() -> Dict:
    """Load configuration from file and environment variables."""
    config = dict(DEFAULT_CONFIG)

    # Load from file
    if CONFIG_FILE.exists():
        try:
            with open(CONFIG_FILE, 'r') as f:
                stored = json.load(f)
            if isinstance(stored, dict):
                config.update(stored)
        except (OSError, json.JSONDecodeError):
            pass

    # Override with environment variables (env vars take precedence)
    for suffix, (key, parse) in _ENV_OVERRIDES.items():
        raw = os.getenv(f"{ENV_PREFIX}{suffix}")
        if raw:
            try:
                config[key] = parse(raw)
            except ValueError:
                pass

    return config


def save_config(config: Dict):
    """Save configuration to file."""
    ensure_config_dir()

    with open(CONFIG_FILE, 'w') as f:
        json.dump(config, f, indent=2)


def validate_config(config: Optional[Dict] = None) -> Tuple[bool, List[str]]:
    """
    Validate configuration values.

    Returns:
        tuple: (is_valid, list_of_errors)
    """
    errors = []
    if config is None:
        config = load_config()

    for key in ("norm_tol", "psd_tol", "rank_cutoff", "phc_tol", "step_tol", "value_tol"):
        value = config.get(key)
        if not isinstance(value, (int, float)) or isinstance(value, bool) or value < 0:
            errors.append(f"Invalid {key}: {value}. Must be a non-negative number")

    for key in ("restarts", "max_iters", "workers"):
        value = config.get(key)
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            errors.append(f"Invalid {key}: {value}. Must be a positive integer")

    if config.get("functional") not in FUNCTIONALS:
        errors.append(f"Invalid functional: {config.get('functional')}. Must be one of {list(FUNCTIONALS)}")

    return len(errors) == 0, errors


def export_config(output_file: Optional[str] = None) -> str:
    """
    Export configuration to a JSON file.

    Args:
        output_file: Path to output file (default: config_backup_<timestamp>.json)

    Returns:
        str: Path to exported file
    """
    from datetime import datetime

    config = load_config()

    if not output_file:
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        output_file = str(CONFIG_DIR / f"config_backup_{timestamp}.json")

    output_path = Path(output_file)
    output_path.parent.mkdir(parents=True, exist_ok=True)

    with open(output_path, 'w') as f:
        json.dump(config, f, indent=2)

    return str(output_path)


def tolerance(config: Dict, key: str) -> float:
    """A tolerance from loaded configuration; invalid values fall back to the default."""
    value = config.get(key, DEFAULT_CONFIG[key])
    if isinstance(value, (int, float)) and not isinstance(value, bool) and value >= 0:
        return float(value)
    logger.warning("Ignoring invalid %s=%r in configuration", key, value)
    return float(DEFAULT_CONFIG[key])


def roof_config_from(config: Dict, **overrides):
    """
    Build a RoofConfig from loaded configuration.

    Keyword overrides with value None are ignored, so CLI flags can be
    passed through unconditionally.
    """
    from concurrex.roof import RoofConfig

    values = {
        "restarts": config.get("restarts", DEFAULT_CONFIG["restarts"]),
        "max_iters": config.get("max_iters", DEFAULT_CONFIG["max_iters"]),
        "step_tol": config.get("step_tol", DEFAULT_CONFIG["step_tol"]),
        "value_tol": config.get("value_tol", DEFAULT_CONFIG["value_tol"]),
        "workers": config.get("workers", DEFAULT_CONFIG["workers"]),
        "functional": config.get("functional", DEFAULT_CONFIG["functional"]),
        "rank_cutoff": config.get("rank_cutoff", DEFAULT_CONFIG["rank_cutoff"]),
    }
    values.update({key: value for key, value in overrides.items() if value is not None})
    return RoofConfig(**values)
