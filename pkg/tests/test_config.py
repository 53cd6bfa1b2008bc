"""
Tests for configuration management
"""

import json
import os
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

from concurrex.config import (
    DEFAULT_CONFIG,
    export_config,
    load_config,
    roof_config_from,
    save_config,
    tolerance,
    validate_config,
)
from concurrex.errors import ConfigError


class TestConfig(unittest.TestCase):
    """Test configuration operations."""

    def setUp(self):
        """Set up test fixtures."""
        self.tmp = tempfile.TemporaryDirectory()
        self.config_dir = Path(self.tmp.name)
        self.config_file = self.config_dir / "config.json"
        patchers = [
            patch('concurrex.config.CONFIG_DIR', self.config_dir),
            patch('concurrex.config.CONFIG_FILE', self.config_file),
            patch.dict(os.environ, {}, clear=False),
        ]
        for patcher in patchers:
            patcher.start()
            self.addCleanup(patcher.stop)
        for key in list(os.environ):
            if key.startswith("CONCURREX_"):
                del os.environ[key]
        self.addCleanup(self.tmp.cleanup)

    def test_load_defaults_without_file(self):
        """No file and no environment gives the defaults."""
        self.assertEqual(load_config(), DEFAULT_CONFIG)

    def test_load_config_from_file(self):
        """Values in the config file override defaults."""
        self.config_file.write_text(json.dumps({"restarts": 8, "functional": "tangle"}))
        config = load_config()
        self.assertEqual(config["restarts"], 8)
        self.assertEqual(config["functional"], "tangle")
        self.assertEqual(config["max_iters"], DEFAULT_CONFIG["max_iters"])

    def test_corrupt_file_falls_back_to_defaults(self):
        self.config_file.write_text("{not json")
        self.assertEqual(load_config()["restarts"], DEFAULT_CONFIG["restarts"])

    def test_environment_overrides_file(self):
        """Environment variables take precedence over the file."""
        self.config_file.write_text(json.dumps({"restarts": 8}))
        os.environ["CONCURREX_RESTARTS"] = "12"
        os.environ["CONCURREX_NORM_TOL"] = "1e-8"
        config = load_config()
        self.assertEqual(config["restarts"], 12)
        self.assertEqual(config["norm_tol"], 1e-8)

    def test_unparsable_environment_value_is_ignored(self):
        os.environ["CONCURREX_WORKERS"] = "many"
        self.assertEqual(load_config()["workers"], DEFAULT_CONFIG["workers"])

    def test_save_then_load(self):
        config = dict(DEFAULT_CONFIG, restarts=3)
        save_config(config)
        self.assertEqual(load_config()["restarts"], 3)

    def test_validate_defaults(self):
        is_valid, errors = validate_config(dict(DEFAULT_CONFIG))
        self.assertTrue(is_valid)
        self.assertEqual(errors, [])

    def test_validate_reports_each_bad_key(self):
        config = dict(DEFAULT_CONFIG, restarts=0, norm_tol=-1.0, functional="negativity")
        is_valid, errors = validate_config(config)
        self.assertFalse(is_valid)
        self.assertEqual(len(errors), 3)
        self.assertTrue(any("functional" in error for error in errors))

    def test_export_config(self):
        target = self.config_dir / "exported" / "backup.json"
        path = export_config(str(target))
        self.assertEqual(Path(path), target)
        self.assertEqual(json.loads(target.read_text()), load_config())

    def test_roof_config_from_ignores_none_overrides(self):
        cfg = roof_config_from(dict(DEFAULT_CONFIG), restarts=None, functional="tangle", rng_seed=5)
        self.assertEqual(cfg.restarts, DEFAULT_CONFIG["restarts"])
        self.assertEqual(cfg.functional, "tangle")
        self.assertEqual(cfg.rng_seed, 5)

    def test_tolerance_reads_environment(self):
        os.environ["CONCURREX_PSD_TOL"] = "1e-6"
        os.environ["CONCURREX_PHC_TOL"] = "0.5"
        config = load_config()
        self.assertEqual(tolerance(config, "psd_tol"), 1e-6)
        self.assertEqual(tolerance(config, "phc_tol"), 0.5)
        self.assertEqual(tolerance(config, "norm_tol"), DEFAULT_CONFIG["norm_tol"])

    def test_invalid_tolerance_falls_back_to_default(self):
        with self.assertLogs("concurrex.config", level="WARNING"):
            value = tolerance(dict(DEFAULT_CONFIG, phc_tol="loose"), "phc_tol")
        self.assertEqual(value, DEFAULT_CONFIG["phc_tol"])

    def test_roof_config_rejects_unknown_functional(self):
        with self.assertRaises(ConfigError):
            roof_config_from(dict(DEFAULT_CONFIG, functional="negativity"))


if __name__ == '__main__':
    unittest.main()
