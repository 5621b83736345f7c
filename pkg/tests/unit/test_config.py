"""Unit tests for environment-driven configuration and logging setup."""

import logging
from unittest.mock import patch

import pytest

from sinkatlas.errors import ParameterError
from sinkatlas.utils.analysis_config import AnalysisConfig, load_analysis_config
from sinkatlas.utils.logging_config import get_logger, resolve_log_level


class TestAnalysisConfig:
    """Test cases for AnalysisConfig and its environment loader."""

    def test_defaults(self):
        """Test the documented defaults."""
        config = AnalysisConfig()
        assert config.tie_tol == 1e-12
        assert config.support_threshold == 1e-9
        assert config.step == 1e-3
        assert config.t_max == 1e4
        assert config.omega_floor == 1e-3
        assert not config.strict_pseudoconvex

    @patch.dict("os.environ", {"SINKATLAS_TIE_TOL": "1e-6", "SINKATLAS_STEP": "0.01"})
    def test_env_overrides(self):
        """Test SINKATLAS_* variables override defaults."""
        config = load_analysis_config()
        assert config.tie_tol == 1e-6
        assert config.step == 0.01
        assert config.t_max == 1e4

    @patch.dict("os.environ", {"SINKATLAS_STRICT_PSEUDOCONVEX": "True"})
    def test_strict_flag(self):
        """Test the strict switch reads true case-insensitively."""
        assert load_analysis_config().strict_pseudoconvex

    @patch.dict("os.environ", {"SINKATLAS_STEP": ""})
    def test_blank_values_ignored(self):
        """Test a blank variable keeps the default."""
        assert load_analysis_config().step == 1e-3

    @patch.dict("os.environ", {"SINKATLAS_TMAX": "forever"})
    def test_non_numeric(self):
        """Test a non-numeric value names the variable."""
        with pytest.raises(ParameterError) as excinfo:
            load_analysis_config()
        assert "SINKATLAS_TMAX" in str(excinfo.value)

    @patch.dict("os.environ", {"SINKATLAS_STEP": "-0.5"})
    def test_out_of_range(self):
        """Test a value outside its range is a ParameterError."""
        with pytest.raises(ParameterError):
            load_analysis_config()


class TestLogging:
    """Test cases for logging helpers."""

    def test_verbose_forces_debug(self):
        """Test --verbose wins over the environment."""
        with patch.dict("os.environ", {"SINKATLAS_LOG": "ERROR"}):
            assert resolve_log_level(verbose=True) == logging.DEBUG

    def test_env_level(self):
        """Test SINKATLAS_LOG picks the console level."""
        with patch.dict("os.environ", {"SINKATLAS_LOG": "info"}):
            assert resolve_log_level() == logging.INFO

    def test_unknown_level_falls_back(self):
        """Test an unknown level name means WARNING."""
        with patch.dict("os.environ", {"SINKATLAS_LOG": "chatty"}):
            assert resolve_log_level() == logging.WARNING

    def test_logger_namespace(self):
        """Test loggers live under the package namespace."""
        assert get_logger("cli.analyze").name == "sinkatlas.cli.analyze"
