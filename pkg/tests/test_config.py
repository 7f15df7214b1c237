import importlib
import os
import pytest
from unittest.mock import patch


class TestConfigSimple:
    """Simplified config tests that work reliably"""

    def test_config_import_works(self):
        """Test that config module can be imported"""
        import valfield.config
        assert hasattr(valfield.config, 'DEFAULT_FIELD')
        assert hasattr(valfield.config, 'DEFAULT_SEED')
        assert hasattr(valfield.config, 'LOG_LEVEL')

    def test_config_has_required_constants(self):
        """Test that config has all required constants"""
        import valfield.config

        required_attrs = [
            'SAMPLE_VAL_MIN', 'SAMPLE_VAL_MAX', 'SAMPLE_UNITS', 'LAURENT_UNITS',
            'ORACLE_RANDOM_POINTS', 'MINOR_ORACLE_MAX', 'UNBOUNDED_TARGET'
        ]

        for attr in required_attrs:
            assert hasattr(valfield.config, attr), f"Missing {attr}"

    def test_config_numeric_types(self):
        """Test that numeric config values have correct types"""
        import valfield.config

        assert isinstance(valfield.config.DEFAULT_SEED, int)
        assert isinstance(valfield.config.SAMPLE_VAL_MIN, int)
        assert isinstance(valfield.config.SAMPLE_VAL_MAX, int)
        assert isinstance(valfield.config.ORACLE_RANDOM_POINTS, int)
        assert isinstance(valfield.config.MINOR_ORACLE_MAX, int)
        assert isinstance(valfield.config.UNBOUNDED_TARGET, int)

    def test_config_default_values(self):
        """Test that config has reasonable default values"""
        import valfield.config

        assert valfield.config.SAMPLE_VAL_MIN <= valfield.config.SAMPLE_VAL_MAX
        assert valfield.config.MINOR_ORACLE_MAX >= 1
        assert valfield.config.ORACLE_RANDOM_POINTS >= 0
        assert valfield.config.UNBOUNDED_TARGET < 0

    def test_seed_from_environment(self):
        """Test that the sampling seed can be set via environment variable"""
        import valfield.config

        with patch.dict(os.environ, {'VALFIELD_SEED': '42'}):
            importlib.reload(valfield.config)
            assert valfield.config.DEFAULT_SEED == 42

        importlib.reload(valfield.config)
        assert valfield.config.DEFAULT_SEED == 0

    def test_inverted_sample_range_rejected(self):
        """Test that a minimum sample valuation above the maximum fails at import"""
        import valfield.config

        with patch.dict(os.environ, {'VALFIELD_SAMPLE_VAL_MIN': '3', 'VALFIELD_SAMPLE_VAL_MAX': '1'}):
            with pytest.raises(ValueError):
                importlib.reload(valfield.config)

        importlib.reload(valfield.config)

    def test_parse_unit_pool(self):
        """Test splitting of comma-separated unit pools"""
        from valfield.config import parse_unit_pool

        assert parse_unit_pool("1, -1,3") == ["1", "-1", "3"]
        assert parse_unit_pool("1 + t,2 - t,") == ["1 + t", "2 - t"]
