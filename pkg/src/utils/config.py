"""
Configuration loader for the scalability toolkit.
"""
import os
from pathlib import Path
from typing import Dict, Any, Optional
import yaml
from dataclasses import dataclass
import logging

from src.tools.errors import ConfigError
from src.tools.fitting import FitSettings

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = os.path.join(Path(__file__).parent.parent.parent, 'config', 'usl_config.yaml')
CONFIG_ENV_VAR = "USL_TOOLKIT_CONFIG"


@dataclass
class ToolkitConfig:
    """Data class to hold toolkit configuration."""
    settings: Dict[str, Any]
    fitting: Dict[str, Any]
    simulation: Dict[str, Any]
    verification: Dict[str, Any]

    @property
    def fit_settings(self) -> FitSettings:
        """Fitting section as typed settings."""
        return FitSettings.from_dict(self.fitting)

    @property
    def logging_settings(self) -> Dict[str, Any]:
        return self.settings.get('logging', {})


def resolve_config_path(config_path: Optional[str] = None) -> str:
    """Explicit path first, then the environment variable, then the bundled default."""
    return config_path or os.environ.get(CONFIG_ENV_VAR) or DEFAULT_CONFIG_PATH


def load_config(config_path: Optional[str] = None) -> ToolkitConfig:
    """
    Load configuration from YAML file.

    Args:
        config_path: Path to configuration file. If None, uses
            $USL_TOOLKIT_CONFIG or the default path.

    Returns:
        ToolkitConfig: Configuration object

    Raises:
        FileNotFoundError: If configuration file doesn't exist
        yaml.YAMLError: If configuration file is invalid
        ConfigError: If required sections are missing or the file is not a mapping
    """
    config_path = resolve_config_path(config_path)

    try:
        with open(config_path, 'r') as f:
            config_data = yaml.safe_load(f)

        if not isinstance(config_data, dict):
            raise ConfigError(f"Configuration at {config_path} is not a mapping")

        # Validate required sections
        required_sections = ['settings', 'fitting', 'simulation', 'verification']
        missing_sections = [section for section in required_sections if section not in config_data]
        if missing_sections:
            raise ConfigError(f"Missing required sections in config: {missing_sections}")

        return ToolkitConfig(**{section: config_data[section] or {} for section in required_sections})

    except FileNotFoundError:
        logger.error(f"Configuration file not found at {config_path}")
        raise
    except yaml.YAMLError as e:
        logger.error(f"Invalid YAML in configuration file: {e}")
        raise
    except Exception as e:
        logger.error(f"Error loading configuration: {e}")
        raise
