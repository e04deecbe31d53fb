import logging
from pathlib import Path
from typing import Any, Dict

import yaml

from src.exceptions import InvalidConfigError
from src.schemas import validate_cli_config

logger = logging.getLogger(__name__)


def setup_logging(log_level: str = "INFO"):
    """Initialises logging for the CLI"""
    logging.basicConfig(
        level=getattr(logging, log_level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )


def ensure_output_dir(out_dir: str):
    """Creates the artifact directory"""
    Path(out_dir).mkdir(parents=True, exist_ok=True)


def load_config_file(path: str) -> Dict[str, Any]:
    """Reads a JSON (or YAML) config document and validates it"""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            document = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        logger.error(f"Config read error: {e}")
        raise InvalidConfigError(f"Failed to read config {path}: {e}")
    if document is None:
        document = {}
    if not isinstance(document, dict):
        raise InvalidConfigError(f"Config {path} must contain an object, got {type(document).__name__}")
    validate_cli_config(document)
    return document
