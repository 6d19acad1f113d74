import logging
from pathlib import Path

from pydantic import ValidationError

from app.exceptions import ConfigError
from app.models.run_config import RunConfig

logger = logging.getLogger(__name__)


def load_run_config(path: Path) -> RunConfig:
    """Parse and validate one JSON run config; any problem is a ConfigError (exit 2)."""
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"Cannot read config {path}: {exc}", path=str(path)) from exc
    try:
        return RunConfig.model_validate_json(raw)
    except ValidationError as exc:
        problems = [f"{'.'.join(str(part) for part in error['loc'])}: {error['msg']}" for error in exc.errors()]
        raise ConfigError(f"Invalid config {path}", path=str(path), problems=problems) from exc
