import hashlib
import json
from pathlib import Path
from typing import Any, Dict

import toml

from ..errors import ConfigError


def load_structured_file(path: Path) -> Dict[str, Any]:
    """
    Read a TOML file, or JSON when the suffix is ``.json``.

    Raises:
        ConfigError: If the file is missing or cannot be parsed
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    try:
        with open(path, encoding="utf-8") as f:
            if path.suffix.lower() == ".json":
                data = json.load(f)
            else:
                data = toml.load(f)
    except (toml.TomlDecodeError, json.JSONDecodeError, UnicodeDecodeError) as e:
        raise ConfigError(f"Could not parse {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a table")
    return data


def stable_hash(data: Dict[str, Any]) -> str:
    """Short SHA-256 of a canonical JSON rendering."""
    text = json.dumps(data, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def write_toml(data: Dict[str, Any], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        toml.dump(data, f)
    return path
