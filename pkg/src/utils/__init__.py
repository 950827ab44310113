from .console import error, info, setup_logging, success
from .files import load_structured_file, stable_hash, write_toml

__all__ = [
    "error",
    "info",
    "load_structured_file",
    "setup_logging",
    "stable_hash",
    "success",
    "write_toml",
]
