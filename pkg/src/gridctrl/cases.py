"""Bundled example networks, shipped as package data under ``cases/``."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .netmodel import MATPOWER_SUBSET, NATIVE_JSON, Network, parse_case

_FORMATS = {".json": NATIVE_JSON, ".m": MATPOWER_SUBSET}


def _case_dir():
    return resources.files(__package__) / "cases"


def case_names() -> list[str]:
    """Bundled case file names (with extension), sorted."""
    return sorted(
        entry.name for entry in _case_dir().iterdir()
        if entry.name.rsplit(".", 1)[-1] in ("json", "m")
    )


def case_path(name: str) -> Path:
    """Filesystem path of a bundled case; the extension may be omitted."""
    candidates = [name] if "." in name else [name + ext for ext in _FORMATS]
    for candidate in candidates:
        entry = _case_dir() / candidate
        if entry.is_file():
            return Path(str(entry))
    raise KeyError(f"no bundled case named '{name}'; have {case_names()}")


def load_case(name: str) -> Network:
    """Parse a bundled case by file name, format from the extension."""
    path = case_path(name)
    fmt = _FORMATS.get(path.suffix)
    if fmt is None:
        raise KeyError(f"cannot infer a case format from '{name}'")
    return parse_case(path.read_text(), fmt)
