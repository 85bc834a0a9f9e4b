"""Bundled fixture files: taxonomy, aliases, stop words, PRNG vectors,
default pipeline config, and the survey snapshot."""

from importlib import resources
from pathlib import Path


def path(name: str) -> Path:
    """Filesystem path of a bundled data file."""
    candidate = Path(str(resources.files(__package__) / name))
    if not candidate.exists():
        raise FileNotFoundError(f"no bundled data file named {name!r}")
    return candidate
