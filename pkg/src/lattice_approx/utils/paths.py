"""
Path resolution for lattice-approx configuration and the lattice cache.

Files live under a workspace-relative `.workspace-config/lattice-approx/`
directory when a workspace root is found, otherwise under
`~/.config/lattice-approx/`. Nothing is created until a file is written.
"""

import os
from pathlib import Path
from typing import Optional

APP_NAME = "lattice-approx"
CACHE_ENV_VAR = "LATTICE_CACHE"


def find_workspace_root(start_path: Optional[Path] = None) -> Optional[Path]:
    """Find the workspace root directory.

    Walks up from `start_path` looking for a `.workspace-config/` directory.

    Args:
        start_path: Path to start searching from (defaults to current working directory)

    Returns:
        Path to workspace root, or None if not found
    """
    current = Path(start_path or Path.cwd()).resolve()

    while True:
        if (current / ".workspace-config").is_dir():
            return current
        if current == current.parent:
            return None
        current = current.parent


def get_app_dir() -> Path:
    """Directory holding lattice-approx config and cache files."""
    workspace_root = find_workspace_root()
    if workspace_root:
        return workspace_root / ".workspace-config" / APP_NAME
    return Path.home() / ".config" / APP_NAME


def get_config_path(filename: str = "config.yaml") -> Path:
    """Get the default configuration file path."""
    return get_app_dir() / filename


def get_cache_path(configured: Optional[str] = None) -> Path:
    """Resolve the lattice cache path.

    Priority: the LATTICE_CACHE environment variable, then the configured
    path, then `lattices.jsonl` in the app directory.
    """
    env_path = os.environ.get(CACHE_ENV_VAR)
    if env_path:
        return Path(env_path).expanduser()
    if configured:
        return Path(configured).expanduser()
    return get_app_dir() / "lattices.jsonl"
