from pathlib import Path


def ensure_parent_directory(path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    return path


def with_suffix(path: str | Path, suffix: str) -> Path:
    """Output stem plus `suffix`, whether or not the user already typed an extension"""
    path = Path(path)
    if path.suffix.lower() in {".csv", ".json"}:
        path = path.with_suffix("")
    return path.with_name(path.name + suffix)
