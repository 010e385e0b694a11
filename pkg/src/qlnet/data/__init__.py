"""Bundled example networks."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def network_names() -> list[str]:
    root = resources.files(__name__).joinpath("networks")
    return sorted(p.name.removesuffix(".qlnet") for p in root.iterdir() if p.name.endswith(".qlnet"))


def network_path(name: str) -> Path:
    path = Path(str(resources.files(__name__).joinpath("networks", f"{name}.qlnet")))
    if not path.is_file():
        raise FileNotFoundError(f"no bundled network {name!r}; have {', '.join(network_names())}")
    return path
