"""Example systems shipped with the package."""

from __future__ import annotations

from importlib import resources

NAMES = ("pendulum", "hessenberg3", "hessenberg4", "hessenberg5", "expode", "nonqr")


def path(name: str, suffix: str = ".dae"):
    return resources.files(__name__) / f"{name}{suffix}"


def read(name: str, suffix: str = ".dae") -> str | None:
    p = path(name, suffix)
    return p.read_text() if p.is_file() else None
