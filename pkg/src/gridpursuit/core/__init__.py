"""Kernel backend selection.

The compiled extension provides the graph builder and attractor as C++
loops; the pure backend implements the same contracts with numpy (and the
object-level builder in gridpursuit.graph).  Selection happens at import:
the compiled module is used when importable, the pure one otherwise, and
GRIDPURSUIT_BACKEND=pure|compiled overrides the choice.
"""

from __future__ import annotations

import os

from . import pure

try:
    from . import _speedups
except ImportError:  # extension not built: numpy lane only
    _speedups = None


def compiled_available() -> bool:
    return _speedups is not None


def default_backend() -> str:
    env = os.environ.get("GRIDPURSUIT_BACKEND")
    if env == "pure":
        return "pure"
    if env == "compiled":
        if _speedups is None:
            raise RuntimeError("GRIDPURSUIT_BACKEND=compiled but extension not importable")
        return "compiled"
    return "compiled" if _speedups is not None else "pure"


def has_compiled() -> bool:
    """True when the default backend is the compiled one."""
    return default_backend() == "compiled"


def attractor_arrays(
    succ_off,
    succ,
    pred_off,
    pred,
    owner_sys,
    player_sys: bool,
    target,
    active,
    sunk,
    backend: str | None = None,
):
    """Dispatch one attractor computation to the selected backend."""
    backend = backend or default_backend()
    if backend == "compiled":
        return _speedups.attractor(
            succ_off, succ, pred_off, pred, owner_sys, int(player_sys), target, active, sunk
        )
    return pure.attractor(
        succ_off, succ, pred_off, pred, owner_sys, bool(player_sys), target, active, sunk
    )
