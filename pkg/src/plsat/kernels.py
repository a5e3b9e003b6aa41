"""Kernel backend selection.

The compiled backend (``plsat._core``) is used when it was built; set
``PLSAT_PURE=1`` to force the pure Python/numpy backend.  Both expose
``build_alias``, ``sample_clauses``, ``scc`` and ``dpll`` with identical
semantics and identical outputs.
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _pure


def _load_compiled() -> ModuleType | None:
    try:
        from . import _core
    except ImportError:
        return None
    return _core


_compiled = _load_compiled()


def available() -> list[str]:
    return ["compiled", "pure"] if _compiled is not None else ["pure"]


def get(name: str) -> ModuleType:
    if name == "pure":
        return _pure
    if name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built; run `pip install -e .`")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


if os.environ.get("PLSAT_PURE") or _compiled is None:
    backend = _pure
else:
    backend = _compiled

BACKEND = backend.NAME
build_alias = backend.build_alias
sample_clauses = backend.sample_clauses
scc = backend.scc
dpll = backend.dpll
