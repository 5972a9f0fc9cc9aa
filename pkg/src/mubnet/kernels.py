"""Kernel selection: compiled ``_kernels`` when built, else ``_pykernels``.

Set ``MUBNET_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os
from typing import Sequence

from . import _pykernels

_compiled = None
if os.environ.get("MUBNET_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def transversals(n_points: int, classes: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    if _compiled is not None and n_points <= 64 and sum(len(c) for c in classes[1:]) <= 64:
        return _compiled.transversals(n_points, [list(c) for c in classes])
    return _pykernels.transversals(n_points, classes)


def divisor_gaps(dmax: int) -> list[int]:
    if _compiled is not None:
        return _compiled.divisor_gaps(dmax)
    return _pykernels.divisor_gaps(dmax)


def subgroup_closure(moduli: Sequence[int], generators: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    size = 1
    for m in moduli:
        size *= m
    if _compiled is not None and size <= 1 << 24:
        return _compiled.subgroup_closure(list(moduli), [list(g) for g in generators])
    return _pykernels.subgroup_closure(moduli, generators)
