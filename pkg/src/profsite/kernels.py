"""Backend selection for the integer-table kernels.

The compiled extension ``profsite._kernels`` is used when it imports;
otherwise the pure-Python module takes over. Both expose the same
functions, so callers go through the wrappers below.
"""

from __future__ import annotations

import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _native
except ImportError:  # extension not built
    _native = None

BACKENDS = {"python": _kernels_py}
if _native is not None:
    BACKENDS["cython"] = _native

_active = _native if _native is not None else _kernels_py


def backend() -> str:
    return "cython" if _active is _native and _native is not None else "python"


def set_backend(name: str) -> None:
    """Switch backends; raises KeyError when the extension is not built."""
    global _active
    _active = BACKENDS[name]


def as_table(rows) -> np.ndarray:
    return np.ascontiguousarray(np.asarray(rows, dtype=np.int64))


def associativity_violation(mul: np.ndarray):
    return _active.associativity_violation(mul)


def homomorphism_violation(mul_src: np.ndarray, mul_dst: np.ndarray, phi: np.ndarray):
    return _active.homomorphism_violation(mul_src, mul_dst, np.ascontiguousarray(phi, dtype=np.int64))


def subgroup_closure(mul: np.ndarray, mask) -> np.ndarray:
    return _active.subgroup_closure(mul, np.ascontiguousarray(mask, dtype=np.uint8))


def orbit_labels(action: np.ndarray) -> np.ndarray:
    return _active.orbit_labels(action)


def equivariance_violation(act_x: np.ndarray, act_y: np.ndarray, table):
    return _active.equivariance_violation(act_x, act_y, np.asarray(table, dtype=np.int64))


def brute_force_equivariant(act_x: np.ndarray, act_y: np.ndarray) -> list[tuple[int, ...]]:
    return _active.brute_force_equivariant(act_x, act_y)
