"""Backend selection for the hot kernels.

The compiled Cython module is used when it imports; otherwise, or when
``GENSTEREO_PURE_PYTHON`` is set, the numpy fallback is used.  Both expose
``build_volume``, ``cell_possibility`` and ``fitness`` with identical
signatures; inputs are normalised here so callers never worry about dtype
or memory layout.
"""

import os
from types import SimpleNamespace

import numpy as np

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

CHROM_DTYPE = np.int32


def _wrap(mod, name):
    def build_volume(ref, tgt, table, d_max):
        return mod.build_volume(
            np.ascontiguousarray(ref, dtype=np.uint8),
            np.ascontiguousarray(tgt, dtype=np.uint8),
            np.ascontiguousarray(table, dtype=np.float64),
            int(d_max),
        )

    def cell_possibility(vol, chrom):
        return mod.cell_possibility(
            np.ascontiguousarray(vol, dtype=np.float64),
            np.ascontiguousarray(chrom, dtype=CHROM_DTYPE),
        )

    def fitness(vol, ref_grad, tgt_grad, chrom, radius):
        return float(
            mod.fitness(
                np.ascontiguousarray(vol, dtype=np.float64),
                np.ascontiguousarray(ref_grad, dtype=np.float64),
                np.ascontiguousarray(tgt_grad, dtype=np.float64),
                np.ascontiguousarray(chrom, dtype=CHROM_DTYPE),
                int(radius),
            )
        )

    return SimpleNamespace(
        name=name,
        build_volume=build_volume,
        cell_possibility=cell_possibility,
        fitness=fitness,
    )


_BACKENDS = {"python": _wrap(_fallback, "python")}
if _compiled is not None:
    _BACKENDS["cython"] = _wrap(_compiled, "cython")

_default = "python" if os.environ.get("GENSTEREO_PURE_PYTHON") or _compiled is None else "cython"


def available_backends():
    return sorted(_BACKENDS)


def backend(name=None):
    """Return the named backend, or the one selected at import."""
    try:
        return _BACKENDS[name or _default]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {name!r}") from None


def default_backend_name():
    return _default


def set_default_backend(name):
    global _default
    backend(name)
    _default = name
