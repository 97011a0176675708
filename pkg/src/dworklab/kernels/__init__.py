"""Hot-kernel backend selection.

The package ships a compiled Cython extension (``_speedups``) and a pure
Python twin (``_pure``) with identical semantics.  The compiled backend
is used when importable; set ``DWORKLAB_KERNELS=py`` to force the pure
backend or ``DWORKLAB_KERNELS=c`` to require the compiled one.
"""

from __future__ import annotations

import os

_requested = os.environ.get("DWORKLAB_KERNELS", "").strip().lower()
if _requested not in {"", "c", "py"}:
    raise ImportError(f"DWORKLAB_KERNELS must be 'c' or 'py', not {_requested!r}")

if _requested == "py":
    from . import _pure as _impl
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _requested == "c":
            raise
        from . import _pure as _impl

BACKEND = _impl.BACKEND_NAME

vp_int = _impl.vp_int
hall_exp = _impl.hall_exp
hall_exp_mod = _impl.hall_exp_mod
hall_log = _impl.hall_log
hall_log_mod_residues = _impl.hall_log_mod_residues
log_residue_precision = _impl.log_residue_precision
subgroup_lattice_sizes = _impl.subgroup_lattice_sizes

__all__ = [
    "BACKEND",
    "vp_int",
    "hall_exp",
    "hall_exp_mod",
    "hall_log",
    "hall_log_mod_residues",
    "log_residue_precision",
    "subgroup_lattice_sizes",
]
