"""Hot numerical kernels with a compiled core and a pure-Python fallback.

The Cython extension is built opportunistically at install time; if it is
absent the numpy reference implementation is used.  Set POINCREP_KERNELS
to "compiled" or "reference" to force a backend (forcing "compiled" when
the extension is missing raises at import).
"""
from __future__ import annotations

import os

from . import _reference

# Causal-class codes shared between backends and the geometry layer.
CODE_ZERO = 0
CODE_TIMELIKE_FUTURE = 1
CODE_TIMELIKE_PAST = 2
CODE_NULL_FUTURE = 3
CODE_NULL_PAST = 4
CODE_SPACELIKE = 5

_requested = os.environ.get("POINCREP_KERNELS", "").strip().lower()

if _requested == "reference":
    _impl = _reference
    BACKEND = "reference"
else:
    try:
        from . import _fastcore  # type: ignore[attr-defined]

        _impl = _fastcore
        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "POINCREP_KERNELS=compiled but the extension is not built; "
                "reinstall with a working C toolchain or unset the variable"
            )
        _impl = _reference
        BACKEND = "reference"


def backend() -> str:
    return BACKEND


def classify_radius(vectors, tol: float):
    """Causal-class codes and orbit radii for a batch of 4-vectors."""
    return _impl.classify_radius(vectors, tol)


def statesum_integrand(colors, tri_edges, face_edges, simplex_factor, weight_by_color: bool, face_mode: int, face_n: float):
    """Integrand values for a batch of edge colorings; see _reference."""
    return _impl.statesum_integrand(
        colors, tri_edges, face_edges, simplex_factor, weight_by_color, face_mode, face_n
    )


def implementations():
    """Both backends, for agreement tests and benchmarks."""
    out = {"reference": _reference}
    try:
        from . import _fastcore  # type: ignore[attr-defined]

        out["compiled"] = _fastcore
    except ImportError:
        pass
    return out
