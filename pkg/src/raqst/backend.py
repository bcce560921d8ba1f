"""Numerical backend selection for the hot kernels.

The kernels in :mod:`raqst.kernels` are written as plain numpy functions and
compiled with numba when it is available.  The environment variable
``RAQST_NUMBA`` controls the choice:

* unset or empty: use numba if it can be imported, else fall back to numpy;
* ``0``/``false``/``off``/``no``: force the pure-numpy path;
* ``1``/``true``/``on``/``yes``: require numba (raise if unavailable).

``python -m raqst.benchmark`` times the two paths against each other.
"""

from __future__ import annotations

import os

_TRUTHY = ("1", "true", "on", "yes")
_FALSY = ("0", "false", "off", "no")


def _resolve() -> bool:
    flag = os.environ.get("RAQST_NUMBA", "").strip().lower()
    if flag in _FALSY:
        return False
    if flag in _TRUTHY:
        import numba  # noqa: F401  raises ImportError when missing

        return True
    if flag:
        raise ValueError(
            f"RAQST_NUMBA must be one of {_TRUTHY + _FALSY}, got {flag!r}"
        )
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


USE_NUMBA = _resolve()


def maybe_jit(func):
    """Compile ``func`` with numba when the numba backend is active."""
    if not USE_NUMBA:
        return func
    import numba

    return numba.njit(cache=True, fastmath=False)(func)


def jit_always(func):
    """Compile ``func`` with numba unconditionally (benchmark use only)."""
    import numba

    return numba.njit(cache=True, fastmath=False)(func)
