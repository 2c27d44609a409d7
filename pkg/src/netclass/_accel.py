"""Optional numba acceleration.

Set ``NETCLASS_DISABLE_NUMBA=1`` to force the pure-numpy kernels. When numba
is missing or disabled, ``njit`` is a no-op decorator so kernel sources still
import.
"""

import os

_FALSY = {"", "0", "false", "no", "off"}

NUMBA_DISABLED_BY_ENV = os.environ.get("NETCLASS_DISABLE_NUMBA", "").strip().lower() not in _FALSY

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def _dummy_njit(*args, **kwargs):
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrapper(func):
        return func

    return wrapper


if HAVE_NUMBA:
    njit = numba.njit
else:  # pragma: no cover
    njit = _dummy_njit
