"""Optional numba acceleration.

Hot loops (macrospin integration, Ising sweeps, exhaustive enumeration) are
written twice: a numba ``@njit`` kernel and a pure-numpy path.  The numpy path
is selected when numba is missing or when the environment variable
``SPINHALL_ISING_DISABLE_NUMBA`` is set to a truthy value.  Both paths draw
from the same ``numpy.random.Generator`` streams in the same order.
"""

import os

ENV_FLAG = "SPINHALL_ISING_DISABLE_NUMBA"

try:
    import numba
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def decorator(func):
            return func

        return decorator


def _env_disabled():
    return os.environ.get(ENV_FLAG, "").strip().lower() in ("1", "true", "yes", "on")


NUMBA_ENABLED = HAVE_NUMBA and not _env_disabled()

ENGINES = ("numba", "numpy")


def default_engine():
    return "numba" if NUMBA_ENABLED else "numpy"


def resolve_engine(engine=None):
    """Return ``"numba"`` or ``"numpy"``; ``None`` picks the configured default."""
    if engine is None:
        return default_engine()
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; expected one of {ENGINES}")
    if engine == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba engine requested but numba is not installed")
    return engine
