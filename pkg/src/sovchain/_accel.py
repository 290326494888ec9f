"""Optional numba acceleration.

Set SOVCHAIN_DISABLE_NUMBA=1 to force the pure-numpy fallback paths.
Kernels compiled here are exact (no fastmath) so that accelerated and
fallback paths agree to the last ulp-ish digit.
"""
import os

USING_NUMBA = False

if os.environ.get("SOVCHAIN_DISABLE_NUMBA", "").strip() not in ("", "0"):
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
else:
    try:
        from numba import njit as _numba_njit

        def njit(*args, **kwargs):
            kwargs.setdefault("cache", True)
            if args and callable(args[0]):
                return _numba_njit(**kwargs)(args[0])
            return _numba_njit(*args, **kwargs)

        USING_NUMBA = True
    except ImportError:
        def njit(*args, **kwargs):
            if args and callable(args[0]):
                return args[0]
            return lambda f: f
