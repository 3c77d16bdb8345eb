"""Global size guards for enumeration blow-ups.

Every enumeration core checks its projected output size against a global
cap and raises GuardExceeded instead of truncating.  The cap can be raised
per process via the NILKIT_GUARD environment variable or per call site via
set_guard().
"""

import os

DEFAULT_GUARD = 1 << 24


class GuardExceeded(RuntimeError):
    """An enumeration would exceed the configured item cap."""

    def __init__(self, what, size, cap):
        super().__init__(f"{what}: {size} items exceeds guard {cap}")
        self.what = what
        self.size = size
        self.cap = cap


_guard = None


def current_guard():
    global _guard
    if _guard is None:
        env = os.environ.get("NILKIT_GUARD")
        _guard = int(env) if env else DEFAULT_GUARD
    return _guard


def set_guard(value):
    """Override the guard for this process; None resets to env/default."""
    global _guard
    _guard = None if value is None else int(value)
    return current_guard()


def check_guard(what, size):
    cap = current_guard()
    if size > cap:
        raise GuardExceeded(what, size, cap)
    return size
