"""Per-run configuration carried through context variables.

The suite runner installs a horizon cap and a cancellation token; deep
library code consults them without threading extra arguments through
every call.  Worker threads copy the context they were started from.
"""

from __future__ import annotations

import contextlib
import threading
from contextvars import ContextVar

from .errors import AlmostError, HorizonError


class Cancelled(AlmostError):
    """Raised inside long computations once their token is cancelled."""


class CancelToken:
    def __init__(self):
        self._event = threading.Event()

    def cancel(self):
        self._event.set()

    @property
    def cancelled(self) -> bool:
        return self._event.is_set()

    def check(self):
        if self._event.is_set():
            raise Cancelled("computation cancelled")


_cancel: ContextVar[CancelToken | None] = ContextVar("almostctl_cancel", default=None)
_level_cap: ContextVar[int | None] = ContextVar("almostctl_level_cap", default=None)


def check_cancelled():
    tok = _cancel.get()
    if tok is not None:
        tok.check()


def check_level(n: int, what: str = "system"):
    cap = _level_cap.get()
    if cap is not None and n > cap:
        raise HorizonError(f"{what} evaluated at level {n}, past the configured cap {cap}")


def level_cap() -> int | None:
    return _level_cap.get()


@contextlib.contextmanager
def limits(cap: int | None = None, token: CancelToken | None = None):
    t1 = _level_cap.set(cap)
    t2 = _cancel.set(token)
    try:
        yield
    finally:
        _level_cap.reset(t1)
        _cancel.reset(t2)
