"""Slot-engine backends.

The compiled extension is preferred when importable; the pure-Python twin is
always present and produces bit-identical results. Set AFFBCAST_ENGINE to
"pure" or "compiled" to force a backend.
"""

import os

from . import _engine_py
from .packs import EVENT_NAMES, MAXF, POLICY_IDS

try:
    from . import _engine as _engine_c
except ImportError:
    _engine_c = None


def get_engine(name=None):
    choice = name or os.environ.get("AFFBCAST_ENGINE", "")
    if choice == "pure":
        return _engine_py
    if choice == "compiled":
        if _engine_c is None:
            raise RuntimeError("compiled engine not built; reinstall or set "
                               "AFFBCAST_ENGINE=pure")
        return _engine_c
    if choice:
        raise ValueError(f"unknown engine {choice!r}")
    return _engine_c if _engine_c is not None else _engine_py


def backend_name(engine=None):
    return (engine if engine is not None else get_engine()).BACKEND
