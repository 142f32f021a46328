"""Engine selection: compiled extension when importable, pure Python otherwise.

``TICKCHECK_ENGINE=pure`` or ``TICKCHECK_ENGINE=c`` forces the choice (the
latter fails loudly when the extension is missing, which beats silently
benchmarking the wrong thing).
"""

from __future__ import annotations

import os

from .pure import PureEngine

try:
    from . import _core  # type: ignore[attr-defined]

    HAVE_COMPILED = True
except ImportError:
    _core = None
    HAVE_COMPILED = False


def default_engine_name() -> str:
    forced = os.environ.get("TICKCHECK_ENGINE", "").strip().lower()
    if forced in ("pure", "c"):
        return forced
    return "c" if HAVE_COMPILED else "pure"


def make_engine(cm, name: str | None = None):
    """Instantiate an engine for a compiled model.

    ``name``: "pure", "c", or None for the default (env override, then the
    compiled engine when available).
    """
    name = name or default_engine_name()
    if name == "pure":
        return PureEngine(cm)
    if name == "c":
        if not HAVE_COMPILED:
            raise RuntimeError(
                "compiled engine requested but tickcheck.engine._core is not built"
            )
        return _core.CoreEngine(cm)
    raise ValueError(f"unknown engine {name!r}")
