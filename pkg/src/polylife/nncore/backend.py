"""Kernel backend selection.

The compiled Cython extension is preferred when importable; otherwise the
NumPy fallback is used.  ``POLYLIFE_BACKEND`` overrides the choice:
``compiled`` fails loudly if the extension is missing, ``python`` forces the
fallback (useful for benchmarking the two against each other).
"""

import os

from ..exceptions import ConfigurationError


def _load():
    choice = os.environ.get("POLYLIFE_BACKEND", "auto")
    if choice not in ("auto", "compiled", "python"):
        raise ConfigurationError(
            f"POLYLIFE_BACKEND must be auto, compiled or python, got {choice!r}"
        )
    if choice in ("auto", "compiled"):
        try:
            from . import _kernels as mod  # type: ignore[attr-defined]

            return mod, "compiled"
        except ImportError:
            if choice == "compiled":
                raise
    from . import _kernels_py as mod

    return mod, "python"


kernels, BACKEND = _load()
