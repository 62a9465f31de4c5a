"""Select the tally kernel at import: compiled extension if built, else numpy.

Set PPCHOICE_PURE_PYTHON=1 to force the numpy fallback.
"""
import os

from . import _tally_py

BACKEND = "python"
tally = _tally_py.tally

if os.environ.get("PPCHOICE_PURE_PYTHON", "") != "1":
    try:
        from ._tally_ext import tally  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass
