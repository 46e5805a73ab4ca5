"""Kernel backend selection.

The compiled extension is preferred when importable; ``TANDEM_HT_BACKEND``
overrides the choice ("compiled" or "python").
"""

import os

from . import _kernels_py

_choice = os.environ.get("TANDEM_HT_BACKEND", "").strip().lower()

if _choice == "python":
    _impl = _kernels_py
elif _choice == "compiled":
    from . import _kernels as _impl  # raises if the extension was not built
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

process_jobs = _impl.process_jobs
invcdf = _impl.invcdf
chain_terminal_block = _impl.chain_terminal_block
chain_path_block = _impl.chain_path_block


def active_backend():
    """Name of the kernel backend in use ("compiled" or "python")."""
    return _impl.BACKEND
