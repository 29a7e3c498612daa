"""Monte Carlo laboratory for random multiplicative functions.

Thin wrapper over the compiled core. See the function docstrings on the
native module for argument conventions; every sampler takes an explicit
seed and is reproducible bit for bit.
"""

try:
    from ._mclab import *  # wheel layout: module installed inside the package
    from . import _mclab as _native
except ImportError:  # cmake build tree on PYTHONPATH
    from _mclab import *  # noqa: F401,F403
    import _mclab as _native

__version__ = "0.1.0"
__all__ = [name for name in dir(_native) if not name.startswith("_")]
