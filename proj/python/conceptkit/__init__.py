"""Python bindings for the conceptkit C++ core."""

try:
    from ._conceptkit import *  # noqa: F401,F403
    from ._conceptkit import __doc__  # noqa: F401
except ImportError:  # in-tree build: extension sits on PYTHONPATH next to the package
    from _conceptkit import *  # noqa: F401,F403
    from _conceptkit import __doc__  # noqa: F401
