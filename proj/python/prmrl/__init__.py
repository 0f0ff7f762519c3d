"""Physics-informed reward machine toolkit (python bindings)."""

try:
    from ._prmrl import *  # noqa: F401,F403  (installed package layout)
    from ._prmrl import __doc__ as _doc
except ImportError:  # build-tree layout: extension next to the package on sys.path
    from _prmrl import *  # noqa: F401,F403
    from _prmrl import __doc__ as _doc

__doc__ = _doc
