"""Fuse array mapping, OR-leak simulation and micrograph extraction."""

try:
    from ._fusemap import *  # noqa: F401,F403
    from ._fusemap import __doc__ as _core_doc  # noqa: F401
except ImportError:  # build-tree layout: extension next to us on sys.path
    from _fusemap import *  # noqa: F401,F403
