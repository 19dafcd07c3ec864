"""Geodesic ray transforms of vector and tensor fields on the unit disc."""

try:
    from ._geotomo import *  # noqa: F401,F403  (installed package layout)
    from ._geotomo import __version__, build_commit  # noqa: F401
except ImportError:  # development layout: extension next to the build tree
    from _geotomo import *  # noqa: F401,F403
    from _geotomo import __version__, build_commit  # noqa: F401
