try:
    from ._musurf import *  # noqa: F401,F403
except ImportError:  # in-tree builds put the extension next to the package
    from _musurf import *  # noqa: F401,F403
