try:
    from ._hyxc import *  # noqa: F401,F403  (installed wheel layout)
except ImportError:
    from _hyxc import *  # noqa: F401,F403  (build-tree layout)
