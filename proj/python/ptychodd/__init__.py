from ._ptychodd import *  # noqa: F401,F403
