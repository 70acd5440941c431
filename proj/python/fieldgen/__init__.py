"""Field-matching generative modeling, SDE sampling and distributional RL."""

from fieldgen._core import *  # noqa: F401,F403
from fieldgen._core import __doc__  # noqa: F401
