"""Real-time baseband transport over symmetric fat trees.

Schedulability tests, analytical delay bounds, a deterministic packet-level
simulator, and the schedulability-constrained quantization search, all backed
by the C++ core.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
