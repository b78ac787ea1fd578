"""Code-description-aware ICD coding toolkit."""

from ._ahdd import *  # noqa: F401,F403
from ._ahdd import __version__  # noqa: F401
