"""Residual-shifted diffusion toolkit.

Thin package over the compiled `_core` extension; everything public lives
there.
"""

from ._core import *  # noqa: F401,F403
