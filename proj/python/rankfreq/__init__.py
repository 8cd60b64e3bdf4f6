"""Rank-frequency analysis: geometric vs power-law fits, entropy and
perplexity, mixture experiments and Golomb coding."""

from ._rankfreq import *  # noqa: F401,F403
from ._rankfreq import RankfreqError, __doc__  # noqa: F401

__version__ = "0.1.0"
