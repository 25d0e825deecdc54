"""Exact tools for deciding when to delegate a decision to an expert.

The modules build on each other:

- :mod:`delegation.frames`: state spaces, credences, options and the two frame types
- :mod:`delegation.deference`: total trust, valuing and posterior alignment checks
- :mod:`delegation.scoring`: loss/gain/score of accept-reject strategies
- :mod:`delegation.scenarios`: the three worked delegation examples
- :mod:`delegation.bandit`: repeated delegation as a UCB bandit
- :mod:`delegation.io` and :mod:`delegation.cli`: scenario files and the command line
"""

__version__ = "0.1.0"
