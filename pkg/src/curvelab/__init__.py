"""curvelab: exact analysis of plane algebraic curves.

Asymptotes, power-series sheet factorization, branch classification under
fiberwise Mobius transforms, and nodal degeneration families, all in exact
rational (or one-step algebraic extension) arithmetic.
"""

__version__ = "0.1.0"
