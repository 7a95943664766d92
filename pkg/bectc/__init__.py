"""
Condensation temperatures of a finite ideal Bose gas in harmonic traps.

Exact discrete-level sums, first-order finite-size formulas and the
continuum-validity criterion, with a command-line front end that emits
plot-ready sweep tables.
"""

__version__ = "1.0.0"
