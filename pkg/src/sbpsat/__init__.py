"""Energy-conserving elastic wave simulation on vertically stacked staggered grids.

Regions of different grid spacing are coupled through summation-by-parts
operators and penalty terms so that the semi-discrete energy is conserved.
"""

__version__ = "0.1.0"
