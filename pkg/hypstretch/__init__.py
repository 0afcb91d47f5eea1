# Hyperbolic surfaces with boundary and generalized stretch lines
__version__ = "0.3.0"
