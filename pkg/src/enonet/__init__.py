"""ENO interpolation/reconstruction, adapted ENO-SR, exact ReLU network
realizations, multi-resolution compression, and a 1D Euler solver."""

__version__ = "0.1.0"
