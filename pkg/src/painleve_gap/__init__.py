"""Gap probabilities and Tracy-Widom type distributions for Painleve kernels."""

__version__ = "0.1.0"
__author__ = "Painleve-Gap developers"
__year__ = "2024"
