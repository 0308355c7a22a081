"""fusionkit: fusion rings, spectral bounds, boundary ratios, module actions."""

__version__ = "0.1.0"
