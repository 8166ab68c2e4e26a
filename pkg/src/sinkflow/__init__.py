"""Free surface of a supercritical sink flow over a flat bottom."""
__version__ = "0.1.0"
