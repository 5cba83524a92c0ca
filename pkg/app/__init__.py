# Periodic Ramsey Colorings
__version__ = "0.1.0"
