# stefanctl/__init__.py
"""Safe backstepping control of the Stefan problem with high-order interface dynamics."""

__version__ = "1.0.0"
