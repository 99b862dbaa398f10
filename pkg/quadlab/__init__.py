"""Laboratory for the quadratic-type functional equation."""

__version__ = "1.0.0"
