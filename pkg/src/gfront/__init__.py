"""Level-set solver for the inviscid and strain G-equations in cellular flows."""

__version__ = "0.1.0"
