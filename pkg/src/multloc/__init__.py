"""multloc: exact-arithmetic toolkit for spectrum combinatorics,
multiplicative-subset localization, completions and obtainability certificates."""

__version__ = "0.1.0"
