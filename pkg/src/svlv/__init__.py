"""A small deductive verifier for the SVL contract language."""

__version__ = "0.1.0"
