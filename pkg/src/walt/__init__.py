"""Weak affine light typing: terms, restricted reduction, derivations, SRN compiler."""

__version__ = "0.1.0"
