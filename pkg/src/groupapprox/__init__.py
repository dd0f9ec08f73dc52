"""Metric approximations of finitely generated groups: certificates,
verifiers, constructions, and quantitative profiles."""

from . import groups, targets, certify, construct, profiles

__version__ = "0.1.0"

__all__ = ["groups", "targets", "certify", "construct", "profiles",
           "__version__"]
