"""Chow groups, cycle groups and K_0 of orders, group rings and finite algebras."""

from .abgroup import FgAbGroup, GroupExpr, IntMatrix, ValidationError, invert_integer, smith_normal_form

__version__ = "0.1.0"

__all__ = ["FgAbGroup", "GroupExpr", "IntMatrix", "ValidationError", "invert_integer", "smith_normal_form"]
