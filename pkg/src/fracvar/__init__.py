"""Jumarie fractional calculus of variations toolkit.

The package is split into numerical operators (`core.calculus`), an
expression language for user Lagrangians (`core.expr`), problem
definitions with their solver and verifier (`core.variational`), and
services used by the command-line front end.
"""

__version__ = "0.1.0"
