"""Executable relational model of separation logic over bounded heap universes.

The package interprets a small higher-order heap language in
continuation-passing style, decides assertions over finite universes of
heaps, checks semantic quadruples (two commands run against related heaps),
model-checks the satisfaction relation for specifications, validates proof
derivations in the specification logic, and exhaustively verifies the
upward-closed-set construction over finite commutative monoids.
"""

__version__ = "0.1.0"
