"""Exact-arithmetic workbench for Nichols algebras of semisimple
Yetter-Drinfeld modules over finite group algebras."""

__version__ = "0.1.0"

SPEC_VERSION = "1.0"
