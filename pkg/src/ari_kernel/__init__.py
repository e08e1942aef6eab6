"""Gödel enumeration, arithmetized proof predicates and a proof-script checker
for a small formal arithmetic."""

from .checker import audit, check_script, parse_script
from .corpus import load_corpus
from .enumeration import decode, encode, materialize
from .syntax import parse_formula, parse_termoid

__all__ = ["audit", "check_script", "decode", "encode", "load_corpus", "materialize",
           "parse_formula", "parse_script", "parse_termoid"]
__version__ = "0.1.0"
