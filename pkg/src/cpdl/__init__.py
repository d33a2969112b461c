"""Decision procedure, proof checker and interpolation for converse PDL."""

from .syntax import parse, to_str, negate, converse, vocabulary

__version__ = '0.1.0'
