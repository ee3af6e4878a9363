"""Textual syntax for class and RDBMS models, trace files and DDL output."""

from .parser import ParseError, parse_class_model, parse_rdbms_model
from .printer import emit_ddl, print_class_model, print_rdbms_model, print_traces

__all__ = [
    "ParseError",
    "emit_ddl",
    "parse_class_model",
    "parse_rdbms_model",
    "print_class_model",
    "print_rdbms_model",
    "print_traces",
]
