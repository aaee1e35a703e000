"""Command-line front end, system parser and report serialization."""

from .dsl import format_system, parse_expression, parse_system, parse_variable_name

__all__ = ["format_system", "parse_expression", "parse_system", "parse_variable_name"]
