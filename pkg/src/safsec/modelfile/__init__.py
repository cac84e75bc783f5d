"""Parser and pretty-printer for the ``.ssm`` model format."""

from .parser import ParseResult, parse
from .printer import print_document

__all__ = ["ParseResult", "parse", "print_document"]
