"""Annotation pickle to canonical boundary-JSON conversion and validation."""

from .convert import ConversionResult, convert, convert_file, write_canonical
from .validate import validate_file, validate_payload

__version__ = "0.1.0"

__all__ = [
    "ConversionResult",
    "convert",
    "convert_file",
    "validate_file",
    "validate_payload",
    "write_canonical",
]
