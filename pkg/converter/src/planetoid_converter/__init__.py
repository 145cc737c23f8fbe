"""One-shot converter from the original Planetoid pickles to portable dataset directories."""

from planetoid_converter.convert import ConversionError, convert

__all__ = ["convert", "ConversionError"]
__version__ = "0.1.0"
