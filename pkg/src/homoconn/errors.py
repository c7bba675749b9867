"""Exceptions raised by homoconn."""


class HomoconnError(Exception):
    """Base class for every error raised by the library"""


class DimensionMismatchError(HomoconnError, ValueError):
    """An array does not have the shape the reductive split expects"""


class InvalidInputError(HomoconnError, ValueError):
    """Input is well-formed but not admissible (wrong class, bad name, ...)"""


class ConfigError(HomoconnError, ValueError):
    """An environment setting cannot be parsed"""
