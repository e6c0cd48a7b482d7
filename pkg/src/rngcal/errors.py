"""Exception types shared across the package."""

from __future__ import annotations


class DecodeError(ValueError):
    """A bit stream could not be decoded.

    ``bit_offset`` is the position (in bits from the start of the stream)
    at which decoding failed.
    """

    def __init__(self, message: str, bit_offset: int):
        super().__init__(f"{message} (at bit offset {bit_offset})")
        self.bit_offset = bit_offset


class InfeasibleError(ValueError):
    """An exact computation was requested beyond its enumeration guard."""
