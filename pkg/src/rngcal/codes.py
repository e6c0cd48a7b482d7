"""Prefix-free integer coding and bit-level I/O.

The integer code is Elias delta: for m >= 1 with binary expansion of
``L = floor(log2 m) + 1`` bits, the codeword is gamma(L) followed by the
``L - 1`` low bits of m, where gamma(L) writes ``floor(log2 L)`` zeros and
then L in binary.  Codeword lengths are

    |C(m)| = floor(log2 m) + 2 * floor(log2(floor(log2 m) + 1)) + 1,

i.e. log2 m + 2 log2 log2 m + O(1), and the code is complete: the Kraft sum
over all integers equals 1 exactly (the truncated sum over m <= M falls
short of 1 by the mass of the tail m > M).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .bits import BitString
from .errors import DecodeError


@dataclass(frozen=True)
class Codeword:
    """An encoder's output bits plus the size of the input they encode."""

    bits: BitString
    source_length: int

    def __len__(self) -> int:
        return len(self.bits)


class BitWriter:
    """Accumulates MSB-first bits into bytes."""

    def __init__(self):
        self._buf = bytearray()
        self._cur = 0
        self._nbits = 0
        self._total = 0

    def write(self, value: int, nbits: int) -> None:
        """Append the ``nbits`` low bits of ``value``, MSB first."""
        self._total += nbits
        cur, filled = self._cur, self._nbits
        for i in range(nbits - 1, -1, -1):
            cur = (cur << 1) | ((value >> i) & 1)
            filled += 1
            if filled == 8:
                self._buf.append(cur)
                cur, filled = 0, 0
        self._cur, self._nbits = cur, filled

    def __len__(self) -> int:
        return self._total

    def to_bitstring(self) -> BitString:
        out = []
        for byte in self._buf:
            out.extend((byte >> i) & 1 for i in range(7, -1, -1))
        out.extend((self._cur >> i) & 1 for i in range(self._nbits - 1, -1, -1))
        return BitString(out)


class BitReader:
    """Reads MSB-first bits from a :class:`BitString`."""

    def __init__(self, bits: BitString, offset: int = 0):
        if not 0 <= offset <= len(bits):
            raise ValueError(f"offset {offset} out of range")
        self._bits = bits.tolist()
        self.pos = offset

    def remaining(self) -> int:
        return len(self._bits) - self.pos

    def read_bit(self) -> int:
        if self.pos >= len(self._bits):
            raise DecodeError("unexpected end of stream", self.pos)
        b = self._bits[self.pos]
        self.pos += 1
        return b

    def read(self, nbits: int) -> int:
        value = 0
        for _ in range(nbits):
            value = (value << 1) | self.read_bit()
        return value


def encoded_length(m: int) -> int:
    """Length in bits of the integer codeword for ``m`` (m >= 1)."""
    if m < 1:
        raise ValueError(f"integer code is defined for m >= 1, got {m}")
    n = m.bit_length() - 1
    return n + 2 * ((n + 1).bit_length() - 1) + 1


def write_integer(writer: BitWriter, m: int) -> None:
    """Append the codeword for ``m`` to ``writer``."""
    if m < 1:
        raise ValueError(f"integer code is defined for m >= 1, got {m}")
    n = m.bit_length() - 1
    length = n + 1
    zeros = length.bit_length() - 1
    writer.write(0, zeros)
    writer.write(length, zeros + 1)
    if n:
        writer.write(m, n)  # low bits; the leading 1 is implied by length


def encode_integer(m: int) -> Codeword:
    """Self-delimiting codeword for a positive integer."""
    w = BitWriter()
    write_integer(w, m)
    return Codeword(bits=w.to_bitstring(), source_length=m.bit_length())


def read_integer(reader: BitReader) -> int:
    """Read one integer codeword from ``reader``."""
    start = reader.pos
    zeros = 0
    while True:
        if reader.remaining() == 0:
            raise DecodeError("truncated integer codeword", start)
        if reader.read_bit():
            break
        zeros += 1
        if zeros > 64:
            raise DecodeError("malformed integer codeword (length prefix too long)", start)
    length = (1 << zeros) | reader.read(zeros)
    n = length - 1
    return (1 << n) | reader.read(n)


def decode_integer(stream: BitString, offset: int = 0) -> tuple[int, int]:
    """Decode one codeword at ``offset``; returns ``(m, bits consumed)``."""
    reader = BitReader(stream, offset)
    m = read_integer(reader)
    return m, reader.pos - offset


def kraft_sum(lengths: Iterable[int]) -> float:
    """Sum of 2**-l over codeword lengths, computed exactly.

    Counts per distinct length are accumulated first, then combined as exact
    rationals, so the result does not depend on summation order and cannot
    underflow term by term.  Returns 0.0 for an empty input.
    """
    counts: dict[int, int] = {}
    for l in lengths:
        if l < 1:
            raise ValueError(f"codeword lengths must be >= 1, got {l}")
        counts[l] = counts.get(l, 0) + 1
    total = Fraction(0)
    for l, c in counts.items():
        total += Fraction(c, 1 << l)
    return float(total)
