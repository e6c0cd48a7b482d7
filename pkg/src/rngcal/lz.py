"""LZ77 factorization of bit strings and its prefix-free encoding.

The factorization is greedy and left-to-right over an unbounded window.  A
pair ``(p, l)`` with ``p >= 1`` copies ``l`` bits starting at 1-based
position ``p`` of the output built so far; copies may overlap the current
position (self-referential runs are allowed).  ``p = 0`` marks a literal
whose payload is a single bit.  At each step the match length is maximal,
and among maximal matches the smallest ``p`` is chosen, which makes parses
bit-reproducible.

Each pair is serialized as ``C(p + 1)`` followed by one raw bit (literal)
or ``C(l)`` (copy), where C is the integer code from :mod:`rngcal.codes`.
The pair stream carries no terminator: within any fixed input length the
codeword set is prefix-free (decoding is unambiguous pair by pair and the
reconstructed length identifies the input), which is what the rejection
counting bound of the compression test needs.  Across different input
lengths codewords can extend one another, so the decoder relies on the
container (codeword object or bit file) to delimit the stream.

Match search uses a suffix automaton over the whole input with first-
occurrence positions, giving maximal matches and smallest-p tie-breaking in
O(n) overall.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .bits import BitString
from .codes import BitReader, BitWriter, Codeword, encoded_length, read_integer, write_integer
from .errors import DecodeError

_LITERAL_COST = encoded_length(1) + 1  # C(1) marker plus one raw bit


class Lz77Pair(NamedTuple):
    """One factor: ``position == 0`` marks a literal, payload is the bit;
    otherwise payload is the copy length from 1-based ``position``."""

    position: int
    payload: int

    @property
    def is_literal(self) -> bool:
        return self.position == 0


@dataclass(frozen=True)
class Lz77Parse:
    """Greedy factorization of a bit string."""

    pairs: list[Lz77Pair]
    total_length: int


def _suffix_automaton(bits: list[int]) -> tuple[array, array, array]:
    """Build a suffix automaton over ``bits``.

    Returns ``(next0, next1, first)`` where ``first[s]`` is the end index
    (0-based, inclusive) of the first occurrence of the substrings of state
    ``s``.  Transition value -1 means absent.
    """
    next0 = array("i", [-1])
    next1 = array("i", [-1])
    link = array("i", [-1])
    length = array("i", [0])
    first = array("i", [-1])
    append0 = next0.append
    append1 = next1.append
    append_link = link.append
    append_len = length.append
    append_first = first.append
    last = 0
    for pos, c in enumerate(bits):
        cur = len(link)
        append0(-1)
        append1(-1)
        append_link(-1)
        append_len(pos + 1)
        append_first(pos)
        nx = next1 if c else next0
        p = last
        while p != -1 and nx[p] == -1:
            nx[p] = cur
            p = link[p]
        if p == -1:
            link[cur] = 0
        else:
            q = nx[p]
            if length[p] + 1 == length[q]:
                link[cur] = q
            else:
                clone = len(link)
                append0(next0[q])
                append1(next1[q])
                append_link(link[q])
                append_len(length[p] + 1)
                append_first(first[q])
                while p != -1 and nx[p] == q:
                    nx[p] = clone
                    p = link[p]
                link[q] = clone
                link[cur] = clone
        last = cur
    return next0, next1, first


def _delta_len(v: int) -> int:
    # encoded_length inlined for the hot loops
    n = v.bit_length() - 1
    return n + 2 * ((n + 1).bit_length() - 1) + 1


def parse(x: BitString) -> Lz77Parse:
    """Greedy factorization of ``x``; empty input yields no pairs."""
    bits = x.tolist()
    n = len(bits)
    if n == 0:
        return Lz77Parse(pairs=[], total_length=0)
    next0, next1, first = _suffix_automaton(bits)
    pairs: list[Lz77Pair] = []
    i = 0
    while i < n:
        st = 0
        ell = 0
        src = -1
        while i + ell < n:
            st2 = (next1 if bits[i + ell] else next0)[st]
            if st2 == -1:
                break
            s = first[st2] - ell  # start of the first occurrence of this match
            if s >= i:
                break
            src = s
            ell += 1
            st = st2
        if ell == 0:
            pairs.append(Lz77Pair(0, bits[i]))
            i += 1
        else:
            pairs.append(Lz77Pair(src + 1, ell))
            i += ell
    return Lz77Parse(pairs=pairs, total_length=n)


def pairs_cost(pairs: list[Lz77Pair]) -> int:
    """Bit length of the serialized pair stream."""
    total = 0
    for p, payload in pairs:
        if p == 0:
            total += _LITERAL_COST
        else:
            total += _delta_len(p + 1) + _delta_len(payload)
    return total


def encode(x: BitString) -> Codeword:
    """Serialize the greedy parse of ``x``."""
    w = BitWriter()
    for p, payload in parse(x).pairs:
        write_integer(w, p + 1)
        if p == 0:
            w.write(payload, 1)
        else:
            write_integer(w, payload)
    return Codeword(bits=w.to_bitstring(), source_length=len(x))


def decode(c: Codeword | BitString) -> BitString:
    """Rebuild the input from a serialized pair stream."""
    stream = c.bits if isinstance(c, Codeword) else c
    reader = BitReader(stream)
    out: list[int] = []
    while reader.remaining():
        at = reader.pos
        p = read_integer(reader) - 1
        if p == 0:
            out.append(reader.read_bit())
            continue
        if p > len(out):
            raise DecodeError(
                f"copy source {p} points past the {len(out)} bits decoded so far", at)
        ell = read_integer(reader)
        s = p - 1
        for j in range(ell):
            out.append(out[s + j])
    return BitString(out)


def code_length(x: BitString) -> int:
    """``len(encode(x))`` without materializing the codeword."""
    total = 0
    bits = x.tolist()
    n = len(bits)
    if n == 0:
        return 0
    next0, next1, first = _suffix_automaton(bits)
    i = 0
    while i < n:
        st = 0
        ell = 0
        src = -1
        while i + ell < n:
            st2 = (next1 if bits[i + ell] else next0)[st]
            if st2 == -1:
                break
            s = first[st2] - ell
            if s >= i:
                break
            src = s
            ell += 1
            st = st2
        if ell == 0:
            total += _LITERAL_COST
            i += 1
        else:
            v = src + 2
            b = v.bit_length() - 1
            total += b + 2 * ((b + 1).bit_length() - 1) + 1
            b = ell.bit_length() - 1
            total += b + 2 * ((b + 1).bit_length() - 1) + 1
            i += ell
    return total


def prefix_code_lengths(x: BitString) -> np.ndarray:
    """``code_length`` of every prefix in one pass.

    Returns an int64 array ``out`` of size ``len(x) + 1`` with
    ``out[m] == code_length(x.prefix(m))``.  The greedy parse of a prefix is
    the parse of the whole string with its final factor shortened, and the
    smallest-p source for the shortened factor is the first occurrence of
    the shortened match, which the automaton reports during the same walk;
    so every prefix length comes out of a single O(n) scan.
    """
    bits = x.tolist()
    n = len(bits)
    if n == 0:
        return np.zeros(1, dtype=np.int64)
    next0, next1, first = _suffix_automaton(bits)
    out = [0] * (n + 1)
    cum = 0
    i = 0
    while i < n:
        st = 0
        ell = 0
        while i + ell < n:
            st2 = (next1 if bits[i + ell] else next0)[st]
            if st2 == -1:
                break
            s = first[st2] - ell
            if s >= i:
                break
            ell += 1
            st = st2
            # cost of the prefix ending inside this factor, truncated here
            v = s + 2
            b = v.bit_length() - 1
            cost = b + 2 * ((b + 1).bit_length() - 1) + 1
            b = ell.bit_length() - 1
            cost += b + 2 * ((b + 1).bit_length() - 1) + 1
            out[i + ell] = cum + cost
        if ell == 0:
            out[i + 1] = cum + _LITERAL_COST
            cum += _LITERAL_COST
            i += 1
        else:
            cum = out[i + ell]
            i += ell
    return np.asarray(out, dtype=np.int64)


def block_code_length(x: BitString, block_bits: int) -> int:
    """Bounded-memory variant: the input is split into consecutive blocks of
    ``block_bits`` and each block is encoded independently.

    Memory stays proportional to the block size, but matches cannot reach
    across block boundaries, so the scheme loses the asymptotic guarantees
    of the unbounded window; reports should flag results computed this way.
    For a fixed input length the block layout is fixed, so the implied
    codeword set is still prefix-free within each length class.
    """
    if block_bits < 1:
        raise ValueError("block_bits must be >= 1")
    total = 0
    for start in range(0, len(x), block_bits):
        total += code_length(x[start:start + block_bits])
    return total
