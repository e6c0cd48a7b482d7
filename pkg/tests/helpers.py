"""Shared test utilities, including independent brute-force references."""

from __future__ import annotations

import numpy as np

from rngcal.bits import BitString


def random_bits(n: int, seed: int, p: float = 0.5) -> BitString:
    """Seeded random bits for tests that do not go through rngcal.sources."""
    rng = np.random.default_rng(seed)
    return BitString((rng.random(n) < p).astype(np.uint8))


def brute_lz77_pairs(x: BitString) -> list[tuple[int, int]]:
    """Greedy LZ77 factorization by quadratic scan; the reference oracle.

    Maximal match, overlap allowed, smallest 1-based source position among
    maximal matches; (0, bit) for literals.
    """
    bits = x.tolist()
    n = len(bits)
    pairs = []
    i = 0
    while i < n:
        best_len = 0
        best_src = -1
        for s in range(i):
            ell = 0
            while i + ell < n and bits[s + ell] == bits[i + ell]:
                ell += 1
            if ell > best_len:  # strict: keeps the smallest source on ties
                best_len = ell
                best_src = s
        if best_len == 0:
            pairs.append((0, bits[i]))
            i += 1
        else:
            pairs.append((best_src + 1, best_len))
            i += best_len
    return pairs


def all_bitstrings(n: int):
    for value in range(1 << n):
        yield BitString.from_int(value, n)
