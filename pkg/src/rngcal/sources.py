"""Bit-sequence generators: null references, biased and non-stationary
alternatives, and the block-duplication construction.

Every source is deterministic in (kind, parameters, seed) and prefix
consistent: ``bits(n)`` is a prefix of ``bits(m)`` for n <= m.  Randomness
comes from numpy's Philox counter-based generator keyed by the seed, whose
streams are stable across platforms; distinct seeds give independent
streams.

The duplication construction splits a base sequence x into blocks

    u_k = x[a_k : a_k + L_k],  a_k = 2**(2**k) - 2 (0-based),
    L_k = 2**(2**(k+1)) - 2**(2**k)    (lengths 2, 12, 240, 65280, ...),

and emits ``u_0 u_0 u_1 u_1 u_2 u_2 ...``.  Fed with an effectively
incompressible base (here: a seeded Philox stream standing in for one), the
output repeats ever longer blocks, which no stationary model predicts but a
long-window compressor detects.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .bits import BitString

_SPEC_KINDS = ("bernoulli", "markov", "drift", "regime", "dup")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed & (2 ** 64 - 1)))


def _check_probability(name: str, p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must be in [0, 1], got {p}")
    return p


def _fmt(v: float) -> str:
    return repr(float(v))


class Source:
    """Deterministic bit-stream generator; subclasses define ``_draw``."""

    kind: str = "source"

    def __init__(self, seed: int = 0):
        self.seed = int(seed)

    def bits(self, n: int) -> BitString:
        """First ``n`` bits of the stream."""
        if n < 0:
            raise ValueError(f"bit count must be >= 0, got {n}")
        if n == 0:
            return BitString()
        return BitString(self._draw(n))

    def _draw(self, n: int) -> np.ndarray:
        raise NotImplementedError

    def spec_string(self) -> str:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.spec_string()!r})"

    def __eq__(self, other) -> bool:
        if type(self) is not type(other):
            return NotImplemented
        return self.spec_string() == other.spec_string()

    def __hash__(self) -> int:
        return hash(self.spec_string())


class BernoulliSource(Source):
    """Independent bits, each 1 with probability ``p``."""

    kind = "bernoulli"

    def __init__(self, p: float, seed: int = 0):
        super().__init__(seed)
        self.p = _check_probability("p", p)

    def _draw(self, n: int) -> np.ndarray:
        return (_rng(self.seed).random(n) < self.p).astype(np.uint8)

    def spec_string(self) -> str:
        return f"bernoulli:{_fmt(self.p)}:seed={self.seed}"


class MarkovSource(Source):
    """First-order binary Markov chain from a 2x2 transition matrix.

    ``rows[s]`` is the distribution of the next bit given the current bit
    ``s``; rows must sum to 1 within 1e-12.  The initial bit is equiprobable.
    """

    kind = "markov"

    def __init__(self, rows: Sequence[Sequence[float]], seed: int = 0):
        super().__init__(seed)
        m = np.asarray(rows, dtype=np.float64)
        if m.shape != (2, 2):
            raise ValueError(f"transition matrix must be 2x2, got shape {m.shape}")
        if np.any(m < 0.0) or np.any(m > 1.0):
            raise ValueError("transition probabilities must be in [0, 1]")
        sums = m.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > 1e-12):
            raise ValueError(f"transition matrix rows must sum to 1, got {sums}")
        self.rows = m

    def _draw(self, n: int) -> np.ndarray:
        u = _rng(self.seed).random(n)
        t = (self.rows[0, 1], self.rows[1, 1])  # P(next=1 | current)
        out = np.empty(n, dtype=np.uint8)
        state = 1 if u[0] < 0.5 else 0
        out[0] = state
        uu = u.tolist()
        for i in range(1, n):
            state = 1 if uu[i] < t[state] else 0
            out[i] = state
        return out

    def spec_string(self) -> str:
        vals = ",".join(_fmt(v) for v in self.rows.reshape(-1))
        return f"markov:{vals}:seed={self.seed}"


class DriftingBiasSource(Source):
    """Ones-probability ramps linearly: ``p_i = clip(p0 + rate * i, 0, 1)``."""

    kind = "drift"

    def __init__(self, p0: float, rate: float, seed: int = 0):
        super().__init__(seed)
        self.p0 = _check_probability("p0", p0)
        self.rate = float(rate)

    def _draw(self, n: int) -> np.ndarray:
        p = np.clip(self.p0 + self.rate * np.arange(n, dtype=np.float64), 0.0, 1.0)
        return (_rng(self.seed).random(n) < p).astype(np.uint8)

    def spec_string(self) -> str:
        return f"drift:{_fmt(self.p0)},{_fmt(self.rate)}:seed={self.seed}"


class RegimeSwitchSource(Source):
    """Piecewise-constant bias: ``segments`` of (length, p) applied cyclically."""

    kind = "regime"

    def __init__(self, segments: Sequence[tuple[int, float]], seed: int = 0):
        super().__init__(seed)
        if not segments:
            raise ValueError("at least one (length, p) segment is required")
        cleaned = []
        for length, p in segments:
            length = int(length)
            if length < 1:
                raise ValueError(f"segment lengths must be >= 1, got {length}")
            cleaned.append((length, _check_probability("segment p", p)))
        self.segments = tuple(cleaned)

    def _draw(self, n: int) -> np.ndarray:
        period = np.concatenate([np.full(length, p) for length, p in self.segments])
        reps = -(-n // len(period))
        p = np.tile(period, reps)[:n]
        return (_rng(self.seed).random(n) < p).astype(np.uint8)

    def spec_string(self) -> str:
        vals = ",".join(f"{length},{_fmt(p)}" for length, p in self.segments)
        return f"regime:{vals}:seed={self.seed}"


# ---------------------------------------------------------------------------
# the duplication construction


def block_span(k: int) -> tuple[int, int]:
    """Half-open 0-based span of block ``u_k`` within the base sequence."""
    if k < 0:
        raise ValueError(f"block index must be >= 0, got {k}")
    start = 2 ** (2 ** k) - 2
    end = 2 ** (2 ** (k + 1)) - 2
    return start, end


def required_base_length(n: int) -> int:
    """Minimal base length defining the first ``n`` duplicated-output bits."""
    if n < 0:
        raise ValueError(f"bit count must be >= 0, got {n}")
    emitted = 0
    k = 0
    while emitted < n:
        start, end = block_span(k)
        blk = end - start
        if n <= emitted + blk:          # ends inside the first copy of u_k
            return start + (n - emitted)
        if n <= emitted + 2 * blk:      # ends inside the second copy
            return end
        emitted += 2 * blk
        k += 1
    return 0


def duplication_construction(base, n: int) -> BitString:
    """First ``n`` bits of ``u_0 u_0 u_1 u_1 u_2 u_2 ...`` over ``base``.

    ``base`` may be a :class:`BitString` (long enough to cover the needed
    blocks) or a :class:`Source` from which exactly the needed prefix is
    drawn.
    """
    if n < 0:
        raise ValueError(f"bit count must be >= 0, got {n}")
    need = required_base_length(n)
    if isinstance(base, Source):
        base_bits = base.bits(need)
    elif isinstance(base, BitString):
        if len(base) < need:
            raise ValueError(
                f"base sequence has {len(base)} bits; {need} are required "
                f"for {n} output bits")
        base_bits = base
    else:
        raise TypeError("base must be a BitString or a Source")
    arr = base_bits.array
    parts = []
    emitted = 0
    k = 0
    while emitted < n:
        start, end = block_span(k)
        u = arr[start:min(end, len(arr))]
        parts.append(u)
        parts.append(u)
        emitted += 2 * len(u)
        k += 1
    return BitString(np.concatenate(parts)[:n])


class DuplicationSource(Source):
    """Duplication construction over a seeded uniform base stream.

    A genuinely incompressible base cannot be generated; a cryptographic-
    strength counter-based stream is the practical surrogate, so statements
    about the construction hold relative to that surrogate.
    """

    kind = "dup"

    def __init__(self, seed: int = 0):
        super().__init__(seed)
        self._base = BernoulliSource(0.5, seed=seed)

    def _draw(self, n: int) -> np.ndarray:
        return duplication_construction(self._base, n).array

    def spec_string(self) -> str:
        return f"dup:seed={self.seed}"


# ---------------------------------------------------------------------------
# spec strings


def _parse_seed(field: str, spec: str) -> int:
    if not field.startswith("seed="):
        raise ValueError(f"malformed source spec {spec!r}: last field must be seed=<int>")
    try:
        return int(field[5:], 0)
    except ValueError:
        raise ValueError(f"malformed seed in source spec {spec!r}") from None


def parse_source_spec(spec: str) -> Source:
    """Build a source from its compact string form.

    Grammar (seed defaults to 0 when the field is omitted):

    - ``bernoulli:P[:seed=S]``
    - ``markov:P00,P01,P10,P11[:seed=S]`` (row-major transition matrix)
    - ``drift:P0,RATE[:seed=S]`` (per-bit linear ramp, clipped to [0, 1])
    - ``regime:L1,P1[,L2,P2,...][:seed=S]`` (cycled segments)
    - ``dup[:seed=S]``
    """
    fields = spec.strip().split(":")
    kind = fields[0]
    if kind not in _SPEC_KINDS:
        raise ValueError(f"unknown source kind {kind!r}; valid kinds: "
                         + ", ".join(_SPEC_KINDS))
    seed = 0
    if len(fields) > 1 and fields[-1].startswith("seed="):
        seed = _parse_seed(fields[-1], spec)
        fields = fields[:-1]
    params = fields[1] if len(fields) > 1 else ""
    if len(fields) > 2:
        raise ValueError(f"malformed source spec {spec!r}")

    def floats(expected: int | None = None) -> list[float]:
        if not params:
            raise ValueError(f"source kind {kind!r} needs parameters in {spec!r}")
        try:
            vals = [float(v) for v in params.split(",")]
        except ValueError:
            raise ValueError(f"malformed parameters in source spec {spec!r}") from None
        if expected is not None and len(vals) != expected:
            raise ValueError(f"source kind {kind!r} takes {expected} parameters, "
                             f"got {len(vals)} in {spec!r}")
        return vals

    if kind == "bernoulli":
        return BernoulliSource(floats(1)[0], seed=seed)
    if kind == "markov":
        v = floats(4)
        return MarkovSource([[v[0], v[1]], [v[2], v[3]]], seed=seed)
    if kind == "drift":
        v = floats(2)
        return DriftingBiasSource(v[0], v[1], seed=seed)
    if kind == "regime":
        v = floats()
        if len(v) < 2 or len(v) % 2:
            raise ValueError(f"regime takes pairs L,P in {spec!r}")
        segs = [(int(v[i]), v[i + 1]) for i in range(0, len(v), 2)]
        for (length, _), raw in zip(segs, v[::2]):
            if length != raw:
                raise ValueError(f"segment lengths must be integers in {spec!r}")
        return RegimeSwitchSource(segs, seed=seed)
    if params:
        raise ValueError(f"source kind 'dup' takes no parameters in {spec!r}")
    return DuplicationSource(seed=seed)


def generate(spec: Source | str, n: int) -> BitString:
    """First ``n`` bits from a source instance or its spec string."""
    source = parse_source_spec(spec) if isinstance(spec, str) else spec
    return source.bits(n)
