"""Compression-based randomness testing for bit streams.

The package provides a prefix-free integer code, an LZ77 bit-string codec
built on it, compression and prefix-scanning ensemble tests with sound
(conservative) p-value bounds, battery combination arithmetic, seeded
sequence generators including non-stationary deviants, brute-force
reference oracles, and a command-line front end (``rngcal``).
"""

__version__ = "0.1.0"

from .bits import BitString
from .codes import Codeword, decode_integer, encode_integer, encoded_length, kraft_sum
from .errors import DecodeError, InfeasibleError
from .lz import Lz77Pair, Lz77Parse
from .sources import (
    BernoulliSource,
    DriftingBiasSource,
    DuplicationSource,
    MarkovSource,
    RegimeSwitchSource,
    Source,
    duplication_construction,
    generate,
    parse_source_spec,
    required_base_length,
)
from .stats import (
    OMEGA_STAR,
    ComplexityEstimator,
    TestReport,
    WeightSchedule,
    battery_p_value,
    battery_report,
    compression_test,
    consistency_scan,
    exact_p_value,
    omega_star,
    tau_k_test,
)

__all__ = [
    "BitString",
    "Codeword",
    "DecodeError",
    "InfeasibleError",
    "Lz77Pair",
    "Lz77Parse",
    "encode_integer",
    "decode_integer",
    "encoded_length",
    "kraft_sum",
    "Source",
    "BernoulliSource",
    "MarkovSource",
    "DriftingBiasSource",
    "RegimeSwitchSource",
    "DuplicationSource",
    "duplication_construction",
    "required_base_length",
    "parse_source_spec",
    "generate",
    "TestReport",
    "WeightSchedule",
    "OMEGA_STAR",
    "ComplexityEstimator",
    "compression_test",
    "exact_p_value",
    "battery_p_value",
    "battery_report",
    "omega_star",
    "tau_k_test",
    "consistency_scan",
    "__version__",
]
