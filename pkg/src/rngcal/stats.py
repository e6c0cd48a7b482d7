"""Test statistics, decision rules, p-values, and battery combination.

The compression test rejects uniformity when a prefix-free code saves at
least ``log2(1/alpha)`` bits: the number of n-bit inputs whose codeword is
that short is bounded by the Kraft inequality, so ``2**-statistic`` is a
valid (conservative) p-value bound.  The prefix-scanning ensemble test
``tau_k_test`` applies the same counting bound at every prefix length m,
charging each scale a share ``omega_m`` of the significance budget.

All reported p-values are clamped into ``(0, 1]`` with a floor of 2**-1024
so downstream logarithms stay finite.  Decisions are always derived from
``p_value <= alpha``, which for these statistics coincides with the
bits-saved threshold form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import lz
from .bits import BitString
from .errors import InfeasibleError

P_VALUE_FLOOR = 2.0 ** -1024

EXACT = "exact"
UPPER_BOUND = "upper_bound"


def _check_alpha(alpha: float) -> float:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"significance level must be in (0, 1), got {alpha}")
    return float(alpha)


def _clamp_p(p: float) -> float:
    return min(1.0, max(p, P_VALUE_FLOOR))


def _bound_from_bits(saved_bits: float) -> float:
    """p-value upper bound 2**-saved_bits, clamped into (0, 1]."""
    if saved_bits <= 0.0:
        return 1.0
    return _clamp_p(2.0 ** -min(saved_bits, 1100.0))


# ---------------------------------------------------------------------------
# weight schedules


def omega_star(i: int) -> float:
    """The default weight schedule value 1/(i*(i+1)); sums to 1 over all i."""
    if i < 1:
        raise ValueError(f"schedule index must be >= 1, got {i}")
    return 1.0 / (i * (i + 1))


class WeightSchedule:
    """Weights ``w_1, w_2, ...`` with total mass at most 1.

    Used to split a significance budget across the components of a battery
    and across prefix scales in :func:`tau_k_test`.  Built-ins: the infinite
    ``omega_star`` schedule (mass exactly 1) and finite explicit lists.
    Indices beyond a finite list carry weight 0, i.e. no budget.
    """

    def __init__(self, name: str, weight_fn: Callable[[int], float] | None = None,
                 finite_weights: Sequence[float] | None = None):
        if (weight_fn is None) == (finite_weights is None):
            raise ValueError("provide exactly one of weight_fn or finite_weights")
        self.name = name
        self._fn = weight_fn
        self._finite = None
        if finite_weights is not None:
            w = [float(v) for v in finite_weights]
            if not w:
                raise ValueError("finite schedule must have at least one weight")
            if any(v <= 0.0 for v in w):
                raise ValueError("schedule weights must be positive")
            if math.fsum(w) > 1.0 + 1e-12:
                raise ValueError(f"schedule weights sum to {math.fsum(w)}, must be <= 1")
            self._finite = w

    @classmethod
    def omega_star(cls) -> "WeightSchedule":
        return cls("omega_star", weight_fn=omega_star)

    @classmethod
    def from_weights(cls, weights: Sequence[float], name: str = "custom") -> "WeightSchedule":
        return cls(name, finite_weights=weights)

    def weight(self, i: int) -> float:
        if i < 1:
            raise ValueError(f"schedule index must be >= 1, got {i}")
        if self._finite is not None:
            return self._finite[i - 1] if i <= len(self._finite) else 0.0
        return self._fn(i)

    def weights(self, k: int) -> np.ndarray:
        """The first ``k`` weights as a float array."""
        if self._finite is not None:
            out = np.zeros(k)
            upto = min(k, len(self._finite))
            out[:upto] = self._finite[:upto]
            return out
        if self._fn is omega_star:
            i = np.arange(1, k + 1, dtype=np.float64)
            return 1.0 / (i * (i + 1))
        return np.array([self._fn(i) for i in range(1, k + 1)])

    def __repr__(self) -> str:
        return f"WeightSchedule({self.name!r})"


OMEGA_STAR = WeightSchedule.omega_star()


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class ComponentResult:
    test_id: str
    statistic_bits: float
    p_value: float

    def to_dict(self) -> dict:
        return {"test_id": self.test_id, "statistic_bits": self.statistic_bits,
                "p_value": self.p_value}


@dataclass(frozen=True)
class TestReport:
    """Outcome of one test (or one combined battery) on one sample.

    ``p_value_kind`` distinguishes exactly computed p-values from
    Kraft-bound upper bounds; decisions made from upper bounds are
    conservative.  ``detail`` carries diagnostic extras and is not part of
    the serialized report.
    """

    statistic_bits: float
    p_value: float
    p_value_kind: str
    alpha: float
    decision: str
    components: list[ComponentResult] | None = None
    detail: dict = field(default_factory=dict, compare=False)

    @property
    def rejected(self) -> bool:
        return self.decision == "reject"

    def to_dict(self) -> dict:
        return {
            "statistic_bits": self.statistic_bits,
            "p_value": self.p_value,
            "p_value_kind": self.p_value_kind,
            "alpha": self.alpha,
            "decision": self.decision,
            "components": ([c.to_dict() for c in self.components]
                           if self.components is not None else None),
        }


def _make_report(statistic_bits: float, p_value: float, kind: str, alpha: float,
                 components=None, detail=None) -> TestReport:
    p = _clamp_p(p_value)
    return TestReport(
        statistic_bits=float(statistic_bits),
        p_value=p,
        p_value_kind=kind,
        alpha=alpha,
        decision="reject" if p <= alpha else "accept",
        components=components,
        detail=detail or {},
    )


# ---------------------------------------------------------------------------
# the compression test


def _resolve_code_length(code) -> Callable[[BitString], int]:
    if code is None:
        return lz.code_length
    if callable(code):
        return code
    if hasattr(code, "code_length"):
        return code.code_length
    raise TypeError("code must be callable or expose a code_length function")


def compression_test(x: BitString, alpha: float = 0.01, code=None,
                     test_id: str = "lz77") -> TestReport:
    """Reject uniformity when the code saves ``log2(1/alpha)`` bits or more.

    The statistic is ``len(x) - code_length(x)``; ``2**-statistic`` is an
    upper bound on the p-value by the Kraft counting argument, so the
    reported p-value has kind ``upper_bound``.
    """
    alpha = _check_alpha(alpha)
    if len(x) < 1:
        raise ValueError("compression test needs at least one bit")
    code_length = _resolve_code_length(code)
    clen = int(code_length(x))
    statistic = len(x) - clen
    return _make_report(statistic, _bound_from_bits(statistic), UPPER_BOUND, alpha,
                        detail={"test_id": test_id, "code_bits": clen, "input_bits": len(x)})


def exact_p_value(x: BitString, tau: Callable[[BitString], float],
                  max_bits: int = 24) -> float:
    """Exact p-value of statistic ``tau`` at ``x`` by full enumeration.

    Counts the n-bit strings whose statistic is at least ``tau(x)`` (ties
    count).  Enumeration is guarded at ``max_bits`` since the cost is 2**n
    statistic evaluations.
    """
    n = len(x)
    if n > max_bits:
        raise InfeasibleError(
            f"exact enumeration over 2**{n} strings exceeds the {max_bits}-bit guard")
    observed = tau(x)
    count = 0
    for value in range(1 << n):
        if tau(BitString.from_int(value, n)) >= observed:
            count += 1
    return count / float(1 << n)


# ---------------------------------------------------------------------------
# batteries


def battery_p_value(component_p_values: Sequence[float],
                    schedule: WeightSchedule = OMEGA_STAR) -> float:
    """Combine component p-values into one: ``min(1, min_i p_i / w_i)``.

    Rejecting when the combined value is at most alpha keeps the overall
    Type-I probability at most alpha, because component i effectively runs
    at level ``alpha * w_i`` and the weights sum to at most 1.
    """
    pvals = [float(p) for p in component_p_values]
    if not pvals:
        raise ValueError("battery needs at least one component p-value")
    for p in pvals:
        if not 0.0 < p <= 1.0:
            raise ValueError(f"component p-values must be in (0, 1], got {p}")
    ratios = []
    for i, p in enumerate(pvals, start=1):
        w = schedule.weight(i)
        if w <= 0.0:
            raise ValueError(
                f"schedule {schedule.name!r} has no weight for component {i}")
        ratios.append(p / w)
    return _clamp_p(min(ratios))


def battery_report(reports: Sequence[TestReport], ids: Sequence[str],
                   alpha: float, schedule: WeightSchedule = OMEGA_STAR) -> TestReport:
    """Fold per-test reports into a single combined report.

    Components keep their order; weights are assigned by position.  The
    combined statistic is the combined p-value expressed in bits.
    """
    alpha = _check_alpha(alpha)
    if len(reports) != len(ids):
        raise ValueError("one id per report required")
    combined = battery_p_value([r.p_value for r in reports], schedule)
    kind = EXACT if all(r.p_value_kind == EXACT for r in reports) else UPPER_BOUND
    components = [ComponentResult(i, r.statistic_bits, r.p_value)
                  for i, r in zip(ids, reports)]
    return _make_report(-math.log2(combined), combined, kind, alpha,
                        components=components)


# ---------------------------------------------------------------------------
# complexity estimators and the prefix-scanning ensemble test


class ComplexityEstimator:
    """Upper bound on description length via a concrete prefix-free code.

    Implementations must assign, within every input length class, lengths
    satisfying the Kraft inequality; that is what makes the counting bound
    of :func:`tau_k_test` valid.  These estimators are static code lengths
    (the ensemble composition plays the role of a resource index).
    """

    identifier: str = "estimator"

    def estimate(self, x: BitString) -> int:
        raise NotImplementedError

    def estimate_prefixes(self, x: BitString) -> np.ndarray:
        """``estimate`` of every prefix; index m holds the m-bit prefix value."""
        return np.array([self.estimate(x.prefix(m)) for m in range(len(x) + 1)],
                        dtype=np.int64)


class Lz77Estimator(ComplexityEstimator):
    """Description length by the LZ77 pair code."""

    identifier = "lz77"

    def estimate(self, x: BitString) -> int:
        return lz.code_length(x)

    def estimate_prefixes(self, x: BitString) -> np.ndarray:
        return lz.prefix_code_lengths(x)


class LiteralLengthEstimator(ComplexityEstimator):
    """The trivial bound: a string describes itself in ``len + extra`` bits.

    Within each length class this is the identity code, so the class Kraft
    sum is ``2**-extra_bits <= 1``.  It never finds structure; its role in
    an ensemble is to cap the joint estimate at roughly the input length.
    """

    def __init__(self, extra_bits: int = 0):
        if extra_bits < 0:
            raise ValueError("extra_bits must be >= 0")
        self.extra_bits = extra_bits
        self.identifier = f"literal+{extra_bits}"

    def estimate(self, x: BitString) -> int:
        return len(x) + self.extra_bits

    def estimate_prefixes(self, x: BitString) -> np.ndarray:
        return np.arange(len(x) + 1, dtype=np.int64) + self.extra_bits


def default_estimators() -> list[ComplexityEstimator]:
    return [Lz77Estimator(), LiteralLengthEstimator()]


def tau_k_test(x: BitString, estimators: Sequence[ComplexityEstimator] | None = None,
               schedule: WeightSchedule = OMEGA_STAR, alpha: float = 0.01) -> TestReport:
    """Prefix-scanning ensemble test.

    For every prefix length m the joint estimate is ``log2(k) + min_j
    estimate_j(prefix)`` over the k estimators (the log2 k surcharge keeps
    the ensemble prefix-free per length class).  Scale m contributes
    evidence ``m - estimate - log2(1/w_m)``; the statistic is the best
    evidence over all scales, and rejection at the ``log2(1/alpha)``
    threshold keeps the Type-I probability at most ``alpha * sum(w_m)``.
    Scales with zero schedule weight carry no budget and are skipped.
    """
    alpha = _check_alpha(alpha)
    if estimators is None:
        estimators = default_estimators()
    if not estimators:
        raise ValueError("at least one complexity estimator is required")
    n = len(x)
    if n < 1:
        raise ValueError("tau_k test needs at least one bit")

    tables = np.minimum.reduce([np.asarray(e.estimate_prefixes(x), dtype=np.float64)
                                for e in estimators])
    ktilde = math.log2(len(estimators)) + tables[1:]
    w = schedule.weights(n)
    m = np.arange(1, n + 1, dtype=np.float64)
    usable = w > 0.0
    if not usable.any():
        return _make_report(float("-inf"), 1.0, UPPER_BOUND, alpha,
                            detail={"test_id": "tauk", "best_scale": None})
    evidence = np.full(n, -np.inf)
    evidence[usable] = m[usable] - ktilde[usable] + np.log2(w[usable])
    best = int(np.argmax(evidence))
    statistic = float(evidence[best])
    return _make_report(statistic, _bound_from_bits(statistic), UPPER_BOUND, alpha,
                        detail={"test_id": "tauk", "best_scale": best + 1,
                                "schedule": schedule.name})


# ---------------------------------------------------------------------------
# consistency scan


@dataclass(frozen=True)
class ScanStep:
    bits: int
    report: TestReport


@dataclass(frozen=True)
class ScanResult:
    """First rejection length on a doubling grid of prefix lengths."""

    first_rejection_bits: int | None
    steps: list[ScanStep]

    @property
    def rejected(self) -> bool:
        return self.first_rejection_bits is not None


def consistency_scan(source, test: Callable[..., TestReport], alpha: float,
                     start_bits: int = 1024, max_bits: int = 2 ** 20,
                     stop_at_rejection: bool = True) -> ScanResult:
    """Apply ``test`` to prefixes of a fixed stream at doubling lengths.

    ``source`` is a callable mapping a length to that prefix (sources and
    fixed bit strings are accepted too).  The grid is ``start_bits``,
    ``2*start_bits``, ... up to ``max_bits`` (and never beyond the length of
    a fixed input).  Returns the first grid length at which ``test``
    rejects, or None if the budget is exhausted without rejection; the
    budget running out is an outcome, not an error.
    """
    alpha = _check_alpha(alpha)
    if start_bits < 1 or max_bits < start_bits:
        raise ValueError("need 1 <= start_bits <= max_bits")
    if isinstance(source, BitString):
        prefix_fn = source.prefix
        limit = min(max_bits, len(source))
    elif callable(getattr(source, "bits", None)):
        prefix_fn = source.bits
        limit = max_bits
    elif callable(source):
        prefix_fn = source
        limit = max_bits
    else:
        raise TypeError("source must be a BitString, a generator object, or a callable")

    steps: list[ScanStep] = []
    first = None
    n = start_bits
    while n <= limit:
        report = test(prefix_fn(n), alpha)
        steps.append(ScanStep(bits=n, report=report))
        if report.rejected and first is None:
            first = n
            if stop_at_rejection:
                break
        n *= 2
    return ScanResult(first_rejection_bits=first, steps=steps)
