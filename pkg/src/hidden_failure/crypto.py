"""Hardware-fault floor on the false-acceptance rate of Rabin-Miller testing.

A single flipped bit in the test routine can make it accept every composite.
With per-bit flip rate ``lambda`` the fault probability over an exposure of
``T`` seconds puts a floor under ``4**-k``, however many iterations ``k`` run.
Parity and two-bit error detection, checked every ``R`` seconds, lower the
effective rate to ``lambda**2 * R`` and ``lambda**3 * R**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ModelError

SECONDS_PER_MONTH = 2.63e6
SECONDS_PER_YEAR = 3.156e7
SECURITY_TARGET_LOG2 = -128

ECC_KINDS = ("none", "parity", "two-bit")


@dataclass(frozen=True)
class FaultScenario:
    lam: float
    T: float
    R: float | None = None
    ecc: str = "none"

    def __post_init__(self):
        if self.ecc not in ECC_KINDS:
            raise ModelError(f"ecc must be one of {ECC_KINDS}, got {self.ecc!r}")
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise ModelError(f"lambda must be a finite non-negative rate, got {self.lam!r}")
        if not (self.T >= 0 and math.isfinite(self.T)):
            raise ModelError(f"exposure T must be non-negative, got {self.T!r}")
        if self.ecc != "none" and not (self.R is not None and self.R > 0):
            raise ModelError(f"ecc={self.ecc!r} needs a positive check interval R")

    @property
    def effective_rate(self) -> float:
        """Per-second probability of an undetected flip."""
        if self.ecc == "none":
            return self.lam
        if self.ecc == "parity":
            return self.lam**2 * self.R
        return self.lam**3 * self.R**2


def bit_flip_probability(scenario: FaultScenario) -> float:
    """Probability that the critical bit has flipped undetected by time ``T``.

    Uses ``1 - exp(-rate * T)``, which equals ``rate * T`` at small exposures.
    """
    return float(-math.expm1(-scenario.effective_rate * scenario.T))


def _check_iterations(k: int, p_f: float) -> None:
    if isinstance(k, bool) or int(k) != k or k < 0:
        raise ModelError(f"iteration count must be a non-negative integer, got {k!r}")
    if not 0.0 <= p_f <= 1.0:
        raise ModelError(f"p_f must lie in [0, 1], got {p_f!r}")


def false_acceptance_rate(k: int, p_f: float) -> float:
    """``4**-k * (1 - p_f) + p_f``: chance a worst-case composite passes ``k`` rounds.

    ``4**-k`` is built exactly as a power of two, so ``p_f = 0`` gives exact
    values down to the smallest subnormal double (about ``k = 537``).
    """
    _check_iterations(k, p_f)
    return math.ldexp(1.0 - p_f, -2 * int(k)) + p_f


def log2_false_acceptance_rate(k: int, p_f: float) -> float:
    """Base-2 log of :func:`false_acceptance_rate`, valid for any ``k``."""
    _check_iterations(k, p_f)
    algorithmic = -2.0 * int(k) + (math.log2(1.0 - p_f) if p_f < 1 else -math.inf)
    fault = math.log2(p_f) if p_f > 0 else -math.inf
    return float(np.logaddexp2(algorithmic, fault))


def relative_excess(k: int, p_f: float) -> float:
    """How far faults lift the acceptance rate above ``4**-k``, as a fraction of it.

    Equals ``p_f * (4**k - 1)``, computed without subtracting nearly equal rates.
    """
    _check_iterations(k, p_f)
    if p_f == 0:
        return 0.0
    try:
        return p_f * math.expm1(2 * int(k) * math.log(2.0))
    except OverflowError:
        return math.inf


def security_gap(p_fa: float, target: float = 2.0**SECURITY_TARGET_LOG2) -> tuple[float, float]:
    """Ratio ``p_fa / target`` and its base-2 logarithm."""
    if not target > 0:
        raise ModelError(f"target must be positive, got {target!r}")
    if p_fa < 0:
        raise ModelError(f"p_fa must be non-negative, got {p_fa!r}")
    log2_ratio = (math.log2(p_fa) if p_fa > 0 else -math.inf) - math.log2(target)
    return p_fa / target, log2_ratio


def google_lambda(module_error_rate_per_year: float, module_bits: float) -> float:
    """Per-bit, per-second flip rate from a module's yearly error probability."""
    if module_error_rate_per_year < 0:
        raise ModelError("module error rate must be non-negative")
    if not module_bits > 0:
        raise ModelError("module size must be positive")
    return module_error_rate_per_year / (module_bits * SECONDS_PER_YEAR)


def gigabytes_to_bits(gib: float) -> float:
    return gib * 2**30 * 8
