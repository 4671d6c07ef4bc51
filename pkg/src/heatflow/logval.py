"""Sign + log-magnitude scalars.

Quantities like e^{-|rho|^2 t - r^2/4t} underflow float64 well inside the
desk-scale test range, so every kernel/norm value is carried as a sign and
the log of its magnitude.  Addition goes through log-sum-exp; subtraction of
nearly equal magnitudes is counted so callers can detect catastrophic
cancellation (more than ~12 digits lost).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

# Digits of agreement beyond which a subtraction is considered degenerate.
CANCEL_DIGITS = 12.0

_cancellation_count = 0


def cancellation_count() -> int:
    """Number of flagged near-total cancellations since the last reset."""
    return _cancellation_count


def reset_cancellation_count() -> None:
    global _cancellation_count
    _cancellation_count = 0


def _flag_cancellation() -> None:
    global _cancellation_count
    _cancellation_count += 1


@dataclass(frozen=True, slots=True)
class LogVal:
    """A real number x stored as (sign(x), log|x|)."""

    sign: int          # -1, 0, +1
    log: float         # log|x|; -inf iff sign == 0

    @staticmethod
    def from_value(x: float) -> "LogVal":
        if x == 0.0:
            return LOG_ZERO
        return LogVal(1 if x > 0 else -1, math.log(abs(x)))

    @staticmethod
    def from_log(log: float, sign: int = 1) -> "LogVal":
        if sign == 0 or log == -math.inf:
            return LOG_ZERO
        return LogVal(1 if sign > 0 else -1, float(log))

    def value(self) -> float:
        """Native float; silently under/overflows outside float64 range."""
        if self.sign == 0:
            return 0.0
        if self.log > 709.0:
            return math.inf * self.sign
        return self.sign * math.exp(self.log)

    def is_zero(self) -> bool:
        return self.sign == 0

    def __mul__(self, other: "LogVal") -> "LogVal":
        if self.sign == 0 or other.sign == 0:
            return LOG_ZERO
        return LogVal(self.sign * other.sign, self.log + other.log)

    def __truediv__(self, other: "LogVal") -> "LogVal":
        if other.sign == 0:
            raise ZeroDivisionError("LogVal division by zero")
        if self.sign == 0:
            return LOG_ZERO
        return LogVal(self.sign * other.sign, self.log - other.log)

    def __pow__(self, q: float) -> "LogVal":
        if self.sign == 0:
            return LOG_ZERO if q > 0 else LogVal(1, math.inf)
        if self.sign < 0:
            raise ValueError("power of a negative LogVal")
        return LogVal(1, q * self.log)

    def __neg__(self) -> "LogVal":
        return LogVal(-self.sign, self.log)

    def __abs__(self) -> "LogVal":
        return LogVal(abs(self.sign), self.log)

    def __add__(self, other: "LogVal") -> "LogVal":
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        if self.sign == other.sign:
            return LogVal(self.sign, np.logaddexp(self.log, other.log))
        # opposite signs: log(e^a - e^b) with a >= b
        if self.log == other.log:
            _flag_cancellation()
            return LOG_ZERO
        big, small = (self, other) if self.log > other.log else (other, self)
        d = small.log - big.log  # < 0
        rem = -math.expm1(d)     # 1 - e^d, relative size of the difference
        if rem < 10.0 ** (-CANCEL_DIGITS):
            _flag_cancellation()
        return LogVal(big.sign, big.log + math.log(rem))

    def __sub__(self, other: "LogVal") -> "LogVal":
        return self + (-other)

    # ordering compares the represented real numbers
    def _key(self):
        return (self.sign, self.sign * self.log if self.sign != 0 else -math.inf)

    def __lt__(self, other: "LogVal") -> bool:
        if self.sign != other.sign:
            return self.sign < other.sign
        if self.sign == 0:
            return False
        return (self.log < other.log) if self.sign > 0 else (self.log > other.log)

    def __le__(self, other: "LogVal") -> bool:
        return self == other or self < other

    def __repr__(self) -> str:
        if self.sign == 0:
            return "LogVal(0)"
        s = "-" if self.sign < 0 else ""
        return f"LogVal({s}exp({self.log:.6g}))"


LOG_ZERO = LogVal(0, -math.inf)
LOG_ONE = LogVal(1, 0.0)


@dataclass(frozen=True, slots=True)
class LogComplex:
    """A complex number stored as mantissa * exp(log_scale)."""

    mantissa: complex
    log_scale: float

    def value(self) -> complex:
        if self.mantissa == 0:
            return 0j
        return self.mantissa * math.exp(self.log_scale)

    def real_logval(self) -> LogVal:
        re = self.mantissa.real
        if re == 0.0:
            return LOG_ZERO
        return LogVal.from_log(self.log_scale + math.log(abs(re)),
                               1 if re > 0 else -1)

    def abs_log(self) -> float:
        if self.mantissa == 0:
            return -math.inf
        return self.log_scale + math.log(abs(self.mantissa))

    def imag_ratio(self) -> float:
        """|Im| / |mantissa|, a sanity measure for nominally real results."""
        if self.mantissa == 0:
            return 0.0
        return abs(self.mantissa.imag) / abs(self.mantissa)


def logval_sum(values) -> LogVal:
    """Signed log-sum-exp over an iterable of LogVal, deterministic order."""
    logs, signs = [], []
    for v in values:
        if v.sign != 0:
            logs.append(v.log)
            signs.append(v.sign)
    if not logs:
        return LOG_ZERO
    total, sign = logsumexp(np.asarray(logs), b=np.asarray(signs, dtype=float),
                            return_sign=True)
    if sign == 0.0 or total == -math.inf:
        return LOG_ZERO
    return LogVal(1 if sign > 0 else -1, float(total))


def logsumexp_weighted(logs: np.ndarray, weights: np.ndarray) -> LogVal:
    """LogVal of sum_i weights_i * exp(logs_i) for real weights."""
    logs = np.asarray(logs, dtype=float)
    weights = np.asarray(weights, dtype=float)
    mask = np.isfinite(logs) & (weights != 0.0)
    if not np.any(mask):
        return LOG_ZERO
    total, sign = logsumexp(logs[mask], b=weights[mask], return_sign=True)
    if sign == 0.0 or total == -math.inf:
        return LOG_ZERO
    return LogVal(1 if sign > 0 else -1, float(total))
