"""Exact rational scalars and log-domain magnitudes.

Two numeric lanes run through the whole package:

* the exact lane, `fractions.Fraction` values kept in lowest terms, used
  wherever an identity or inequality must hold with zero tolerance (the
  block-construction audits, golden norm sequences, density ratios);
* the log lane, magnitudes represented by their base-2 logarithm as a
  float64, used for open-ended horizon sweeps where orbit products such as
  2**(2*k) overflow any fixed-width float.

Multiplication of magnitudes is addition of log2 values and is exact
whenever both operands are (signed) powers of two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

__all__ = [
    "Exact",
    "ExactLike",
    "LogMagnitude",
    "ZERO_LOG2",
    "compensated_sum",
    "exact",
    "exact_arith",
    "exact_from_json",
    "exact_to_json",
    "log2_exact",
    "parse_exact",
    "to_log",
]

# ExactScalar is fractions.Fraction: unbounded signed numerator, positive
# denominator, always canonical (lowest terms, 0 == Fraction(0, 1)).
Exact = Fraction
ExactLike = Union[Fraction, int]

ZERO_LOG2 = float("-inf")  # sentinel log2 of a zero magnitude


def exact(num: int | str | Fraction, den: int = 1) -> Fraction:
    """Build an exact scalar; accepts ints, 'p/q' strings, or Fractions."""
    if isinstance(num, str):
        return Fraction(num)
    return Fraction(num, den)


def parse_exact(text: str) -> Fraction:
    """Parse 'p/q' or integer decimal text into an exact scalar."""
    return Fraction(text.strip())


def exact_to_json(x: ExactLike) -> dict:
    """Wire form: {"num": str, "den": str} with unbounded decimal strings."""
    f = Fraction(x)
    return {"num": str(f.numerator), "den": str(f.denominator)}


def exact_from_json(obj: dict) -> Fraction:
    return Fraction(int(obj["num"]), int(obj["den"]))


def exact_arith(a: ExactLike, b: ExactLike, op: str):
    """Exact field arithmetic dispatch.

    op is one of 'add', 'sub', 'mul', 'div', 'cmp'.  'cmp' returns -1/0/+1.
    Division by zero raises ZeroDivisionError: a zero divisor always means
    an invalid operator weight or a degenerate input upstream.
    """
    a = Fraction(a)
    b = Fraction(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b == 0:
            raise ZeroDivisionError("exact division by zero (invalid weight or degenerate input)")
        return a / b
    if op == "cmp":
        return (a > b) - (a < b)
    raise ValueError(f"unknown op {op!r}")


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def log2_exact(x: ExactLike) -> float:
    """log2|x| for a rational x, accurate to ~1 ulp, -inf for zero.

    Big integers never pass through float conversion directly: the fraction
    is shifted into [1, 2) exactly, converted with the correctly rounded
    Fraction->float division, and only then handed to libm.
    """
    f = Fraction(x)
    num = abs(f.numerator)
    den = f.denominator
    if num == 0:
        return ZERO_LOG2
    if _is_pow2(num) and _is_pow2(den):
        return float(num.bit_length() - den.bit_length())
    e = num.bit_length() - den.bit_length()
    # mantissa = |x| / 2**e lies in [1/2, 2); normalize to [1, 2)
    if e >= 0:
        mant = Fraction(num, den << e)
    else:
        mant = Fraction(num << -e, den)
    if mant < 1:
        mant *= 2
        e -= 1
    return e + math.log2(float(mant))


@dataclass(frozen=True)
class LogMagnitude:
    """A nonnegative magnitude held as its base-2 logarithm.

    log2 == -inf encodes magnitude zero.  The `exact` flag is True when the
    stored log2 value is the mathematically exact logarithm (powers of two
    and products thereof); it propagates through multiplication.
    """

    log2: float
    exact: bool = False

    @staticmethod
    def zero() -> "LogMagnitude":
        return LogMagnitude(ZERO_LOG2, True)

    @staticmethod
    def one() -> "LogMagnitude":
        return LogMagnitude(0.0, True)

    @property
    def is_zero(self) -> bool:
        return self.log2 == ZERO_LOG2

    def magnitude(self) -> float:
        """Plain float value; overflows to inf rather than raising."""
        if self.is_zero:
            return 0.0
        try:
            return 2.0 ** self.log2
        except OverflowError:
            return math.inf

    def __mul__(self, other: "LogMagnitude") -> "LogMagnitude":
        if self.is_zero or other.is_zero:
            return LogMagnitude.zero()
        return LogMagnitude(self.log2 + other.log2, self.exact and other.exact)

    def __truediv__(self, other: "LogMagnitude") -> "LogMagnitude":
        if other.is_zero:
            raise ZeroDivisionError("division by zero magnitude")
        if self.is_zero:
            return LogMagnitude.zero()
        return LogMagnitude(self.log2 - other.log2, self.exact and other.exact)

    def pow_int(self, n: int) -> "LogMagnitude":
        if self.is_zero:
            if n <= 0:
                raise ZeroDivisionError("zero magnitude to a nonpositive power")
            return LogMagnitude.zero()
        return LogMagnitude(self.log2 * n, self.exact)

    def __lt__(self, other: "LogMagnitude") -> bool:
        return self.log2 < other.log2

    def __le__(self, other: "LogMagnitude") -> bool:
        return self.log2 <= other.log2


def to_log(x: ExactLike | LogMagnitude) -> LogMagnitude:
    """Convert an exact scalar (or pass through a LogMagnitude) to log form."""
    if isinstance(x, LogMagnitude):
        return x
    f = Fraction(x)
    num = abs(f.numerator)
    den = f.denominator
    is_exact = num == 0 or (_is_pow2(num) and _is_pow2(den))
    return LogMagnitude(log2_exact(f), is_exact)


def compensated_sum(values: Sequence[LogMagnitude] | Iterable[LogMagnitude]) -> LogMagnitude:
    """Sum of magnitudes, returned in log form.

    Deterministic regardless of the input order (terms are sorted before
    accumulation) and within 2**-40 relative error of the true sum; the
    heavy lifting happens in the kernels module so that million-term
    Cesàro horizons stay fast.
    """
    from . import _kernels  # deferred: numba compilation only when needed

    logs = [v.log2 for v in values]
    if not logs:
        return LogMagnitude.zero()
    total_log2 = _kernels.log2_magnitude_sum_list(logs)
    return LogMagnitude(total_log2, False)
