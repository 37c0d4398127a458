"""Affine bit-flipping threshold ``f(x) = a*x + b`` and its per-iteration schedule.

All arithmetic is exact (``fractions.Fraction``).  Coefficients given as
decimal strings keep their decimal value; quantized coefficients are dyadic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

Number = Union[int, str, Fraction]


def _frac(x: Number | float) -> Fraction:
    if isinstance(x, float):
        # repr gives the shortest decimal that round-trips; treat it as the intended value
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class ThresholdCoefficients:
    """Slope ``a`` and intercept ``b`` of the threshold function.

    ``precision`` is ``None`` for full precision, otherwise the number of
    retained fractional bits ``k`` (most significant nonzero bits for ``a``,
    most significant bits for ``b``).
    """

    a: Fraction
    b: Fraction
    precision: Optional[int] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _frac(self.a))
        object.__setattr__(self, "b", _frac(self.b))
        if self.a < 0 or self.b < 0:
            raise ValueError("threshold coefficients must be nonnegative")
        if self.precision is not None and self.precision < 1:
            raise ValueError("precision must be at least one bit")

    @property
    def mode(self) -> str:
        return "full" if self.precision is None else f"msnb_{self.precision}"


@dataclass(frozen=True)
class ThresholdState:
    """Per-decode constants: ``T' = f(|s0|)``, majority level ``M`` and offset ``delta``."""

    t_prime: Fraction
    majority: int
    delta: int

    @classmethod
    def initial(
        cls, coeffs: ThresholdCoefficients, initial_weight: int, d: int, delta: int
    ) -> ThresholdState:
        if d % 2 == 0:
            raise ValueError(f"column weight d must be odd, got {d}")
        return cls(f_eval(coeffs, initial_weight), (d + 1) // 2, delta)


def f_eval(coeffs: ThresholdCoefficients, syndrome_weight: int) -> Fraction:
    if syndrome_weight < 0:
        raise ValueError("syndrome weight must be nonnegative")
    return coeffs.a * syndrome_weight + coeffs.b


def leading_zero_bits(x: Fraction) -> int:
    """Number of zero fractional bits before the first 1 of ``x`` in (0, 1)."""
    if not 0 < x < 1:
        raise ValueError("expected a value in (0, 1)")
    p = 0
    while x * 2 ** (p + 1) < 1:
        p += 1
    return p


def truncate_fraction_bits(x: Fraction, bits: int) -> Fraction:
    """Drop every fractional bit below ``2**-bits`` (never rounds up)."""
    scale = 1 << bits
    return Fraction(math.floor(x * scale), scale)


def quantize_slope(a: Fraction, k: int) -> Fraction:
    """Keep the ``k`` most significant nonzero fractional bits of ``a``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    a = _frac(a)
    whole = math.floor(a)
    frac = a - whole
    if frac == 0:
        return a
    if whole:
        # any nonzero integer part is itself the leading bit run; keep k fractional bits
        return whole + truncate_fraction_bits(frac, k)
    return truncate_fraction_bits(frac, leading_zero_bits(frac) + k)


def quantize_intercept(b: Fraction, k: int) -> Fraction:
    """Keep the integer part of ``b`` and its ``k`` most significant fractional bits."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return truncate_fraction_bits(_frac(b), k)


def quantize(coeffs: ThresholdCoefficients, k: int) -> ThresholdCoefficients:
    """Truncate full-precision coefficients to ``k`` fractional bits.

    Re-quantizing already quantized coefficients at the same ``k`` is a
    no-op, which is what makes the operation idempotent.
    """
    return ThresholdCoefficients(quantize_slope(coeffs.a, k), quantize_intercept(coeffs.b, k), k)


def fractional_bits_of(coeffs: ThresholdCoefficients, which: str) -> Optional[int]:
    """Fractional digits the quantized binary expansion of ``a`` or ``b`` spans."""
    k = coeffs.precision
    if k is None:
        return None
    if which == "b":
        return k
    frac = coeffs.a - math.floor(coeffs.a)
    if frac == 0:
        return k
    if math.floor(coeffs.a):
        return k
    return leading_zero_bits(frac) + k


def binary_expansion(x: Fraction, frac_bits: int, *, ellipsis: bool = False) -> str:
    """Fixed binary expansion of a nonnegative value with ``frac_bits`` digits.

    With ``ellipsis`` a trailing ``...`` marks a nonzero remainder.
    """
    x = _frac(x)
    if x < 0:
        raise ValueError("expected a nonnegative value")
    whole = math.floor(x)
    frac = x - whole
    digits = []
    for _ in range(frac_bits):
        frac *= 2
        bit = math.floor(frac)
        digits.append(str(bit))
        frac -= bit
    text = bin(whole)[2:]
    if frac_bits:
        text += "." + "".join(digits)
    if ellipsis and frac:
        text += "..."
    return text


def format_exact(x: Fraction) -> str:
    """Exact decimal string when ``x`` terminates in base 10, else ``p/q``."""
    x = _frac(x)
    q = x.denominator
    twos = fives = 0
    while q % 2 == 0:
        q //= 2
        twos += 1
    while q % 5 == 0:
        q //= 5
        fives += 1
    if q != 1:
        return f"{x.numerator}/{x.denominator}"
    places = max(twos, fives)
    if places == 0:
        return str(x.numerator)
    scaled = x * 10**places
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled.numerator)).rjust(places + 1, "0")
    text = f"{sign}{digits[:-places]}.{digits[-places:]}".rstrip("0").rstrip(".")
    return text


def quantization_report(full: ThresholdCoefficients, k: int) -> list[dict[str, str]]:
    """Rows in Table-III layout: precision, coefficient, binary, decimal."""
    q = quantize(full, k)
    rows = []
    for name, full_v, shown_bits in (("a", full.a, 20), ("b", full.b, 20)):
        rows.append(
            {
                "precision": "full",
                "coeff": name,
                "binary": binary_expansion(full_v, shown_bits, ellipsis=True),
                "decimal": format_exact(full_v),
            }
        )
    for name, q_v in (("a", q.a), ("b", q.b)):
        rows.append(
            {
                "precision": f"{k} bits",
                "coeff": name,
                "binary": binary_expansion(q_v, fractional_bits_of(q, name)),
                "decimal": format_exact(q_v),
            }
        )
    return rows


def schedule_value(
    i: int, state: ThresholdState, trunc_thirds: Optional[int] = None
) -> Fraction:
    """The iteration-dependent part of the threshold, before the max with ``f``."""
    if i < 1:
        raise ValueError("iterations are numbered from 1")
    tp, m = state.t_prime, state.majority
    if i == 1:
        base = tp
    elif i == 2:
        base = (2 * tp + m) / 3
    elif i == 3:
        base = (tp + 2 * m) / 3
    else:
        base = Fraction(m)
    if trunc_thirds is not None and i in (2, 3):
        base = truncate_fraction_bits(base, trunc_thirds)
    return base + state.delta


def threshold(
    i: int,
    syndrome_weight: int,
    state: ThresholdState,
    coeffs: ThresholdCoefficients,
    trunc_thirds: Optional[int] = None,
) -> Fraction:
    """Flip threshold for iteration ``i`` given the syndrome weight at its start."""
    return max(f_eval(coeffs, syndrome_weight), schedule_value(i, state, trunc_thirds))


def integer_threshold(t: Fraction) -> int:
    """Smallest integer count satisfying ``count >= t``."""
    return math.ceil(t)


# Published coefficient sets for (lambda, w, t) = (128, 142, 134).
NONLAYERED_OPTIMAL = ThresholdCoefficients(Fraction("0.006258"), Fraction("11.094"))
LAYERED_TABLE = {
    11000: ThresholdCoefficients(Fraction("0.00622942"), Fraction("11.4157")),
    11100: ThresholdCoefficients(Fraction("0.00618658"), Fraction("10.8504")),
    11200: ThresholdCoefficients(Fraction("0.00597122"), Fraction("10.6118")),
    11300: ThresholdCoefficients(Fraction("0.00590374"), Fraction("10.2409")),
    11400: ThresholdCoefficients(Fraction("0.00586073"), Fraction("10.1113")),
    11500: ThresholdCoefficients(Fraction("0.00577619"), Fraction("9.9775")),
}
LAYERED_OPTIMAL = LAYERED_TABLE[11100]
