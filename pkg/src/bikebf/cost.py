"""Analytical memory, area and latency model of the L-parallel decoders."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

XOR_PER_MEMORY_BIT = Fraction(3, 4)

# Logic gate counts (XOR equivalents) for L = 32, 7-bit coefficients (layered)
# and full-precision coefficients (non-layered).
LOGIC_XORS_LAYERED = 3780
LOGIC_XORS_NONLAYERED = 5134


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def ceil_log2(r: int) -> int:
    return (r - 1).bit_length()


def ram_sizes(r: int, w: int, L: int, layered: bool) -> tuple[int, int, int]:
    """Bits in RAM E (error), RAM S (syndrome banks) and RAM I (column indices)."""
    if min(r, w, L) <= 0:
        raise ValueError("r, w and L must be positive")
    if w % 2:
        raise ValueError("w must be even")
    ram_e = _ceil_div(2 * r, L) * L
    ram_s = (2 if layered else 4) * _ceil_div(r, 2 * L) * L
    ram_i = 2 * ceil_log2(r) * (w // 2)
    return ram_e, ram_s, ram_i


def latency(r: int, w: int, L: int, iterations: int = 1) -> int:
    """Clock cycles: ``ceil(2r/L)`` column blocks, each a count pass and a flip pass of ``d`` cycles.

    ``iterations=1`` gives the tabulated figure; pass ``I_max`` for a whole decode.
    """
    if min(r, w, L, iterations) <= 0:
        raise ValueError("arguments must be positive")
    return _ceil_div(2 * r, L) * w * iterations


def total_area(mem_bits: int, logic_xors: int) -> int:
    if mem_bits < 0 or logic_xors < 0:
        raise ValueError("arguments must be nonnegative")
    scaled = XOR_PER_MEMORY_BIT * mem_bits
    # round half up; exact multiples never round
    return math.floor(scaled + Fraction(1, 2)) + logic_xors


@dataclass(frozen=True)
class CostReport:
    r: int
    w: int
    L: int
    layered: bool
    ram_e_bits: int
    ram_s_bits: int
    ram_i_bits: int
    total_mem_bits: int
    logic_xors: int
    total_area_xors: int
    latency_cycles: int

    def rows(self) -> list[tuple[str, int]]:
        return [
            ("r value", self.r),
            ("RAM E", self.ram_e_bits),
            ("RAM S", self.ram_s_bits),
            ("RAM I", self.ram_i_bits),
            ("Total memory (bits)", self.total_mem_bits),
            ("Logic (# of XORs)", self.logic_xors),
            ("Total area (# of XORs)", self.total_area_xors),
            ("Latency (# of clk cycles)", self.latency_cycles),
        ]

    def table(self) -> str:
        width = max(len(label) for label, _ in self.rows())
        return "\n".join(f"{label:<{width}}  {value}" for label, value in self.rows()) + "\n"


def cost_report(
    r: int,
    w: int,
    L: int,
    layered: bool,
    logic_xors: int | None = None,
    iterations: int = 1,
) -> CostReport:
    if logic_xors is None:
        logic_xors = LOGIC_XORS_LAYERED if layered else LOGIC_XORS_NONLAYERED
    e, s, i = ram_sizes(r, w, L, layered)
    mem = e + s + i
    return CostReport(
        r, w, L, layered, e, s, i, mem, logic_xors,
        total_area(mem, logic_xors), latency(r, w, L, iterations),
    )
