"""Bit-flipping decoder with a fixed iteration count and block-layered scheduling.

The block size ``B`` selects the schedule.  Counts inside a block see the
syndrome as it was when the block started, and the block's flips land before
the next block is counted.  ``B = 2r`` gives the classic iteration-snapshot
decoder, ``B = 1`` the column-layered one and ``B = L`` the L-parallel
hardware schedule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import _kernels
from .gf2 import BitVector, CodeParams, SparseKey, syndrome
from .threshold import (
    ThresholdCoefficients,
    ThresholdState,
    format_exact,
    integer_threshold,
    threshold,
)

DEFAULT_LAYER_SIZE = 32


@dataclass(frozen=True)
class DecoderConfig:
    params: CodeParams
    coeffs: ThresholdCoefficients
    block_size: Optional[int] = None  # None: whole iteration (2r)
    track_weight_incrementally: bool = False
    trunc_thirds: Optional[int] = None

    def __post_init__(self) -> None:
        if self.block_size is not None and self.block_size < 1:
            raise ValueError("block size must be at least 1")

    def block_for(self, r: int) -> int:
        if self.block_size is None:
            return 2 * r
        if self.block_size > 2 * r:
            raise ValueError(f"block size {self.block_size} exceeds 2r = {2 * r}")
        return self.block_size

    def with_r(self, r: int) -> DecoderConfig:
        p = self.params
        return DecoderConfig(
            CodeParams(r, p.w, p.t, p.lam, p.delta, p.i_max),
            self.coeffs,
            self.block_size,
            self.track_weight_incrementally,
            self.trunc_thirds,
        )


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    threshold: Fraction
    weight_before: int
    flips: int
    weight_after: int
    flipped: tuple[int, ...]
    syndrome: BitVector
    error: BitVector

    def trace_line(self) -> str:
        return (
            f"{self.iteration},{format_exact(self.threshold)},"
            f"{self.weight_before},{self.flips},{self.weight_after}"
        )


@dataclass(frozen=True)
class DecodeOutcome:
    e_est: BitVector
    converged: bool
    iterations_run: int
    flip_count_per_iter: list[int]
    final_syndrome_weight: int
    trace: list[IterationRecord] = field(default_factory=list)
    weight_mismatches: int = 0


def count_upc(key: SparseKey, s: BitVector, j: int) -> int:
    """Unsatisfied parity checks touching column ``j``."""
    if s.length != key.r:
        raise ValueError(f"syndrome length {s.length} != r = {key.r}")
    if not 0 <= j < 2 * key.r:
        raise IndexError(f"column {j} out of range [0, {2 * key.r})")
    h0, h1 = key.arrays()
    return int(_kernels.upc_count(s.to_array(), h0, h1, key.r, j))


def decode(
    key: SparseKey,
    s0: BitVector,
    cfg: DecoderConfig,
    *,
    record: bool = False,
    check_weight: bool = False,
) -> DecodeOutcome:
    """Run exactly ``I_max`` iterations starting from syndrome ``s0``.

    ``record`` keeps a per-iteration trace with syndrome and error snapshots.
    ``check_weight`` compares the incrementally tracked syndrome weight with a
    popcount after every flip and reports the number of disagreements.
    """
    r = key.r
    if s0.length != r:
        raise ValueError(f"syndrome length {s0.length} != r = {r}")
    params = cfg.params
    if params.d != key.d:
        raise ValueError(f"config column weight {params.d} != key weight {key.d}")
    block = cfg.block_for(r)
    h0, h1 = key.arrays()
    s = s0.to_array()
    e = np.zeros(2 * r, dtype=np.uint8)
    flipped = np.empty(2 * r, dtype=np.int64)

    weight = s0.weight
    state = ThresholdState.initial(cfg.coeffs, weight, key.d, params.delta)
    flips_per_iter = []
    trace = []
    mismatches = 0
    for i in range(1, params.i_max + 1):
        if not cfg.track_weight_incrementally:
            weight = int(s.sum())
        # a running weight can undercount at B > 1; a syndrome weight is never negative
        t = threshold(i, max(weight, 0), state, cfg.coeffs, cfg.trunc_thirds)
        flips, new_weight, bad = _kernels.run_iteration(
            s, e, h0, h1, r, block, integer_threshold(t), weight, check_weight, flipped
        )
        mismatches += bad
        flips_per_iter.append(int(flips))
        if record:
            trace.append(
                IterationRecord(
                    i,
                    t,
                    weight,
                    int(flips),
                    int(new_weight) if cfg.track_weight_incrementally else int(s.sum()),
                    tuple(int(j) for j in flipped[:flips]),
                    BitVector.from_array(s),
                    BitVector.from_array(e),
                )
            )
        weight = int(new_weight)

    final_weight = int(s.sum())
    return DecodeOutcome(
        BitVector.from_array(e),
        final_weight == 0,
        params.i_max,
        flips_per_iter,
        final_weight,
        trace,
        int(mismatches),
    )


def decode_and_check(key: SparseKey, e_true: BitVector, cfg: DecoderConfig) -> bool:
    """True when decoding fails, i.e. the estimate differs from ``e_true``.

    A converged decode that lands on the wrong error vector counts as a failure.
    """
    outcome = decode(key, syndrome(key, e_true), cfg)
    return outcome.e_est != e_true


def first_iteration_weights(
    key: SparseKey, s0: BitVector, block: int, thresholds: np.ndarray
) -> np.ndarray:
    """Syndrome weight after one iteration at each constant threshold."""
    h0, h1 = key.arrays()
    return _kernels.first_iteration_weights(
        s0.to_array(), h0, h1, key.r, block, np.asarray(thresholds, dtype=np.int64)
    )
