"""Derive threshold coefficients from simulated first iterations.

For every random (key, error) instance, each integer threshold in a range is
tried for one iteration. The threshold that leaves the lightest syndrome is
recorded against the initial syndrome weight. A least-squares line through
those points gives ``(a, b)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .decoder import first_iteration_weights
from .gf2 import BitVector, CodeParams, SparseKey, keygen, sample_error, syndrome
from .parallel import map_chunks
from .rng import trial_rng

DEFAULT_RANGE = (30, 60)
DEFAULT_SAMPLES = 10_000


class DegenerateFitError(ValueError):
    """The sample set has no spread in syndrome weight."""


@dataclass(frozen=True)
class CalibrationSample:
    initial_syndrome_weight: int
    best_threshold: int


@dataclass(frozen=True)
class FittedCoefficients:
    a: float
    b: float
    r_prime: int
    num_samples: int

    def summary_line(self) -> str:
        return f"{self.r_prime},{self.a!r},{self.b!r},{self.num_samples}"


def best_first_threshold(
    key: SparseKey,
    e: BitVector,
    block: int,
    t_range: tuple[int, int] = DEFAULT_RANGE,
) -> CalibrationSample:
    """Threshold in ``t_range`` minimizing the syndrome weight after one iteration.

    Ties go to the smallest threshold.
    """
    lo, hi = t_range
    if lo > hi:
        raise ValueError(f"empty threshold range [{lo}, {hi}]")
    s0 = syndrome(key, e)
    candidates = np.arange(lo, hi + 1, dtype=np.int64)
    weights = first_iteration_weights(key, s0, block, candidates)
    # argmin returns the first minimum, i.e. the smallest threshold on ties
    return CalibrationSample(s0.weight, int(candidates[int(np.argmin(weights))]))


def least_squares_fit(
    samples: Sequence[CalibrationSample], r_prime: int = 0
) -> FittedCoefficients:
    """Ordinary least squares of best threshold on initial syndrome weight."""
    if len(samples) < 2:
        raise DegenerateFitError("need at least two samples")
    x = np.array([s.initial_syndrome_weight for s in samples], dtype=np.float64)
    y = np.array([s.best_threshold for s in samples], dtype=np.float64)
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DegenerateFitError("all samples share one syndrome weight")
    a = float(dx @ (y - ym)) / sxx
    b = float(ym - a * xm)
    return FittedCoefficients(a, b, r_prime, len(samples))


def _sample_chunk(job: tuple) -> list[CalibrationSample]:
    r, d, t, block, t_range, master_seed, start, stop = job
    out = []
    for idx in range(start, stop):
        rng = trial_rng(master_seed, idx)
        key = keygen(r, d, rng)
        e = sample_error(r, t, rng)
        out.append(best_first_threshold(key, e, block, t_range))
    return out


def collect_samples(
    r_prime: int,
    params: CodeParams,
    num_samples: int,
    master_seed: int,
    *,
    block_size: int | None = None,
    t_range: tuple[int, int] = DEFAULT_RANGE,
    workers: int = 1,
) -> list[CalibrationSample]:
    """Samples in trial-index order; sample ``i`` draws from stream ``(seed, i)``."""
    block = 2 * r_prime if block_size is None else min(block_size, 2 * r_prime)
    job = (r_prime, params.d, params.t, block, tuple(t_range), master_seed)
    chunks = map_chunks(_sample_chunk, job, num_samples, workers)
    return [s for chunk in chunks for s in chunk]


def calibrate(
    r_prime: int,
    params: CodeParams,
    num_samples: int,
    master_seed: int,
    *,
    block_size: int | None = None,
    t_range: tuple[int, int] = DEFAULT_RANGE,
    workers: int = 1,
    min_samples: int = 100,
) -> tuple[FittedCoefficients, list[CalibrationSample]]:
    if num_samples < min_samples:
        raise ValueError(f"need at least {min_samples} samples, got {num_samples}")
    samples = collect_samples(
        r_prime,
        params,
        num_samples,
        master_seed,
        block_size=block_size,
        t_range=t_range,
        workers=workers,
    )
    return least_squares_fit(samples, r_prime), samples


def samples_csv(samples: Iterable[CalibrationSample]) -> str:
    lines = ["syndrome_weight,best_threshold"]
    lines += [f"{s.initial_syndrome_weight},{s.best_threshold}" for s in samples]
    return "\n".join(lines) + "\n"


def plot_data(samples: Sequence[CalibrationSample], fit: FittedCoefficients) -> str:
    """Scatter points plus the fitted line at the extreme syndrome weights."""
    lines = ["# kind,syndrome_weight,threshold"]
    lines += [f"sample,{s.initial_syndrome_weight},{s.best_threshold}" for s in samples]
    xs = [s.initial_syndrome_weight for s in samples]
    for x in (min(xs), max(xs)):
        lines.append(f"fit,{x},{fit.a * x + fit.b!r}")
    return "\n".join(lines) + "\n"


GNUPLOT_SCRIPT = """\
set datafile separator ','
set xlabel 'initial syndrome weight'
set ylabel 'best first-iteration threshold'
plot '< grep ^sample {data}' using 2:3 with points title 'samples', \\
     '< grep ^fit {data}' using 2:3 with lines title 'least squares'
"""
