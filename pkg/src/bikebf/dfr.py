"""Monte Carlo decoding-failure-rate estimation and log-linear extrapolation."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.stats import beta

from .decoder import DecoderConfig, decode_and_check
from .gf2 import keygen, sample_error
from .parallel import map_chunks
from .rng import trial_rng

log = logging.getLogger(__name__)

CONFIDENCE = 0.95


class ExtrapolationError(ValueError):
    """The points do not define a decreasing log2-DFR line."""


def clopper_pearson(failures: int, trials: int, confidence: float = CONFIDENCE) -> tuple[float, float]:
    """Exact two-sided binomial confidence interval."""
    alpha = 1.0 - confidence
    lo = 0.0 if failures == 0 else float(beta.ppf(alpha / 2, failures, trials - failures + 1))
    hi = 1.0 if failures == trials else float(beta.ppf(1 - alpha / 2, failures + 1, trials - failures))
    return lo, hi


@dataclass(frozen=True)
class DfrEstimate:
    r: int
    trials: int
    failures: int
    dfr_point: float
    ci_low: float
    ci_high: float

    @classmethod
    def from_counts(cls, r: int, trials: int, failures: int) -> DfrEstimate:
        if trials < 1 or not 0 <= failures <= trials:
            raise ValueError(f"invalid counts: {failures} failures in {trials} trials")
        lo, hi = clopper_pearson(failures, trials)
        return cls(r, trials, failures, failures / trials, lo, hi)

    def merge(self, other: DfrEstimate) -> DfrEstimate:
        if other.r != self.r:
            raise ValueError("cannot merge estimates for different r")
        return DfrEstimate.from_counts(
            self.r, self.trials + other.trials, self.failures + other.failures
        )

    def csv_row(self) -> str:
        return (
            f"{self.r},{self.trials},{self.failures},"
            f"{self.dfr_point!r},{self.ci_low!r},{self.ci_high!r}"
        )


CSV_HEADER = "r,trials,failures,dfr,ci_low,ci_high"


@dataclass(frozen=True)
class Extrapolation:
    slope: float
    intercept: float
    r_star: float
    lam: int

    def summary_line(self) -> str:
        return f"{self.slope!r},{self.intercept!r},{self.r_star!r},{self.lam}"


EXTRAPOLATION_HEADER = "slope,intercept,r_star,lambda"


def _count_failures(job: tuple) -> int:
    cfg, master_seed, lo, hi = job
    p = cfg.params
    failures = 0
    for idx in range(lo, hi):
        rng = trial_rng(master_seed, idx)
        key = keygen(p.r, p.d, rng)
        e = sample_error(p.r, p.t, rng)
        failures += decode_and_check(key, e, cfg)
    return failures


def estimate_dfr(
    cfg: DecoderConfig,
    r: int,
    trials: int,
    master_seed: int,
    *,
    workers: int = 1,
    start: int = 0,
) -> DfrEstimate:
    """Failure rate at block size ``r`` over trial indices ``start .. start+trials-1``."""
    if trials < 1:
        raise ValueError("need at least one trial")
    cfg = cfg.with_r(r)
    counts = map_chunks(_count_failures, (cfg, master_seed), trials, workers, start)
    return DfrEstimate.from_counts(r, trials, sum(counts))


def _line(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    dx = x - x.mean()
    slope = float(dx @ (y - y.mean()) / (dx @ dx))
    return slope, float(y.mean() - slope * x.mean())


def extrapolate(
    points: Iterable[tuple[int, float]], lam: int, *, fit_all: bool = False
) -> Extrapolation:
    """Line in (r, log2 DFR) through the two lowest-DFR points, solved for DFR = 2^-lam.

    With ``fit_all`` every point enters a least-squares line instead.
    """
    pts = [(int(r), float(p)) for r, p in points if p > 0]
    if len(pts) < 2:
        raise ExtrapolationError("need at least two points with nonzero DFR")
    if not fit_all:
        pts = sorted(pts, key=lambda rp: (rp[1], rp[0]))[:2]
    if len({r for r, _ in pts}) < 2:
        raise ExtrapolationError("points must have distinct r")
    if fit_all:
        slope, intercept = _line([r for r, _ in pts], [math.log2(p) for _, p in pts])
    else:
        (r1, p1), (r2, p2) = sorted(pts)
        y1, y2 = math.log2(p1), math.log2(p2)
        slope = (y2 - y1) / (r2 - r1)
        intercept = y1 - slope * r1
    if slope >= 0:
        raise ExtrapolationError("no extrapolation: DFR does not decrease with r")
    r_star = (-lam - intercept) / slope
    return Extrapolation(slope, intercept, r_star, lam)


@dataclass(frozen=True)
class SweepResult:
    estimates: list[DfrEstimate]
    extrapolation: Optional[Extrapolation]

    def csv(self) -> str:
        return "\n".join([CSV_HEADER] + [e.csv_row() for e in self.estimates]) + "\n"

    def plot_data(self) -> str:
        lines = ["r,log2_dfr,log2_ci_low,log2_ci_high"]
        for e in self.estimates:
            if e.failures == 0:
                continue
            lines.append(
                f"{e.r},{math.log2(e.dfr_point)!r},"
                f"{math.log2(e.ci_low)!r},{math.log2(e.ci_high)!r}"
            )
        return "\n".join(lines) + "\n"


def sweep(
    cfg: DecoderConfig,
    r_list: Sequence[int],
    trials_per_r: int,
    master_seed: int,
    *,
    workers: int = 1,
    fit_all: bool = False,
) -> SweepResult:
    if list(r_list) != sorted(r_list):
        raise ValueError("r values must be ascending")
    estimates = [
        estimate_dfr(cfg, r, trials_per_r, master_seed, workers=workers) for r in r_list
    ]
    points = [(e.r, e.dfr_point) for e in estimates if e.failures > 0]
    extrapolation = None
    if len(points) >= 2:
        try:
            extrapolation = extrapolate(points, cfg.params.lam, fit_all=fit_all)
        except ExtrapolationError as exc:
            log.warning("%s", exc)
    elif len(r_list) > 1:
        log.warning("fewer than two r values with failures; extrapolation omitted")
    return SweepResult(estimates, extrapolation)


GNUPLOT_SCRIPT = """\
set datafile separator ','
set xlabel 'r'
set ylabel 'log2 DFR'
plot '{data}' using 1:2:3:4 with yerrorbars title 'simulated'{fit}
"""


def gnuplot_script(data_path: str, extrapolation: Optional[Extrapolation]) -> str:
    fit = ""
    if extrapolation is not None:
        fit = f", {extrapolation.slope!r}*x + {extrapolation.intercept!r} title 'extrapolation'"
    return GNUPLOT_SCRIPT.format(data=data_path, fit=fit)
