"""Command-line interface: keygen, decode, dfr, calibrate, quantize, cost, extrapolate.

Settings resolve in order: built-in defaults, ``--preset``, ``--config``
file (flat ``key = value`` lines, keys named like the long options), then
explicit flags.  Exit codes: 0 success, 1 usage or I/O error, 2 decoding
failure (``decode`` only).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

from . import calibration, cost, dfr
from .decoder import DEFAULT_LAYER_SIZE, DecoderConfig, decode
from .gf2 import (
    BitVector,
    CodeParams,
    KeygenError,
    SparseKey,
    dump_key,
    format_indices,
    keygen_with_retries,
    load_key,
    parse_fixture,
    sample_error,
    syndrome,
)
from .rng import trial_rng
from .threshold import (
    LAYERED_OPTIMAL,
    NONLAYERED_OPTIMAL,
    ThresholdCoefficients,
    format_exact,
    quantization_report,
    quantize,
)

SEED_ENV = "BIKEBF_SEED"

PRESETS: dict[str, dict[str, Any]] = {
    "bike-l1-layered": {
        "r": 12992, "w": 142, "t": 134, "lam": 128, "delta": 3, "i_max": 7,
        "L": DEFAULT_LAYER_SIZE, "block_size": DEFAULT_LAYER_SIZE, "layered": True,
        "a": LAYERED_OPTIMAL.a, "b": LAYERED_OPTIMAL.b, "k": 7, "track_weight": True,
    },
    "bike-l1-nonlayered": {
        "r": 12095, "w": 142, "t": 134, "lam": 128, "delta": 3, "i_max": 7,
        "L": DEFAULT_LAYER_SIZE, "block_size": None, "layered": False,
        "a": NONLAYERED_OPTIMAL.a, "b": NONLAYERED_OPTIMAL.b, "k": None,
        "track_weight": False,
    },
    # desk-scale parameter set used by the DFR acceptance sweep
    # coefficients from `bikebf calibrate --r-prime 557 --w 30 --t 18 --range 1,15 --samples 10000 --seed 1`
    "desk-d15": {
        "w": 30, "t": 18, "lam": 128, "delta": 3, "i_max": 7, "block_size": 1,
        "a": Fraction("0.0295"), "b": Fraction("4.70"), "k": None,
        "track_weight": True, "r_list": [509, 557, 613, 661, 709],
    },
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits 2 by default
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# -- argument types -----------------------------------------------------------


def _positive(s: str) -> int:
    v = int(s)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {s}")
    return v


def _nonneg(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {s}")
    return v


# explicit "full" on the command line must still override a preset value
FULL = "full"


def _block(s: str) -> int | str:
    if s.strip().lower() in ("full", "2r", "none"):
        return FULL
    return _positive(s)


def _precision(s: str) -> int | str:
    if s.strip().lower() in ("full", "none"):
        return FULL
    return _positive(s)


def _int_list(s: str) -> list[int]:
    try:
        return [int(v) for v in s.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}")


def _range(s: str) -> tuple[int, int]:
    vals = _int_list(s)
    if len(vals) != 2 or vals[0] > vals[1]:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi' with lo <= hi, got {s!r}")
    return vals[0], vals[1]


def _fraction(s: str) -> Fraction:
    try:
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a decimal number, got {s!r}")


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {s!r}")


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 1
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}") from None


# -- settings resolution ----------------------------------------------------------


def read_config(path: Path) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def resolve(parser: argparse.ArgumentParser, args: argparse.Namespace, defaults: dict) -> dict:
    """Merge defaults, preset, config file and explicit flags into one dict."""
    settings = dict(defaults)
    if args.preset is not None:
        settings.update({k: v for k, v in PRESETS[args.preset].items() if k in defaults})
    if args.config is not None:
        types = {a.dest: a for a in parser._actions}
        for key, raw in read_config(args.config).items():
            if key not in defaults:
                raise UsageError(f"unknown config key {key!r}")
            action = types[key]
            conv: Callable[[str], Any]
            if isinstance(action, argparse._StoreTrueAction):
                conv = _bool
            else:
                conv = action.type or str
            try:
                settings[key] = conv(raw)
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"config key {key!r}: {exc}") from None
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return {k: (None if v == FULL else v) for k, v in settings.items()}


def _code_params(st: dict, r: int) -> CodeParams:
    try:
        return CodeParams(r, st["w"], st["t"], st["lam"], st["delta"], st["i_max"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _coeffs(st: dict) -> ThresholdCoefficients:
    try:
        full = ThresholdCoefficients(st["a"], st["b"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return full if st["k"] is None else quantize(full, st["k"])


def _emit(text: str, path: Optional[Path]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text)


# -- subcommands ------------------------------------------------------------------

DECODER_DEFAULTS = {
    "w": 142, "t": 134, "lam": 128, "delta": 3, "i_max": 7,
    "a": LAYERED_OPTIMAL.a, "b": LAYERED_OPTIMAL.b, "k": 7,
    "block_size": None, "track_weight": False, "trunc_thirds": None,
}


def _add_decoder_options(p: argparse.ArgumentParser, *, with_t: bool = True) -> None:
    p.add_argument("--w", type=_positive, help="row weight w = 2d")
    if with_t:
        p.add_argument("--t", type=_nonneg, help="error weight")
    p.add_argument("--lam", type=_positive, help="security level lambda")
    p.add_argument("--delta", type=_nonneg, help="threshold offset")
    p.add_argument("--i-max", dest="i_max", type=_positive, help="iterations")
    p.add_argument("--a", type=_fraction, help="threshold slope (decimal)")
    p.add_argument("--b", type=_fraction, help="threshold intercept (decimal)")
    p.add_argument("--k", type=_precision, help="retained fractional bits, or 'full'")
    p.add_argument(
        "--block-size", dest="block_size", type=_block,
        help="layer block size B, or 'full' for the 2r iteration snapshot",
    )
    p.add_argument(
        "--track-weight", dest="track_weight", action="store_true", default=None,
        help="update |s| by d - 2*sigma per flip instead of recounting",
    )
    p.add_argument(
        "--trunc-thirds", dest="trunc_thirds", type=_nonneg,
        help="truncate the (2T'+M)/3 and (T'+2M)/3 terms to this many fractional bits",
    )


def _decoder_config(st: dict, r: int) -> DecoderConfig:
    try:
        return DecoderConfig(
            _code_params(st, r), _coeffs(st), st["block_size"], st["track_weight"],
            st["trunc_thirds"],
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_keygen(parser, args) -> int:
    st = resolve(parser, args, {"r": None, "d": None, "w": None, "t": None, "seed": _default_seed()})
    r, d = st["r"], st["d"]
    if d is None and st["w"] is not None:
        d = st["w"] // 2
    if r is None or d is None:
        raise UsageError("keygen needs --r and --d (or --w)")
    if not 0 < d < r:
        raise UsageError(f"need 0 < d < r, got d={d}, r={r}")
    rng = trial_rng(st["seed"], 0)
    key, rejected = keygen_with_retries(r, d, rng)
    text = dump_key(key)
    if st["t"] is not None:
        if st["t"] > 2 * r:
            raise UsageError(f"t must be at most 2r = {2 * r}")
        text += format_indices("e", sample_error(r, st["t"], rng).indices()) + "\n"
    _emit(text, args.out)
    print(f"h0 resamples: {rejected}", file=sys.stderr)
    return 0


def _load_decode_inputs(args) -> tuple[SparseKey, BitVector, Optional[BitVector]]:
    try:
        fixture_text = args.fixture.read_text()
        key_text = args.key.read_text() if args.key is not None else fixture_text
    except OSError as exc:
        raise UsageError(f"cannot read fixture: {exc}") from None
    try:
        key = load_key(key_text)
        fields = parse_fixture(fixture_text)
        if "e" in fields:
            e = BitVector.from_indices(2 * key.r, fields["e"])
            s = syndrome(key, e)
            if "s" in fields and BitVector.from_indices(key.r, fields["s"]) != s:
                raise ValueError("fixture syndrome does not match H e^T")
            return key, s, e
        if "s" in fields:
            return key, BitVector.from_indices(key.r, fields["s"]), None
    except (ValueError, IndexError) as exc:
        raise UsageError(f"malformed fixture: {exc}") from None
    raise UsageError("malformed fixture: needs an 'e:' or 's:' line")


def cmd_decode(parser, args) -> int:
    key, s0, e_true = _load_decode_inputs(args)
    st = resolve(parser, args, dict(DECODER_DEFAULTS, w=key.w, t=e_true.weight if e_true else 0))
    if st["w"] != key.w:
        raise UsageError(f"--w {st['w']} does not match the key weight {key.w}")
    cfg = _decoder_config(st, key.r)
    outcome = decode(key, s0, cfg, record=True)
    header = "iteration,threshold,weight_before,flips,weight_after"
    print(header + (",flipped" if args.show_flips else ""))
    for rec in outcome.trace:
        line = rec.trace_line()
        if args.show_flips:
            line += "," + " ".join(str(j) for j in rec.flipped)
        print(line)
    print(f"converged: {'yes' if outcome.converged else 'no'}")
    failed = not outcome.converged
    if e_true is not None:
        match = outcome.e_est == e_true
        print(f"matches_error: {'yes' if match else 'no'}")
        failed = failed or not match
    if args.out is not None:
        args.out.write_text(format_indices("e", outcome.e_est.indices()) + "\n")
    return 2 if failed else 0


def cmd_dfr(parser, args) -> int:
    defaults = dict(DECODER_DEFAULTS, r_list=None, trials=1000, seed=_default_seed(), workers=1)
    st = resolve(parser, args, defaults)
    if not st["r_list"]:
        raise UsageError("dfr needs --r-list")
    r_list = st["r_list"]
    if r_list != sorted(r_list):
        raise UsageError("--r-list must be ascending")
    cfg = _decoder_config(st, r_list[0])
    try:
        for r in r_list:
            cfg.with_r(r).block_for(r)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = dfr.sweep(cfg, r_list, st["trials"], st["seed"], workers=st["workers"], fit_all=args.fit_all)
    _emit(result.csv(), args.out)
    if args.plot is not None:
        args.plot.write_text(result.plot_data())
        Path(str(args.plot) + ".gp").write_text(
            dfr.gnuplot_script(str(args.plot), result.extrapolation)
        )
    ext = result.extrapolation
    summary = dfr.EXTRAPOLATION_HEADER + "\n"
    summary += (ext.summary_line() if ext else f"nan,nan,nan,{cfg.params.lam}") + "\n"
    _emit(summary, args.summary)
    return 0


def cmd_calibrate(parser, args) -> int:
    defaults = {
        "r_prime": None, "w": 142, "t": 134, "samples": calibration.DEFAULT_SAMPLES,
        "t_range": calibration.DEFAULT_RANGE, "block_size": 1, "seed": _default_seed(),
        "workers": 1,
    }
    st = resolve(parser, args, defaults)
    if st["r_prime"] is None:
        raise UsageError("calibrate needs --r-prime")
    params = CodeParams(st["r_prime"], st["w"], st["t"])
    try:
        fit, samples = calibration.calibrate(
            st["r_prime"], params, st["samples"], st["seed"],
            block_size=st["block_size"], t_range=st["t_range"], workers=st["workers"],
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.out is not None:
        args.out.write_text(calibration.samples_csv(samples))
    if args.plot is not None:
        args.plot.write_text(calibration.plot_data(samples, fit))
        Path(str(args.plot) + ".gp").write_text(calibration.GNUPLOT_SCRIPT.format(data=args.plot))
    summary = "r_prime,a,b,n\n" + fit.summary_line() + "\n"
    _emit(summary, args.summary)
    return 0


def cmd_quantize(parser, args) -> int:
    st = resolve(parser, args, {"a": LAYERED_OPTIMAL.a, "b": LAYERED_OPTIMAL.b, "k": 7})
    if st["k"] is None:
        raise UsageError("quantize needs a bit budget --k")
    full = ThresholdCoefficients(st["a"], st["b"])
    rows = quantization_report(full, st["k"])
    print("precision,coeff,binary,decimal")
    for row in rows:
        print(f"{row['precision']},{row['coeff']},{row['binary']},{row['decimal']}")
    return 0


def cmd_cost(parser, args) -> int:
    st = resolve(
        parser, args,
        {"r": None, "w": 142, "L": DEFAULT_LAYER_SIZE, "layered": True, "logic_xors": None, "iterations": 1},
    )
    if st["r"] is None:
        raise UsageError("cost needs --r")
    try:
        report = cost.cost_report(
            st["r"], st["w"], st["L"], st["layered"], st["logic_xors"], st["iterations"]
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    sys.stdout.write(report.table())
    return 0


def _read_points(args) -> list[tuple[int, float]]:
    if args.csv is not None:
        try:
            lines = args.csv.read_text().splitlines()
        except OSError as exc:
            raise UsageError(f"cannot read {args.csv}: {exc}") from None
        header = lines[0].split(",")
        try:
            ri, di = header.index("r"), header.index("dfr")
            return [(int(c[ri]), float(c[di])) for c in (ln.split(",") for ln in lines[1:] if ln)]
        except (ValueError, IndexError):
            raise UsageError(f"{args.csv}: expected columns 'r' and 'dfr'") from None
    if args.points:
        pts = []
        for item in args.points.split(","):
            r, sep, p = item.partition(":")
            if not sep:
                raise UsageError(f"expected r:dfr pairs, got {item!r}")
            pts.append((int(r), float(Fraction(p))))
        return pts
    raise UsageError("extrapolate needs --points or --csv")


def cmd_extrapolate(parser, args) -> int:
    st = resolve(parser, args, {"lam": 128})
    try:
        ext = dfr.extrapolate(_read_points(args), st["lam"], fit_all=args.fit_all)
    except dfr.ExtrapolationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(dfr.EXTRAPOLATION_HEADER)
    print(ext.summary_line())
    return 0


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bikebf", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, fn, help_: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", type=Path, help="flat key = value settings file")
        p.add_argument("--preset", choices=sorted(PRESETS), help="named parameter set")
        p.set_defaults(func=fn, subparser=p)
        return p

    p = add("keygen", cmd_keygen, "sample a private key (and optionally an error vector)")
    p.add_argument("--r", type=_positive)
    p.add_argument("--d", type=_positive, help="column weight d = w/2")
    p.add_argument("--w", type=_positive)
    p.add_argument("--t", type=_nonneg, help="also sample a weight-t error vector")
    p.add_argument("--seed", type=_nonneg)
    p.add_argument("--out", type=Path, help="key fixture path (default stdout)")

    p = add("decode", cmd_decode, "decode a fixture and print the iteration trace")
    p.add_argument("--key", type=Path, help="key fixture (default: read from --fixture)")
    p.add_argument("--fixture", type=Path, required=True, help="file with an 'e:' or 's:' line")
    _add_decoder_options(p, with_t=False)
    p.add_argument("--show-flips", action="store_true", help="list flipped columns per iteration")
    p.add_argument("--out", type=Path, help="write the estimated error vector here")

    p = add("dfr", cmd_dfr, "Monte Carlo decoding failure rate over a list of r")
    p.add_argument("--r-list", dest="r_list", type=_int_list, help="ascending r values, comma separated")
    p.add_argument("--trials", type=_positive, help="trials per r")
    _add_decoder_options(p)
    p.add_argument("--seed", type=_nonneg)
    p.add_argument("--workers", type=_positive)
    p.add_argument("--fit-all", action="store_true", help="fit every point instead of the two lowest")
    p.add_argument("--out", type=Path, help="CSV path (default stdout)")
    p.add_argument("--summary", type=Path, help="extrapolation summary path")
    p.add_argument("--plot", type=Path, help="plot-data path; a gnuplot script goes to PATH.gp")

    p = add("calibrate", cmd_calibrate, "fit threshold coefficients from first-iteration searches")
    p.add_argument("--r-prime", dest="r_prime", type=_positive)
    p.add_argument("--w", type=_positive)
    p.add_argument("--t", type=_nonneg)
    p.add_argument("--samples", type=_positive)
    p.add_argument("--range", dest="t_range", type=_range, help="candidate thresholds 'lo,hi'")
    p.add_argument("--block-size", dest="block_size", type=_block)
    p.add_argument("--seed", type=_nonneg)
    p.add_argument("--workers", type=_positive)
    p.add_argument("--out", type=Path, help="samples CSV path")
    p.add_argument("--summary", type=Path, help="fit summary path (default stdout)")
    p.add_argument("--plot", type=Path, help="plot-data path; a gnuplot script goes to PATH.gp")

    p = add("quantize", cmd_quantize, "truncate threshold coefficients to k fractional bits")
    p.add_argument("--a", type=_fraction)
    p.add_argument("--b", type=_fraction)
    p.add_argument("--k", type=_precision)

    p = add("cost", cmd_cost, "memory, area and latency of the L-parallel decoder")
    p.add_argument("--r", type=_positive)
    p.add_argument("--w", type=_positive)
    p.add_argument("--L", type=_positive, help="parallelism")
    p.add_argument("--layered", dest="layered", action="store_true", default=None)
    p.add_argument("--non-layered", dest="layered", action="store_false", default=None)
    p.add_argument("--logic-xors", dest="logic_xors", type=_nonneg, help="logic gate count override")
    p.add_argument("--iterations", type=_positive, help="multiply latency by this iteration count")

    p = add("extrapolate", cmd_extrapolate, "extrapolate log2 DFR to 2^-lambda")
    p.add_argument("--points", help="r:dfr pairs, comma separated (dfr may be a fraction like 1/1024)")
    p.add_argument("--csv", type=Path, help="CSV with 'r' and 'dfr' columns, e.g. dfr output")
    p.add_argument("--lam", type=_positive)
    p.add_argument("--fit-all", action="store_true")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args.subparser, args)
    except UsageError as exc:
        print(f"bikebf {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except KeygenError as exc:
        print(f"bikebf {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"bikebf {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
