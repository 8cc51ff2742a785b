"""Command line interface: ``dtnoise <command> [options]``.

Options may also come from a UTF-8 ``key = value`` file given with
``--config``; command-line flags win over the file, and the file wins over
the ``DTNOISE_SEED`` environment variable.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import report
from .covariance import NoiseModel, coarse_limit, cov_1d, load_noise_table
from .errors import DTNoiseError, InvalidParam, UsageError
from .simulate import SimConfig, retained_energy
from .spectra import load_filter_file
from .xcorr import gamma_provider

log = logging.getLogger("dtnoise")

EXIT_OK, EXIT_ACCEPTANCE, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3
_NEG_OPTS = ("--lags", "--phase-slopes", "--phase-offsets")


def parse_lags(text):
    """``a..b`` (inclusive), ``a..b:step`` or a comma list."""
    text = str(text).strip()
    try:
        if ".." in text:
            rng, _, step = text.partition(":")
            a, b = rng.split("..")
            step = int(step) if step else 1
            return list(range(int(a), int(b) + (1 if step > 0 else -1), step))
        return [float(t) if "." in t else int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad lag list {text!r}") from None


def parse_floats(text):
    try:
        return tuple(float(t) for t in str(text).split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def parse_phase(text):
    return "orthonormal" if str(text).strip() == "orthonormal" else parse_floats(text)


def read_config(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise InvalidParam(f"{path}:{n}: expected 'key = value'")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _family_args(p):
    g = p.add_argument_group("family")
    g.add_argument("--family", default="shannon",
                   help="shannon, meyer, haar, franklin, battle_lemarie, splinesP, custom")
    g.add_argument("--M", type=int, default=2, help="number of bands")
    g.add_argument("--eps", type=float, default=None, help="Meyer taper width")
    g.add_argument("--order", type=int, default=None, help="spline order")
    g.add_argument("--filters", default=None, help="filter file for the custom family")
    g.add_argument("--phase-slopes", type=parse_phase, default=None,
                   help="Meyer linear phase slope per band, comma separated, "
                        "or 'orthonormal'")
    g.add_argument("--phase-offsets", type=parse_floats, default=None,
                   help="Meyer phase offset per band (needs --phase-slopes)")
    g.add_argument("--d", type=int, default=0, help="dual scaling delay")


def _noise_args(p):
    g = p.add_argument_group("noise")
    g.add_argument("--noise", default="white", choices=("white", "exponential", "table"))
    g.add_argument("--sigma2", type=float, default=1.0)
    g.add_argument("--A", type=float, default=1.0)
    g.add_argument("--alpha", type=float, default=1.0)
    g.add_argument("--noise-table", default=None, help="tau,gamma_n CSV")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--config", default=None, help="key = value option file")
    common.add_argument("--seed", type=int, default=None,
                        help="base seed (default: $DTNOISE_SEED or 0)")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="dtnoise", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("xcorr", parents=[common], help="basis cross-correlations")
    _family_args(p)
    p.add_argument("--m", type=int, default=None, help="band (default: all)")
    p.add_argument("--mprime", type=int, default=None, help="dual band (default: same as m)")
    p.add_argument("--lags", type=parse_lags, default=parse_lags("-3..3"))
    p.add_argument("--method", default="auto",
                   choices=("auto", "closed", "quad", "recursion"))

    p = sub.add_parser("table", parents=[common], help="published tables with deltas")
    p.add_argument("table_id", help=", ".join(report.TABLE_IDS))

    p = sub.add_parser("cov", parents=[common], help="coefficient covariance sequences")
    _family_args(p)
    _noise_args(p)
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--mprime", type=int, default=None)
    p.add_argument("--kind", default="primal_dual",
                   choices=("primal_dual", "primal_primal", "dual_dual"))
    p.add_argument("--lags", type=parse_lags, default=parse_lags("-3..3"))
    p.add_argument("--limit", action="store_true", help="add the coarse-resolution limit")

    p = sub.add_parser("mc", parents=[common], help="Monte Carlo estimates vs theory")
    _family_args(p)
    _noise_args(p)
    p.add_argument("--J", type=int, default=3)
    p.add_argument("--L", type=int, default=2 ** 14)
    p.add_argument("--R", type=int, default=16)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--lags", type=parse_lags, default=parse_lags("0..3"))
    p.add_argument("--kinds", default="primal_dual",
                   help="comma list of primal_dual, primal_primal, dual_dual")
    p.add_argument("--pairs", default="diagonal", choices=("diagonal", "all"))
    p.add_argument("--boundary", default="periodic", choices=("periodic", "discard"))

    p = sub.add_parser("field2d", parents=[common], help="2D covariance fields and mosaics")
    _family_args(p)
    p.add_argument("--J", type=int, default=2)
    p.add_argument("--L", type=int, default=256)
    p.add_argument("--runs", type=int, default=100)
    p.add_argument("--lags", type=parse_lags, default=parse_lags("0..3"))
    p.add_argument("--post", action="store_true", help="also estimate the post-transform")

    sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    return parser


_BOOL = {"limit", "post", "verbose"}


def _preprocess(argv):
    # let "--lags -3..3" through argparse's negative-number heuristics
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _NEG_OPTS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def parse_args(argv=None):
    argv = _preprocess(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if known.config and known.command:
        cfg = read_config(known.config)
        subp = parser._subparsers._group_actions[0].choices.get(known.command)
        if subp is not None:
            dests = {a.dest for a in subp._actions}
            unknown = set(cfg) - dests
            if unknown:
                raise InvalidParam(f"unknown config keys: {', '.join(sorted(unknown))}")
            for k in _BOOL & set(cfg):
                cfg[k] = cfg[k].lower() in ("1", "true", "yes", "on")
            subp.set_defaults(**cfg)
    args = parser.parse_args(argv)
    if args.seed is None:
        env = os.environ.get("DTNOISE_SEED")
        try:
            args.seed = int(env) if env else 0
        except ValueError:
            raise InvalidParam(f"DTNOISE_SEED must be an integer, got {env!r}") from None
    return args


def _family(args):
    filters = load_filter_file(args.filters) if args.filters else None
    return report.make_family(args.family, args.M, args.eps, args.order, filters,
                              args.phase_slopes, args.phase_offsets)


def _noise(args):
    if args.noise == "white":
        return NoiseModel.white(args.sigma2)
    if args.noise == "exponential":
        return NoiseModel.exponential(args.A, args.alpha)
    if not args.noise_table:
        raise InvalidParam("--noise table needs --noise-table PATH")
    return load_noise_table(args.noise_table)


def _bands(args, M):
    if args.m is None:
        return [(m, m) for m in range(M)]
    return [(args.m, args.m if args.mprime is None else args.mprime)]


_METHODS = {"auto": "auto", "closed": "closed_form", "quad": "quadrature",
            "recursion": "packet_recursion"}


def cmd_xcorr(args):
    fam = _family(args)
    rows = report.xcorr_rows(fam, _bands(args, fam.M), args.lags, _METHODS[args.method], args.d)
    path = report.write_csv(Path(args.out) / "xcorr.csv", report.XCORR_HEADER, rows)
    print(path)
    return EXIT_OK


def cmd_table(args):
    header, rows = report.build_table(args.table_id)
    path = report.write_csv(Path(args.out) / f"table_{args.table_id}.csv", header, rows)
    dmax = max(abs(r[-1]) for r in rows)
    print(f"{path}  ({len(rows)} rows, max|delta| {dmax:.3e})")
    return EXIT_OK


def cmd_cov(args):
    fam = _family(args)
    noise = _noise(args)
    lags = np.asarray(args.lags, dtype=int)
    rows = []
    header = ["j", "m", "mprime", "kind", "lag", "cov", "abs_err"]
    if args.limit:
        header.append("coarse_limit")
    for m, mp in _bands(args, fam.M):
        prov = gamma_provider(fam, m, mp, args.d)
        seq = cov_1d(noise, prov, args.j, m, mp, lags, args.kind, fam.M)
        err = np.broadcast_to(np.asarray(seq.abs_err, dtype=float), lags.shape)
        lim = coarse_limit(noise, prov, m, mp, lags) if args.limit else None
        for i, lag in enumerate(lags):
            row = [args.j, m, mp, args.kind, int(lag), seq.values[i], err[i]]
            if args.limit:
                row.append(lim[i])
            rows.append(row)
    path = report.write_csv(Path(args.out) / "cov.csv", header, rows)
    print(path)
    return EXIT_OK


def cmd_mc(args):
    fam = _family(args)
    noise = _noise(args)
    cfg = SimConfig(fam, J=args.J, L=args.L, R=args.R, runs=args.runs, base_seed=args.seed,
                    d=args.d, boundary=args.boundary)
    kinds = tuple(k.strip() for k in args.kinds.split(","))
    rows, frac = report.mc_compare(cfg, noise, args.lags, kinds, args.pairs, args.workers)
    out = Path(args.out)
    path = report.write_csv(out / "mc.csv", report.MC_HEADER, rows)
    energy = retained_energy(cfg)
    meta = {"family": fam.label, "J": cfg.J, "L": cfg.L_eff, "R": cfg.R, "dx": cfg.dx,
            "runs": cfg.runs, "base_seed": cfg.base_seed, "boundary": cfg.boundary,
            "estimator": "biased (divided by the coefficient count)",
            "frac_abs_z_le_3": frac,
            "retained_energy": {f"{j},{m}": e for (j, m), e in sorted(energy.items())}}
    (out / "mc_meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    print(f"{path}  fraction |z| <= 3: {frac:.4f}")
    return EXIT_OK


def cmd_field2d(args):
    fam = _family(args)
    res = report.field2d_compare(fam, NoiseModel.white(1.0), runs=args.runs, seed=args.seed,
                                 L=args.L, J=args.J, lags=args.lags, post_transform=args.post,
                                 workers=args.workers)
    out = Path(args.out)
    path = report.write_csv(out / "field2d.csv", report.FIELD2D_HEADER, res.rows())
    n = len(res.lags)
    report.write_pgm(out / "field2d_theory.pgm", report.mosaic(res.theory, fam.M, n))
    report.write_pgm(out / "field2d_mc.pgm", report.mosaic(res.mc, fam.M, n))
    if res.post:
        rows = []
        for (mm, kind), (th, mean, se) in sorted(res.post.items()):
            for a, l1 in enumerate(res.lags):
                for b, l2 in enumerate(res.lags):
                    rows.append([mm[0], mm[1], kind, int(l1), int(l2), th[a, b], mean[a, b],
                                 se[a, b]])
        report.write_csv(out / "field2d_post.csv",
                         ["m1", "m2", "kind", "l1", "l2", "gamma_theory", "gamma_mc", "stderr"],
                         rows)
    print(f"{path}  fraction |z| <= 3: {res.frac_within():.4f}")
    return EXIT_OK


def cmd_verify(args):
    ok = True
    lines = []
    for c in report.acceptance_suite(args.seed):
        line = f"[{'PASS' if c.passed else 'FAIL'}] {c.number}. {c.name}: {c.detail}"
        print(line, flush=True)
        lines.append(line)
        ok &= c.passed
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "verify.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return EXIT_OK if ok else EXIT_ACCEPTANCE


COMMANDS = {"xcorr": cmd_xcorr, "table": cmd_table, "cov": cmd_cov, "mc": cmd_mc,
            "field2d": cmd_field2d, "verify": cmd_verify}


def main(argv=None):
    try:
        args = parse_args(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    except (UsageError, OSError) as exc:
        print(f"dtnoise: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"dtnoise: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"dtnoise: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DTNoiseError, ArithmeticError) as exc:
        print(f"dtnoise: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
