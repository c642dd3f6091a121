"""Command-line front end.

Subcommands: ``simulate``, ``fit``, ``diagnose``, ``compare`` and ``oracle``.
Every run reports a manifest (subcommand, resolved parameters, seed, version,
wall-clock duration, input digests) as ``key = value`` lines.

Exit codes: 0 success, 1 usage error, 2 data validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .datasets import PRESETS, preset
from .diagnostics import acf, difference_region_test, summarize
from .errors import DataValidationError, NumericalFailure
from .inference import ChainConfig, PriorSpec, run_exchange
from .io import file_digest, format_kv, read_chain, read_data, write_chain, write_data
from .model import LambdaVector, SufficientStats, sufficient_stats
from .oracle import QuadratureGrid, constant_quadrature, moments_quadrature
from .rng import RngState
from .samplers import bingham_sample_n, tune_b

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

BURNIN_NOTE = "default burn-in is 10% of iterations; the method prescribes none"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _manifest(cmd: str, params: dict, seed, t0: float, inputs: Sequence[Path] = ()) -> dict:
    out = {"manifest.subcommand": cmd, "manifest.version": __version__}
    for k, v in params.items():
        out[f"manifest.{k}"] = v
    if seed is not None:
        out["manifest.seed"] = seed
    for p in inputs:
        out[f"manifest.sha256.{Path(p).name}"] = file_digest(p)
    out["duration.seconds"] = time.perf_counter() - t0
    return out


def _resolve_b(args, lam: Optional[LambdaVector] = None):
    if args.tune_b:
        return "auto" if lam is None else tune_b(lam)
    return args.b


def cmd_simulate(args) -> int:
    t0 = time.perf_counter()
    try:
        lam = LambdaVector(tuple(args.lam))
    except DataValidationError as exc:
        raise UsageError(str(exc)) from None
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    b = _resolve_b(args, lam)
    x = bingham_sample_n(lam, args.n, b, RngState(args.seed))
    write_data(args.out, x)
    stats = sufficient_stats(x)
    out = {"n": stats.n}
    for i, t in enumerate(stats.taus):
        out[f"tau{i + 1}"] = t
    params = {"lambda": lam.lambdas, "n": args.n, "b": b, "tune_b": args.tune_b, "out": args.out}
    out.update(_manifest("simulate", params, args.seed, t0))
    sys.stdout.write(format_kv(out))
    return EXIT_OK


def _load_stats(args) -> tuple[SufficientStats, list[Path]]:
    if args.data is not None:
        return sufficient_stats(read_data(args.data)), [Path(args.data)]
    if args.preset is not None:
        try:
            return preset(args.preset), []
        except KeyError as exc:
            raise UsageError(str(exc)) from None
    vals = args.suff
    if len(vals) < 2 or vals[0] != int(vals[0]):
        raise DataValidationError("--suff expects n,tau1,...,tau(q-1) with integer n")
    return SufficientStats(int(vals[0]), tuple(vals[1:])), []


def cmd_fit(args) -> int:
    t0 = time.perf_counter()
    stats, inputs = _load_stats(args)
    d = stats.q - 1
    rates = args.prior_rate if args.prior_rate is not None else [0.01] * d
    if len(rates) == 1 and d > 1:
        rates = rates * d
    if len(rates) != d:
        raise UsageError(f"--prior-rate needs {d} values")
    prior = PriorSpec(tuple(rates))
    if args.sigma <= 0:
        raise DataValidationError(f"--sigma must be positive, got {args.sigma}")
    cfg = ChainConfig(
        iterations=args.iters,
        burn_in=args.burnin,
        thin=args.thin,
        proposal_sigma=args.sigma,
        b=_resolve_b(args),
        seed=args.seed,
        init=tuple(args.init) if args.init else None,
    )
    chain = run_exchange(stats, prior, cfg)
    if args.out_chain:
        write_chain(args.out_chain, chain.draws)
    report = summarize(chain, args.level)

    out = {"n": stats.n}
    for i, t in enumerate(stats.taus):
        out[f"tau{i + 1}"] = t
    out.update(report.as_dict())
    out.update({
        "accept.count": chain.accept_count,
        "proposed.count": chain.proposed_count,
        "prior_reject.count": chain.prior_reject_count,
        "sampler.candidates": chain.candidate_count,
        "seed": cfg.seed,
        "iters": cfg.iterations,
        "thin": cfg.thin,
        "burnin": cfg.burn_in,
        "sigma": cfg.proposal_sigma,
        "b": cfg.b,
        "prior.rate": prior.rates,
    })
    if args.burnin is None:
        out["burnin.note"] = BURNIN_NOTE
    out["chain.seconds"] = chain.duration
    params = {"source": args.data or args.preset or "suff", "level": args.level,
              "init": cfg.init if cfg.init is not None else "origin"}
    out.update(_manifest("fit", params, cfg.seed, t0, inputs))
    text = format_kv(out)
    if args.out_summary:
        Path(args.out_summary).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_diagnose(args) -> int:
    t0 = time.perf_counter()
    draws = read_chain(args.chain)
    if draws.shape[0] <= args.max_lag:
        raise DataValidationError(
            f"chain has {draws.shape[0]} draws; need more than --max-lag {args.max_lag}"
        )
    table = np.column_stack(
        [np.arange(args.max_lag + 1)] + [acf(draws[:, j], args.max_lag) for j in range(draws.shape[1])]
    )
    header = ",".join(["lag"] + [f"lambda{j + 1}" for j in range(draws.shape[1])])
    lines = [header] + [
        ",".join([str(int(row[0]))] + [repr(float(v)) for v in row[1:]]) for row in table
    ]
    text = "\n".join(lines) + "\n"
    manifest = format_kv(_manifest("diagnose", {"max_lag": args.max_lag}, None, t0, [Path(args.chain)]))
    if args.out:
        Path(args.out).write_text(text)
        sys.stdout.write(manifest)
    else:
        sys.stdout.write(text)
        sys.stderr.write(manifest)
    return EXIT_OK


def cmd_compare(args) -> int:
    t0 = time.perf_counter()
    a, b = read_chain(args.chain_a), read_chain(args.chain_b)
    res = difference_region_test(a, b, args.level)
    out = {
        "mean.diff": res.mean_diff,
        "cov.diff": res.cov_diff.ravel(),
        "pairs": res.n_pairs,
        "mahalanobis.sq": res.mahalanobis_sq_origin,
        "threshold": res.threshold,
        "level": res.level,
        "origin.inside": res.origin_inside,
        "verdict": "no evidence of a difference" if res.origin_inside else "origin outside region: populations differ",
    }
    out.update(_manifest("compare", {"level": args.level}, None, t0,
                         [Path(args.chain_a), Path(args.chain_b)]))
    sys.stdout.write(format_kv(out))
    return EXIT_OK


def cmd_oracle(args) -> int:
    t0 = time.perf_counter()
    lam = LambdaVector(tuple(args.lam))
    g = args.grid
    grid = QuadratureGrid(n_theta=g[0], n_phi=g[1], n_angle=g[1]) if g else QuadratureGrid()
    out = {"c": constant_quadrature(lam, grid), "moments": moments_quadrature(lam, grid)}
    out.update(_manifest("oracle", {"lambda": lam.lambdas}, None, t0))
    sys.stdout.write(format_kv(out))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bingham-exchange", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def b_options(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--b", type=float, default=1.0, help="envelope tuning constant (default 1)")
        g.add_argument("--tune-b", action="store_true", help="tune b to minimise expected rejection trials")

    s = sub.add_parser("simulate", help="draw exact Bingham samples")
    s.add_argument("--lambda", dest="lam", type=_floats, required=True, help="l1,...,l(q-1), descending")
    s.add_argument("--n", type=int, required=True)
    b_options(s)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True, help="output CSV of unit vectors")
    s.set_defaults(func=cmd_simulate)

    f = sub.add_parser("fit", help="run the exchange MCMC")
    src = f.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", help="CSV of unit vectors")
    src.add_argument("--suff", type=_floats, help="n,tau1,...,tau(q-1)")
    src.add_argument("--preset", help=f"named summary data: {', '.join(PRESETS)}")
    f.add_argument("--prior-rate", type=_floats, default=None, help="exponential rates (default 0.01 each)")
    f.add_argument("--sigma", type=float, default=1.0, help="proposal variance per coordinate")
    f.add_argument("--iters", type=int, default=10**6)
    f.add_argument("--thin", type=int, default=10)
    f.add_argument("--burnin", type=int, default=None, help="default: iters/10")
    b_options(f)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--init", type=_floats, default=None, help="starting lambda (default origin)")
    f.add_argument("--level", type=float, default=0.95, help="credible level")
    f.add_argument("--out-chain")
    f.add_argument("--out-summary")
    f.set_defaults(func=cmd_fit)

    d = sub.add_parser("diagnose", help="autocorrelation table for a chain CSV")
    d.add_argument("--chain", required=True)
    d.add_argument("--max-lag", type=int, default=50)
    d.add_argument("--out")
    d.set_defaults(func=cmd_diagnose)

    c = sub.add_parser("compare", help="bivariate-normal region test on posterior differences")
    c.add_argument("--chain-a", required=True)
    c.add_argument("--chain-b", required=True)
    c.add_argument("--level", type=float, default=0.95)
    c.set_defaults(func=cmd_compare)

    o = sub.add_parser("oracle", help="quadrature normalising constant and moments (q = 2, 3)")
    o.add_argument("--lambda", dest="lam", type=_floats, required=True)
    o.add_argument("--grid", type=lambda t: [int(v) for v in t.split(",")], default=None,
                   help="n_theta,n_phi (q=2 uses n_phi as the angle count)")
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataValidationError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
