"""Command-line front end (``jmesrisk <subcommand>``).

Exit codes: 0 success, 1 when ``mc-validate`` finds a disagreement,
2 on invalid input or configuration, 3 on numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings

import numpy as np

from . import orders
from .copulas import FAMILIES, aic_table, make_copula, pseudo_observations, read_pseudo_csv
from .distributions import Gamma, Gpd, LogNormal, Normal, ShiftScale, StudentT
from .errors import DomainError, JmesError, UnknownFigure
from .measures import BivariateModel
from .oracle import compare_with_quadrature
from .pipeline import (
    FIGURE_IDS,
    PipelineConfig,
    align_pair,
    emit_figures,
    load_config,
    read_series,
    run_pipeline,
    write_report,
)
from .pot import build_semiparametric, log_losses

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

_MARGINALS = {
    "normal": Normal,
    "lognormal": LogNormal,
    "t": lambda nu, loc=0.0, scale=1.0: ShiftScale(StudentT(nu), loc, scale),
    "gamma": Gamma,
    "gpd": Gpd,
}
_MARGINAL_RELATIONS = {"st": orders.check_st, "icx": orders.check_icx, "disp": orders.check_disp,
                       "epw": orders.check_epw, "lr": orders.check_lr}
_COPULA_RELATIONS = {"si": orders.check_si, "rti": orders.check_rti, "tp2": orders.check_tp2_tail,
                     "symmetry": orders.check_symmetry}


def parse_model(text: str):
    """Parse ``family:p1,p2`` into a marginal or a copula."""
    name, _, args = text.partition(":")
    name = name.strip().lower()
    try:
        params = [float(a) for a in args.split(",")] if args.strip() else []
    except ValueError:
        raise DomainError(f"bad parameters in {text!r}") from None
    if name in _MARGINALS:
        try:
            return _MARGINALS[name](*params)
        except TypeError as exc:
            raise DomainError(f"{text!r}: {exc}") from None
    if name in FAMILIES or name == "t_copula":
        return make_copula("student_t" if name == "t_copula" else name, *params)
    raise DomainError(f"unknown model {name!r}")


def _config(args) -> PipelineConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else PipelineConfig()
    return cfg.replace(
        alphas=tuple(args.alpha) if getattr(args, "alpha", None) else None,
        betas=tuple(args.beta) if getattr(args, "beta", None) else None,
        tail_frac=getattr(args, "tail_frac", None),
        seed=getattr(args, "seed", None),
        output_dir=getattr(args, "out", None),
        mc_n=getattr(args, "n", None),
    )


def cmd_report(args):
    cfg = _config(args)
    if not cfg.pairs:
        raise DomainError("the configuration lists no pairs")
    results = run_pipeline(cfg)
    csv_path, json_path = write_report(cfg, results)
    for r in results:
        if not r.ok:
            print(f"pair {r.name}: {r.error}", file=sys.stderr)
    with open(csv_path) as fh:
        sys.stdout.write(fh.read())
    print(f"wrote {csv_path} and {json_path}", file=sys.stderr)
    return EXIT_OK if any(r.ok for r in results) else EXIT_NUMERIC


def cmd_figures(args):
    cfg = _config(args)
    ids = args.ids or list(FIGURE_IDS)
    for path in emit_figures(ids, cfg.output_dir).values():
        print(path)
    return EXIT_OK


def _losses(path):
    s = read_series(path)
    return log_losses(s.values) if s.kind == "prices" else s.values


def cmd_fit_marginal(args):
    cfg = _config(args)
    m = build_semiparametric(_losses(args.file), cfg.tail_frac)
    out = {
        "n": m.n, "tail_frac": cfg.tail_frac, "u_lower": m.u_l, "u_upper": m.u_r,
        "lower": {"xi": m.lower.xi, "scale": m.lower.scale, "n_exceed": m.lower.n_exceed,
                  "loglik": m.lower.loglik},
        "upper": {"xi": m.upper.xi, "scale": m.upper.scale, "n_exceed": m.upper.n_exceed,
                  "loglik": m.upper.loglik},
    }
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_fit_copula(args):
    cfg = _config(args)
    if len(args.files) == 1:
        u, v = read_pseudo_csv(args.files[0])
    elif len(args.files) == 2:
        x, y, _ = align_pair(read_series(args.files[0]), read_series(args.files[1]), args.lag_x)
        u, v = pseudo_observations(x, y)
    else:
        raise DomainError("give one 'u,v' file or two series files")
    candidates = args.candidates.split(",") if args.candidates else cfg.copula_candidates
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        rows = aic_table(candidates, u, v)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["family", "params", "loglik", "aic"])
    for r in rows:
        w.writerow([r["family"], " ".join(repr(float(p)) for p in r["copula"].params),
                    repr(r["loglik"]), repr(r["aic"])])
    return EXIT_OK


def cmd_check_order(args):
    rel = args.relation.lower()
    models = [parse_model(m) for m in args.models]
    if rel in _MARGINAL_RELATIONS:
        if len(models) != 2:
            raise DomainError(f"{rel} needs two marginals")
        res = _MARGINAL_RELATIONS[rel](*models)
    elif rel in _COPULA_RELATIONS:
        if len(models) != 1:
            raise DomainError(f"{rel} needs one copula")
        res = _COPULA_RELATIONS[rel](models[0])
    elif rel == "l_alpha":
        if len(models) != 2 or args.alpha is None or args.beta is None:
            raise DomainError("l_alpha needs two copulas plus --alpha and --beta")
        res = orders.check_l_alpha(models[0], models[1], args.alpha[0], args.beta[0])
    else:
        raise DomainError(f"unknown relation {args.relation!r}")
    if args.json:
        print(res.to_json(indent=2))
    else:
        print(res.verdict)
        if res.witnesses:
            print("witness: " + json.dumps(res.witnesses[0], sort_keys=True))
    return EXIT_OK


def default_validation_models():
    """Copula x margin matrix used by ``mc-validate`` when no config is given."""
    cops = [make_copula("gumbel", 3.0), make_copula("gaussian", 0.6), make_copula("student_t", 0.5, 4.0)]
    margins = [Gamma(2.0, 2.5), LogNormal(0.0, 0.5), Gpd(0.2, 1.0, 0.0)]
    return [(c, m) for c in cops for m in margins]


VALIDATION_LEVELS = ((0.95, 0.9), (0.9, 0.95), (0.95, 0.95), (0.7, 0.8))


def cmd_mc_validate(args):
    cfg = _config(args)
    n = cfg.mc_n if (args.n or args.config) else 2_000_000
    seed = cfg.seed
    levels = [(a, b) for a in cfg.alphas for b in cfg.betas] if (args.alpha or args.config) \
        else VALIDATION_LEVELS
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["copula", "margin", "alpha", "beta", "measure", "quadrature", "mc", "se", "z", "ok"])
    all_ok = True
    for i, (cop, m) in enumerate(default_validation_models()):
        b = BivariateModel(Normal(), m, cop)
        for j, (a, be) in enumerate(levels):
            rows = compare_with_quadrature(b, a, be, n=n, seed=seed + 1000 * i + j, k=args.k)
            for r in rows:
                all_ok &= bool(r["ok"])
                w.writerow([repr(cop), repr(m), a, be, r["measure"], repr(r["quadrature"]),
                            repr(r["mc"]), repr(r["se"]), f"{r['z']:.3f}", "pass" if r["ok"] else "FAIL"])
    print("all pass" if all_ok else "some comparisons FAILED", file=sys.stderr)
    return EXIT_OK if all_ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jmesrisk", description="Joint marginal expected shortfall toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, levels=True):
        sp.add_argument("--config", help="TOML configuration file")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--tail-frac", type=float, dest="tail_frac")
        if levels:
            sp.add_argument("--alpha", type=float, action="append", help="repeatable")
            sp.add_argument("--beta", type=float, action="append", help="repeatable")
        return sp

    sp = common(sub.add_parser("report", help="risk table for the configured pairs"))
    sp.set_defaults(func=cmd_report)

    sp = common(sub.add_parser("figures", help="write figure data CSVs"), levels=False)
    sp.add_argument("ids", nargs="*", help=f"subset of {', '.join(FIGURE_IDS)}")
    sp.set_defaults(func=cmd_figures)

    sp = common(sub.add_parser("fit-marginal", help="semiparametric GPD-tail fit of one series"),
                levels=False)
    sp.add_argument("file")
    sp.set_defaults(func=cmd_fit_marginal)

    sp = common(sub.add_parser("fit-copula", help="AIC table of copula fits"), levels=False)
    sp.add_argument("files", nargs="+", help="a 'u,v' CSV, or x and y series files")
    sp.add_argument("--candidates", help="comma-separated families")
    sp.add_argument("--lag-x", type=int, default=0, choices=(0, 1), dest="lag_x")
    sp.set_defaults(func=cmd_fit_copula)

    sp = sub.add_parser("check-order", help="stochastic order or dependence check")
    sp.add_argument("relation", help="st, icx, disp, epw, lr, si, rti, tp2, symmetry or l_alpha")
    sp.add_argument("models", nargs="+", help="e.g. gamma:3,1.5 or gumbel:2")
    sp.add_argument("--alpha", type=float, action="append")
    sp.add_argument("--beta", type=float, action="append")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_check_order)

    sp = common(sub.add_parser("mc-validate", help="quadrature against Monte Carlo"))
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=float, default=3.0, help="tolerance in standard errors")
    sp.set_defaults(func=cmd_mc_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnknownFigure as exc:
        print(f"error: unknown figure {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (JmesError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
