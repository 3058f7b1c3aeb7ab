"""Command-line front end.

    onbase run --alg hide-and-seek --model correlated --n 500 --m 10 --trials 1000 --seed 7
    onbase worst-case --alg round-robin --adversary identical-geometric:beta=100 --n 20 --m 4
    onbase analytic bound-two-bs --alpha 0.22 --dmax 10
    onbase figures ksec --out ksec.csv
    onbase gen --adversary identical-geometric --beta 10 --n 5 --m 2 --l 5

Exit status: 0 success, 2 configuration error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import analytics
from .adversaries import FAMILY_KINDS, MODEL_KINDS, RandomModel, parse_adversary, sample_random_model
from .errors import ConfigError
from .harness import (
    BASELINES,
    FIGURE_NS,
    FIGURES,
    ExperimentConfig,
    config_dict,
    default_threads,
    reproduce_figures,
    rows_to_csv,
    run_average_case,
    run_worst_case_family,
    write_manifest,
)
from .model import WeightMatrix, load_weights
from .online import REGISTRY


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def _alg_args(p):
    p.add_argument("--alg", required=True, help="algorithm name (see --list)")
    p.add_argument("--r", type=int, help="number of test users")
    p.add_argument("--alpha", type=float, help="test users as a fraction of n")
    p.add_argument("--p", type=float, help="sampling probability for sample-and-price")
    p.add_argument("--hidden", type=int, help="fix the hidden basestation (1-based)")


def _alg_params(args) -> dict:
    params = {"r": args.r, "alpha": args.alpha, "p": args.p,
              "hidden": None if args.hidden is None else args.hidden - 1}
    return {k: v for k, v in params.items() if v is not None}


def _model_args(p):
    p.add_argument("--model", default="iid-uniform", help=f"one of {', '.join(MODEL_KINDS)}")
    p.add_argument("--identical", action="store_true", help="identical basestations (iid-uniform only)")
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=10.0)
    p.add_argument("--means", type=float, nargs="+")
    p.add_argument("--dist", default="uniform", choices=["uniform", "exponential"])
    p.add_argument("--coupling", default="shared", choices=["shared", "independent"])


def _model_params(args) -> dict:
    out = {"lo": args.lo, "hi": args.hi, "dist": args.dist, "coupling": args.coupling}
    if args.identical:
        out["identical"] = True
    if args.means:
        out["means"] = list(args.means)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="onbase", description="Online basestation allocation experiments.")
    parser.add_argument("--list", action="store_true", help="print registered names and exit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    run = sub.add_parser("run", help="average-case ratio estimate")
    _alg_args(run)
    _model_args(run)
    run.add_argument("--weights", help="CSV or JSON weight matrix; its rows are shuffled per trial")
    run.add_argument("--n", type=int, nargs="+")
    run.add_argument("--m", type=int)
    run.add_argument("--trials", type=int, default=1000)
    run.add_argument("--seed", type=int)
    run.add_argument("--baseline", default="auto", choices=BASELINES)
    run.add_argument("--threads", type=int, default=default_threads())
    run.add_argument("--out", help="CSV output path (default stdout)")
    run.add_argument("--manifest", help="JSON manifest path (default <out>.manifest.json)")

    wc = sub.add_parser("worst-case", help="competitive ratio over an adversarial family")
    _alg_args(wc)
    wc.add_argument("--adversary", required=True, help="kind[:key=value,...]")
    wc.add_argument("--n", type=int)
    wc.add_argument("--m", type=int)
    wc.add_argument("--beta", type=float)
    wc.add_argument("--eps", type=float)
    wc.add_argument("--seed", type=int)
    wc.add_argument("--out")

    an = sub.add_parser("analytic", help="evaluate a closed-form or exact formula")
    an.add_argument("formula", help=f"one of {', '.join(analytics.ANALYTICS)}")
    for name, typ in (("alpha", float), ("dmax", int), ("n", int), ("r", int), ("m", int), ("t", int), ("d", int)):
        an.add_argument(f"--{name}", type=typ)
    an.add_argument("--out")

    fig = sub.add_parser("figures", help="datasets for the simulation figures")
    fig.add_argument("which", help=f"one of {', '.join(FIGURES)}, or all")
    fig.add_argument("--n", type=int, nargs="+", default=list(FIGURE_NS))
    fig.add_argument("--m", type=int, default=10)
    fig.add_argument("--trials", type=int, default=200)
    fig.add_argument("--seed", type=int)
    fig.add_argument("--threads", type=int, default=default_threads())
    fig.add_argument("--out")

    gen = sub.add_parser("gen", help="write a weight matrix")
    gen.add_argument("--adversary", help="family kind[:key=value,...]")
    _model_args(gen)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--m", type=int, required=True)
    gen.add_argument("--l", type=int)
    gen.add_argument("--beta", type=float)
    gen.add_argument("--eps", type=float)
    gen.add_argument("--member", type=int, default=1, help="which of the reassignment pair (1 or 2)")
    gen.add_argument("--seed", type=int)
    gen.add_argument("--format", default="csv", choices=["csv", "json"])
    gen.add_argument("--out")

    for p in (run, wc, an, fig, gen):
        p.add_argument("--config", help="JSON file of flag values; explicit flags win")
        p.add_argument("--dump-config", action="store_true", help="print the effective config as JSON and exit")
    return parser


def _seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    return int(os.environ.get("ONBASE_SEED", "0"))


def _emit(text: str, out) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_run(args) -> int:
    if args.weights:
        W = load_weights(args.weights)
        weights, ns, m = W.w.tolist(), [W.n], W.m
    else:
        if not args.n or args.m is None:
            raise ConfigError("run needs --n and --m (or --weights)")
        weights, ns, m = None, args.n, args.m
    rows, configs = [], []
    for k, n in enumerate(ns):
        cfg = ExperimentConfig(
            algorithm=args.alg, n=n, m=m, trials=args.trials, seed=_seed(args), model=args.model,
            model_params=_model_params(args), weights=weights, baseline=args.baseline,
            params=_alg_params(args), threads=args.threads,
        )
        est = run_average_case(cfg)
        rows.append(est.row(f"run-{k:03d}"))
        configs.append(config_dict(cfg))
    _emit(rows_to_csv(rows), args.out)
    manifest = args.manifest or (args.out + ".manifest.json" if args.out else None)
    if manifest:
        write_manifest(manifest, {"command": "run", "runs": configs})
    return 0


def _cmd_worst_case(args) -> int:
    fam = parse_adversary(args.adversary, n=args.n, m=args.m, beta=args.beta, eps=args.eps)
    table = run_worst_case_family(fam, args.alg, seed=_seed(args), params=_alg_params(args))
    text = table.to_csv() + f"# max_eta={table.max_eta!r} argmax_l={table.argmax}\n"
    _emit(text, args.out)
    return 0


def _cmd_analytic(args) -> int:
    if args.formula not in analytics.ANALYTICS:
        raise ConfigError(f"unknown formula {args.formula!r}; valid: {', '.join(analytics.ANALYTICS)}")
    params = {k: getattr(args, k) for k in ("alpha", "dmax", "n", "r", "m", "t", "d") if getattr(args, k) is not None}
    try:
        result = analytics.analytic_table(args.formula, **params)
    except KeyError as exc:
        raise ConfigError(f"{args.formula} needs parameter {exc}") from None
    _emit(json.dumps(result, indent=2) + "\n", args.out)
    return 0


def _cmd_figures(args) -> int:
    which = list(FIGURES) if args.which == "all" else [args.which]
    rows = []
    for w in which:
        rows.extend(reproduce_figures(w, ns=args.n, m=args.m, trials=args.trials, seed=_seed(args),
                                      threads=args.threads))
    _emit(rows_to_csv(rows), args.out)
    return 0


def _cmd_gen(args) -> int:
    if args.adversary:
        params = {"n": args.n, "m": args.m, "beta": args.beta, "eps": args.eps, "l": args.l}
        fam = parse_adversary(args.adversary, **params)
        W = WeightMatrix(fam.weights(args.member if fam.kind == "reassign-pair" else None))
    else:
        model = RandomModel(kind=args.model, **_model_params(args))
        W = WeightMatrix(sample_random_model(model, args.n, args.m, np.random.default_rng(_seed(args))))
    _emit(W.to_csv() if args.format == "csv" else W.to_json() + "\n", args.out)
    return 0


COMMANDS = {"run": _cmd_run, "worst-case": _cmd_worst_case, "analytic": _cmd_analytic,
            "figures": _cmd_figures, "gen": _cmd_gen}


def _listing() -> str:
    return "\n".join([
        "algorithms: " + " ".join(sorted(REGISTRY)),
        "adversaries: " + " ".join(FAMILY_KINDS),
        "models: " + " ".join(MODEL_KINDS),
        "analytic: " + " ".join(analytics.ANALYTICS),
        "figures: " + " ".join(FIGURES),
    ]) + "\n"


def _config_path(argv):
    for k, tok in enumerate(argv):
        if tok == "--config" and k + 1 < len(argv):
            return argv[k + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def parse(argv, parser=None) -> argparse.Namespace:
    """Parse argv, taking defaults from a --config JSON file when given.

    File values are installed as subcommand defaults before parsing, so
    explicit flags still win and required options may come from the file.
    """
    parser = parser or build_parser()
    path = _config_path(argv)
    command = next((tok for tok in argv if tok in COMMANDS), None)
    if path and command:
        with open(path) as fh:
            file_values = json.load(fh)
        if not isinstance(file_values, dict):
            raise ConfigError("config file must hold a JSON object")
        sub = parser._subparsers._group_actions[0].choices[command]
        actions = {a.dest: a for a in sub._actions}
        unknown = set(file_values) - set(actions) - {"command"}
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        file_values.pop("command", None)
        for dest in file_values:
            act = actions[dest]
            act.required = False
            if not act.option_strings:
                act.nargs = "?"
        sub.set_defaults(**file_values)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parse(argv)
        if args.list:
            sys.stdout.write(_listing())
            return 0
        if not args.command:
            raise ConfigError("missing subcommand; use --list or --help")
        if args.dump_config:
            skip = {"command", "list", "config", "dump_config"}
            sys.stdout.write(json.dumps({k: v for k, v in vars(args).items() if k not in skip},
                                        indent=2, sort_keys=True) + "\n")
            return 0
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"onbase: error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except Exception as exc:  # noqa: BLE001
        print(f"onbase: runtime error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
