"""Command line interface.

Subcommands: validate, fit, evaluate, serve, export. Exit codes: 0 success,
1 domain error (failed check, unknown node, ...), 2 usage or parse error.
Settings resolve as CLI flag > environment variable (IDSS_ prefix) >
built-in default.
"""

from __future__ import annotations

import argparse
import json
import os
import shutil
import sys
from pathlib import Path

from ..errors import IdssError, ParseError
from .document import load_document
from .ops import evaluate_to_registry, fit_to_dir, load_fit, resolve_policies, run_validate
from .registry import RunRegistry

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2

DEFAULT_N_SAMPLES = 10_000
DEFAULT_SEED = 42
DEFAULT_BIND = "127.0.0.1:8000"


def _setting(flag_value, env_name: str, default, convert=str):
    if flag_value is not None:
        return flag_value
    raw = os.environ.get(env_name)
    if raw is not None:
        try:
            return convert(raw)
        except ValueError:
            raise ParseError(f"bad value for {env_name}: {raw!r}") from None
    return default


def cmd_validate(args) -> int:
    parsed = load_document(args.network)
    diagnostics = run_validate(parsed)
    print(json.dumps(diagnostics, indent=2, sort_keys=True))
    return EXIT_OK if diagnostics["ok"] else EXIT_DOMAIN


def cmd_fit(args) -> int:
    window = None
    if args.from_year is not None or args.to_year is not None:
        if args.from_year is None or args.to_year is None:
            raise ParseError("--from and --to must be given together")
        window = (args.from_year, args.to_year)
    ctx = fit_to_dir(args.network, args.data, args.out, window=window)
    print(
        json.dumps(
            {
                "fit_dir": str(ctx.fit_dir),
                "nodes": len(ctx.fitted.fits),
                "window": [ctx.table.years[0], ctx.table.years[-1]],
                "total_log_predictive": ctx.fitted.total_log_predictive,
            },
            indent=2,
        )
    )
    return EXIT_OK


def cmd_evaluate(args) -> int:
    ctx = load_fit(args.fit_dir)
    n = _setting(args.n, "IDSS_N_SAMPLES", DEFAULT_N_SAMPLES, int)
    seed = _setting(args.seed, "IDSS_SEED", DEFAULT_SEED, int)
    if args.policies:
        requested = json.loads(Path(args.policies).read_text(encoding="utf-8"))
        if not isinstance(requested, list):
            raise ParseError(f"{args.policies}: expected a JSON list of policies")
    else:
        requested = ["P1", "P2", "P3", "P4", "P5"]
    policies = resolve_policies(args.fit_dir, requested)
    record = evaluate_to_registry(ctx, policies, n, seed)
    print(
        json.dumps(
            {
                "run_id": record.run_id,
                "run_dir": str(RunRegistry(args.fit_dir).path(record.run_id)),
                "ranking": record.ranking,
                "report": record.report,
            },
            indent=2,
        )
    )
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    bind = _setting(args.bind, "IDSS_BIND", DEFAULT_BIND)
    host, _, port = bind.partition(":")
    app = create_app(args.fit_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8000), log_level="info")
    return EXIT_OK


def cmd_export(args) -> int:
    registry = RunRegistry(args.fit_dir)
    if args.list:
        print(json.dumps(registry.index(), indent=2))
        return EXIT_OK
    if not args.run_id:
        raise ParseError("give a run id or --list")
    record = registry.load(args.run_id, with_samples=False)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    run_dir = registry.path(args.run_id)
    copied = []
    for name in ("record.json", "report.csv", "samples.csv"):
        src = run_dir / name
        if src.exists():
            shutil.copyfile(src, out / f"{record.run_id}_{name}")
            copied.append(str(out / f"{record.run_id}_{name}"))
    print(json.dumps({"run_id": record.run_id, "files": copied}, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="idss",
        description="Decision support engine: fit dynamic regression networks, "
        "simulate interventions, score policies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a network document (DAG, partition, adequacy)")
    p.add_argument("network", help="network document (JSON)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("fit", help="fit a network to a yearly CSV and persist the results")
    p.add_argument("network", help="network document (JSON)")
    p.add_argument("data", help="yearly data CSV")
    p.add_argument("-o", "--out", required=True, help="output fit directory")
    p.add_argument("--from", dest="from_year", type=int, help="window start year")
    p.add_argument("--to", dest="to_year", type=int, help="window end year")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("evaluate", help="score policies against a persisted fit")
    p.add_argument("fit_dir", help="fit directory produced by `idss fit`")
    p.add_argument("--policies", help="JSON file: list of policy names or definitions")
    p.add_argument("-n", type=int, default=None, help="Monte Carlo sample count")
    p.add_argument("--seed", type=int, default=None, help="master random seed")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("serve", help="serve the HTTP API (and UI if built) for a fit")
    p.add_argument("fit_dir")
    p.add_argument("--bind", default=None, help="host:port (default 127.0.0.1:8000)")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("export", help="copy a run's report/samples out of the registry")
    p.add_argument("fit_dir")
    p.add_argument("run_id", nargs="?", help="run id (see --list)")
    p.add_argument("--list", action="store_true", help="list runs instead of exporting")
    p.add_argument("-o", "--out", help="destination directory (default .)")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except IdssError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
