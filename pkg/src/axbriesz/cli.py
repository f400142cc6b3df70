"""Command-line front end: one subcommand per verification suite.

Each run writes a CSV table and a JSON summary {command, config, pass, metrics}.
Exit status: 0 when the suite passes, 1 when a criterion fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

from . import reports


def _cell(v) -> str:
    if hasattr(v, "item"):
        v = v.item()
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def to_csv(result: reports.SuiteResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = list(result.columns)
    w.writerow(cols)
    for row in result.rows:
        w.writerow([_cell(row.get(c, "")) for c in cols])
    return buf.getvalue()


def _run(args) -> reports.SuiteResult:
    c = args.command
    if c == "profiles":
        ns = (1, 2, 3, 4) if args.n is None else (args.n,)
        ks = (0, 1, 2) if args.k is None else (args.k,)
        return reports.profiles(ns, ks, args.tol)
    if c == "subordination":
        return reports.subordination((1, 2, 3) if args.n is None else (args.n,))
    if c == "heat":
        return reports.heat(seed=args.seed)
    if c == "kernels":
        return reports.kernels(args.n, seed=args.seed)
    if c == "hardy":
        return reports.hardy(args.n or 1, 1 if args.j is None else args.j, args.Umax)
    if c == "symbols":
        return reports.symbols((1, 2) if args.n is None else (args.n,))
    if c == "opnorms":
        variants = ("K0", "Kj") if args.variant is None else (args.variant,)
        return reports.opnorms(variants, nu=args.grid_nu or 800, xi_sweep=args.xi_sweep or args.xi is None,
                               xi=args.xi if args.xi is not None else 1.0)
    if c == "models":
        nu = args.grid_nu or 800
        return reports.models(L=args.extent or 40.0, nus=(nu, 2 * nu))
    if c == "representation":
        return reports.representation(trials=args.trials or 10, seed=args.seed)
    if c == "haar":
        return reports.haar(seed=args.seed, trials=args.trials or 100)
    if c == "weak11":
        return reports.weak11(args.n or 1, 1 if args.j is None else args.j, seed=args.seed,
                              trials=100 if args.trials is None else args.trials)
    if c == "schrodinger":
        ps = (1.5, 2.0, 4.0, 8.0) if args.p is None else (args.p,)
        ns = args.grid_nu or 720
        ext = args.extent or 18.0
        return reports.schrodinger(args.xi if args.xi is not None else 1.0, ps, ns,
                                   (-ext * 7 / 9, ext * 2 / 9), trials=args.trials or 100, seed=args.seed)
    raise AssertionError(c)


COMMANDS = ("profiles", "subordination", "heat", "kernels", "hardy", "symbols", "opnorms",
            "models", "representation", "haar", "weak11", "schrodinger")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="axbriesz", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--n", type=int)
        s.add_argument("--j", type=int)
        s.add_argument("--k", type=int)
        s.add_argument("--alpha", type=int, nargs="*")
        s.add_argument("--xi", type=float)
        s.add_argument("--p", type=float)
        s.add_argument("--seed", type=int, default=0)
        s.add_argument("--trials", type=int)
        s.add_argument("--grid-nu", type=int)
        s.add_argument("--extent", type=float)
        s.add_argument("--tol", type=float)
        s.add_argument("--out", type=Path, help="write OUT.csv and OUT.json instead of printing")
        if name == "opnorms":
            s.add_argument("--variant", choices=("K0", "Kj"))
            s.add_argument("--xi-sweep", action="store_true")
        if name == "hardy":
            s.add_argument("--Umax", type=float, default=64.0)
    return p


def _validate(args) -> None:
    if args.n is not None and not 1 <= args.n <= 6:
        raise ValueError("n out of supported range 1..6")
    if args.command in ("profiles", "subordination") and args.k is not None and args.k not in (0, 1, 2):
        raise ValueError("k must be 0, 1 or 2")
    if args.command == "hardy" and args.n is not None and args.n > 3:
        raise ValueError("hardy supports n in 1..3")
    if args.command in ("weak11",) and (args.n not in (None, 1) or args.j not in (None, 1)):
        raise ValueError("weak11 runs n = 1, j = 1")
    if args.command == "symbols" and args.n is not None and args.n > 3:
        raise ValueError("symbols supports n in 1..3")
    if args.command == "kernels" and args.n is not None and args.n > 3:
        raise ValueError("kernels supports n in 1..3")
    if args.p is not None and not 1 < args.p < math.inf:
        raise ValueError("p must lie in (1, inf)")
    if args.trials is not None and args.trials < 0:
        raise ValueError("trials must be nonnegative")
    if args.command == "schrodinger" and args.trials is not None and args.trials < 100:
        raise ValueError("schrodinger probes need at least 100 trials")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        _validate(args)
        result = _run(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    config = {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items())
              if k != "out"}
    summary = json.dumps(result.summary(config), indent=2, sort_keys=True) + "\n"
    table = to_csv(result)
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        Path(f"{args.out}.csv").write_text(table)
        Path(f"{args.out}.json").write_text(summary)
        sys.stdout.write(summary)
    else:
        sys.stdout.write(table)
        sys.stderr.write(summary)
    return 0 if result.passed else 1


if __name__ == "__main__":
    sys.exit(main())
