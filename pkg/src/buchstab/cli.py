"""Command-line interface.

Subcommands:

    counts           exact triangular table of smallest-component counts
    dist             exact distribution of the smallest-component size
    tail             one exact tail probability P{X_n >= k}
    variance-series  (n, Var(X_n), Var(X_n)/n) for n = 1..N
    omega            Buchstab function value
    constant         moment constant ell * integral omega(x)/x^ell dx
    omega-k          generalized Buchstab function value
    omega-k-table    table of Omega_K over the reference grid
    cache            list or clear the artifact cache

Every command is a pure function of its arguments (plus any cached
artifacts): repeated runs emit byte-identical output.  Exit codes:
0 success, 2 usage error, 3 resource cap, 4 persistence error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from decimal import Decimal, ROUND_HALF_EVEN
from fractions import Fraction
from typing import Optional, Sequence

from . import counts as counts_mod
from . import store as store_mod
from .counts import MemoryCapError, build_table, component_class_by_name
from .numerics import DEFAULT_PRECISION, as_real
from .omega import QuadratureConfig, build_omega_ledger, eval_omega, moment_constant
from .omega_k import (
    DEFAULT_MAX_INTERVAL,
    PAPER_TABLE_GRID,
    OmegaKLedger,
    eval_omega_k,
    table_values,
)
from .store import ArtifactCache, StoreError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RESOURCE = 3
EXIT_STORE = 4

DEFAULT_DIGITS = 6


def format_real(value: Decimal, digits: int = DEFAULT_DIGITS) -> str:
    """Fixed significant-digit positional rendering (trailing zeros kept)."""
    if value == 0:
        return "0." + "0" * (digits - 1)
    exp = value.adjusted() - digits + 1
    q = value.quantize(Decimal(1).scaleb(exp), rounding=ROUND_HALF_EVEN)
    return f"{q:f}"


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


class OutputTable:
    """Column-labelled rows of decimal strings, rendered as CSV or JSON."""

    def __init__(self, columns: Sequence[str], rows: Sequence[Sequence[str]]):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\n")
            writer.writerow(self.columns)
            writer.writerows(self.rows)
            return buf.getvalue()
        if fmt == "json":
            doc = {"columns": self.columns, "rows": self.rows}
            return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
        raise ValueError(f"unknown format {fmt!r}")


def _emit(text: str, out_path: Optional[str]) -> None:
    if out_path:
        with open(out_path, "w", encoding="ascii", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="table output format (default csv)")
    parser.add_argument("--out", metavar="PATH", default=None,
                        help="write output to PATH instead of stdout")
    parser.add_argument("--digits", type=int, default=DEFAULT_DIGITS,
                        help=f"significant digits for real values "
                             f"(default {DEFAULT_DIGITS})")
    parser.add_argument("--precision", type=int, default=DEFAULT_PRECISION,
                        help=f"working precision in decimal digits "
                             f"(default {DEFAULT_PRECISION})")
    parser.add_argument("--taylor-degree", type=int, default=40,
                        help="Taylor truncation degree J (default 40)")
    parser.add_argument("--grid-log2", type=int, default=12,
                        help="trapezoid grid is 2^-grid_log2 (default 12)")
    parser.add_argument("--max-interval", type=int, default=None,
                        help="last Taylor block n* (default 200 for omega; "
                             "grown on demand for omega-k)")
    parser.add_argument("--cache-dir", metavar="DIR", default=None,
                        help="cache artifacts in DIR and reuse on parameter match")


def _cache(args) -> Optional[ArtifactCache]:
    return ArtifactCache(args.cache_dir) if args.cache_dir else None


def _get_table(args, N: int, class_name: str):
    cache = _cache(args)
    params = {"N": N, "class": class_name}
    if cache is not None:
        art = cache.lookup(store_mod.KIND_COUNT_TABLE, params)
        if art is not None:
            return store_mod.table_from_artifact(art)
    table = build_table(component_class_by_name(class_name), N)
    if cache is not None:
        cache.store(store_mod.artifact_from_table(table))
    return table


def _get_omega_ledger(args, n_star: Optional[int] = None):
    cfg = QuadratureConfig(
        grid_log2=args.grid_log2,
        max_interval=n_star or args.max_interval or 200,
        taylor_degree=args.taylor_degree,
        precision=args.precision,
    )
    cache = _cache(args)
    params = {
        "n_star": cfg.max_interval,
        "J": cfg.taylor_degree,
        "p": cfg.precision,
        "grid_log2": cfg.grid_log2,
    }
    if cache is not None:
        art = cache.lookup(store_mod.KIND_OMEGA, params)
        if art is not None:
            return store_mod.omega_ledger_from_artifact(art)
    ledger = build_omega_ledger(cfg)
    if cache is not None:
        cache.store(store_mod.artifact_from_omega_ledger(ledger))
    return ledger


def _get_omega_k_ledger(args, K: str, n_star: int):
    cache = _cache(args)
    params = {
        "n_star": n_star,
        "J": args.taylor_degree,
        "p": args.precision,
        "K": str(as_real(K, args.precision)),
    }
    if cache is not None:
        art = cache.lookup(store_mod.KIND_OMEGA_K, params)
        if art is not None:
            return store_mod.omega_k_ledger_from_artifact(art)
    limit = args.max_interval or DEFAULT_MAX_INTERVAL
    ledger = OmegaKLedger(K, args.taylor_degree, args.precision, max_interval=limit)
    ledger.ensure(n_star)
    if cache is not None:
        cache.store(store_mod.artifact_from_omega_k_ledger(ledger))
    return ledger


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_counts(args) -> int:
    table = _get_table(args, args.n, args.klass)
    columns = ["n"] + [f"k={k}" for k in range(1, args.n + 1)]
    rows = []
    for n in range(1, args.n + 1):
        row = [str(n)] + [str(c) for c in table.row(n)]
        row += [""] * (args.n - n)
        rows.append(row)
    _emit(OutputTable(columns, rows).render(args.format), args.out)
    return EXIT_OK


def cmd_dist(args) -> int:
    table = _get_table(args, args.n, "permutations")
    dist = counts_mod.distribution(table, args.n)
    columns = ["k", "probability"]
    rows = [[str(k), format_rational(p)] for k, p in enumerate(dist.probs, start=1)]
    _emit(OutputTable(columns, rows).render(args.format), args.out)
    return EXIT_OK


def cmd_tail(args) -> int:
    table = _get_table(args, args.n, "permutations")
    prob = counts_mod.tail_probability(table, args.n, args.k)
    columns = ["n", "k", "tail_probability"]
    rows = [[str(args.n), str(args.k), format_rational(prob)]]
    _emit(OutputTable(columns, rows).render(args.format), args.out)
    return EXIT_OK


def cmd_variance_series(args) -> int:
    table = _get_table(args, args.n, "permutations")
    series = counts_mod.variance_series(table, p=args.precision)
    columns = ["n", "variance", "variance_over_n"]
    rows = [
        [str(n), format_rational(var), format_real(von, args.digits)]
        for n, var, von in series
    ]
    _emit(OutputTable(columns, rows).render(args.format), args.out)
    return EXIT_OK


def cmd_omega(args) -> int:
    ledger = _get_omega_ledger(args)
    value = eval_omega(ledger, args.x)
    _emit(format_real(value, args.digits) + "\n", args.out)
    return EXIT_OK


def cmd_constant(args) -> int:
    ledger = _get_omega_ledger(args)
    const = moment_constant(ledger, args.moment)
    lines = (
        f"constant={format_real(const.value, args.digits)}\n"
        f"error_budget={const.error_budget:.3E}\n"
        f"first_interval_exact={format_rational(const.first_interval)}\n"
    )
    _emit(lines, args.out)
    return EXIT_OK


def cmd_omega_k(args) -> int:
    x = as_real(args.x, args.precision)
    ledger = _get_omega_k_ledger(args, args.k, int(x))
    value = eval_omega_k(ledger, x)
    _emit(format_real(value, args.digits) + "\n", args.out)
    return EXIT_OK


def cmd_omega_k_table(args) -> int:
    xs = [as_real(x, args.precision) for x in (args.x_list or PAPER_TABLE_GRID)]
    n_star = max(int(x) for x in xs)
    ledger = _get_omega_k_ledger(args, args.k, n_star)
    columns = ["x", "omega_k"]
    rows = [
        [f"{x:f}", format_real(v, args.digits)]
        for x, v in table_values(ledger, xs)
    ]
    _emit(OutputTable(columns, rows).render(args.format), args.out)
    return EXIT_OK


def cmd_cache(args) -> int:
    if not args.cache_dir:
        raise UsageError("cache command requires --cache-dir")
    cache = ArtifactCache(args.cache_dir)
    if args.action == "list":
        lines = "".join(f"{p.name}\n" for p in cache.entries())
        _emit(lines, args.out)
    else:
        removed = cache.clear()
        _emit(f"removed={removed}\n", args.out)
    return EXIT_OK


class UsageError(ValueError):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="buchstab",
        description="Smallest-component statistics and Buchstab functions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("counts", help="exact triangular count table")
    p.add_argument("--n", type=int, required=True, metavar="N",
                   help="largest object size")
    p.add_argument("--class", dest="klass", default="permutations",
                   help="component class (permutations, derangements)")
    _add_common(p)
    p.set_defaults(func=cmd_counts)

    p = sub.add_parser("dist", help="exact smallest-component distribution")
    p.add_argument("--n", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("tail", help="exact tail probability P{X_n >= k}")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_tail)

    p = sub.add_parser("variance-series", help="variance of X_n for n = 1..N")
    p.add_argument("--n", type=int, required=True, metavar="N")
    _add_common(p)
    p.set_defaults(func=cmd_variance_series)

    p = sub.add_parser("omega", help="Buchstab function value")
    p.add_argument("--x", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_omega)

    p = sub.add_parser("constant", help="moment constant from omega quadrature")
    p.add_argument("--moment", type=int, default=2,
                   help="moment order ell >= 2 (default 2, the variance constant)")
    _add_common(p)
    p.set_defaults(func=cmd_constant)

    p = sub.add_parser("omega-k", help="generalized Buchstab function value")
    p.add_argument("--k", required=True, help="class parameter K > 0")
    p.add_argument("--x", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_omega_k)

    p = sub.add_parser("omega-k-table", help="Omega_K over the reference grid")
    p.add_argument("--k", required=True, help="class parameter K > 0")
    p.add_argument("--x-list", nargs="*", default=None,
                   help="evaluation points (default: 1..10 and 16..8192)")
    _add_common(p)
    p.set_defaults(func=cmd_omega_k_table)

    p = sub.add_parser("cache", help="inspect or clear the artifact cache")
    p.add_argument("action", choices=("list", "clear"))
    _add_common(p)
    p.set_defaults(func=cmd_cache)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MemoryCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except StoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STORE
    except (UsageError, ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
