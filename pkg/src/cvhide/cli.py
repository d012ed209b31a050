"""Command-line interface: ``cvhide <command> [options]``.

Exit codes: 0 success, 1 a verification check failed, 2 usage error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

from . import bounds, checks, discrimination as disc
from .errors import CvhideError, InfeasibleBudget, InvalidParameter, NumericError
from .fock_core import DEFAULT_TAIL_TOL, StateSpec

SCHEMA_VERSION = "1.0"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


def fmt_float(x: float) -> str:
    """Fixed 12-significant-digit rendering used for text and CSV output."""
    if math.isnan(x) or math.isinf(x):
        return repr(x)
    return f"{x:#.12g}"


def _json_value(v):
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        return float(f"{v:.12g}") if math.isfinite(v) else None
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    return float(f"{float(v):.12g}")


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    return str(v)


def _columns(rows: Sequence[dict]) -> list[str]:
    cols: list[str] = []
    for r in rows:
        cols.extend(k for k in r if k not in cols)
    return cols


def render_rows(rows: Sequence[dict], fmt: str) -> str:
    """Renders rows as an aligned text table or CSV."""
    cols = _columns(rows)
    table = [[_cell(r.get(c, "")) for c in cols] for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        w.writerows(table)
        return buf.getvalue()
    widths = [max([len(c)] + [len(t[i]) for t in table]) for i, c in enumerate(cols)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(cols, widths))]
    lines += ["  ".join(x.rjust(w) for x, w in zip(t, widths)) for t in table]
    return "\n".join(lines) + "\n"


def render(command: str, params: dict, rows: list[dict], provenance: dict, fmt: str) -> str:
    if fmt == "json":
        doc = {"schema_version": SCHEMA_VERSION, "command": command,
               "params": _json_value(params), "rows": _json_value(rows),
               "provenance": _json_value(provenance)}
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"
    return render_rows(rows, fmt)


def parse_range(text: str, integer: bool = False) -> list:
    """Parses ``start:stop:step`` (inclusive stop), a comma list, or one value."""
    conv = int if integer else float
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            a, b, s = (conv(p) for p in parts)
            if not s > 0 or b < a:
                raise UsageError(f"range {text!r} needs step > 0 and stop >= start")
            count = int(math.floor((b - a) / s + 1e-9)) + 1
            vals = [a + i * s for i in range(count)]
            return vals if integer else [float(f"{v:.12g}") for v in vals]
        vals = [conv(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"cannot parse range {text!r}") from None
    if not vals or not all(math.isfinite(v) for v in vals):
        raise UsageError(f"cannot parse range {text!r}")
    return vals


def _map(fn: Callable, items: list, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


# Row workers live at module level so process pools can pickle them.

def _thermal_row(args):
    nu, mu, numeric, tail_tol = args
    cf = disc.thermal_closed_forms(nu, mu)
    row = {"nu": nu, "mu": mu, "N0": cf.N0, "half_trace": cf.half_trace,
           "half_wigner_l1": cf.half_wigner_l1, "half_het": cf.half_het,
           "half_hom": cf.half_hom, "trace_over_het": cf.half_trace / cf.half_het}
    prov = {}
    if numeric:
        s = disc.SchemeSpec.from_specs(StateSpec.thermal(nu), StateSpec.thermal(mu),
                                       tail_tol=tail_tol)
        rep = disc.bias_report(s)
        row.update(num_trace=rep.beta_1, num_wigner_l1=rep.wigner_l1_half,
                   num_het=rep.beta_het, num_hom=rep.beta_hom,
                   max_delta=max(abs(rep.beta_1 - cf.half_trace),
                                 abs(rep.wigner_l1_half - cf.half_wigner_l1),
                                 abs(rep.beta_het - cf.half_het),
                                 abs(rep.beta_hom - cf.half_hom)))
        prov = {"cutoff": rep.cutoff, "grid": rep.grid}
    return row, prov


def _even_odd_row(args):
    lam, numeric, tail_tol = args
    s = disc.even_odd_scheme(lam, tail_tol)
    row = {"lambda": lam, "beta_1": disc.beta_1(s),
           "wigner_l1_bound": disc.even_odd_gocc_bound(lam)}
    prov = {"cutoff": s.dim}
    if numeric:
        val, grid = disc._phase_bias(s, disc.wigner_fn, None)
        row["num_wigner_l1"] = val
        row["delta"] = val - row["wigner_l1_bound"]
        prov["grid"] = grid.describe()
    return row, prov


def _fock_row(args):
    n, tol = args
    d = disc.fock_pair_hom_distance(n, tol)
    return {"n": n, "distance": d, "minus_limit": d - 8 / math.pi**2}, {"cutoff": n + 2}


def _budget_row(args):
    eps, E, m, eta, r, bound = args
    row = {"eps": eps, "E": E, "m": m, "bound": bound}
    try:
        out = bounds.plan_teleport_budget(bounds.BudgetQuery(eps, E, m, eta=eta, r=r,
                                                             bound=bound))
    except InfeasibleBudget as exc:
        row.update(status="infeasible", lambda_star=math.nan, r=math.nan, s_db=math.nan,
                   eta=math.nan, limiting_value=float(exc.limiting_value))
        return row, {}
    row.update(status="ok", lambda_star=out["lambda_star"], r=out["r"], s_db=out["s_db"],
               eta=out["eta"], limiting_value=math.nan)
    return row, {}


def _locc_row(args):
    b1, E, m = args
    return {"beta_1": b1, "E": E, "m": m, "c_m": bounds.c_m(m),
            "bound": bounds.locc_bound(b1, E, m)}, {}


def _collect(results):
    rows = [r for r, _ in results]
    cutoffs = [{"row": i, "cutoff": p["cutoff"]} for i, (_, p) in enumerate(results)
               if "cutoff" in p]
    grids = [{"row": i, **p["grid"]} for i, (_, p) in enumerate(results) if "grid" in p]
    return rows, {"cutoffs": cutoffs, "grids": grids}


def cmd_verify(args) -> tuple[list, dict, int]:
    only = None
    if args.only:
        only = [s.strip() for s in args.only.split(",") if s.strip()]
        unknown = [s for s in only if s not in checks.GROUPS]
        if unknown:
            raise UsageError(f"unknown check group(s): {', '.join(unknown)}; "
                             f"choose from {', '.join(checks.GROUPS)}")
    results = checks.run_checks(only)
    rows = [{"name": c.name, "group": c.group, "anchor": c.anchor, "value": c.value,
             "expected": c.expected, "delta": c.delta,
             "status": "PASS" if c.passed else "FAIL"} for c in results]
    failed = sum(not c.passed for c in results)
    if args.format == "text":
        text = "\n".join(c.line() for c in results)
        text += f"\n{len(results) - failed} passed, {failed} failed\n"
        return rows, {"text": text}, EXIT_FAIL if failed else EXIT_OK
    return rows, {"cutoffs": [], "grids": []}, EXIT_FAIL if failed else EXIT_OK


def cmd_thermal_table(args):
    nus = parse_range(args.nu)
    mus = parse_range(args.mu)
    if any(v < 0 for v in nus + mus):
        raise UsageError("mean photon numbers must be >= 0")
    items = [(nu, mu, args.numeric, args.tail_tol) for nu in nus for mu in mus if mu > nu]
    if not items:
        raise UsageError("no (nu, mu) pair with mu > nu in the given ranges")
    return _collect(_map(_thermal_row, items, args.jobs)) + (EXIT_OK,)


def cmd_even_odd(args):
    lams = parse_range(args.lam)
    if any(not 0 <= v < 1 for v in lams):
        raise UsageError("lambda values must lie in [0, 1)")
    items = [(lam, args.numeric, args.tail_tol) for lam in lams]
    return _collect(_map(_even_odd_row, items, args.jobs)) + (EXIT_OK,)


def cmd_fock_hom(args):
    ns = parse_range(args.n, integer=True)
    if any(n < 0 for n in ns):
        raise UsageError("photon numbers must be >= 0")
    return _collect(_map(_fock_row, [(n, 1e-12) for n in ns], args.jobs)) + (EXIT_OK,)


def cmd_bk_budget(args):
    if (args.eta is None) == (args.r is None):
        raise UsageError("give exactly one of --eta or --r")
    items = [(eps, E, args.m, args.eta, args.r, args.bound)
             for eps in parse_range(args.eps) for E in parse_range(args.E)]
    return _collect(_map(_budget_row, items, args.jobs)) + (EXIT_OK,)


def cmd_locc_bound(args):
    items = [(b, E, args.m) for b in parse_range(args.beta1) for E in parse_range(args.E)]
    return _collect(_map(_locc_row, items, args.jobs)) + (EXIT_OK,)


COMMANDS = {
    "verify": cmd_verify,
    "thermal-table": cmd_thermal_table,
    "even-odd": cmd_even_odd,
    "fock-hom": cmd_fock_hom,
    "bk-budget": cmd_bk_budget,
    "locc-bound": cmd_locc_bound,
}

RANGE_HELP = "a value, a comma list, or start:stop:step with inclusive stop"


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("CVHIDE_JOBS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--format", choices=("text", "csv", "json"), default="text")
    common.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL,
                        help="Fock-tail mass allowed outside the cutoff (default 1e-12)")
    common.add_argument("--jobs", type=int, default=_default_jobs(),
                        help="worker processes for sweeps (default $CVHIDE_JOBS or 1)")

    p = argparse.ArgumentParser(prog="cvhide",
                                description="Continuous-variable data hiding: biases, "
                                            "bounds and numerical cross-checks.")
    sub = p.add_subparsers(dest="command", required=True)
    fmt = argparse.RawDescriptionHelpFormatter

    s = sub.add_parser("verify", parents=[common], formatter_class=fmt,
                       help="run closed-form vs numeric checks",
                       description="Runs the verification checks. Columns: name, group, "
                                   "anchor, value, expected, delta, status.\nGroups: "
                                   + ", ".join(checks.GROUPS))
    s.add_argument("--only", help="comma-separated check groups, e.g. thermal,bk")

    s = sub.add_parser("thermal-table", parents=[common], formatter_class=fmt,
                       help="thermal pair biases",
                       description="Columns: nu, mu, N0, half_trace, half_wigner_l1, half_het,\n"
                                   "half_hom, trace_over_het; with --numeric also num_trace,\n"
                                   "num_wigner_l1, num_het, num_hom, max_delta.")
    s.add_argument("--nu", required=True, help=RANGE_HELP)
    s.add_argument("--mu", required=True, help=RANGE_HELP + "; pairs with mu <= nu are skipped")
    s.add_argument("--numeric", action="store_true", help="also evaluate every bias numerically")

    s = sub.add_parser("even-odd", parents=[common], formatter_class=fmt,
                       help="even/odd thermal pair biases",
                       description="Columns: lambda, beta_1, wigner_l1_bound; with --numeric\n"
                                   "also num_wigner_l1, delta.")
    s.add_argument("--lambda", dest="lam", required=True, help=RANGE_HELP)
    s.add_argument("--numeric", action="store_true", help="also integrate the Wigner L1 norm")

    s = sub.add_parser("fock-hom", parents=[common], formatter_class=fmt,
                       help="homodyne distance of |n> and |n+1>",
                       description="Columns: n, distance, minus_limit (distance - 8/pi^2).")
    s.add_argument("--n", required=True, help=RANGE_HELP + " (integers)")

    s = sub.add_parser("bk-budget", parents=[common], formatter_class=fmt,
                       help="squeezing or efficiency needed for a teleportation error",
                       description="Columns: eps, E, m, bound, status, lambda_star, r, s_db,\n"
                                   "eta, limiting_value (best reachable error when infeasible).")
    s.add_argument("--eps", required=True, help="target error; " + RANGE_HELP)
    s.add_argument("--E", default="0", help="mean photon number; " + RANGE_HELP)
    s.add_argument("--m", type=int, default=1, help="number of modes")
    s.add_argument("--eta", type=float, help="fixed detection efficiency, solve for r")
    s.add_argument("--r", type=float, help="fixed squeezing, solve for eta")
    s.add_argument("--bound", choices=("linear", "refined"), default="linear")

    s = sub.add_parser("locc-bound", parents=[common], formatter_class=fmt,
                       help="LOCC bias bound for an energy budget",
                       description="Columns: beta_1, E, m, c_m, bound.")
    s.add_argument("--beta1", default="1", help=RANGE_HELP)
    s.add_argument("--E", required=True, help=RANGE_HELP)
    s.add_argument("--m", type=int, default=1)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.jobs < 1 or not args.tail_tol > 0:
        print("cvhide: --jobs must be >= 1 and --tail-tol > 0", file=sys.stderr)
        return EXIT_USAGE
    params = {k: v for k, v in vars(args).items() if k not in ("out", "jobs", "command")}
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore" if args.format != "text" else "default")
            rows, prov, code = COMMANDS[args.command](args)
    except (UsageError, InvalidParameter) as exc:
        print(f"cvhide: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericError, ArithmeticError) as exc:
        print(f"cvhide: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except CvhideError as exc:
        print(f"cvhide: {exc}", file=sys.stderr)
        return EXIT_FAIL
    text = prov.pop("text", None)
    if text is None:
        text = render(args.command, params, rows, prov, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
