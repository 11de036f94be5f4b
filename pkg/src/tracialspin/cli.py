"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 numerical precondition failure (FTCS stability).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import bosonization as bz
from . import diffusion as df
from . import distributions as ds
from . import multiplicity as mp
from . import spintrace as st
from .halfint import parse_spin
from .verify import run_suite

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _csv_text(header, rows) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return out.getvalue()


def _emit(args, text: str, sidecar: dict | None = None) -> None:
    """Write the main payload; CSV side information goes to ``OUT.meta.json`` or stderr."""
    if args.out:
        Path(args.out).write_text(text)
        if sidecar is not None:
            Path(args.out + ".meta.json").write_text(_dumps(sidecar))
    else:
        sys.stdout.write(text)
        if sidecar is not None:
            sys.stderr.write(_dumps(sidecar))


def _fmt(x: float) -> str:
    return repr(float(x))


def cmd_nu(args) -> int:
    table = mp.degeneracy_table(args.spin, args.n)
    total = mp.dimension_sum(table)
    ok = total == table.hilbert_dimension
    status = {
        "dimension_sum": str(total),
        "expected": str(table.hilbert_dimension),
        "status": "OK" if ok else "FAIL",
    }
    if args.format == "json":
        rows = [{"two_j": tj, "count": str(c)} for tj, c in table.items()]
        _emit(args, _dumps({"S": str(table.spin), "N": table.n_particles, "rows": rows, "sum_rule": status}))
    else:
        _emit(args, mp.table_to_csv(table), {"S": str(table.spin), "N": table.n_particles, "sum_rule": status})
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def cmd_dist(args) -> int:
    table = mp.degeneracy_table(args.spin, args.n)
    dist = ds.prob_m(table) if args.kind == "m" else ds.prob_j(table)
    model = ds.GaussianModel(args.spin, args.n)
    extra = {}
    if args.gaussian:
        x = dist.positions()
        extra["gaussian"] = ds.gaussian_pm(model, x) if args.kind == "m" else ds.gaussian_pj(model, x)
    metrics = ds.compare(dist, model) if args.metrics else None
    side = {"S": str(dist.spin), "N": dist.n_particles, "kind": dist.kind.value}
    if metrics is not None:
        side["metrics"] = metrics
    if args.format == "json":
        key = "two_m" if args.kind == "m" else "two_j"
        probs = dist.masses if args.exact else dist.as_float()
        rows = []
        for k, tx in enumerate(dist.support):
            p = probs[k]
            row = {key: tx, "probability": f"{p.numerator}/{p.denominator}" if args.exact else float(p)}
            for name, col in extra.items():
                row[name] = float(col[k])
            rows.append(row)
        _emit(args, _dumps({**side, "rows": rows}))
    else:
        _emit(args, ds.distribution_to_csv(dist, exact=args.exact, extra_columns=extra),
              side if metrics is not None else None)
    return EXIT_OK


def cmd_diffuse(args) -> int:
    spin = args.spin
    D = df.diffusion_coefficient(spin)
    n0, n1 = float(args.n), float(args.n_end)
    if n1 < n0:
        raise _UsageError("--n-end must be at least --n")
    h = 1.0 if args.initial == "lattice" else args.h
    if args.dn is not None:
        run = df.DiffusionRun(spin, n0, n1, args.dn, h)
    else:
        run = df.DiffusionRun.from_ratio(spin, n0, n1, h, args.r)
    sigma = math.sqrt(n1 * float(spin.casimir()) / 3.0)
    half_width = args.half_width or max(6.0 * sigma, n1 * spin.twice / 2 if args.initial == "lattice" else 0.0)
    half_width = math.ceil(half_width / h) * h
    if args.initial == "green":
        initial = df.Grid1D.from_function(half_width, h, lambda x: df.green_function(D, x, n0))
    else:
        if (args.n * spin.twice) % 2:
            raise _UsageError("lattice initial data needs an integer m-grid (N * 2S even)")
        dist = ds.prob_m(mp.degeneracy_table(spin, args.n))
        values = np.zeros(2 * round(half_width) + 1)
        idx = np.rint(dist.positions() + half_width).astype(int)
        values[idx] = dist.as_float()
        initial = df.Grid1D(half_width, 1.0, values)
    final = df.solve_ftcs(run, initial)
    green = df.green_function(D, final.positions, n1)
    errors = {
        "linf_vs_green": float(np.max(np.abs(final.values - green))),
        "mass_initial": initial.mass(),
        "mass_final": final.mass(),
    }
    meta = json.loads(df.slice_metadata(run, n1))
    meta["errors"] = errors
    meta["initial"] = args.initial
    if args.format == "json":
        rows = [{"position": float(x), "value": float(v), "green": float(g)}
                for x, v, g in zip(final.positions, final.values, green)]
        _emit(args, _dumps({**meta, "slice": rows}))
    else:
        _emit(args, df.slice_to_csv(final), meta)
    return EXIT_OK


def cmd_moments(args) -> int:
    n_list = sorted(args.n)
    rows = st.moment_convergence_scan(args.spin, args.ell, n_list)
    model = ds.GaussianModel(args.spin, 1.0)
    inversion = []
    for m in args.m_values:
        res = st.invert_char_function(args.spin, m)
        ref = float(ds.gaussian_pm(model, m))
        inversion.append({"m": m, "value": res.value, "reference_value": ref,
                          "abs_error": abs(res.value - ref), "truncation_bound": res.truncation_bound})
    numeric = st.char_function_moments(args.spin, 4)
    char_moments = [{"ell": ell, "value": numeric[ell], "reference_value": st.asymptotic_moment(args.spin, ell)}
                    for ell in range(5)]
    if args.format == "json":
        _emit(args, _dumps({"scan": rows, "char_inversion": inversion, "char_moments": char_moments}))
    else:
        header = ["word", "S", "N", "value", "reference_value", "abs_error"]
        body = [[r["word"], r["S"], r["N"], _fmt(r["value"]), _fmt(r["reference_value"]), _fmt(r["abs_error"])]
                for r in rows]
        _emit(args, _csv_text(header, body), {"char_inversion": inversion, "char_moments": char_moments})
    return EXIT_OK


def _parse_pq(text: str) -> tuple[int, int]:
    try:
        p, q = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected P,Q integers, got {text!r}") from None
    if p < 0 or q < 0:
        raise argparse.ArgumentTypeError("powers must be non-negative")
    return p, q


def _ladder_word(text: str) -> str:
    """Accept ``+``/``-`` or ``r``/``l`` (raise/lower) spellings."""
    word = text.replace("r", "+").replace("l", "-")
    if not word or set(word) - {"+", "-"}:
        raise argparse.ArgumentTypeError(f"ladder words use + - (or r l): {text!r}")
    return word


def cmd_boson(args) -> int:
    n_list = sorted(args.n) if args.n else None
    if n_list is not None and len(n_list) < 3:
        raise _UsageError("boson needs at least three --n values for extrapolation")
    reports = [bz.verify_main_identity(p, q, args.spin, n_list, args.rtol) for p, q in args.pq]
    for word in args.word:
        reports.append(bz.verify_conjecture(st.SpinWord(word), args.spin, n_list, args.rtol))
    if args.format == "json":
        _emit(args, bz.report_to_json(reports))
    else:
        header = ["word", "p", "q", "S", "extrapolated", "extrapolation_error", "boson_value", "abs_gap", "pass"]
        body = [[r.word, r.p, r.q, r.S, _fmt(r.extrapolated), _fmt(r.extrapolation_error),
                 _fmt(r.boson_value), _fmt(r.abs_gap), str(r.passed).lower()] for r in reports]
        _emit(args, _csv_text(header, body))
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = run_suite(quick=args.quick, corrupt=args.inject_corruption)
    ok = all(c.passed for c in checks)
    if args.format == "json":
        _emit(args, _dumps({"pass": ok, "checks": [c.to_dict() for c in checks]}))
    else:
        _emit(args, _csv_text(["name", "pass", "detail"],
                              [[c.name, str(c.passed).lower(), c.detail] for c in checks]))
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


class _UsageError(Exception):
    pass


def _spin_arg(text: str):
    try:
        return parse_spin(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--exact", action="store_true", help="print probabilities as exact p/q rationals")
    common.add_argument("--quick", action="store_true", help="reduced sweep sizes")

    def with_spin(p):
        p.add_argument("--spin", type=_spin_arg, required=True, help="spin magnitude as k or k/2")

    parser = argparse.ArgumentParser(prog="tracialspin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("nu", parents=[common], help="degeneracy table nu(j, N; S)")
    with_spin(p)
    p.add_argument("--n", type=_positive_int, required=True)
    p.set_defaults(func=cmd_nu)

    p = sub.add_parser("dist", parents=[common], help="exact P(m, N) or P(j, N)")
    with_spin(p)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--kind", choices=["m", "j"], default="m")
    p.add_argument("--gaussian", action="store_true", help="add the Gaussian density column")
    p.add_argument("--metrics", action="store_true", help="TVD / max gap / KL against the Gaussian")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("diffuse", parents=[common], help="FTCS evolution of the diffusion equation")
    with_spin(p)
    p.add_argument("--n", type=_positive_int, required=True, help="starting particle number")
    p.add_argument("--n-end", type=_positive_int, required=True)
    p.add_argument("--initial", choices=["green", "lattice"], default="green")
    p.add_argument("--h", type=float, default=0.5, help="grid step (lattice initial data forces 1)")
    p.add_argument("--r", type=float, default=0.25, help="target stability ratio D dN / h^2")
    p.add_argument("--dn", type=float, default=None, help="explicit pseudo-time step (overrides --r)")
    p.add_argument("--half-width", type=float, default=None)
    p.set_defaults(func=cmd_diffuse)

    p = sub.add_parser("moments", parents=[common], help="Jz moment convergence and characteristic function")
    with_spin(p)
    p.add_argument("--n", type=_positive_int, nargs="+", default=[8, 16, 32, 64, 128, 256])
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--m-values", type=float, nargs="+", default=[0.0, 0.5, 1.0, 2.0])
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("boson", parents=[common], help="spin-to-boson identity and conjecture checks")
    with_spin(p)
    p.add_argument("--n", type=_positive_int, nargs="+", default=None)
    p.add_argument("--pq", type=_parse_pq, nargs="+", default=[(1, 1), (2, 2), (1, 0), (2, 1)])
    p.add_argument("--word", type=_ladder_word, action="append", default=[],
                   help="ladder word for the conjecture check, e.g. --word lr (J- J+) or --word=-+")
    p.add_argument("--rtol", type=float, default=1e-2)
    p.set_defaults(func=cmd_boson)

    p = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    p.add_argument("--inject-corruption", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        parser.error(str(exc))
    except df.StabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
