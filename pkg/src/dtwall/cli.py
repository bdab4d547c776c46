"""Command-line front end: ``dtwall <command> [options]``.

Exit codes: 0 success, 1 usage or I/O problem, 2 integrality violation
(non-integral Euler pairing or z-exponent).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from dtwall._rational import as_q, fmt_q
from dtwall.appendix import (
    SampleBounds,
    SurfaceLattice,
    appendix_inequality_holds,
    random_hn,
    thickened_section_data,
)
from dtwall.errors import DTWallError, IntegralityError
from dtwall.invariants import InvariantTable, dump_table, load_table, toy_degree0
from dtwall.numclass import Geometry
from dtwall.series import (
    assemble_zd6,
    compare_modulo,
    dtpt_check,
    dump_json,
    dump_text,
    dz_at,
    local_d4_series,
    table_to_series,
    zd6_m1_range,
)
from dtwall.tilt import check_d4_bound, check_hcn, validity_report
from dtwall.wallcross import dt4_sum, find_walls, p_rows_in_box, table_box, validate_extreme_polar


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# -- argument helpers --------------------------------------------------------


def rational(text: str) -> Fraction:
    try:
        return as_q(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from None


def int_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi integers, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def q_range(text: str) -> tuple[Fraction, Fraction]:
    try:
        lo, hi = text.split(":")
        lo, hi = as_q(lo), as_q(hi)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected lo:hi rationals, got {text!r}") from None
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def _geometry(args) -> Geometry:
    if args.geometry:
        return Geometry.load(args.geometry)
    if args.h3 is None or args.c2h is None:
        raise UsageError("give --geometry FILE or both --h3 and --c2h")
    return Geometry(args.h3, args.c2h, args.chix or 0, "")


def _add_geometry(p):
    g = p.add_argument_group("geometry")
    g.add_argument("--geometry", help='JSON file {"H3": .., "c2H": .., "chiX": ..}')
    g.add_argument("--h3", type=int, help="H^3 (instead of --geometry)")
    g.add_argument("--c2h", type=int, help="c_2(X).H (instead of --geometry)")
    g.add_argument("--chix", type=int, help="topological Euler characteristic chi(X)")


def _add_regime(p):
    p.add_argument("--xi", type=rational, default=Fraction(1), help="exponent xi >= 1 (rational)")
    p.add_argument("--mu", type=rational, default=Fraction(1), help="mu > 0 (rational)")
    p.add_argument("--epsilon", type=rational, help="cut-off C(m, eps); default eps = (mu H^3/2) / m^xi")


def _tables(args, geom):
    I = load_table(args.I)
    P = load_table(args.P)
    for t in (I, P):
        t.check_geometry(geom)
    return I, P


def workers_cap(requested: int | None = None) -> int:
    env = os.environ.get("DTWALL_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            raise UsageError(f"DTWALL_THREADS must be an integer, got {env!r}") from None
    if requested is not None:
        return max(1, min(requested, cap))
    return cap


def _emit(args, obj, text_lines):
    if args.format == "json":
        sys.stdout.write(json.dumps(obj, sort_keys=True, indent=1) + "\n")
    else:
        for line in text_lines:
            sys.stdout.write(line + "\n")


# -- dt4 ---------------------------------------------------------------------


def _dt4_job(payload):
    m, k, n, box, geom, I, P, xi, mu = payload
    res = dt4_sum(m, k, n, box, geom, I, P, p_rows_in_box(P, box))
    rep = validity_report(m, k, n, xi, mu, geom)
    return res, rep


def cmd_dt4(args) -> int:
    geom = _geometry(args)
    I, P = _tables(args, geom)
    box = table_box(args.m, args.epsilon, args.xi, args.mu, geom)
    if args.k is None and args.k_range is None or args.n is None and args.n_range is None:
        raise UsageError("give --k or --k-range and --n or --n-range")
    ks = range(args.k, args.k + 1) if args.k_range is None else range(args.k_range[0], args.k_range[1] + 1)
    ns = range(args.n, args.n + 1) if args.n_range is None else range(args.n_range[0], args.n_range[1] + 1)
    jobs = [(args.m, k, n, box, geom, I.entries, P.entries, args.xi, args.mu) for k in ks for n in ns]
    nworkers = min(workers_cap(args.workers), len(jobs))
    if nworkers > 1:
        with ProcessPoolExecutor(max_workers=nworkers) as ex:
            results = list(ex.map(_dt4_job, jobs, chunksize=max(1, len(jobs) // (4 * nworkers))))
    else:
        results = [_dt4_job(j) for j in jobs]
    rows, lines = [], []
    for res, rep in results:
        row = {
            "m": res.m,
            "k": res.k,
            "n": res.n,
            "dt4": fmt_q(res.value),
            "eta": fmt_q(rep.eta),
            "terms": res.terms,
            "splittings": res.splittings,
            "missing_entries": res.missing,
            "out_of_regime": not rep.eta_below_mu_over_mxi,
            "validity": {
                "eta_nonneg": rep.eta_nonneg,
                "eta_below_mu_over_mxi": rep.eta_below_mu_over_mxi,
                "cond_eta": rep.cond_eta,
                "gap_positive": rep.gap_positive,
                "mu_window_ok": rep.mu_window_ok,
                "lower_bound_status": rep.lower_bound_status,
            },
        }
        rows.append(row)
        flags = []
        if row["out_of_regime"]:
            flags.append("OUT-OF-REGIME")
        if res.missing:
            flags.append(f"missing={res.missing}")
        lines.append(
            f"m={res.m} k={res.k} n={res.n} dt4={row['dt4']} eta={row['eta']} terms={res.terms}"
            + (" " + " ".join(flags) if flags else "")
        )
    _emit(args, {"box": {"kmax": box.kmax, "nmax": box.nmax}, "results": rows}, lines)
    return 0


# -- series ------------------------------------------------------------------


def cmd_series(args) -> int:
    geom = _geometry(args)
    I, P = _tables(args, geom)
    m = args.m
    box = table_box(m, args.epsilon, args.xi, args.mu, geom)
    wx = args.window_x
    wy = args.window_y or (Fraction(-box.kmax - geom.h3 * m * m), Fraction(box.kmax + geom.h3 * m * m))
    if args.window_z:
        wz = args.window_z
    else:
        base = geom.chi_line_bundle(m)
        spread = 2 * box.nmax + 2 * m * box.kmax
        wz = (base - spread, base + spread)
    m1r = args.m1_range or zd6_m1_range(m, box, wy, geom)
    s = assemble_zd6(m, box, I, P, geom, m1r, [wx, wy, wz])
    d = dz_at(s, 1 if args.euler else -1)
    out = dump_json(d) if args.format == "json" else dump_text(d)
    if args.compare:
        other = load_table(args.compare)
        b = table_to_series(other, d.real_window())
        diffs = compare_modulo(d, b, m, args.xi, args.mu, geom)
        if args.format == "json":
            obj = json.loads(out)
            obj["compare"] = {"differences": len(diffs), "positions": [[fmt_q(k), fmt_q(n)] for k, n in diffs]}
            out = json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"
        else:
            out += f"# {len(diffs)} differences\n"
            out += "".join(f"# differs at k={fmt_q(k)} n={fmt_q(n)}\n" for k, n in diffs)
    sys.stdout.write(out)
    return 0


# -- walls -------------------------------------------------------------------


def cmd_walls(args) -> int:
    geom = _geometry(args)
    m, k, n = args.m, args.k, args.n
    eps = args.epsilon if args.epsilon is not None else Fraction(geom.h3, 2)
    rep = find_walls(m, k, n, eps, geom)
    walls, lines = [], []
    lines.append(f"eta={fmt_q(rep.eta)}")
    if rep.window:
        lines.append(f"window u in [{fmt_q(rep.window[0])}, {fmt_q(rep.window[1])}] (lower end conditional on BMT)")
    for u0, sps in rep.walls:
        polar = validate_extreme_polar(sps, m, rep.eta, geom) if rep.eta >= 0 else None
        items = []
        for i, sp in enumerate(sps):
            item = {
                "m1": sp.m1, "m2": sp.m2, "k1": sp.k1, "n1": sp.n1, "k2": sp.k2, "n2": sp.n2,
                "chi": fmt_q(sp.chi),
            }
            if polar is not None:
                c = polar.checks[i]
                item["extreme_polar"] = {"passes": c.passes, "boundary": c.boundary}
            items.append(item)
        walls.append({"u0": fmt_q(u0), "splittings": items})
        lines.append(f"wall u0={fmt_q(u0)} splittings={len(sps)}")
        for it in items:
            tag = ""
            if "extreme_polar" in it:
                ep = it["extreme_polar"]
                tag = " polar=" + ("pass" if ep["passes"] else "boundary" if ep["boundary"] else "fail")
            lines.append(
                f"  m1={it['m1']} m2={it['m2']} (k1,n1)=({it['k1']},{it['n1']}) "
                f"(k2,n2)=({it['k2']},{it['n2']}) chi={it['chi']}{tag}"
            )
    obj = {
        "m": m, "k": k, "n": n, "eta": fmt_q(rep.eta),
        "window": None if rep.window is None else [fmt_q(rep.window[0]), fmt_q(rep.window[1])],
        "walls": walls,
    }
    _emit(args, obj, lines)
    return 0


# -- localdt -----------------------------------------------------------------


def cmd_localdt(args) -> int:
    geom = _geometry(args)
    s = local_d4_series(args.m, args.a_range, geom, [args.window_x, args.window_y])
    sys.stdout.write(dump_json(s) if args.format == "json" else dump_text(s))
    return 0


# -- check -------------------------------------------------------------------


def cmd_check(args) -> int:
    geom = _geometry(args)
    m, k, n = args.m, args.k, args.n
    rep = validity_report(m, k, n, args.xi, args.mu, geom)
    obj = {
        "m": m, "k": k, "n": n,
        "eta": fmt_q(rep.eta),
        "d4_bound": check_d4_bound(m, k, n, geom),
        "eta_nonneg": rep.eta_nonneg,
        "eta_below_mu_over_mxi": rep.eta_below_mu_over_mxi,
        "cond_eta": rep.cond_eta,
        "gap_positive": rep.gap_positive,
        "mu_window_ok": rep.mu_window_ok,
        "lower_bound_status": rep.lower_bound_status,
    }
    lines = [f"eta={obj['eta']}"]
    lines.append("d4-bound: ok" if obj["d4_bound"] else "d4-bound: VIOLATED (eta < 0)")
    for key in ("eta_below_mu_over_mxi", "cond_eta", "gap_positive", "mu_window_ok"):
        lines.append(f"{key}: {'yes' if obj[key] else 'no'}")
    if args.degC is not None:
        ok = check_hcn(m, args.degC, args.N, geom)
        obj["hcn"] = ok
        lines.append(f"curve-degree bound m*degC <= 3N: {'ok' if ok else 'VIOLATED'}")
    _emit(args, obj, lines)
    return 0


# -- hn ----------------------------------------------------------------------


def _lattice(args) -> SurfaceLattice:
    if args.gram:
        rows = [tuple(int(x) for x in r.split(",")) for r in args.gram.split(";")]
        L = tuple(int(x) for x in args.L.split(",")) if args.L else (1,) + (0,) * (len(rows) - 1)
        return SurfaceLattice(tuple(rows), L)
    return SurfaceLattice(((args.L2,),), (1,))


def cmd_hn(args) -> int:
    lat = _lattice(args)
    out = []
    if args.equality_case is not None:
        data = thickened_section_data(args.equality_case, lat)
        holds, slack = appendix_inequality_holds(data, lat)
        rec = {"m": args.equality_case, "holds": holds, "slack": fmt_q(slack)}
        line = json.dumps(rec, sort_keys=True) if args.format == "json" else (
            f"equality case m={args.equality_case}: holds={holds} slack={fmt_q(slack)}"
        )
        sys.stdout.write(line + "\n")
        return 0
    bounds = SampleBounds(rmax=args.rmax, coord=args.coord)
    failures = 0
    for i in range(args.samples):
        seed = args.seed + i
        data = random_hn(seed, args.nfactors, bounds, lat)
        holds, slack = appendix_inequality_holds(data, lat)
        failures += not holds
        rec = {"seed": seed, "nfactors": args.nfactors, "holds": holds, "slack": fmt_q(slack)}
        out.append(json.dumps(rec, sort_keys=True) if args.format == "json" else
                   f"seed={seed} nfactors={args.nfactors} holds={holds} slack={fmt_q(slack)}")
    sys.stdout.write("".join(line + "\n" for line in out))
    # a failure contradicts a proved bound, so it is an integrity violation
    return 0 if failures == 0 else 2


# -- toy / dtpt --------------------------------------------------------------


def cmd_toy(args) -> int:
    geom_id = args.geometry_id or ""
    if args.degree0:
        I, P = toy_degree0(args.chix, args.nmax, geom_id)
    else:
        I = InvariantTable("DT_ideal", geom_id, {(0, 0): 1})
        P = InvariantTable("PT", geom_id, {(0, 0): 1})
    os.makedirs(args.out_dir, exist_ok=True)
    ext = "tsv" if args.table_format == "tsv" else "json"
    pi = os.path.join(args.out_dir, f"I.{ext}")
    pp = os.path.join(args.out_dir, f"P.{ext}")
    dump_table(I, pi, args.table_format)
    dump_table(P, pp, args.table_format)
    sys.stdout.write(f"{pi}\n{pp}\n")
    return 0


def cmd_dtpt(args) -> int:
    I, P = load_table(args.I), load_table(args.P)
    diffs = dtpt_check(I, P, args.chix, args.order)
    obj = {"differences": len(diffs), "positions": [[fmt_q(k), fmt_q(n)] for k, n in diffs]}
    lines = [f"{len(diffs)} differences"] + [f"differs at k={fmt_q(k)} n={fmt_q(n)}" for k, n in diffs]
    _emit(args, obj, lines)
    return 0


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dtwall", description="Exact DT4 invariants of divisor classes via wall-crossing.")
    p.add_argument("--format", choices=("text", "json"), default="text", help="output format")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    d = sub.add_parser("dt4", help="DT4(0, mH, -beta, -n) from I and P tables by wall-crossing")
    _add_geometry(d)
    d.add_argument("--I", required=True, help="DT_ideal table (json or tsv)")
    d.add_argument("--P", required=True, help="PT table (json or tsv)")
    d.add_argument("--m", type=int, required=True, help="divisor class mH")
    d.add_argument("--k", type=int, help="curve degree beta.H of the D4 class")
    d.add_argument("--n", type=int, help="Euler characteristic n of the D4 class")
    d.add_argument("--k-range", type=int_range, help="sweep k over lo:hi")
    d.add_argument("--n-range", type=int_range, help="sweep n over lo:hi")
    d.add_argument("--workers", type=int, help="worker processes (capped by DTWALL_THREADS)")
    _add_regime(d)
    d.set_defaults(func=cmd_dt4)

    s = sub.add_parser("series", help="d/dz of the D6/anti-D6 series at z=-1 (or z=+1 with --euler)")
    _add_geometry(s)
    s.add_argument("--I", required=True)
    s.add_argument("--P", required=True)
    s.add_argument("--m", type=int, required=True)
    _add_regime(s)
    s.add_argument("--window-x", type=q_range, required=True, help="x-exponent window lo:hi (n)")
    s.add_argument("--window-y", type=q_range, help="y-exponent window lo:hi (beta.H)")
    s.add_argument("--window-z", type=q_range, help="z-exponent window lo:hi")
    s.add_argument("--m1-range", type=int_range, help="m1 summation range lo:hi (default: all that reach the window)")
    s.add_argument("--euler", action="store_true", help="evaluate at z=+1 (Euler-characteristic invariants)")
    s.add_argument("--compare", help="DT4 table to compare against in the theorem range")
    s.set_defaults(func=cmd_series)

    w = sub.add_parser("walls", help="admissible walls in u = t^2 for a D4 class")
    _add_geometry(w)
    w.add_argument("--m", type=int, required=True)
    w.add_argument("--k", type=int, required=True)
    w.add_argument("--n", type=int, required=True)
    w.add_argument("--epsilon", type=rational, help="enumeration box C(m, eps); default H^3/2")
    w.set_defaults(func=cmd_walls)

    l = sub.add_parser("localdt", help="local D4 series of a divisor in |mH| with NS = Z.H")
    _add_geometry(l)
    l.add_argument("--m", type=int, required=True)
    l.add_argument("--a-range", type=int_range, required=True, help="lattice summation range lo:hi")
    l.add_argument("--window-x", type=q_range, required=True)
    l.add_argument("--window-y", type=q_range, required=True)
    l.set_defaults(func=cmd_localdt)

    c = sub.add_parser("check", help="eta, the D4 bound and the regime criteria")
    _add_geometry(c)
    c.add_argument("--m", type=int, required=True)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--xi", type=rational, default=Fraction(1))
    c.add_argument("--mu", type=rational, default=Fraction(1))
    c.add_argument("--degC", type=int, help="H.C of a destabilising curve")
    c.add_argument("--N", type=int, default=1, help="bound parameter N for the curve-degree check")
    c.set_defaults(func=cmd_check)

    h = sub.add_parser("hn", help="random HN data against the surface inequality")
    h.add_argument("--seed", type=int, default=0)
    h.add_argument("--samples", type=int, default=100)
    h.add_argument("--nfactors", type=int, default=3)
    h.add_argument("--rmax", type=int, default=3)
    h.add_argument("--coord", type=int, default=4)
    h.add_argument("--L2", type=int, default=1, help="L.L for the rank-1 lattice")
    h.add_argument("--gram", help="rank-2 Gram matrix as 'a,b;c,d'")
    h.add_argument("--L", help="polarisation coordinates for --gram, e.g. '1,0'")
    h.add_argument("--equality-case", type=int, metavar="M", help="thickened-section data of order M")
    h.set_defaults(func=cmd_hn)

    t = sub.add_parser("toy", help="write toy I/P tables")
    t.add_argument("--out-dir", required=True)
    t.add_argument("--degree0", action="store_true", help="degree-zero tables from M(-x)^chiX")
    t.add_argument("--chix", type=int, default=0)
    t.add_argument("--nmax", type=int, default=10)
    t.add_argument("--geometry-id")
    t.add_argument("--table-format", choices=("json", "tsv"), default="json")
    t.set_defaults(func=cmd_toy)

    q = sub.add_parser("dtpt", help="check I(x,y) = M(-x)^chiX P(x,y)")
    q.add_argument("--I", required=True)
    q.add_argument("--P", required=True)
    q.add_argument("--chix", type=int, required=True)
    q.add_argument("--order", type=int, default=10)
    q.set_defaults(func=cmd_dtpt)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    if not getattr(args, "command", None):
        parser.print_help(sys.stderr)
        return 1
    try:
        return args.func(args)
    except IntegralityError as exc:
        print(f"dtwall: integrality violation: {exc}", file=sys.stderr)
        return 2
    except (UsageError, DTWallError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"dtwall: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
