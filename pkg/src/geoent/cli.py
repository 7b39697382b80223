"""Command-line front end: ``geoent {eval,sweep,domains,oracle,nearest,verify}``.

Exit codes: 0 ok, 1 a verification check failed, 2 I/O error, 3 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .analytic import criteria, eigenvalues_gamma0, eigenvalues_gamma_half
from .general_gamma import (
    dispatch_route, pmax_general, stationary_points_numeric, stationary_points_quarter,
)
from .oracle import alternating_maximize, bloch_vector, grid_maximize_symmetric
from .qstate import (
    DegenerateStateError, SymmetricState, UVPoint, fmt17, from_params, from_uv, named_state,
    state_vector,
)
from .stationarity import lambda_zero_branch, nearest_product_lambda_zero
from .sweep import (
    boundary_trace, domain_map_from_records, max_workers, records_to_csv, run_sweep,
)
from .verify import CHECKS, VerifyConfig, run_checks

EXIT_OK, EXIT_CHECK, EXIT_IO, EXIT_USAGE = 0, 1, 2, 3
DEFAULT_SEED = 42


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return n


def _grid(text: str) -> int:
    n = _positive_int(text)
    if n < 2:
        raise argparse.ArgumentTypeError("grid must be >= 2")
    return n


def _add_gamma(p):
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--gamma", type=float, help="phase in radians (default 0)")
    grp.add_argument("--gamma-pi", type=float, metavar="F", help="phase as a multiple of pi")


def _add_state(p):
    p.add_argument("--g", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--h", type=float)
    p.add_argument("--u", type=float)
    p.add_argument("--v", type=float)
    _add_gamma(p)


def _gamma(args) -> float:
    if getattr(args, "gamma_pi", None) is not None:
        return args.gamma_pi * math.pi
    return args.gamma if getattr(args, "gamma", None) is not None else 0.0


def _state(args) -> SymmetricState:
    amp = [args.g, args.t, args.h]
    uv = [args.u, args.v]
    has_amp = any(x is not None for x in amp)
    has_uv = any(x is not None for x in uv)
    if has_amp == has_uv:
        raise UsageError("give exactly one of --g/--t/--h or --u/--v")
    gamma = _gamma(args)
    if has_amp:
        if any(x is None for x in amp):
            raise UsageError("--g, --t and --h must be given together")
        return from_params(*amp, gamma)
    if any(x is None for x in uv):
        raise UsageError("--u and --v must be given together")
    return from_uv(UVPoint(*uv), gamma)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="geoent", description="Maximal overlap and geometric entanglement of "
                "symmetric three-qubit states.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", help="P_max, branch and eigenvalues of one state")
    _add_state(e)
    e.add_argument("--json", action="store_true", help="machine-readable output")
    e.add_argument("--n-starts", type=_positive_int, default=64)

    for name, text in (("sweep", "P_max over the (u, v) square, as CSV"),
                       ("domains", "domain map and domain count")):
        s = sub.add_parser(name, help=text)
        _add_gamma(s)
        s.add_argument("--grid", type=_grid, default=200 if name == "domains" else 100)
        s.add_argument("-o", "--output", help="CSV path ('-' for stdout)",
                       default="-" if name == "sweep" else None)
        s.add_argument("--figure", action="store_true",
                       help="also render PNG figures next to the CSV")

    o = sub.add_parser("oracle", help="brute-force maximal overlap")
    _add_state(o)
    o.add_argument("--named", choices=["W", "GHZ", "PsiW"], help="reference state instead of g/t/h")
    o.add_argument("--t3", type=float, help="amplitude of |110> (partially symmetric state)")
    o.add_argument("--restarts", type=_positive_int, default=50)
    o.add_argument("--seed", type=int, default=DEFAULT_SEED)
    o.add_argument("--resolution", type=int, default=512, help="Bloch grid size for the grid oracle")

    n = sub.add_parser("nearest", help="nearest product states")
    _add_state(n)
    n.add_argument("--restarts", type=_positive_int, default=50)
    n.add_argument("--seed", type=int, default=DEFAULT_SEED)

    v = sub.add_parser("verify", help="run the self-verification suite")
    v.add_argument("--samples", type=_positive_int, help="sample count for every random check")
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--only", action="append", metavar="CHECK",
                   help=f"run only these checks (repeatable or comma separated): {', '.join(CHECKS)}")
    v.add_argument("--grid", type=_grid, default=200, help="grid for the domain-count check")
    return p


# --------------------------------------------------------------------- commands

def _branch_table(s: SymmetricState, n_starts: int):
    route = dispatch_route(s.gamma)
    if route in ("gamma0", "gamma_half"):
        table = eigenvalues_gamma0(s) if route == "gamma0" else eigenvalues_gamma_half(s)
        return [{"branch": e.branch, "mu_sq": e.mu_sq, "lambda": e.lam, "available": e.available}
                for e in table]
    rep = (stationary_points_quarter(s) if route == "quarter"
           else stationary_points_numeric(s, n_starts))
    return [{"branch": p.branch, "mu_sq": p.mu_sq, "lambda": p.lam, "available": True}
            for p in rep.points]


def _num(x):
    return None if x is None or (isinstance(x, float) and math.isnan(x)) else float(x)


def cmd_eval(args) -> int:
    s = _state(args)
    res = pmax_general(s, args.n_starts)
    crit = criteria(s)
    table = _branch_table(s, args.n_starts)
    crit_d = {"D1": crit.D1, "C1": crit.C1, "C2": crit.C2, "C3": crit.C3, "Cplus": crit.Cplus}
    if args.json:
        out = {
            "state": json.loads(s.to_json()),
            "p_max": res.p_max,
            "G": 1.0 - res.p_max,
            "branch": res.branch,
            "route": dispatch_route(s.gamma),
            "boundary": res.boundary,
            "branches": [{k: (_num(v) if k in ("mu_sq", "lambda") else v) for k, v in row.items()}
                         for row in table],
            "criteria": crit_d,
        }
        print(json.dumps(out, indent=2))
        return EXIT_OK
    print(f"state    g={fmt17(s.g)} t={fmt17(s.t)} h={fmt17(s.h)} gamma={fmt17(s.gamma)}")
    print(f"route    {dispatch_route(s.gamma)}")
    print(f"P_max    {fmt17(res.p_max)}")
    print(f"G        {fmt17(1.0 - res.p_max)}")
    print(f"branch   {res.branch}" + ("  (on a domain boundary)" if res.boundary else ""))
    print("branches")
    for row in table:
        flag = "" if row["available"] else "  unavailable"
        print(f"  {row['branch']:<6} mu^2={row['mu_sq']:.15g}  lambda={row['lambda']:.15g}{flag}")
    print("criteria " + "  ".join(f"{k}={v:.6g}" for k, v in crit_d.items()))
    return EXIT_OK


def _write_text(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def cmd_sweep(args, domains: bool = False) -> int:
    gamma = _gamma(args)
    if args.figure and args.output in (None, "-"):
        raise UsageError("--figure needs a CSV path via -o")
    records = run_sweep(gamma, args.grid, max_workers())
    if args.output is not None:
        _write_text(args.output, records_to_csv(records))
    summary = sys.stderr if args.output == "-" else sys.stdout
    dmap = domain_map_from_records(records, args.grid)
    if domains:
        print(f"domains: {dmap.domain_count}", file=summary)
        print("components: " + ", ".join(f"{k}={v}" for k, v in dmap.components.items()),
              file=summary)
        print(f"boundary fraction: {dmap.boundary_fraction:.6g}", file=summary)
    else:
        print(f"records: {len(records)}", file=summary)
    if args.output not in (None, "-"):
        print(f"csv: {args.output}", file=summary)
    if args.figure:
        from .plotting import figure_paths, plot_domains, plot_pmax
        dom_png, pmax_png = figure_paths(args.output)
        traces = {}
        for crit, gam in (("D1", 0.0), ("C2", math.pi / 2), ("C3", math.pi / 2)):
            if abs(abs(dmap.gamma) - gam) < 1e-12:
                traces[crit] = boundary_trace(dmap.gamma, crit, args.grid)
        plot_domains(dmap, dom_png, traces)
        plot_pmax(dmap, pmax_png)
        print(f"figures: {dom_png} {pmax_png}", file=summary)
    return EXIT_OK


def _oracle_state(args):
    """(psi, symmetric state or None, description) for the oracle command."""
    if args.named:
        if any(x is not None for x in (args.g, args.t, args.h, args.u, args.v, args.t3)):
            raise UsageError("--named cannot be combined with state parameters")
        return named_state(args.named), None, args.named
    if args.t3 is not None:
        if None in (args.g, args.t, args.h):
            raise UsageError("--t3 needs --g, --t and --h")
        psi = named_state("PartialSym", g=args.g, t=args.t, t3=args.t3, h=args.h, gamma=_gamma(args))
        return psi, None, "partially symmetric"
    s = _state(args)
    return state_vector(s), s, "symmetric"


def _fmt_qubit(q) -> str:
    q = np.asarray(q)
    # fix the global phase so the first non-zero amplitude is real
    k = 0 if abs(q[0]) > 1e-12 else 1
    q = q * np.exp(-1j * np.angle(q[k]))
    q = np.where(np.abs(q.real) < 1e-14, 0, q.real) + 1j * np.where(np.abs(q.imag) < 1e-14, 0, q.imag)
    return "(" + ", ".join(f"{z.real:.12g}{z.imag:+.12g}j" for z in q) + ")"


def cmd_oracle(args) -> int:
    psi, s, kind = _oracle_state(args)
    res = alternating_maximize(psi, args.restarts, seed=args.seed)
    print(f"seed       {args.seed}")
    print(f"state      {kind}")
    print(f"alternating P_max={fmt17(res.p_max)}  restarts={res.restarts_used}  "
          f"sweeps={res.iterations}")
    for k, q in enumerate((res.triple.q1, res.triple.q2, res.triple.q3), 1):
        print(f"  q{k} = {_fmt_qubit(q)}  bloch={np.round(bloch_vector(q), 12).tolist()}")
    if s is not None:
        grid = grid_maximize_symmetric(s, args.resolution)
        ref = pmax_general(s)
        print(f"grid       P_max={fmt17(grid.p_max)}")
        print(f"analytic   P_max={fmt17(ref.p_max)}  branch={ref.branch}")
        print(f"max deviation {max(abs(res.p_max - ref.p_max), abs(grid.p_max - ref.p_max)):.3e}")
    return EXIT_OK


def cmd_nearest(args) -> int:
    s = _state(args)
    print(f"seed  {args.seed}")
    try:
        zero = lambda_zero_branch(s)
        pair = nearest_product_lambda_zero(s)
        print(f"lambda=0 branch  mu0^2={fmt17(zero.mu_sq)}")
        print(f"  q  = {_fmt_qubit(pair.q)}")
        print(f"  q' = {_fmt_qubit(pair.q_prime)}")
        print(f"  <q|q'> = {abs(np.vdot(pair.q, pair.q_prime)):.3e}")
    except ValueError as exc:
        print(f"lambda=0 branch  {exc}")
    res = alternating_maximize(state_vector(s), args.restarts, seed=args.seed)
    print(f"global maximum   P_max={fmt17(res.p_max)}")
    for k, q in enumerate((res.triple.q1, res.triple.q2, res.triple.q3), 1):
        print(f"  q{k} = {_fmt_qubit(q)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    names = None
    if args.only:
        names = [n.strip() for item in args.only for n in item.split(",") if n.strip()]
        unknown = [n for n in names if n not in CHECKS]
        if unknown:
            raise UsageError(f"unknown check(s): {', '.join(unknown)}; choose from {', '.join(CHECKS)}")
    cfg = VerifyConfig(samples=args.samples, seed=args.seed, grid=args.grid)
    print(f"seed {args.seed}  samples {args.samples if args.samples else 'default'}  grid {args.grid}")
    failed = []
    for res in run_checks(names, cfg):
        print(res.line(), flush=True)
        if not res.passed:
            failed.append(res.name)
    if failed:
        print(f"FAILED: {', '.join(failed)}")
        return EXIT_CHECK
    print("all checks passed")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        if args.cmd == "eval":
            return cmd_eval(args)
        if args.cmd in ("sweep", "domains"):
            return cmd_sweep(args, domains=args.cmd == "domains")
        if args.cmd == "oracle":
            return cmd_oracle(args)
        if args.cmd == "nearest":
            return cmd_nearest(args)
        return cmd_verify(args)
    except UsageError as exc:
        print(f"geoent: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"geoent: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DegenerateStateError, ValueError) as exc:
        print(f"geoent: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
