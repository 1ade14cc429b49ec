"""Command-line interface: ``shadowlp <subcommand> ...``.

Exit codes: 0 success / feasible, 2 infeasible, 3 unbounded,
4 degenerate-retry-exhausted, 1 usage or input error.
"""
import argparse
import json
import logging
import os
import sys

from . import numeric as nm
from .bounding import bound_global, bound_local
from .exceptions import (
    BadParams,
    DeltaOverestimated,
    NoFeasibleBasis,
    RetriesExhausted,
    ShadowLPError,
    Unbounded,
)
from .feasibility import phase1_global_delta, phase1_subdeterminant, ray_cast_to_basis
from .geometry import (
    MatchingInstance,
    delta_from_subdeterminants,
    first_feasible_basis,
    global_delta_witness,
    is_bounded,
    local_delta_witness,
    recession_rays,
    matching_adjacency_checks,
    matching_width_certificate,
    width_certificate_of_cone,
)
from .harness import (
    KINDS,
    NormalFan,
    crossings_scaled,
    crossings_shifted,
    diameter_bound,
    diameter_path,
    generate_instance,
    instance_to_json,
    load_instance,
    save_instance,
    check_path,
)
from .optimize import optimize_with_delta_search, phase2_optimize

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE, EXIT_UNBOUNDED, EXIT_DEGENERATE = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # 2 is reserved for "infeasible"
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _emit(obj):
    json.dump(obj, sys.stdout, indent=1)
    sys.stdout.write("\n")


def _ints(text):
    return [int(t) for t in text.split(",") if t.strip()] if text else None


def _vec(text):
    return nm.vector(t.strip() for t in text.split(","))


def _start_basis(P, given, seed):
    if given is not None:
        return given
    res = phase1_global_delta(P, rng=seed)
    if not res.feasible:
        raise NoFeasibleBasis(json.dumps(res.to_json()))
    return res.basis


def cmd_gen(args):
    params = {"n": args.n}
    if args.m is not None:
        params["m"] = args.m
    P = generate_instance(args.kind, params, args.seed)
    if args.out:
        save_instance(P, args.out)
        _emit(P.meta)
    else:
        _emit(instance_to_json(P))
    return EXIT_OK


def cmd_solve(args):
    P = load_instance(args.instance)
    d = _vec(args.objective)
    try:
        basis = _start_basis(P, _ints(args.basis), args.seed)
    except NoFeasibleBasis as exc:
        _emit({"status": "infeasible", "certificate": json.loads(str(exc))})
        return EXIT_INFEASIBLE
    original_m = P.m
    Q, delta_sq = P, args.delta_sq
    if not is_bounded(P):
        if any(nm.dot(d, r) > 0 for r in recession_rays(P.A)):
            _emit({"status": "unbounded", "ray": [nm.fmt(x) for x in next(
                r for r in recession_rays(P.A) if nm.dot(d, r) > 0)]})
            return EXIT_UNBOUNDED
        # bounded objective on an unbounded P: solve the LP-equivalent polytope
        local_sq = delta_sq if delta_sq is not None else local_delta_witness(P)[0]
        Q, report = bound_local(P, basis, local_sq)
        delta_sq = report.claimed_delta_sq
    kw = {"force_x_zero": args.force_x == "zero"}
    if delta_sq is not None:
        res = phase2_optimize(Q, delta_sq, basis, d, args.seed, **kw)
    else:
        res = optimize_with_delta_search(Q, basis, d, args.seed, **kw)
        delta_sq = res.delta_sq
    if args.trace:
        with open(args.trace, "w") as fh:
            fh.write(res.combined_trace().to_jsonl())
    basis, point = res.basis, res.point
    if any(i >= original_m for i in basis):
        # tie with a new vertex: walk inside the optimal face to a vertex of P
        face = P.with_rows([nm.scale(d, -1)], [-res.value])
        cast = ray_cast_to_basis(face, point)
        basis, point = cast.basis, cast.point
    _emit({
        "status": "optimal",
        "basis": basis,
        "vertex": [nm.fmt(x) for x in point],
        "value": nm.fmt(res.value),
        "pivots": res.pivots,
        "delta_sq": nm.fmt(delta_sq),
        "trace": args.trace,
    })
    return EXIT_OK


def cmd_feasible(args):
    P = load_instance(args.instance)
    if args.mode == "subdet":
        res = phase1_subdeterminant(P, args.Delta, args.seed)
    else:
        res = phase1_global_delta(P, args.delta_sq, args.seed)
    _emit(res.to_json() if res.feasible else dict(res.to_json(), status="infeasible"))
    return EXIT_OK if res.feasible else EXIT_INFEASIBLE


def cmd_bound(args):
    P = load_instance(args.instance)
    basis = _ints(args.basis)
    if args.mode == "local":
        if basis is None:
            basis = first_feasible_basis(P)
        delta_sq = args.delta_sq if args.delta_sq is not None else local_delta_witness(P)[0]
        Q, report = bound_local(P, basis, delta_sq)
    else:
        delta_sq = args.delta_sq if args.delta_sq is not None else global_delta_witness(P.A)[0]
        Q, report = bound_global(P, delta_sq)
    if args.out:
        save_instance(Q, args.out)
    _emit({"report": report.to_json(), "instance": args.out or instance_to_json(Q)})
    return EXIT_OK


def cmd_certify(args):
    if args.what == "matching":
        matching = None
        if args.matching:
            matching = [tuple(int(v) for v in e.split("-")) for e in args.matching.split(",")]
        G = MatchingInstance.complete(args.vertices, matching)
        cert = matching_width_certificate(G)
        checks = [(ip, c) for _, ip, c in matching_adjacency_checks(G, cert)]
        _emit({
            "edges": [list(e) for e in G.edges],
            "w": list(cert.w),
            "tau_sq": nm.fmt(cert.tau_sq),
            "required_tau_sq": nm.fmt(nm.frac(1) / (9 * len(G.edges))),
            "adjacent_checks": len(checks),
            "all_adjacent_ok": all(ip >= c for ip, c in checks),
        })
        return EXIT_OK
    P = load_instance(args.instance)
    if args.what == "delta":
        ld, lb = local_delta_witness(P)
        gd, gb = global_delta_witness(P.A)
        _emit({"local_delta_sq": nm.fmt(ld), "local_witness": lb, "global_delta_sq": nm.fmt(gd), "global_witness": gb})
    elif args.what == "tau":
        ld, lb = local_delta_witness(P)
        cert = width_certificate_of_cone([P.A[i] for i in lb])
        out = cert.to_json(lb)
        if is_bounded(P):
            out["fan_tau_sq"] = nm.fmt(NormalFan(P).width_sq())
        _emit(out)
    else:
        b = delta_from_subdeterminants(P.A)
        _emit({"delta_sq": nm.fmt(b.delta_sq), "tau_sq": nm.fmt(b.tau_sq),
               "max_entry": nm.fmt(b.max_entry), "max_minor": nm.fmt(b.max_minor)})
    return EXIT_OK


def cmd_diameter(args):
    P = load_instance(args.instance)
    if not is_bounded(P):
        raise Unbounded("diameter paths need a polytope")
    tau_sq = nm.frac(args.tau_sq) if args.tau_sq else NormalFan(P).width_sq()
    path = diameter_path(P, _ints(args.v1), _ints(args.v2), tau_sq, args.seed)
    _emit({
        "length": path.length,
        "pivots": path.pivots,
        "bases": path.bases,
        "vertices": [[nm.fmt(x) for x in v] for v in path.vertices],
        "valid": check_path(P, path),
        "bound": diameter_bound(P.n, float(tau_sq)),
    })
    return EXIT_OK


def cmd_experiment(args):
    P = load_instance(args.instance)
    fan = NormalFan(P)
    tau_sq = nm.frac(args.tau_sq) if args.tau_sq else fan.width_sq()
    c = _vec(args.c) if args.c else (nm.frac(0),) * P.n
    if args.kind == "crossings-shifted":
        if not args.d:
            raise BadParams("--d is required for crossings-shifted")
        rep = crossings_shifted(fan, c, _vec(args.d), args.trials, args.seed, tau_sq,
                                args.check_oracle, workers=args.workers)
        summary, csv_text = rep.summary(), rep.to_csv()
    elif args.kind == "crossings-scaled":
        rep = crossings_scaled(fan, c, nm.frac(args.alpha), args.trials, args.seed, tau_sq,
                               args.check_oracle, workers=args.workers)
        summary, csv_text = rep.summary(), rep.to_csv()
    else:
        summary, csv_text = _path_experiment(args, P, fan, tau_sq)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, f"{args.kind}.json"), "w") as fh:
            json.dump(summary, fh, indent=1)
        with open(os.path.join(args.out, f"{args.kind}.csv"), "w") as fh:
            fh.write(csv_text)
    _emit(summary)
    return EXIT_OK


def _path_experiment(args, P, fan, tau_sq):
    """diameter / phase2-stats: one path or solve per spawned seed."""
    import csv
    import io

    import numpy as np

    seeds = np.random.SeedSequence(args.seed).spawn(args.trials)
    rows = []
    if args.kind == "diameter":
        v1, v2 = _ints(args.v1), _ints(args.v2)
        for t, s in enumerate(seeds):
            path = diameter_path(P, v1, v2, tau_sq, np.random.default_rng(s))
            rows.append((t, path.length, path.pivots, int(check_path(P, path, fan.vertices))))
        bound = diameter_bound(P.n, float(tau_sq))
        header = ["trial", "length", "pivots", "valid"]
    else:
        d = _vec(args.d) if args.d else P.A[0]
        basis = first_feasible_basis(P)
        delta_sq = nm.frac(args.delta_sq) if args.delta_sq else local_delta_witness(P)[0]
        for t, s in enumerate(seeds):
            res = phase2_optimize(P, delta_sq, basis, d, np.random.default_rng(s))
            rows.append((t, res.pivots, res.pivots, 1))
        bound = None
        header = ["trial", "pivots", "pivots_total", "valid"]
    vals = [r[1] for r in rows]
    summary = {
        "kind": args.kind,
        "trials": len(rows),
        "mean": float(np.mean(vals)),
        "stderr": float(np.std(vals, ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0,
        "bound": bound,
        "all_valid": all(r[3] for r in rows),
        "seed": args.seed,
    }
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(header)
    w.writerows(rows)
    return summary, buf.getvalue()


def build_parser():
    p = _Parser(prog="shadowlp", description="Exact shadow simplex toolkit.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--m", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="phase-2 optimization (maximize <d, x>)")
    s.add_argument("--instance", required=True)
    s.add_argument("--objective", required=True, help='comma-separated rationals, e.g. "1,1/2"')
    s.add_argument("--delta-sq", type=nm.frac)
    s.add_argument("--basis", help="starting feasible basis i,j,k (default: phase 1)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--force-x", choices=["zero"])
    s.add_argument("--trace", help="write the pivot trace as JSON lines")
    s.set_defaults(func=cmd_solve)

    f = sub.add_parser("feasible", help="phase 1")
    f.add_argument("--instance", required=True)
    f.add_argument("--mode", choices=["subdet", "global"], default="global")
    f.add_argument("--delta-sq", type=nm.frac)
    f.add_argument("--Delta", type=int, help="subdeterminant bound for --mode subdet")
    f.add_argument("--seed", type=int, default=0)
    f.set_defaults(func=cmd_feasible)

    b = sub.add_parser("bound", help="LP-equivalent bounded polytope")
    b.add_argument("--instance", required=True)
    b.add_argument("--mode", choices=["local", "global"], default="local")
    b.add_argument("--basis")
    b.add_argument("--delta-sq", type=nm.frac)
    b.add_argument("--out", help="write the bounded instance here")
    b.set_defaults(func=cmd_bound)

    c = sub.add_parser("certify", help="delta / tau / subdeterminant / matching certificates")
    c.add_argument("what", choices=["delta", "tau", "subdet", "matching"])
    c.add_argument("--instance")
    c.add_argument("--vertices", type=int, default=4, help="K_n size for matching")
    c.add_argument("--matching", help='e.g. "0-1,2-3"')
    c.set_defaults(func=cmd_certify)

    d = sub.add_parser("diameter", help="diameter path between two vertex bases")
    d.add_argument("--instance", required=True)
    d.add_argument("--v1", required=True)
    d.add_argument("--v2", required=True)
    d.add_argument("--tau-sq")
    d.add_argument("--seed", type=int, default=0)
    d.set_defaults(func=cmd_diameter)

    e = sub.add_parser("experiment", help="Monte Carlo experiments; JSON + CSV reports")
    e.add_argument("kind", choices=["crossings-shifted", "crossings-scaled", "diameter", "phase2-stats"])
    e.add_argument("--instance", required=True)
    e.add_argument("--trials", type=int, default=1000)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--tau-sq")
    e.add_argument("--c")
    e.add_argument("--d")
    e.add_argument("--alpha", default="1/2")
    e.add_argument("--v1")
    e.add_argument("--v2")
    e.add_argument("--delta-sq")
    e.add_argument("--check-oracle", action="store_true")
    e.add_argument("--workers", type=int)
    e.add_argument("--out", help="directory for <kind>.json and <kind>.csv")
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    if args.command == "certify" and args.what != "matching" and not args.instance:
        print("certify: --instance is required", file=sys.stderr)
        return EXIT_ERROR
    if args.command == "experiment" and args.kind == "diameter" and not (args.v1 and args.v2):
        print("experiment diameter: --v1 and --v2 are required", file=sys.stderr)
        return EXIT_ERROR
    try:
        return args.func(args)
    except Unbounded as exc:
        _emit({"status": "unbounded", "message": str(exc)})
        return EXIT_UNBOUNDED
    except RetriesExhausted as exc:
        _emit({"status": "degenerate-retry-exhausted", "message": str(exc)})
        return EXIT_DEGENERATE
    except DeltaOverestimated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ShadowLPError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
