"""Command-line front end.

Exit codes: 0 success, 1 domain error (bad data, non-convergence, a failed
check), 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from typing import List, Optional

from . import acceptance
from .kasteleyn import (
    EdgeWeighting,
    char_poly,
    example_weighting,
    family_polynomial,
    laurent_char_poly,
    symbolic_char_poly,
)
from .laurent import LaurentPoly2, format_homogeneous
from .lattice_graph import (
    WorkBoundExceeded,
    build_torus_graph,
    iter_matchings,
    positive_edges,
    render_tiling_svg,
    to_rhombus_tiling,
)
from .lseries import NoConsistentConductor, ap_table, probe, spectral_cubic
from .mahler import UndefinedMeasure, mahler_jensen, mahler_quadrature
from .qseries import (
    ConvergenceError,
    eisenstein,
    format_power,
    mcmahon,
    q_product,
    solve_q,
    t_of_q,
    verify_mahler_product,
)
from .torus_partition import (
    NonPositivePartition,
    brute_force_partition,
    log_partition_function,
    sector_values,
    signed_partition,
)

DOMAIN_ERRORS = (ValueError, KeyError, ArithmeticError, ConvergenceError, NoConsistentConductor,
                 NonPositivePartition, UndefinedMeasure, WorkBoundExceeded, OSError)


class UsageError(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _num(v) -> str:
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _weighting(args) -> EdgeWeighting:
    if args.weights:
        return EdgeWeighting.from_json(_load_json(args.weights))
    if args.family is None:
        raise UsageError("give --weights FILE or --family F")
    W, _ = example_weighting(args.family, args.m, args.w)
    return W


def _emit(args, data: dict, lines: List[str]) -> None:
    if args.json:
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        print("\n".join(lines))


def cmd_charpoly(args) -> int:
    if args.symbolic:
        S = symbolic_char_poly()
        _emit(args, {"terms": [{"sign": t.sign, "edges": list(t.labels), "a": t.a, "b": t.b} for t in S.terms]},
              [S.format()])
        return 0
    if args.s is not None:
        if args.family is None:
            raise UsageError("--s needs --family")
        P = family_polynomial(args.family, args.s)
        homog = P.shift(1, 1).homogenize(3)
        _emit(args, {"homogeneous": _homog_json(homog), "laurent": P.to_json()},
              [P.format() if args.laurent else format_homogeneous(homog)])
        return 0
    W = _weighting(args)
    g = build_torus_graph(args.n)
    P = char_poly(g, W)
    lines = []
    if args.homogeneous or (args.n == 1 and not args.laurent):
        lines.append(format_homogeneous(P.homogenize(3 * args.n)))
    else:
        lines.append(P.format())
    data = {"n": args.n, "polynomial": P.to_json()}
    if args.n == 1:
        data["homogeneous"] = _homog_json(P.homogenize(3))
    _emit(args, data, lines)
    return 0


def _homog_json(h) -> list:
    return [{"i": i, "j": j, "k": k, "c": _num(c)} for (i, j, k), c in sorted(h.items(), reverse=True)]


def _polynomial(args) -> LaurentPoly2:
    if args.poly:
        return LaurentPoly2.from_json(_load_json(args.poly))
    if args.family is None or args.s is None:
        raise UsageError("give --poly FILE or --family F --s S")
    return family_polynomial(args.family, args.s)


def cmd_mahler(args) -> int:
    P = _polynomial(args)
    data, lines = {}, []
    if args.method in ("quad", "both"):
        q = mahler_quadrature(P, args.resolution, dps=args.dps)
        data["quadrature"] = {"value": float(q.value), "error": float(q.error), "zero_nodes": q.perturbed_nodes}
        lines.append(f"quadrature  m = {float(q.value):.15g}  (error indicator {float(q.error):.2e})")
    if args.method in ("jensen", "both"):
        j = mahler_jensen(P, 2 * args.resolution)
        data["jensen"] = {"value": j.value, "error": j.error, "flagged_nodes": len(j.flagged_nodes)}
        lines.append(f"jensen      m = {j.value:.15g}  (error indicator {j.error:.2e})")
    if args.method == "both":
        diff = abs(data["quadrature"]["value"] - data["jensen"]["value"])
        data["difference"] = diff
        lines.append(f"difference    {diff:.2e}")
    _emit(args, data, lines)
    return 0


def cmd_partition(args) -> int:
    W = _weighting(args)
    P = laurent_char_poly(W)
    sv = sector_values(P, args.n)
    data = {"n": args.n, "sectors": {f"{a}{b}": _num(v) for (a, b), v in sv.z.items()}}
    lines = [f"Z_{args.n}^({a},{b}) = {_num(v)}" for (a, b), v in sv.z.items()]
    if sv.log_abs is not None and any(math.isinf(v) for v in sv.z.values()):
        logz = log_partition_function(P, args.n)
        data.update(Z=None, log_Z=logz)
        lines.append(f"log Z = {logz!r}")
    else:
        signed = signed_partition(sv)
        Z = abs(signed)
        if Z <= 0:
            raise NonPositivePartition("partition function is not positive")
        logz = math.log(Z)
        data.update(signed=_num(signed), Z=_num(Z), log_Z=logz)
        lines.append(f"signed combination = {_num(signed)}")
        lines.append(f"Z = {_num(Z)}")
    data["free_energy"] = logz / args.n**2
    lines.append(f"(1/n^2) log Z = {logz / args.n ** 2!r}")
    if args.brute_force:
        bf = brute_force_partition(build_torus_graph(args.n), W, allow_large=args.n > 1)
        data["brute_force"] = _num(bf)
        lines.append(f"brute force = {_num(bf)}")
    _emit(args, data, lines)
    return 0


def cmd_qseries(args) -> int:
    if args.family is None and not (args.action is None and args.what == "mcmahon"):
        raise UsageError("--family is required")
    if args.action == "solve":
        if args.s is None:
            raise UsageError("qseries solve needs --s")
        q0 = solve_q(args.family, float(args.s))
        data = {"family": args.family, "s": _num(args.s), "q0": q0}
        lines = [f"q0 = {q0:.15g}"]
        if args.check:
            c = verify_mahler_product(args.family, args.s)
            data.update(m_poly=c.m_poly, m_product=c.m_product, gap=c.gap)
            lines.append(f"m(P) = {c.m_poly:.15g}  product side = {c.m_product:.15g}  gap = {c.gap:.2e}")
        _emit(args, data, lines)
        return 0
    series = {
        "product": lambda: q_product(args.family, args.order),
        "eisenstein": lambda: eisenstein(args.family, args.order),
        "t": lambda: t_of_q(args.family, args.order),
        "mcmahon": lambda: mcmahon(args.order),
    }[args.what]()
    lines = [f"{format_power(e)}: {c}" for e, c in series.items()]
    lines.append(f"O({format_power(series.precision)})")
    _emit(args, series.to_json(), lines)
    return 0


def cmd_lseries(args) -> int:
    if args.sign is not None and args.conductor is None:
        raise UsageError("--sign needs --conductor")
    r = probe(args.family, args.s, args.pmax, conductor=args.conductor, sign=args.sign, cutoff=args.cutoff)
    table = ap_table(spectral_cubic(args.family, args.s), min(args.pmax, args.show))
    data = {
        "family": args.family, "s": _num(args.s), "p_max": args.pmax,
        "ap": {str(p): {"count": e.count, "ap": e.ap, "bad": e.bad, "reduction": e.reduction}
               for p, e in table.entries.items()},
        "conductor": r.N, "sign": r.eps, "l_prime_zero": r.l_prime, "stable": r.estimate.stable,
        "mahler": r.mahler, "ratio": r.ratio, "rational": None if r.rational is None else str(r.rational),
    }
    lines = [f"p={p:<5d} #={e.count:<6d} a_p={e.ap:+d}" + (f"  bad ({e.reduction})" if e.bad else "")
             for p, e in table.entries.items()]
    lines += [
        f"conductor N = {r.N}, sign = {r.eps:+d}",
        f"L'(E, 0) = {r.l_prime:.15g}  (stable: {r.estimate.stable})",
        f"m(F)     = {r.mahler:.15g}",
        f"ratio    = {r.ratio:.12g}",
        f"rational = {r.rational if r.rational is not None else 'none detected'}",
    ]
    _emit(args, data, lines)
    return 0


def cmd_tiling(args) -> int:
    W = _weighting(args)
    g = build_torus_graph(args.n)
    if args.index < 0:
        raise ValueError("index must be nonnegative")
    count = 0
    for M in iter_matchings(g, positive_edges(g, W), allow_large=args.n > 1):
        if count == args.index:
            break
        count += 1
    else:
        raise ValueError(f"only {count} matchings; index {args.index} out of range")
    svg = render_tiling_svg(to_rhombus_tiling(g, M, W))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(svg)
    else:
        sys.stdout.write(svg)
    if args.out:
        _emit(args, {"out": args.out, "edges": list(M.labels(g))}, [f"wrote {args.out}: {' '.join(M.labels(g))}"])
    return 0


def cmd_verify(args) -> int:
    results = acceptance.run_all(seed=args.seed, only=args.only)
    if args.json:
        print(json.dumps([r.__dict__ for r in results], indent=2))
    else:
        for r in results:
            print(r.line())
        print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    return 0 if all(r.passed for r in results) else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a subcommand's defaults from overriding flags given before it
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for randomized checks")

    p = argparse.ArgumentParser(prog="dimermahler", description="Dimer models on the honeycomb torus and Mahler measures.",
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    def weights_args(sp):
        sp.add_argument("--weights", help="weighting JSON file")
        sp.add_argument("--family", type=int, choices=(6, 3, 4))
        sp.add_argument("--m", type=_fraction, default=Fraction(1))
        sp.add_argument("--w", type=_fraction, default=Fraction(1))

    sp = sub.add_parser("charpoly", parents=[common], help="characteristic polynomial")
    weights_args(sp)
    sp.add_argument("--s", type=_fraction, help="print the family cubic with this s instead")
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--laurent", action="store_true", help="print in x, y rather than X, Y, Z")
    sp.add_argument("--homogeneous", action="store_true", help="print in X, Y, Z (the default for n = 1)")
    sp.add_argument("--symbolic", action="store_true", help="full expansion in the edge symbols")
    sp.set_defaults(func=cmd_charpoly)

    sp = sub.add_parser("mahler", parents=[common], help="logarithmic Mahler measure")
    sp.add_argument("--poly", help="polynomial JSON file")
    sp.add_argument("--family", type=int, choices=(6, 3, 4))
    sp.add_argument("--s", type=_fraction)
    sp.add_argument("--method", choices=("quad", "jensen", "both"), default="both")
    sp.add_argument("--resolution", type=int, default=128)
    sp.add_argument("--dps", type=int, help="mpmath precision for the quadrature")
    sp.set_defaults(func=cmd_mahler)

    sp = sub.add_parser("partition", parents=[common], help="torus partition function")
    weights_args(sp)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--brute-force", action="store_true")
    sp.set_defaults(func=cmd_partition)

    sp = sub.add_parser("qseries", parents=[common], help="q-series and q(s)")
    sp.add_argument("action", nargs="?", choices=("solve",))
    sp.add_argument("--family", type=int, choices=(6, 3, 4))
    sp.add_argument("--order", type=int, default=20)
    sp.add_argument("--what", choices=("product", "eisenstein", "t", "mcmahon"), default="product")
    sp.add_argument("--s", type=_fraction)
    sp.add_argument("--check", action="store_true", help="with solve: compare with the Mahler measure")
    sp.set_defaults(func=cmd_qseries)

    sp = sub.add_parser("lseries", parents=[common], help="L-function probe")
    sp.add_argument("--family", type=int, choices=(6, 3, 4), required=True)
    sp.add_argument("--s", type=_fraction, required=True)
    sp.add_argument("--pmax", type=int, default=2000)
    sp.add_argument("--conductor", type=int)
    sp.add_argument("--sign", type=int, choices=(1, -1))
    sp.add_argument("--cutoff", type=int)
    sp.add_argument("--show", type=int, default=50, help="print a_p for p up to this bound")
    sp.set_defaults(func=cmd_lseries)

    sp = sub.add_parser("tiling", parents=[common], help="SVG rhombus tiling of one matching")
    weights_args(sp)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--index", type=int, default=0)
    sp.add_argument("--out", help="SVG file (default: standard output)")
    sp.set_defaults(func=cmd_tiling)

    sp = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    sp.add_argument("--only", type=int, nargs="+", help="criterion numbers")
    sp.set_defaults(func=cmd_verify)
    return p


def _threads() -> int:
    raw = os.environ.get("KASTELEYN_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"KASTELEYN_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"KASTELEYN_THREADS must be a positive integer, got {raw!r}")
    return n


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.json = getattr(args, "json", False)
    args.seed = getattr(args, "seed", 0)
    try:
        _threads()  # accepted as a cap; all work runs on one thread
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
