"""Command-line entry point.

Every command writes one JSON report (plus CSV where there is plot data)
into ``--out`` and exits 0 on success, 1 when a verification fails and 2 on
bad usage or unreadable input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from holderkit import __version__
from holderkit.core import NormKind, load_samples
from holderkit.counterexample import (
    DigitArray,
    digits_to_image,
    digits_to_point,
    quotient_probe,
    random_pair,
    verify_bounds,
)
from holderkit.covering import Selection, load_family, select_balls, verify_selection
from holderkit.measure import check_ball_image_bound, check_global_image_bound
from holderkit.oscillation import (
    DEFAULT_R_GRID,
    extract_derivative,
    extract_restriction_sequence,
    omega,
    refine_uniform,
)
from holderkit.prooftrace import build_candidate_set, inverse_samples, partition_pipeline
from holderkit.report import dumps, write_atomic

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
DEFAULT_SEED = 20240101


class UsageError(Exception):
    pass


def parse_k_list(text: str) -> list[int]:
    """``"2..12"`` (inclusive range) or ``"2,3,5"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad K list {text!r}; use A..B or a,b,c") from None


def _positive(kind):
    def conv(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return conv


def _alpha(text):
    v = float(text)
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1], got {text}")
    return v


def _add_samples(p, need_alpha=True):
    p.add_argument("--in", dest="input", required=True, help="sample file (.csv or .json)")
    p.add_argument("--format", choices=["csv", "json"], help="default: from the file extension")
    p.add_argument("--n", type=_positive(int), help="domain dimension")
    p.add_argument("--m", type=_positive(int), help="range dimension")
    p.add_argument("--norm", choices=["l1", "l2", "linf"], default="l2", help="domain (and default range) norm")
    p.add_argument("--norm-range", choices=["l1", "l2", "linf"], help="range norm if different")
    p.add_argument("--base", type=int, action="append", help="base point index (repeatable; default: all)")
    if need_alpha:
        p.add_argument("--alpha", type=_alpha, default=1.0)


def _add_sequence(p):
    p.add_argument("--kmax", dest="k_max", type=_positive(int), default=40)
    p.add_argument("--shrink", type=float, default=0.5)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="holderkit", description="Hölder regularity after restriction.")
    parser.add_argument("--version", action="version", version=f"holderkit {__version__}")
    parser.add_argument("--out", default=".", help="output directory (default: current)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("oscillation", help="oscillation Omega(x, r) per base point")
    _add_samples(p)
    p.add_argument("--r", type=_positive(float), required=True)

    p = sub.add_parser("restrict", help="pointwise Hölder restriction certificates")
    _add_samples(p)
    _add_sequence(p)

    p = sub.add_parser("refine", help="uniform Hölder refinement of restriction certificates")
    _add_samples(p)
    _add_sequence(p)
    p.add_argument("--epsilon", type=_positive(float), default=0.1)

    p = sub.add_parser("derivative", help="derivative along a restriction sequence (n = m = 1)")
    _add_samples(p, need_alpha=False)
    _add_sequence(p)
    p.add_argument("--tol", type=_positive(float), default=1e-3)

    p = sub.add_parser("cover", help="greedy disjoint ball selection and its verification")
    p.add_argument("--in", dest="input", required=True, help="ball family CSV: c0,...,r")
    p.add_argument("--epsilon", type=_positive(float), default=0.1)
    p.add_argument("--selection", help="verify this selection JSON instead of computing one")
    p.add_argument("--verify", action="store_true", help="run the independent verifier")

    p = sub.add_parser("measure-check", help="measure-change bound check")
    _add_samples(p, need_alpha=False)
    p.add_argument("--M", dest="M", type=float, required=True)
    p.add_argument("--beta", type=_positive(float), help="default: domain_dim / range_dim")
    p.add_argument("--h", type=_positive(float), required=True)
    p.add_argument("--r", type=_positive(float), help="ball radius; with --base checks a single ball")
    p.add_argument("--slack", type=float)
    p.add_argument("--radius", type=_positive(float), help="pair distance cap for the hypothesis check")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = sub.add_parser("counterexample", help="digit-interleaving counterexample")
    csub = p.add_subparsers(dest="action", required=True)
    q = csub.add_parser("probe", help="quotient growth along deeper perturbations")
    q.add_argument("--t", type=int, required=True)
    q.add_argument("--n", type=_positive(int), required=True)
    q.add_argument("--m", type=_positive(int), required=True)
    q.add_argument("--alpha", type=_alpha, required=True)
    q.add_argument("--K", dest="K", type=parse_k_list, required=True)
    q.add_argument("--seed", type=int, default=DEFAULT_SEED)
    q = csub.add_parser("verify", help="exact distance bounds on random digit pairs")
    q.add_argument("--t", type=int, required=True)
    q.add_argument("--n", type=_positive(int), required=True)
    q.add_argument("--m", type=_positive(int), required=True)
    q.add_argument("--pairs", type=_positive(int), default=1000)
    q.add_argument("--kmin", dest="k_min", type=int, default=-1)
    q.add_argument("--kmax", dest="k_max", type=int, default=4)
    q.add_argument("--seed", type=int, default=DEFAULT_SEED)
    q = csub.add_parser("decode", help="exact point and image of a digit array JSON")
    q.add_argument("--digits", required=True)

    p = sub.add_parser("prooftrace", help="partition pipeline diagnostic")
    _add_samples(p)
    p.add_argument("--omega-min", type=_positive(float), required=True)
    p.add_argument("--r-min", type=_positive(float), required=True)
    p.add_argument("--inverse-M", type=float, help="also check the measure bound for the inverse on E'")
    p.add_argument("--h", type=_positive(float), default=0.01)
    return parser


def _load(args):
    path = Path(args.input)
    fmt = args.format or ("json" if path.suffix.lower() == ".json" else "csv")
    if fmt == "csv" and (args.n is None or args.m is None):
        raise UsageError("CSV input needs --n and --m")
    nd = NormKind.parse(args.norm)
    nr = NormKind.parse(args.norm_range or args.norm)
    try:
        return load_samples(path, fmt, args.n, args.m, nd, nr)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _bases(args, F):
    if not args.base:
        return list(range(len(F)))
    for b in args.base:
        if not 0 <= b < len(F):
            raise UsageError(f"--base {b} out of range for {len(F)} samples")
    return list(args.base)


def _check_shrink(args):
    if not 0 < args.shrink < 1:
        raise UsageError("--shrink must lie in (0, 1)")


def cmd_oscillation(args):
    F = _load(args)
    rows = []
    for b in _bases(args, F):
        w = omega(F, b, args.r, args.alpha)
        rows.append({"base": b, "omega": None if w.is_empty else w.value, "witness": w.witness_index})
    return EXIT_OK, {"omega": rows}, f"{len(rows)} base points"


def _certs(args, F):
    _check_shrink(args)
    out = []
    for b in _bases(args, F):
        if len(F) < 2:
            raise UsageError("need at least two samples")
        out.append(extract_restriction_sequence(F, b, args.alpha, args.k_max, args.shrink))
    return out


def cmd_restrict(args):
    F = _load(args)
    certs = _certs(args, F)
    bad = [c.base_index for c in certs if c.check(F)]
    status = EXIT_FAIL if bad else EXIT_OK
    return status, {"certificates": certs, "invalid": bad}, f"{len(certs)} certificates, {len(bad)} invalid"


def cmd_refine(args):
    F = _load(args)
    out, bad = [], []
    for c in _certs(args, F):
        u = refine_uniform(F, c, args.epsilon)
        if not u.M_uniform <= u.bound:
            bad.append(c.base_index)
        out.append(u)
    status = EXIT_FAIL if bad else EXIT_OK
    return status, {"certificates": out, "bound_violations": bad}, f"{len(out)} refined, {len(bad)} over bound"


def cmd_derivative(args):
    args.alpha = 1.0
    F = _load(args)
    if F.n != 1 or F.m != 1:
        raise UsageError("derivative needs n = m = 1")
    out = [extract_derivative(F, c, args.tol) for c in _certs(args, F)]
    return EXIT_OK, {"derivatives": out}, f"{len(out)} derivatives"


def cmd_cover(args):
    try:
        family = load_family(Path(args.input))
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc}") from exc
    if args.selection:
        try:
            selection = Selection.from_json(Path(args.selection).read_text(encoding="utf-8"))
        except OSError as exc:
            raise UsageError(f"cannot read {args.selection}: {exc}") from exc
    else:
        selection = select_balls(family, args.epsilon)
    result = {"selection": selection.to_dict(), "family_size": len(family)}
    status, note = EXIT_OK, f"{len(selection.chosen)} of {len(family)} balls chosen"
    if args.verify or args.selection:
        report = verify_selection(family, selection)
        result["verification"] = report.to_dict()
        if not report.ok:
            status = EXIT_FAIL
            note += f", {len(report.violations)} violations"
    extra = {} if args.selection else {"selection.json": dumps(selection.to_dict())}
    return status, result, note, extra


def cmd_measure(args):
    F = _load(args)
    beta = args.beta if args.beta is not None else F.n / F.m
    if args.base:
        if args.r is None:
            raise UsageError("--base needs --r")
        reports = [check_ball_image_bound(F, b, args.r, args.M, beta, args.h) for b in _bases(args, F)]
    else:
        reports = [check_global_image_bound(F, args.M, beta, args.h, slack=args.slack,
                                            radius=args.radius, seed=args.seed)]
    failed = [r for r in reports if not r.passed]
    status = EXIT_FAIL if failed else EXIT_OK
    return status, {"reports": reports}, f"{len(reports)} bound checks, {len(failed)} failed"


def cmd_counterexample(args):
    if args.action == "probe":
        if args.t < 2:
            raise UsageError("--t must be >= 2")
        rep = quotient_probe(args.t, args.n, args.m, args.alpha, args.K, seed=args.seed)
        note = f"predicted ratio {rep.predicted_ratio:.6g}"
        return EXIT_OK, {"growth": rep, "exact_increasing": rep.exact_increasing()}, note, {"growth.csv": rep.to_csv()}
    if args.action == "verify":
        if args.t < 2 or args.k_max < args.k_min:
            raise UsageError("need t >= 2 and kmin <= kmax")
        rng = np.random.default_rng(args.seed)
        fails = []
        for p in range(args.pairs):
            dx, dy = random_pair(rng, args.t, args.n, args.m, args.k_min, args.k_max)
            chk = verify_bounds(dx, dy)
            if not chk.ok:
                fails.append({"pair": p, "x": dx.to_dict(), "y": dy.to_dict(), "check": chk.to_dict()})
        status = EXIT_FAIL if fails else EXIT_OK
        return status, {"pairs": args.pairs, "failures": fails}, f"{args.pairs} pairs, {len(fails)} failures"
    try:
        d = DigitArray.from_json(Path(args.digits).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read {args.digits}: {exc}") from exc
    return EXIT_OK, {"digits": d, "point": [str(v) for v in digits_to_point(d)],
                     "image": [str(v) for v in digits_to_image(d)]}, "decoded"


def cmd_prooftrace(args):
    F = _load(args)
    E = build_candidate_set(F, args.alpha, args.omega_min, args.r_min)
    if not E:
        return EXIT_OK, {"E": [], "trace": None}, "candidate set is empty"
    trace = partition_pipeline(F, E, args.alpha, DEFAULT_R_GRID, args.omega_min, args.r_min)
    result = {"trace": trace}
    status = EXIT_OK
    if trace.diameter < trace.rho and not trace.injective:
        status = EXIT_FAIL
    if args.inverse_M is not None and trace.injective and len(trace.E_prime) > 0:
        G = inverse_samples(F, trace)
        if G.n >= G.m:
            rep = check_global_image_bound(G, args.inverse_M, G.n / G.m, args.h)
            result["inverse_bound"] = rep
            if not rep.passed:
                status = EXIT_FAIL
    print(trace.summary())
    return status, result, f"|E'| = {len(trace.E_prime)}, injective = {trace.injective}"


COMMANDS = {
    "oscillation": cmd_oscillation,
    "restrict": cmd_restrict,
    "refine": cmd_refine,
    "derivative": cmd_derivative,
    "cover": cmd_cover,
    "measure-check": cmd_measure,
    "counterexample": cmd_counterexample,
    "prooftrace": cmd_prooftrace,
}


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items())}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        outcome = COMMANDS[args.command](args)
    except (UsageError, ValueError, KeyError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    status, result, note = outcome[:3]
    extra = outcome[3] if len(outcome) > 3 else {}
    name = args.command if args.command != "counterexample" else f"counterexample-{args.action}"
    out = Path(args.out)
    doc = {"tool": "holderkit", "version": __version__, "command": name, "config": _config(args),
           "status": "PASS" if status == EXIT_OK else "FAIL", "result": result}
    path = write_atomic(out / f"{name}.json", dumps(doc))
    for fname, text in extra.items():
        write_atomic(out / fname, text)
    print(f"{'PASS' if status == EXIT_OK else 'FAIL'} {name}: {note} -> {path}")
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
