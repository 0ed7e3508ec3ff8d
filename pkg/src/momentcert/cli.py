"""Command-line front end.

Exit codes: 0 all checks pass, 1 operational error, 2 certified violation.
"""
import argparse
import json
import sys

import numpy as np

from . import __version__
from .dilation import (
    compression_defect,
    naimark_dilate,
    reconstruct_moments,
    semispectral_from_family,
    vacuum_coordinates,
)
from .errors import IncompletenessError, InfeasibleError, MomentError, PSDDefectError
from .families import (
    MeasureFamily,
    generate_certificate,
    parallelogram_keys,
    polarization_closure,
    polar_keys,
    sesquilinear_audit,
    verify_moment_conditions,
    verify_parallelogram_positivity,
)
from .rkhs import DEFAULT_TOL, check_positive_definite, null_space
from .sequences import REAL, AtomicMeasure, SignedAtomicMeasure, CoefficientVector, TruncatedSequence, localize, moments_of
from .solver import solve_family, targets_from_sequence
from . import multiindex as mi
from .weaklimits import run_suites

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2


class InputError(Exception):
    pass


def _load(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _parse(path, loader):
    obj = _load(path)
    try:
        return loader(obj)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise InputError(f"{path}: malformed content: {exc}") from None


def load_xis(path, dim):
    obj = _load(path)
    if isinstance(obj, dict):
        dim = int(obj.get("dim", dim))
        obj = obj["xi"]
    try:
        return [CoefficientVector.from_json(x, dim) for x in obj]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: malformed coefficient vectors: {exc}") from None


def _emit(payload, args):
    payload = {"version": __version__, "tol": args.tol, **payload}
    text = json.dumps(payload, indent=2, default=_default)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _default(obj):
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serialisable: {type(obj)}")


def _support(family, xis):
    pts = [p for xi in xis for p in family[xi].points]
    return np.array(pts).reshape(len(pts), family.dim) if pts else (), np.ones(len(pts))


# --------------------------------------------------------------------------- #


def cmd_moments(args):
    mu = _parse(args.measure, AtomicMeasure.from_json)
    _emit(moments_of(mu, args.degree).to_json(), args)
    return EXIT_OK


def cmd_localize(args):
    seq = _parse(args.sequence, TruncatedSequence.from_json)
    xis = load_xis(args.xi, seq.dim)
    if len(xis) != 1:
        raise InputError(f"{args.xi}: expected exactly one coefficient vector, got {len(xis)}")
    _emit(localize(seq, xis[0]).to_json(), args)
    return EXIT_OK


def cmd_check_psd(args):
    seq = _parse(args.sequence, TruncatedSequence.from_json)
    order = args.order
    if order is None:
        order = seq.max_degree // 2
    report = check_positive_definite(seq, order, args.tol)
    _emit(report.to_json(), args)
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_certify(args):
    return {"generate": _certify_generate, "verify": _certify_verify, "solve": _certify_solve}[args.mode](args)


def _certify_generate(args):
    mu = _parse(args.measure, AtomicMeasure.from_json)
    xis = load_xis(args.xi, mu.dim)
    if not args.no_closure and xis:
        xis = polarization_closure(xis)
    _emit(generate_certificate(mu, xis).to_json(), args)
    return EXIT_OK


def _certify_verify(args):
    seq = _parse(args.sequence, TruncatedSequence.from_json)
    family = _parse(args.family, MeasureFamily.from_json)
    xis = load_xis(args.xi, seq.dim)
    pairs = [(a, b) for a in xis for b in xis]
    needed = list(xis) + [k for a, b in pairs for k in parallelogram_keys(a, b)]
    needed += [k for a, b in pairs for k in polar_keys(a, b)]
    family.require(needed)
    moments = verify_moment_conditions(family, seq, args.tol, xis)
    para = verify_parallelogram_positivity(family, pairs, args.tol)
    atoms = SignedAtomicMeasure(family.dim, family.kind, *_support(family, xis))
    regions = [[p] for p in atoms.points] + [None]
    audit = sesquilinear_audit(family, xis, regions, seq, args.tol)
    ok = moments.passed and para.passed and audit.passed
    _emit({"verdict": "pass" if ok else "fail",
           "checks": [moments.to_json(), para.to_json(), audit.to_json()]}, args)
    return EXIT_OK if ok else EXIT_VIOLATION


def _certify_solve(args):
    seq = _parse(args.sequence, TruncatedSequence.from_json)
    xis = load_xis(args.xi, seq.dim)
    try:
        sol = solve_family(seq, xis, args.tol)
    except InfeasibleError as exc:
        bad = getattr(exc, "infeasible", {})
        _emit({
            "verdict": "not_a_moment_sequence",
            "infeasible": [
                {"xi": xi.to_json(), "targets": targets_from_sequence(seq, xi).to_json(),
                 "witness": w.to_json(), "reason": str(w)}
                for xi, w in bad.items()
            ],
        }, args)
        return EXIT_VIOLATION
    _emit({
        "verdict": "consistent" if sol.consistent else "inconclusive",
        "family": sol.family.to_json(),
        "parallelogram": sol.report.to_json(),
    }, args)
    return EXIT_OK


def cmd_dilate(args):
    family = _parse(args.family, MeasureFamily.from_json)
    basis = load_xis(args.basis, family.dim)
    one = CoefficientVector.monomial(mi.zero_index(family.dim))
    order = max(xi.deg for xi in basis)
    if args.sequence:
        seq = _parse(args.sequence, TruncatedSequence.from_json)
    else:
        degree = args.degree if args.degree is not None else 2 * order + 2
        seq = moments_of(family[one], degree)
    quotient = null_space(seq, order, args.tol)
    try:
        F = semispectral_from_family(family, basis, quotient, args.tol)
    except PSDDefectError as exc:
        _emit({"verdict": "psd_defect", "point": exc.point, "eigenvalue": exc.eigenvalue,
               "message": str(exc)}, args)
        return EXIT_VIOLATION
    dil = naimark_dilate(F, args.tol)
    vac = dil.V @ vacuum_coordinates(basis, quotient)
    D_max = args.degree if args.degree is not None else seq.max_degree
    D_max = min(D_max, seq.max_degree)
    rec = reconstruct_moments(dil, vac, D_max)
    resid = max(abs(rec[k] - seq[k]) for k in rec.entries)
    scale = seq.scale()
    comp = [compression_defect(dil, seq, basis, i) for i in range(1, family.dim + 1)] \
        if family.kind == REAL and seq.max_degree >= 2 * order + 1 else []
    block_defect = max(float(np.linalg.norm(c - f, 2)) for c, f in zip(dil.compressed(), F.blocks)) \
        if F.blocks else 0.0
    ok = resid <= args.tol * scale
    _emit({
        "verdict": "pass" if ok else "fail",
        "atoms": len(F.points),
        "block_min_eigenvalues": F.min_eigenvalues(),
        "base_dimension": F.rank,
        "quotient_dimension": quotient.quotient_dim,
        "dilation_dimension": dil.dimension,
        "dilation_block_defect": block_defect,
        "projection_defect": dil.projection_defects(),
        "compression_defects": comp,
        "reconstruction_degree": D_max,
        "reconstruction_residual": resid,
    }, args)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_weak_limit_demo(args):
    results = run_suites(args.tol)
    ok = all(match for _, _, match in results)
    _emit({
        "verdict": "pass" if ok else "fail",
        "suites": [{"name": s.name, "matches_expected": m, "report": r.to_json()} for s, r, m in results],
    }, args)
    return EXIT_OK if ok else EXIT_VIOLATION


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a subcommand from resetting options given before it
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="numerical tolerance (default 1e-9)")
    common.add_argument("--output", "-o", default=argparse.SUPPRESS, help="write JSON here instead of stdout")

    parser = argparse.ArgumentParser(prog="momentcert", description=__doc__.splitlines()[0])
    parser.add_argument("--tol", type=float, default=DEFAULT_TOL, help="numerical tolerance (default 1e-9)")
    parser.add_argument("--output", "-o", default=None, help="write JSON here instead of stdout")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", parents=[common], help="truncated moments of an atomic measure")
    p.add_argument("measure")
    p.add_argument("--degree", type=int, required=True)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("localize", parents=[common], help="localize a sequence by one xi")
    p.add_argument("sequence")
    p.add_argument("xi")
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("check-psd", parents=[common], help="positive definiteness of the moment form")
    p.add_argument("sequence")
    p.add_argument("--order", type=int)
    p.set_defaults(func=cmd_check_psd)

    p = sub.add_parser("certify", parents=[common], help="generate, verify or solve a measure family")
    csub = p.add_subparsers(dest="mode", required=True)
    g = csub.add_parser("generate", parents=[common])
    g.add_argument("measure")
    g.add_argument("xi")
    g.add_argument("--no-closure", action="store_true", help="do not add the xi +- eta, xi +- i eta members")
    v = csub.add_parser("verify", parents=[common])
    v.add_argument("sequence")
    v.add_argument("family")
    v.add_argument("xi")
    s = csub.add_parser("solve", parents=[common])
    s.add_argument("sequence")
    s.add_argument("xi")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("dilate", parents=[common], help="semispectral measure and its Naimark dilation")
    p.add_argument("family")
    p.add_argument("basis")
    p.add_argument("--sequence")
    p.add_argument("--degree", type=int)
    p.set_defaults(func=cmd_dilate)

    p = sub.add_parser("weak-limit-demo", parents=[common], help="run the bundled weak-limit suites")
    p.set_defaults(func=cmd_weak_limit_demo)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tol <= 0:
        parser.error("--tol must be positive")
    try:
        return args.func(args)
    except IncompletenessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (InputError, MomentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
