"""Command-line front end.

Exit codes: 0 success, 2 bad construction request, 3 dimension mismatch,
4 failed MUB verification, 5 inequality violation detected.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import bounds, harness
from .gf import factorize, prime_power
from .linalg import DensityMatrix, load_matrix
from .mub import DEFAULT_TOL, MubSet, best_available, construct_full, fourier_pair, tensor_compose

EXIT_OK, EXIT_CONSTRUCT, EXIT_DIM, EXIT_NOT_MUB, EXIT_VIOLATION = 0, 2, 3, 4, 5
SEED_ENV = "MUB_ENTROPY_SEED"


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


def _int_range(text: str) -> list[int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected a range like 2..5, got {text!r}")
    a, b = int(lo), int(hi)
    if b < a:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return list(range(a, b + 1))


def _write_json(path, obj) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _resolved(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def _full_or_fail(d: int, tol: float) -> MubSet:
    if prime_power(d) is None:
        fac = " * ".join(f"{p}^{k}" if k > 1 else str(p) for p, k in sorted(factorize(d).items()))
        raise CliError(EXIT_CONSTRUCT, f"d = {d} is not a prime power (d = {fac}); use --tensor or --fourier")
    return construct_full(d, tol)


def cmd_construct(args) -> int:
    if args.d < 2:
        raise CliError(EXIT_CONSTRUCT, "dimension must be >= 2")
    if args.tensor:
        d1, d2 = args.tensor
        if d1 * d2 != args.d:
            raise CliError(EXIT_CONSTRUCT, f"--tensor {d1} {d2} does not give d = {args.d}")
        S = tensor_compose(_full_or_fail(d1, args.tol), _full_or_fail(d2, args.tol), args.tol)
    elif args.fourier:
        S = fourier_pair(args.d, args.tol)
    else:
        S = _full_or_fail(args.d, args.tol)
    rep = S.verify()
    print(f"d={S.dim} M={S.M} is_mub={rep.is_mub} worst_overlap_deviation={rep.worst_overlap_deviation:.3e} "
          f"worst_orthonormality={rep.worst_orthonormality:.3e}")
    if args.out:
        obj = S.to_json()
        obj["config"] = _resolved(args)
        obj["verification"] = rep.to_dict()
        _write_json(args.out, obj)
    return EXIT_OK


def _load_mubs(path, tol: float, require_mub: bool = True) -> MubSet:
    S = MubSet.load(path, tol)
    rep = S.verify()
    if require_mub and not rep.is_mub:
        raise CliError(
            EXIT_NOT_MUB,
            f"{path}: not a MUB set (overlap deviation {rep.worst_overlap_deviation:.3e}, "
            f"orthonormality {rep.worst_orthonormality:.3e})",
        )
    return S


def _auto_mubs(d: int, M: int | None, tol: float) -> MubSet:
    if M is None:
        return best_available(d, tol)
    S = fourier_pair(d, tol) if (M <= 2 and prime_power(d) is None) else best_available(d, tol)
    if M > S.M:
        raise CliError(EXIT_CONSTRUCT, f"only {S.M} MUBs can be built for d = {d}, asked for {M}")
    return S.prefix(M)


def _state_from_args(args) -> DensityMatrix:
    if args.state:
        try:
            return DensityMatrix(load_matrix(args.state))
        except ValueError as exc:
            raise CliError(EXIT_DIM, f"{args.state}: {exc}") from exc
    d = args.d
    if d is None:
        raise CliError(EXIT_DIM, "--d is required unless --state is given")
    if args.maximally_mixed:
        return DensityMatrix.maximally_mixed(d)
    if args.pure_random:
        gen = harness.stream(args.seed, f"cli/pure/d{d}")
        return DensityMatrix(harness.random_state_matrix(d, harness.Ensemble("haar_pure"), gen))
    if args.purity is not None:
        # diag mixture of |0><0| and I/d with the requested purity
        if not 1.0 / d <= args.purity <= 1.0:
            raise CliError(EXIT_DIM, f"purity must lie in [1/d, 1] = [{1 / d:.6g}, 1]")
        t = math.sqrt((args.purity - 1.0 / d) / (1.0 - 1.0 / d))
        return DensityMatrix(t * np.diag(np.eye(d)[0]) + (1 - t) * np.eye(d) / d)
    return DensityMatrix.basis_state(d, 0)


def cmd_bounds(args) -> int:
    rho = _state_from_args(args)
    if args.mubs:
        S = _load_mubs(args.mubs, args.tol)
    else:
        S = _auto_mubs(rho.dim, args.auto, args.tol)
    if S.dim != rho.dim:
        raise CliError(EXIT_DIM, f"state dimension {rho.dim} != MUB dimension {S.dim}")
    report = bounds.build_report(rho, S)
    cmp = bounds.compare_bounds(report.inputs, report)
    margins = report.margins
    rows = [(k, v) for k, v in report.values.items() if v is not None]
    rows += [("renyi_sum", report.renyi_sum), ("tsallis_sum", report.tsallis_sum)]
    print(f"d={S.dim} M={S.M} purity={report.purity:.6f} measured_shannon_sum={report.measured_shannon_sum:.9f}")
    print(f"{'bound':<22}{'value':>14}{'margin':>14}")
    for name, value in rows:
        print(f"{name:<22}{value:>14.9f}{margins[name]:>14.3e}")
    print(f"strongest: {cmp['strongest']} = {cmp['value']:.9f}")
    if args.report:
        obj = report.to_json()
        obj["comparison"] = cmp
        obj["config"] = _resolved(args)
        _write_json(args.report, obj)
    worst = min(v for v in margins.values() if v is not None)
    return EXIT_VIOLATION if worst < -args.tol else EXIT_OK


def cmd_campaign(args) -> int:
    cfg = harness.CampaignConfig(args.d, args.M, args.samples, args.seed, harness.Ensemble.parse(args.ensemble), args.tol)
    if args.mubs:
        S = _load_mubs(args.mubs, DEFAULT_TOL, require_mub=not args.allow_non_mub)
        if S.dim != args.d:
            raise CliError(EXIT_DIM, f"MUB file dimension {S.dim} != --d {args.d}")
        if args.M > S.M:
            raise CliError(EXIT_DIM, f"--M {args.M} exceeds the {S.M} bases in {args.mubs}")
    else:
        S = _auto_mubs(args.d, args.M, DEFAULT_TOL)
    summary = harness.run_verification_campaign(cfg, S, per_sample=args.format == "csv")
    summary["config"] = dict(summary["config"], cli=_resolved(args))
    if args.format == "csv":
        samples = summary.pop("samples")
        if args.out:
            with open(args.out, "w", newline="") as fh:
                w = csv.DictWriter(fh, fieldnames=list(samples[0]), lineterminator="\n")
                w.writeheader()
                w.writerows(samples)
        print(json.dumps({"violations": summary["violations"]}))
    else:
        _write_json(args.out, summary)
    print(f"violations: {summary['violations']}", file=sys.stderr)
    return EXIT_VIOLATION if summary["violations"] else EXIT_OK


def cmd_tighten(args) -> int:
    S = _auto_mubs(args.d, args.M, DEFAULT_TOL)
    res = harness.tightness_search(args.d, S, args.bound, args.restarts, args.max_iters, args.seed)
    obj = res.to_json()
    obj["config"] = _resolved(args)
    _write_json(args.out, obj)
    print(f"best={res.best_value:.9f} bound={res.bound_value:.9f} gap={res.gap:.3e}", file=sys.stderr)
    return EXIT_VIOLATION if res.gap < -1e-9 else EXIT_OK


def cmd_separable(args) -> int:
    summary = harness.separability_experiment(
        args.dA, args.dB, args.M, args.samples, args.terms, args.seed, harness.Ensemble.parse(args.ensemble), args.tol
    )
    summary["config"]["cli"] = _resolved(args)
    _write_json(args.out, summary)
    flagged = [p["name"] for p in summary["entangled_examples"] if p["flagged"]]
    print(f"separable_min_sum={summary['separable_min_sum']:.9f} bound={summary['bound']:.9f} "
          f"violations={summary['violations']} flagged_probes={flagged}", file=sys.stderr)
    return EXIT_VIOLATION if summary["violations"] else EXIT_OK


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return repr(v)
    return str(v)


def cmd_scan(args) -> int:
    rows = harness.bound_comparison_scan(args.d_range, args.M_range, args.purity_grid)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(harness.SCAN_COLUMNS)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in harness.SCAN_COLUMNS])
    finally:
        if args.out:
            fh.close()
    disagree = sum(1 for r in rows if r["dominance_predicate"] is not None and r["dominance_predicate"] != r["dominance_observed"])
    print(f"rows={len(rows)} dominance_disagreements={disagree}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mub-entropy", description="MUB construction and entropic uncertainty bounds")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build and verify a MUB set")
    p.add_argument("d", type=int)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--full", action="store_true", help="d+1 bases for prime-power d (default)")
    mode.add_argument("--fourier", action="store_true", help="standard + Fourier basis")
    mode.add_argument("--tensor", nargs=2, type=int, metavar=("D1", "D2"), help="tensor product of complete sets")
    p.add_argument("--out")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("bounds", help="evaluate every bound for one state")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--state", help="density matrix JSON file")
    src.add_argument("--maximally-mixed", action="store_true")
    src.add_argument("--pure-random", action="store_true")
    src.add_argument("--purity", type=float, help="diagonal state of this purity")
    src.add_argument("--pure-basis", action="store_true", help="|0><0| (default)")
    p.add_argument("--d", type=int)
    mubs = p.add_mutually_exclusive_group()
    mubs.add_argument("--mubs", help="MubSet JSON file")
    mubs.add_argument("--auto", type=int, default=None, metavar="M", help="construct M bases (default: as many as available)")
    p.add_argument("--report")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("campaign", help="randomized verification campaign")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--ensemble", default="hilbert_schmidt_mixed")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--mubs", help="use bases from a MubSet JSON file")
    p.add_argument("--allow-non-mub", action="store_true", help="run on a file that fails verification")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("tighten", help="search for states minimizing the entropy sum")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--max-iters", type=int, default=10_000)
    p.add_argument("--bound", default="theorem2")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_tighten)

    p = sub.add_parser("separable", help="separability experiment")
    p.add_argument("--dA", type=int, required=True)
    p.add_argument("--dB", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--terms", type=int, default=None)
    p.add_argument("--ensemble", default="haar_pure")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_separable)

    p = sub.add_parser("scan", help="bound comparison table as CSV")
    p.add_argument("--d-range", type=_int_range, required=True)
    p.add_argument("--M-range", type=_int_range, required=True)
    p.add_argument("--purity-grid", type=int, default=5)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scan)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", 0) is None:
        args.seed = _default_seed()
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIM


if __name__ == "__main__":
    sys.exit(main())
