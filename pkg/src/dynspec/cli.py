"""Command-line front end.

Three subcommands: ``simulate`` writes a synthetic problem file,
``recover`` runs a recovery pipeline and writes a report, ``verify``
compares a report against the problem's embedded ground truth.

Exit codes are a stable contract: 0 success, 1 verification failure,
2 usage or input error, 3 recovery failure. Failures print a single
machine-greppable ``error: ...`` line on stderr. When --seed is absent
the environment variable DYNSPEC_SEED is used, then 0.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import config
from .annihilator import scalar_annihilator
from .errors import (ConditioningError, DimensionError, FileFormatError,
                     InsufficientDataError, RecoveryError, UnderDetermined)
from .fileio import (SCHEMA_VERSION, atomic_write_text, complex_to_pairs,
                     load_problem, load_report, pairs_to_complex,
                     save_problem, save_report)
from .invariant import FilterEstimate, recover_operator, recover_signal
from .model import (Circulant, IndexSet, Uniform, make_diffusion_filter,
                    random_circulant, random_diagonalizable, random_signal,
                    shift_operator, simulate)
from .numerics import dft, poly_roots, set_match_error
from .prony import prony_reconstruct, prony_support, prony_values, random_sparse_signal
from .spectral import merge_roots, recover_observable_spectrum, recover_spectrum_via_extrapolation

# Ground-truth comparisons (recover's verified block and the verify
# command's default) run at the acceptance tolerance.
VERIFY_TOL = 1e-8


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _int_list(text: str) -> tuple[int, ...]:
    try:
        items = tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not items:
        raise argparse.ArgumentTypeError("expected at least one index")
    return items


def _resolve_seed(value):
    if value is not None:
        return value
    env = os.environ.get("DYNSPEC_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"DYNSPEC_SEED must be an integer, got {env!r}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dynspec",
                                     description="Spectrum and operator identification "
                                                 "from dynamical samples.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate a synthetic problem file")
    sim.add_argument("--d", type=int, required=True, help="state dimension")
    sim.add_argument("--mode", choices=["circulant", "diagonalizable", "shift"],
                     default="circulant", help="evolution operator family")
    group = sim.add_mutually_exclusive_group(required=True)
    group.add_argument("--m", type=int, help="uniform sampler step (must divide d)")
    group.add_argument("--omega", type=_int_list, help="explicit sampling indices, e.g. 0,2,5")
    sim.add_argument("--levels", type=int, required=True, help="number of time levels")
    sim.add_argument("--seed", type=int, default=None, help="RNG seed (default: DYNSPEC_SEED or 0)")
    sim.add_argument("--filter", choices=["diffusion", "random", "file"], default="random",
                     help="filter source for circulant mode")
    sim.add_argument("--filter-file", help="JSON file with filter taps as [re, im] pairs")
    sim.add_argument("--decay", type=float, default=0.1, help="diffusion filter decay rate")
    sim.add_argument("--sparsity", type=int, default=None,
                     help="shift mode: give the signal an s-sparse Fourier transform")
    sim.add_argument("--include-truth", action="store_true",
                     help="embed the filter and signal as ground truth")
    sim.add_argument("--out", required=True, help="output problem file")
    sim.set_defaults(func=cmd_simulate)

    rec = sub.add_parser("recover", help="run a recovery pipeline on a problem file")
    rec.add_argument("--in", dest="infile", required=True, help="input problem file")
    rec.add_argument("--mode", choices=["invariant", "general", "extrapolate", "prony"],
                     required=True, help="recovery pipeline")
    rec.add_argument("--assume-symmetric", action="store_true",
                     help="invariant mode: order the spectrum assuming a real, symmetric, "
                          "decreasing transfer function and recover the operator")
    rec.add_argument("--tol", type=float, default=None,
                     help=f"consistency threshold (default {config.TAU_SOLVE:g})")
    rec.add_argument("--dedup", type=float, default=None,
                     help=f"relative dedup tolerance (default {config.DEDUP_REL:g})")
    rec.add_argument("--window", type=int, default=None,
                     help="extrapolate mode: recurrence window length "
                          "(default: largest L with (|omega|+1)L <= levels)")
    rec.add_argument("--sparsity", type=int, default=None,
                     help="prony mode: declared sparsity (default: levels // 2)")
    rec.add_argument("--out", required=True, help="output report file")
    rec.add_argument("--plot", default=None, help="optional SVG scatter of the recovered spectrum")
    rec.set_defaults(func=cmd_recover)

    ver = sub.add_parser("verify", help="check a report against embedded ground truth")
    ver.add_argument("--in", dest="infile", required=True, help="problem file with ground truth")
    ver.add_argument("--report", required=True, help="report file to check")
    ver.add_argument("--tol", type=float, default=VERIFY_TOL,
                     help=f"pass/fail tolerance (default {VERIFY_TOL:g})")
    ver.set_defaults(func=cmd_verify)
    return parser


def cmd_simulate(args) -> int:
    if args.d < 1:
        return _fail(f"d must be positive, got {args.d}", 2)
    if args.levels < 1:
        return _fail(f"levels must be positive, got {args.levels}", 2)
    if args.sparsity is not None and args.mode != "shift":
        return _fail("--sparsity only applies to shift mode", 2)
    seed = _resolve_seed(args.seed)
    rng = np.random.default_rng(seed)
    sampler = Uniform(args.m) if args.m is not None else IndexSet(args.omega)
    truth_taps = None

    if args.mode == "circulant":
        if args.filter == "diffusion":
            op = make_diffusion_filter(args.d, args.decay)
        elif args.filter == "random":
            op = random_circulant(args.d, rng)
        else:
            if not args.filter_file:
                return _fail("--filter file requires --filter-file PATH", 2)
            with open(args.filter_file) as fh:
                taps = pairs_to_complex(json.load(fh), "filter file")
            if taps.size != args.d:
                return _fail(f"filter file has {taps.size} taps, expected {args.d}", 2)
            op = Circulant(taps)
        x = random_signal(args.d, rng)
        truth_taps = op.taps
    elif args.mode == "shift":
        op = shift_operator(args.d)
        truth_taps = op.taps
        if args.sparsity is not None:
            x, _ = random_sparse_signal(args.d, args.sparsity, rng)
        else:
            x = random_signal(args.d, rng)
    else:
        if args.include_truth:
            return _fail("ground truth for diagonalizable operators is not representable "
                         "in the problem schema", 2)
        op = random_diagonalizable(args.d, rng)
        x = random_signal(args.d, rng)

    samples = simulate(op, x, sampler, args.levels)
    if args.include_truth:
        save_problem(args.out, samples, truth_taps=truth_taps, truth_signal=x)
    else:
        save_problem(args.out, samples)
    kind = f"uniform m={sampler.m}" if isinstance(sampler, Uniform) else f"indices {sampler.omega}"
    print(f"wrote {args.out}: d={args.d}, sampler {kind}, {args.levels} levels")
    return 0


def _fill_estimate(report: dict, estimate, source_kind: str) -> None:
    report["source_kind"] = source_kind
    report["recovered_spectrum"] = complex_to_pairs(estimate.merged)
    per = {}
    for src in sorted(estimate.per_source):
        roots = estimate.per_source[src]
        entry = {"degree": int(len(roots)), "roots": complex_to_pairs(roots)}
        if src in estimate.residuals:
            entry["residual"] = float(estimate.residuals[src])
        per[str(src)] = entry
    report["per_source"] = per
    report["diagnostics"]["tolerances"]["dedup_tol"] = float(estimate.dedup_tol)
    for src, msg in estimate.failures.items():
        report["diagnostics"]["failures"][f"source {src}"] = msg


def cmd_recover(args) -> int:
    problem = load_problem(args.infile)
    samples = problem.sample_set
    tol = config.TAU_SOLVE if args.tol is None else args.tol
    dedup_rel = config.DEDUP_REL if args.dedup is None else args.dedup
    report = {
        "schema_version": SCHEMA_VERSION,
        "mode": args.mode,
        "diagnostics": {
            "tolerances": {"tau_solve": tol, "dedup_rel": dedup_rel,
                           "tau_root": config.TAU_ROOT},
            "failures": {},
        },
    }
    failures = report["diagnostics"]["failures"]

    try:
        if args.mode == "invariant":
            if not isinstance(samples.sampler, Uniform):
                return _fail("invariant mode requires a uniform sampler", 2)
            operator, estimate = recover_operator(
                samples, assume_symmetric_decreasing=args.assume_symmetric,
                dedup_rel=dedup_rel, tol=tol)
            _fill_estimate(report, estimate, "residue_class")
            if operator is not None:
                report["recovered_filter"] = complex_to_pairs(operator.taps)
                try:
                    x = recover_signal(samples, FilterEstimate.from_taps(operator.taps), tol=tol)
                    report["recovered_signal"] = complex_to_pairs(x)
                except (UnderDetermined, InsufficientDataError, RecoveryError) as exc:
                    failures["signal"] = str(exc)
        elif args.mode == "general":
            r_max = min(samples.d, samples.L_total // 2)
            if r_max < 1:
                return _fail("need at least 2 time levels for spectral recovery", 2)
            estimate = recover_observable_spectrum(samples, r_max=r_max,
                                                   dedup_rel=dedup_rel, tol=tol)
            _fill_estimate(report, estimate, "index")
        elif args.mode == "extrapolate":
            n = samples.omega.size
            L = args.window if args.window is not None else samples.L_total // (n + 1)
            if L < 1:
                return _fail(f"no usable window: {samples.L_total} levels "
                             f"for {n} sampled coordinates", 2)
            estimate = recover_spectrum_via_extrapolation(samples, L,
                                                          dedup_rel=dedup_rel, tol=tol)
            _fill_estimate(report, estimate, "index")
        else:
            om = samples.omega
            if not isinstance(samples.sampler, IndexSet) or om.size != 1:
                return _fail("prony mode requires an index sampler with exactly one coordinate", 2)
            s = args.sparsity if args.sparsity is not None else samples.L_total // 2
            if s < 1 or 2 * s >= samples.d:
                return _fail(f"sparsity must satisfy 1 <= s < d/2, got s={s}, d={samples.d}", 2)
            if samples.L_total < 2 * s:
                return _fail(f"need 2s = {2 * s} time levels, have {samples.L_total}", 2)
            start = int(om[0])
            entries = samples.samples[:2 * s, 0]
            ann = scalar_annihilator(entries, s, tol=tol)
            support = prony_support(entries, samples.d, s, tol=tol)
            spectrum = prony_values(entries, start, support, samples.d, tol=tol)
            grid = np.exp(2j * np.pi * np.array(support, dtype=float) / samples.d)
            report["source_kind"] = "index"
            report["recovered_support"] = [int(n) for n in support]
            report["recovered_spectrum"] = complex_to_pairs(grid)
            report["recovered_signal"] = complex_to_pairs(prony_reconstruct(spectrum))
            report["per_source"] = {str(start): {
                "degree": ann.degree,
                "roots": complex_to_pairs(poly_roots(ann.poly)),
                "residual": ann.relative_residual,
            }}
    except RecoveryError as exc:
        failures["fatal"] = str(exc)
        if exc.partial is not None:
            _fill_estimate(report, exc.partial,
                           "residue_class" if args.mode == "invariant" else "index")
        save_report(args.out, report)
        return _fail(str(exc), 3)

    if problem.has_truth:
        checks = _truth_checks(problem, report, VERIFY_TOL)
        report["verified"] = {f"{name}_error": err for name, err, _t, _p, _n in checks}
    save_report(args.out, report)
    if args.plot:
        _write_spectrum_svg(args.plot, pairs_to_complex(report.get("recovered_spectrum", [])))
    count = len(report.get("recovered_spectrum", []))
    print(f"wrote {args.out}: {count} spectral values (mode={args.mode})")
    return 0


def _entrywise_error(report_field, truth: np.ndarray) -> float:
    got = pairs_to_complex(report_field, "recovered values")
    if got.size != truth.size:
        return float("inf")
    return float(np.max(np.abs(got - truth)))


def _truth_checks(problem, report: dict, tol: float) -> list:
    """Compare a report against the problem's ground truth.

    Returns (name, error, tol, passed, note) rows; which rows appear
    depends on the report's mode and fields.
    """
    checks = []
    d = problem.sample_set.d
    merged = None
    if "recovered_spectrum" in report:
        merged = pairs_to_complex(report["recovered_spectrum"], "recovered_spectrum")

    if report.get("mode") == "prony":
        if problem.truth_signal is None:
            return checks
        x_hat = dft(problem.truth_signal)
        support = np.flatnonzero(np.abs(x_hat) > 1e-9 * float(np.max(np.abs(x_hat))))
        if merged is not None:
            expected = np.exp(2j * np.pi * support / d)
            err = set_match_error(merged, expected)
            ok = merged.size == expected.size and err < tol
            checks.append(("spectrum", err, tol, ok,
                           f"{merged.size} vs {expected.size} values"))
        if "recovered_support" in report:
            got = sorted(int(n) for n in report["recovered_support"])
            ok = got == [int(n) for n in support]
            checks.append(("support", 0.0 if ok else float("inf"), tol, ok,
                           f"{got} vs {support.tolist()}"))
        if "recovered_signal" in report:
            err = _entrywise_error(report["recovered_signal"], problem.truth_signal)
            checks.append(("signal", err, tol, err < tol, ""))
        return checks

    if problem.truth_taps is not None:
        if merged is not None:
            dedup_tol = report.get("diagnostics", {}).get("tolerances", {}).get("dedup_tol")
            expected, _ = merge_roots([dft(problem.truth_taps)], dedup_tol=dedup_tol)
            err = set_match_error(merged, expected)
            ok = merged.size == expected.size and err < tol
            checks.append(("spectrum", err, tol, ok,
                           f"{merged.size} vs {expected.size} values"))
        if "recovered_filter" in report:
            err = _entrywise_error(report["recovered_filter"], problem.truth_taps)
            checks.append(("filter", err, tol, err < tol, ""))
    if problem.truth_signal is not None and "recovered_signal" in report:
        err = _entrywise_error(report["recovered_signal"], problem.truth_signal)
        checks.append(("signal", err, tol, err < tol, ""))
    return checks


def cmd_verify(args) -> int:
    problem = load_problem(args.infile)
    if not problem.has_truth:
        return _fail("problem file carries no ground truth", 2)
    report = load_report(args.report)
    checks = _truth_checks(problem, report, args.tol)
    if not checks:
        return _fail("report has no fields comparable against the ground truth", 2)
    width = max(len(name) for name, *_ in checks)
    print(f"{'check'.ljust(width)}  {'error':>12}  {'tol':>9}  status")
    all_ok = True
    for name, err, tol, passed, note in checks:
        all_ok &= passed
        extra = f"  ({note})" if note else ""
        print(f"{name.ljust(width)}  {err:>12.3e}  {tol:>9.1e}  "
              f"{'PASS' if passed else 'FAIL'}{extra}")
    return 0 if all_ok else 1


def _write_spectrum_svg(path: str, roots: np.ndarray) -> None:
    size, margin = 360, 24
    lim = max(1.0, float(np.max(np.abs(roots)))) if roots.size else 1.0
    scale = (size / 2 - margin) / lim
    c = size / 2
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<line x1="{margin}" y1="{c}" x2="{size - margin}" y2="{c}" stroke="#ddd"/>',
        f'<line x1="{c}" y1="{margin}" x2="{c}" y2="{size - margin}" stroke="#ddd"/>',
        f'<circle cx="{c}" cy="{c}" r="{scale:.2f}" fill="none" stroke="#bbb"/>',
    ]
    for z in roots:
        parts.append(f'<circle cx="{c + z.real * scale:.2f}" cy="{c - z.imag * scale:.2f}" '
                     f'r="3" fill="#c0392b"/>')
    parts.append("</svg>")
    atomic_write_text(path, "\n".join(parts) + "\n")


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code is None else int(exc.code)
    try:
        return args.func(args)
    except FileFormatError as exc:
        return _fail(str(exc), 2)
    except (DimensionError, InsufficientDataError, ConditioningError) as exc:
        return _fail(str(exc), 2)
    except RecoveryError as exc:
        return _fail(str(exc), 3)
    except (ValueError, TypeError, OSError) as exc:
        return _fail(str(exc), 2)


def entry() -> None:
    sys.exit(main())
