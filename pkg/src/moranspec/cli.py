"""moranspec command line: batch verification with machine-readable reports.

Exit codes: 0 pass, 1 verified failure, 2 UNKNOWN verdict, 3 input error.
Reports are JSON (stdout or --out); grid commands emit CSV, and --plot
renders a matplotlib figure next to the delimited output.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from fractions import Fraction

import numpy as np

from . import constructions, convergence, spectra
from .digitsets import symmetric_rational_grid
from .hadamard import HadamardTriple, is_hadamard_triple
from .measures import finite_level
from .systems import (
    MoranSystem,
    SystemDescriptionError,
    system_from_document,
    system_to_document,
)

PASS, FAIL, UNKNOWN_EXIT, INPUT_ERROR = 0, 1, 2, 3


def _load_system(ref: str) -> MoranSystem:
    """--system accepts a registry name, name:params shorthand, or a JSON path."""
    shorthands = {
        "example16": {"rule": "example16"},
        "jorgensen-pedersen": {"rule": "jorgensen-pedersen"},
        "jp": {"rule": "jorgensen-pedersen"},
        "consecutive": {"rule": "consecutive", "params": {"b": "k+1", "multiplier": 2}},
    }
    if ref in shorthands:
        return system_from_document(shorthands[ref])
    if ref.startswith("theorem17:"):
        a, b = ref.split(":", 1)[1].split(",")
        return system_from_document(
            {"rule": "theorem17", "params": {"alpha": a, "beta": b}}
        )
    if ref.startswith("consecutive:"):
        form = ref.split(":", 1)[1]
        return system_from_document({"rule": "consecutive", "params": {"b": form}})
    if ref.lstrip().startswith("{"):
        return system_from_document(json.loads(ref))
    with open(ref, "r", encoding="utf-8") as fh:
        return system_from_document(json.load(fh))


def _emit(report: dict, out: str | None):
    text = json.dumps(report, indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _emit_csv(header, rows, out: str | None):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def _run_report(command: str, parameters: dict, results: dict, passed: str, stamp: bool):
    rep = {
        "command": command,
        "parameters": parameters,
        "results": results,
        "summary": passed,
    }
    if stamp:
        rep["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    return rep


def _verdict_exit(verdicts) -> int:
    if any(v == convergence.UNKNOWN for v in verdicts):
        return UNKNOWN_EXIT
    return PASS


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_check_hadamard(args) -> int:
    triple = HadamardTriple(
        args.N,
        tuple(int(x) for x in args.B.split(",")),
        tuple(int(x) for x in args.L.split(",")),
    )
    ok = is_hadamard_triple(triple)
    _emit(
        _run_report(
            "check-hadamard",
            {"N": args.N, "B": list(triple.B), "L": list(triple.L)},
            {"is_hadamard_triple": ok},
            "pass" if ok else "fail",
            args.stamp,
        ),
        args.out,
    )
    return PASS if ok else FAIL


_CRITERIA = {
    "nonnegative-existence": "nonnegative-existence",
    "thm11": "nonnegative-existence",
    "max-norm": "max-norm",
    "cor12": "max-norm",
    "square-mean": "square-mean",
    "thm13": "square-mean",
    "three-series": "three-series",
}


def cmd_converge(args) -> int:
    system = _load_system(args.system)
    crit = _CRITERIA[args.criterion]
    horizon = args.horizon
    if system.horizon is not None:
        horizon = min(horizon, system.horizon)
    if crit == "nonnegative-existence":
        reports = [convergence.nonnegative_existence_report(system, horizon)]
    elif crit == "max-norm":
        reports = [convergence.max_norm_report(system, horizon)]
    elif crit == "square-mean":
        reports = list(convergence.square_mean_report(system, horizon))
    else:
        reports = list(
            convergence.three_series_report(system, Fraction(args.r), horizon)
        )
    _emit(
        _run_report(
            "converge",
            {"system": system.describe(), "criterion": crit, "horizon": horizon, "r": args.r},
            {"reports": [r.to_json_dict() for r in reports]},
            ";".join(r.verdict for r in reports),
            args.stamp,
        ),
        args.out,
    )
    return _verdict_exit([r.verdict for r in reports])


def cmd_spectrum(args) -> int:
    system = _load_system(args.system)
    lvl = spectra.spectrum_level(system, args.level)
    _emit(
        _run_report(
            "spectrum",
            {"system": system.describe(), "level": args.level},
            {
                "count": len(lvl),
                "lambdas": list(lvl.lambdas),
                "level_digits": [list(d) for d in lvl.level_digits],
            },
            "pass",
            args.stamp,
        ),
        args.out,
    )
    return PASS


def cmd_verify(args) -> int:
    import numpy as _np

    system = _load_system(args.system)
    lvl = spectra.spectrum_level(system, args.level)
    mu = finite_level(system, args.level)
    ortho = spectra.verify_orthogonality(mu, lvl, system)
    freqs = spectra.seeded_frequencies(args.parseval_samples, args.seed)
    deviation = spectra.verify_parseval(mu, lvl, freqs) if ortho else None
    gram_dev = None
    if ortho and not args.skip_gram:
        G = spectra.gram_matrix(mu, lvl)
        gram_dev = float(_np.max(_np.abs(G - _np.eye(len(lvl)))))
    ok = (
        bool(ortho)
        and deviation is not None
        and deviation < args.tolerance
        and (gram_dev is None or gram_dev < args.tolerance)
    )
    _emit(
        _run_report(
            "verify",
            {
                "system": system.describe(),
                "level": args.level,
                "parseval_samples": args.parseval_samples,
                "seed": args.seed,
                "tolerance": args.tolerance,
            },
            {
                "orthogonal": bool(ortho),
                "pairs_checked": ortho.pairs_checked,
                "witness": list(ortho.witness) if ortho.witness else None,
                "parseval_deviation": deviation,
                "gram_deviation": gram_dev,
                "spectrum_size": len(lvl),
            },
            "pass" if ok else "fail",
            args.stamp,
        ),
        args.out,
    )
    return PASS if ok else FAIL


def cmd_equi_positivity(args) -> int:
    system = _load_system(args.system)
    try:
        cert = spectra.equi_positivity_certificate(system, horizon=args.horizon)
    except ValueError as exc:
        _emit(
            _run_report(
                "equi-positivity",
                {"system": system.describe(), "horizon": args.horizon},
                {"error": str(exc)},
                "unknown",
                args.stamp,
            ),
            args.out,
        )
        return UNKNOWN_EXIT
    n = args.n if args.n is not None else cert.n0
    check = spectra.tail_transform_bound_check(
        system,
        n,
        factors=args.tail_factors,
        grid_points=args.grid_points,
        certificate=cert,
    )
    cert.grid_min = check.grid_min_direct
    report = _run_report(
        "equi-positivity",
        {
            "system": system.describe(),
            "horizon": args.horizon,
            "n": n,
            "tail_factors": args.tail_factors,
            "grid_points": args.grid_points,
        },
        {"certificate": cert.to_json_dict(), "tail_check": check.to_json_dict()},
        "pass" if check.ok else "fail",
        args.stamp,
    )
    _emit(report, args.out)
    if args.csv or args.plot is not None:
        nums, den = symmetric_rational_grid(args.grid_points)
        direct = spectra.tail_transform_on_grid(
            system, n, args.tail_factors, nums, den
        )
        rows = [
            (f"{p / den:.10g}", f"{v:.12g}", f"{check.bound_value:.12g}")
            for p, v in zip((float(x) for x in nums), direct)
        ]
        if args.csv:
            _emit_csv(["xi", "tail_transform_abs", "bound"], rows, args.csv)
        if args.plot is not None:
            from .plotting import render_tail_bound

            pairs = [(float(r[0]), float(r[1])) for r in rows]
            render_tail_bound(
                pairs,
                cert.epsilon,
                check.bound_value,
                args.plot,
                f"tail transform lower bound, n={n}, K={args.tail_factors}",
            )
    return PASS if check.ok else FAIL


def cmd_support(args) -> int:
    system = _load_system(args.system)
    groups = _support_groups(system, args.level)
    ok = groups.pop("_consistent")
    _emit(
        _run_report(
            "support",
            {"system": system.describe(), "level": args.level},
            groups,
            "pass" if ok else "fail",
            args.stamp,
        ),
        args.out,
    )
    return PASS if ok else FAIL


def _support_groups(system: MoranSystem, n: int) -> dict:
    from .dimensions import group_mass_formula, support_partition

    parts = support_partition(system, n)
    total = Fraction(1)
    for k in range(1, n + 1):
        total /= system.level(k).b
    out = []
    consistent = True
    for idx in sorted(parts, key=lambda i: i.offset):
        atoms = parts[idx]
        mass = total * len(atoms)
        formula = group_mass_formula(system, idx.levels, n)
        consistent = consistent and (mass == formula)
        out.append(
            {
                "levels": sorted(idx.levels),
                "offset": idx.offset,
                "atom_count": len(atoms),
                "mass": str(mass),
                "mass_formula": str(formula),
                "window": [idx.offset, idx.offset + 1],
            }
        )
    return {"groups": out, "group_count": len(out), "_consistent": consistent}


def cmd_dims(args) -> int:
    from .dimensions import dimension_quotients

    system = _load_system(args.system)
    hausdorff, packing = dimension_quotients(
        system, args.horizon, enforce_hypotheses=not args.unchecked
    )
    ks = np.arange(1, args.horizon + 1)
    if args.horizon > args.max_rows:
        idx = np.unique(np.geomspace(1, args.horizon, args.max_rows).astype(int)) - 1
    else:
        idx = ks - 1
    rows = [
        (int(ks[i]), f"{hausdorff.quotients[i]:.10g}", f"{packing.quotients[i]:.10g}")
        for i in idx
    ]
    _emit_csv(["k", "hausdorff_q", "packing_q"], rows, args.out)
    if args.plot is not None:
        from .plotting import render_dimension_quotients

        render_dimension_quotients(
            [(r[0], float(r[1]), float(r[2])) for r in rows],
            args.plot,
            f"dimension quotients: {system.name}",
        )
    return PASS


def cmd_construct(args) -> int:
    system = constructions.intermediate_dimension_system(
        args.alpha, args.beta, schedule=args.schedule
    )
    doc = system_to_document(system)
    if args.prefix_levels:
        doc["materialized_prefix"] = [
            {
                "k": k,
                "N": system.level(k).N,
                "b": system.level(k).b,
                "B": [str(d) for d in system.level(k).digits],
            }
            for k in range(1, args.prefix_levels + 1)
        ]
    text = json.dumps(doc, indent=2, sort_keys=True)
    if args.emit:
        with open(args.emit, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return PASS


def cmd_transform_grid(args) -> int:
    system = _load_system(args.system)
    n = args.level
    finite_level(system, n)  # validates the level (atom count, budget)
    nums, den = symmetric_rational_grid(
        args.points, span_num=args.span_num, span_den=args.span_den
    )
    from .digitsets import mask_on_rational_grid
    from .spectra import mask_lower_bound

    total = np.ones(len(nums), dtype=complex)
    bound = np.ones(len(nums), dtype=float)
    xs = np.array([float(p) for p in nums]) / den
    for k in range(1, n + 1):
        q = system.scale_product(k)
        lev = system.level(k)
        total *= mask_on_rational_grid(lev.digits, nums, den * q)
        lb = np.array([mask_lower_bound(lev.b, lev.c, x / q) for x in xs])
        bound *= np.clip(lb, 0.0, None)
    rows = [
        (
            f"{x:.10g}",
            f"{v.real:.12g}",
            f"{v.imag:.12g}",
            f"{abs(v):.12g}",
            f"{b:.12g}",
        )
        for x, v, b in zip(xs, total, bound)
    ]
    _emit_csv(["xi", "re", "im", "abs", "bound"], rows, args.out)
    if args.plot is not None:
        from .plotting import render_transform_grid

        render_transform_grid(
            [(float(r[0]), float(r[1]), float(r[2]), float(r[3]), float(r[4])) for r in rows],
            args.plot,
            f"level-{n} transform: {system.name}",
        )
    return PASS


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="moranspec",
        description="verification toolkit for Cantor-Moran infinite convolutions",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, system=True):
        if system:
            sp.add_argument("--system", required=True, help="registry name, name:params, or JSON path")
        sp.add_argument("--out", default=None, help="write the report here instead of stdout")
        sp.add_argument("--stamp", action="store_true", help="include a wall-clock timestamp")

    sp = sub.add_parser("check-hadamard", help="exact Hadamard triple test")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--B", type=str, required=True, help="comma-separated integers")
    sp.add_argument("--L", type=str, required=True, help="comma-separated integers")
    common(sp, system=False)
    sp.set_defaults(fn=cmd_check_hadamard)

    sp = sub.add_parser("converge", help="existence-criterion reports")
    sp.add_argument("--criterion", choices=sorted(_CRITERIA), required=True)
    sp.add_argument("--horizon", type=int, default=20)
    sp.add_argument("--r", type=str, default="1", help="truncation radius (three-series)")
    common(sp)
    sp.set_defaults(fn=cmd_converge)

    sp = sub.add_parser("spectrum", help="level frequency set")
    sp.add_argument("--level", type=int, required=True)
    common(sp)
    sp.set_defaults(fn=cmd_spectrum)

    sp = sub.add_parser("verify", help="exact orthogonality + Parseval cross-check")
    sp.add_argument("--level", type=int, required=True)
    sp.add_argument("--parseval-samples", type=int, default=100)
    sp.add_argument("--seed", type=int, default=20240701)
    sp.add_argument("--tolerance", type=float, default=1e-9)
    sp.add_argument("--skip-gram", action="store_true", help="skip the numeric Gram oracle")
    common(sp)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("equi-positivity", help="uniform tail lower-bound certificate")
    sp.add_argument("--horizon", type=int, default=200)
    sp.add_argument("--n", type=int, default=None, help="tail start (default n0)")
    sp.add_argument("--tail-factors", type=int, default=15)
    sp.add_argument("--grid-points", type=int, default=spectra.TWO_THIRDS_GRID_POINTS)
    sp.add_argument("--csv", default=None, help="also dump the grid to this CSV")
    sp.add_argument("--plot", default=None, help="render the grid to this image file")
    common(sp)
    sp.set_defaults(fn=cmd_equi_positivity)

    sp = sub.add_parser("support", help="factorial-window support decomposition")
    sp.add_argument("--level", type=int, required=True)
    common(sp)
    sp.set_defaults(fn=cmd_support)

    sp = sub.add_parser("dims", help="dimension quotient sequences (CSV)")
    sp.add_argument("--horizon", type=int, required=True)
    sp.add_argument("--unchecked", action="store_true", help="skip the sum 1/b_k hypothesis check")
    sp.add_argument("--max-rows", type=int, default=400)
    sp.add_argument("--plot", default=None)
    common(sp)
    sp.set_defaults(fn=cmd_dims)

    sp = sub.add_parser("construct", help="emit an intermediate-dimension system document")
    sp.add_argument("--alpha", type=str, required=True)
    sp.add_argument("--beta", type=str, required=True)
    sp.add_argument("--schedule", default="factorial-squared", choices=["factorial-squared"])
    sp.add_argument("--emit", default=None, help="output path (default stdout)")
    sp.add_argument("--prefix-levels", type=int, default=0)
    sp.set_defaults(fn=cmd_construct)

    sp = sub.add_parser("transform-grid", help="CSV of the level transform over a grid")
    sp.add_argument("--level", type=int, required=True)
    sp.add_argument("--points", type=int, default=2001)
    sp.add_argument("--span-num", type=int, default=2)
    sp.add_argument("--span-den", type=int, default=3)
    sp.add_argument("--plot", default=None)
    common(sp)
    sp.set_defaults(fn=cmd_transform_grid)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (SystemDescriptionError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except spectra.SpectrumPreconditionError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except (ValueError, OverflowError, IndexError, ArithmeticError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
