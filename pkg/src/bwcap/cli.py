"""Command-line interface.

Subcommands
-----------
bounds      single-mode lower/upper bounds and photon efficiencies
figure      CSV sweep data for the standard efficiency plots
decompose   spectrum of a multi-mode transition matrix from a file
allocate    optimal photon split across a spectrum (JSON out)
turbulence  Monte Carlo run plus second-moment bounds for an ensemble

Exit codes: 0 success, 1 domain or numerical error, 2 usage error
(including unreadable/ill-formed input documents and bad grids).
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys

import numpy as np

from .allocation import BoundKind, allocate
from .entropy_core import (
    LN2,
    asymptotic_coefficients,
    capacity_infinite,
    lower_bound_single,
    photon_efficiency,
    upper_bound_single,
)
from .errors import ConvergenceError, DomainError
from .mode_algebra import UnitaryTransition, load_matrix, mode_decompose, unitarity_residual
from .turbulence import EnsembleSpec, monte_carlo_lower, second_moment, turbulence_lower_bound

__all__ = ["main", "run", "build_parser"]

FIGURE_KINDS = ("eff-vs-nbar", "eff-vs-eta", "eff-vs-spectral")


class UsageError(Exception):
    """Bad request shape: unreadable inputs, malformed documents, bad grids."""


def _fmt17(x: float) -> str:
    return format(float(x), ".17g")


def _print_aligned(pairs) -> None:
    width = max(len(key) for key, _ in pairs)
    for key, value in pairs:
        print(f"{key:<{width}}  {value}")


def _convert(nats: float, unit: str) -> float:
    return nats / LN2 if unit == "bits" else nats


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


def cmd_bounds(args) -> int:
    lower = lower_bound_single(args.eta, args.nbar)
    upper = upper_bound_single(args.eta, args.nbar)
    unit = args.unit
    eff_lower = photon_efficiency(lower, args.nbar, unit) if args.nbar > 0 else None
    eff_upper = photon_efficiency(upper, args.nbar, unit) if args.nbar > 0 else None
    if args.eta > 0.5:
        coeff_lower, coeff_upper = asymptotic_coefficients(args.eta)
        coeff_lower, coeff_upper = _convert(coeff_lower, unit), _convert(coeff_upper, unit)
    else:
        coeff_lower = coeff_upper = None
    cap = _convert(capacity_infinite(args.eta), unit)

    doc = {
        "eta": args.eta,
        "nbar": args.nbar,
        "unit": unit,
        "lower_bound": lower.in_unit(unit),
        "upper_bound": upper.in_unit(unit),
        "photon_efficiency_lower": eff_lower,
        "photon_efficiency_upper": eff_upper,
        "capacity_infinite": cap,
        "asymptotic_coefficient_lower": coeff_lower,
        "asymptotic_coefficient_upper": coeff_upper,
    }
    if args.json:
        print(json.dumps(doc, indent=2))
        return 0
    pairs = [
        ("transmissivity", format(args.eta, ".12g")),
        ("photon_budget", format(args.nbar, ".12g")),
        (f"lower_bound_{unit}", format(doc["lower_bound"], ".12g")),
        (f"upper_bound_{unit}", format(doc["upper_bound"], ".12g")),
    ]
    if eff_lower is not None:
        pairs.append((f"photon_efficiency_lower_{unit}", format(eff_lower, ".12g")))
        pairs.append((f"photon_efficiency_upper_{unit}", format(eff_upper, ".12g")))
    pairs.append((f"capacity_infinite_{unit}", format(cap, ".12g")))
    if coeff_lower is not None:
        pairs.append((f"asymptotic_coefficient_lower_{unit}", format(coeff_lower, ".12g")))
        pairs.append((f"asymptotic_coefficient_upper_{unit}", format(coeff_upper, ".12g")))
    _print_aligned(pairs)
    return 0


# ---------------------------------------------------------------------------
# figure
# ---------------------------------------------------------------------------

_FIGURE_DEFAULTS = {
    # kind: (eta, nbar, modes, start, stop, points, scale)
    "eff-vs-nbar": (0.7, None, None, 1e-6, 1e-1, 50, "log"),
    "eff-vs-eta": (None, 1e-3, None, 0.5, 1.0, 51, "linear"),
    "eff-vs-spectral": (0.9, None, 1000, None, None, 30, "linear"),
}


def _build_grid(args, start, stop, points, scale) -> np.ndarray:
    start = args.grid_start if args.grid_start is not None else start
    stop = args.grid_stop if args.grid_stop is not None else stop
    points = args.grid_points if args.grid_points is not None else points
    scale = args.grid_scale if args.grid_scale is not None else scale
    if points < 2:
        raise UsageError(f"grid needs at least 2 points, got {points}")
    if not (start < stop):
        raise UsageError(f"grid must be strictly increasing, got start={start}, stop={stop}")
    if scale == "log":
        if start <= 0:
            raise UsageError(f"log grid needs start > 0, got {start}")
        return np.geomspace(start, stop, points)
    return np.linspace(start, stop, points)


def _budget_for_spectral(eta: float, kind: BoundKind, target_bits: float) -> float:
    """Per-mode photon number at which the chosen bound equals target_bits."""
    cap = capacity_infinite(eta)
    target = target_bits * LN2
    if target <= 0:
        raise DomainError(f"spectral efficiency must be positive, got {target_bits} bits")
    if target >= cap:
        raise DomainError(
            f"spectral efficiency {target_bits} bits/use/mode exceeds the infinite-photon "
            f"limit {cap / LN2:.6g} bits for eta={eta}"
        )

    if kind is BoundKind.LOWER:
        value = lambda x: lower_bound_single(eta, x).nats
    else:
        value = lambda x: upper_bound_single(eta, x).nats

    hi = 1.0
    while value(hi) < target:
        hi *= 4.0
        if hi > 1e30:
            raise DomainError(
                f"spectral efficiency {target_bits} bits is too close to the infinite-photon limit"
            )
    lo = hi
    while value(lo) > target:
        lo *= 0.25
    for _ in range(80):
        mid = math.sqrt(lo) * math.sqrt(hi)
        if value(mid) < target:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo) * math.sqrt(hi)


def _figure_rows(args) -> tuple[list[str], list[tuple[float, float, float]]]:
    eta0, nbar0, modes0, start, stop, points, scale = _FIGURE_DEFAULTS[args.kind]
    eta = args.eta if args.eta is not None else eta0
    nbar = args.nbar if args.nbar is not None else nbar0

    if args.kind == "eff-vs-nbar":
        grid = _build_grid(args, start, stop, points, scale)
        if grid[0] <= 0:
            raise UsageError("photon-number grid must be positive")
        header = ["nbar", "photon_efficiency_lower_bits", "photon_efficiency_upper_bits"]
        rows = [
            (
                nb,
                photon_efficiency(lower_bound_single(eta, nb), nb, "bits"),
                photon_efficiency(upper_bound_single(eta, nb), nb, "bits"),
            )
            for nb in grid
        ]
        return header, rows

    if args.kind == "eff-vs-eta":
        grid = _build_grid(args, start, stop, points, scale)
        if grid[0] < 0 or grid[-1] > 1:
            raise UsageError("transmissivity grid must lie inside [0, 1]")
        if nbar <= 0:
            raise DomainError(f"photon efficiency needs nbar > 0, got {nbar}")
        header = ["eta", "photon_efficiency_lower_bits", "photon_efficiency_upper_bits"]
        rows = [
            (
                e,
                photon_efficiency(lower_bound_single(e, nbar), nbar, "bits"),
                photon_efficiency(upper_bound_single(e, nbar), nbar, "bits"),
            )
            for e in grid
        ]
        return header, rows

    # eff-vs-spectral: the axis is bits per use per mode for a bank of
    # `modes` equal-transmissivity channels.  Equal modes share the budget
    # equally at the optimum, so the whole curve reduces to per-mode
    # quantities and the mode count cancels; each bound's photon number is
    # recovered from the axis value by inverting the bound in nbar.
    modes = args.modes if args.modes is not None else modes0
    if modes < 1:
        raise UsageError(f"mode count must be >= 1, got {modes}")
    cap_bits = capacity_infinite(eta) / LN2
    if not math.isfinite(cap_bits) or cap_bits <= 0:
        raise DomainError(f"eff-vs-spectral needs 1/2 < eta < 1, got eta={eta}")
    grid = _build_grid(args, 0.05 * cap_bits, 0.95 * cap_bits, points, scale)
    header = [
        "spectral_efficiency_bits",
        "photon_efficiency_lower_bits",
        "photon_efficiency_upper_bits",
    ]
    rows = []
    for s in grid:
        x_lower = _budget_for_spectral(eta, BoundKind.LOWER, s)
        x_upper = _budget_for_spectral(eta, BoundKind.UPPER, s)
        rows.append((s, s / x_lower, s / x_upper))
    return header, rows


_GNUPLOT_TEMPLATE = """set datafile separator ','
set key autotitle columnhead
set xlabel '{xlabel}'
set ylabel 'photon efficiency (bits/photon)'
{logline}plot '{csv}' using 1:2 with lines title 'lower bound', \\
     '{csv}' using 1:3 with lines title 'upper bound'
"""


def cmd_figure(args) -> int:
    if args.kind not in FIGURE_KINDS:
        raise UsageError(f"unknown figure kind {args.kind!r}")
    header, rows = _figure_rows(args)
    with open(args.output, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt17(v) for v in row) + "\n")
    print(f"wrote {len(rows)} rows to {args.output}")
    if args.gnuplot:
        script = _GNUPLOT_TEMPLATE.format(
            xlabel=header[0],
            csv=args.output,
            logline="set logscale x\n" if args.kind == "eff-vs-nbar" else "",
        )
        path = args.output + ".gp"
        with open(path, "w", newline="") as fh:
            fh.write(script)
        print(f"wrote gnuplot script to {path}")
    return 0


# ---------------------------------------------------------------------------
# decompose
# ---------------------------------------------------------------------------


def cmd_decompose(args) -> int:
    try:
        matrix, meta = load_matrix(args.matrix)
    except FileNotFoundError as exc:
        raise UsageError(f"cannot read matrix file: {exc}") from exc
    except (DomainError, json.JSONDecodeError, ValueError) as exc:
        raise UsageError(f"cannot parse matrix file {args.matrix}: {exc}") from exc

    meta = meta or {}
    m = args.m if args.m is not None else meta.get("m")
    k = args.k if args.k is not None else meta.get("k")
    l = args.l if args.l is not None else meta.get("l")
    if m is None or k is None or l is None:
        raise UsageError(
            "block partition is incomplete: supply --m/--k/--l or embed m, k, l in the JSON document"
        )

    u = UnitaryTransition(matrix, m=int(m), k=int(k), l=int(l), unitarity_tol=args.tol)
    spectrum = mode_decompose(u, tol=args.tol)
    residual = unitarity_residual(matrix)
    doc = {
        "m": u.m,
        "k": u.k,
        "l": u.l,
        "etas": spectrum.etas.tolist(),
        "completeness_residual": spectrum.completeness_residual,
        "unitarity_residual": residual,
    }
    if args.json:
        print(json.dumps(doc, indent=2))
        return 0
    pairs = [("m", u.m), ("k", u.k), ("l", u.l)]
    pairs += [(f"eta_{i + 1}", format(e, ".12g")) for i, e in enumerate(spectrum.etas)]
    pairs.append(("completeness_residual", format(spectrum.completeness_residual, ".3e")))
    pairs.append(("unitarity_residual", format(residual, ".3e")))
    _print_aligned(pairs)
    return 0


# ---------------------------------------------------------------------------
# allocate
# ---------------------------------------------------------------------------


def _parse_etas(args) -> list[float]:
    if (args.etas is None) == (args.etas_file is None):
        raise UsageError("supply exactly one of --etas or --etas-file")
    if args.etas is not None:
        try:
            return [float(x) for x in args.etas.split(",") if x.strip()]
        except ValueError as exc:
            raise UsageError(f"cannot parse --etas {args.etas!r}: {exc}") from exc
    try:
        with open(args.etas_file) as fh:
            doc = json.load(fh)
        return [float(x) for x in doc]
    except FileNotFoundError as exc:
        raise UsageError(f"cannot read spectrum file: {exc}") from exc
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        raise UsageError(f"cannot parse spectrum file {args.etas_file}: {exc}") from exc


def cmd_allocate(args) -> int:
    etas = _parse_etas(args)
    kind = BoundKind.from_string(args.kind)
    result = allocate(etas, args.nbar, kind, tol=args.tol)
    doc = {
        "etas": etas,
        "nbar": args.nbar,
        "kind": kind.value,
        "budgets": result.budgets.tolist(),
        "value_nats": result.value.nats,
        "value_bits": result.value.bits,
        "lagrange_multiplier": result.lagrange_multiplier,
    }
    print(json.dumps(doc, indent=2))
    return 0


# ---------------------------------------------------------------------------
# turbulence
# ---------------------------------------------------------------------------


def cmd_turbulence(args) -> int:
    try:
        with open(args.spec) as fh:
            doc = json.load(fh)
        spec = EnsembleSpec.from_json_dict(doc)
    except FileNotFoundError as exc:
        raise UsageError(f"cannot read ensemble file: {exc}") from exc
    except (json.JSONDecodeError, DomainError, TypeError) as exc:
        raise UsageError(f"cannot parse ensemble file {args.spec}: {exc}") from exc
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)

    estimate = monte_carlo_lower(spec, args.nbar, args.samples)
    moment = second_moment(spec, args.samples)
    bound_diagonal = turbulence_lower_bound(moment, args.nbar, "diagonal").nats
    bound_eigen = turbulence_lower_bound(moment, args.nbar, "eigen").nats

    comparator = bound_eigen if args.basis == "eigen" else bound_diagonal
    violated = estimate.mean + 3.0 * estimate.std_error < comparator

    report = {
        "mean_nats": estimate.mean,
        "std_error": estimate.std_error,
        "n_samples": estimate.n_samples,
        "bound_diagonal": bound_diagonal,
        "bound_eigen": bound_eigen,
        "confidence_95": list(estimate.confidence_95),
        "basis": args.basis,
        "seed": spec.seed,
        "nbar": args.nbar,
        "unit": "nats",
    }
    print(json.dumps(report, indent=2))
    if violated:
        print(
            f"self-check failed: mean {estimate.mean:.6g} + 3*SE {3 * estimate.std_error:.3g} "
            f"falls below the {args.basis}-basis bound {comparator:.6g}",
            file=sys.stderr,
        )
        return 1
    return 0


# ---------------------------------------------------------------------------
# parser and dispatch
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON instead of aligned text")
    common.add_argument("--unit", choices=("nats", "bits"), default="nats", help="output unit")
    common.add_argument("--seed", type=int, default=None, help="seed override (turbulence only)")

    parser = argparse.ArgumentParser(
        prog="bwcap",
        description="Private-capacity bounds for noiseless bosonic wiretap channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", parents=[common], help="single-mode bounds at (eta, nbar)")
    p.add_argument("--eta", type=float, required=True, help="transmissivity in [0, 1]")
    p.add_argument("--nbar", type=float, required=True, help="mean photon number per use")
    p.set_defaults(handler=cmd_bounds)

    p = sub.add_parser("figure", parents=[common], help="emit CSV sweep data")
    p.add_argument("--kind", choices=FIGURE_KINDS, required=True)
    p.add_argument("--output", required=True, help="CSV output path")
    p.add_argument("--eta", type=float, default=None, help="transmissivity (sweep parameter)")
    p.add_argument("--nbar", type=float, default=None, help="photon budget (eff-vs-eta)")
    p.add_argument("--modes", type=int, default=None, help="mode count (eff-vs-spectral)")
    p.add_argument("--grid-start", type=float, default=None)
    p.add_argument("--grid-stop", type=float, default=None)
    p.add_argument("--grid-points", type=int, default=None)
    p.add_argument("--grid-scale", choices=("log", "linear"), default=None)
    p.add_argument("--gnuplot", action="store_true", help="also write a gnuplot script")
    p.set_defaults(handler=cmd_figure)

    p = sub.add_parser("decompose", parents=[common], help="spectrum of a transition matrix")
    p.add_argument("--matrix", required=True, help="matrix file (.json or .csv)")
    p.add_argument("--m", type=int, default=None, help="sender mode count")
    p.add_argument("--k", type=int, default=None, help="receiver mode count")
    p.add_argument("--l", type=int, default=None, help="eavesdropper mode count")
    p.add_argument("--tol", type=float, default=1e-10, help="unitarity/consistency tolerance")
    p.set_defaults(handler=cmd_decompose)

    p = sub.add_parser("allocate", parents=[common], help="optimal photon split (JSON out)")
    p.add_argument("--etas", default=None, help="comma-separated transmissivities")
    p.add_argument("--etas-file", default=None, help="JSON array of transmissivities")
    p.add_argument("--nbar", type=float, required=True, help="total photon budget")
    p.add_argument("--kind", choices=("lower", "upper"), default="lower")
    p.add_argument("--tol", type=float, default=1e-10, help="relative budget-sum tolerance")
    p.set_defaults(handler=cmd_allocate)

    p = sub.add_parser("turbulence", parents=[common], help="Monte Carlo + second-moment bounds")
    p.add_argument("--spec", required=True, help="ensemble JSON file")
    p.add_argument("--nbar", type=float, required=True, help="photon budget per use")
    p.add_argument("--samples", type=int, default=1000, help="Monte Carlo sample count")
    p.add_argument(
        "--basis",
        choices=("diagonal", "eigen"),
        default="eigen",
        help="second-moment basis used in the self-check",
    )
    p.set_defaults(handler=cmd_turbulence)

    return parser


def main(argv=None) -> int:
    """Parse and dispatch; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())
