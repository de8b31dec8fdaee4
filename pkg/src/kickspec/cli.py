"""Command-line driver for reproducible runs.

Subcommands: discrepancy, weyl, spectrum, scount, dynamics.  Every run writes
its result tables as CSV plus a manifest.json recording the full parameter
map and its content hash; identical flag sets produce byte-identical CSVs,
including under --threads parallelism (cells are assembled by index, never by
completion time).

Exit codes: 0 success, 2 usage, 3 resource limit, 4 numerical tolerance
violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .counting import default_x_grid, gamma_sweep
from .equidistribution import (
    DiscrepancyReport,
    SequenceSpec,
    classical_exponent,
    conjectured_exponent,
    discrepancy_exact,
    erdos_turan_bound,
    sequence_points,
    weyl_sum,
)
from .errors import (
    EnsembleError,
    IntervalRangeError,
    PoleError,
    PrecisionError,
    ProvenanceError,
    ResourceLimitError,
    ToleranceError,
    TrivialPerturbationError,
)
from .floquet import (
    build_floquet,
    eigen_decompose,
    evolve,
    perturbation_trace_norm,
    wiener_average,
)
from .rationals import (
    RationalApprox,
    golden_ratio,
    irrational_type_estimate,
    sqrt_two,
)
from .runio import (
    CellCache,
    ResultTable,
    RunManifest,
    atomic_write_text,
    manifest_hash,
    write_csv,
)
from .spectral import (
    BaseSpectrum,
    Divergent,
    KickEnsemble,
    cotangent_residual,
    full_support_state,
    gamma_window,
    orthonormal_ensemble,
    theta_sequence,
)

USAGE_ERROR = 2
RESOURCE_ERROR = 3
TOLERANCE_ERROR = 4

_NAMED_CONSTANTS = {"golden": golden_ratio, "sqrt2": sqrt_two}
_DEFAULT_DEPTH = 200


def parse_beta_spec(text: str, precision_bits: int | None = None) -> RationalApprox:
    """Decimal string, fraction p/q, or named constant (golden, sqrt2).

    Named constants expand to 200-term continued-fraction rationals; with
    --precision BITS they expand until the denominator reaches that size.
    """
    text = text.strip()
    builder = _NAMED_CONSTANTS.get(text)
    if builder is not None:
        if precision_bits is None:
            return builder(_DEFAULT_DEPTH)
        depth = 16
        value = builder(depth)
        while value.denominator.bit_length() < precision_bits and depth < 100_000:
            depth *= 2
            value = builder(depth)
        return value
    try:
        return RationalApprox.from_fraction(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(
            f"cannot parse beta spec {text!r}: use a decimal, p/q, or one of "
            f"{sorted(_NAMED_CONSTANTS)}") from exc


def parse_size_grid(text: str) -> list[int]:
    """Grid syntax: 'lo:hi:k' (k geometric sizes) or a comma list of sizes."""
    text = text.strip()
    try:
        if ":" in text:
            lo_s, hi_s, k_s = text.split(":")
            lo, hi, k = float(lo_s), float(hi_s), int(k_s)
            if lo < 1 or hi < lo or k < 1:
                raise ValueError
            sizes = np.exp(np.linspace(math.log(lo), math.log(hi), k))
            grid = sorted({int(round(s)) for s in sizes})
        else:
            grid = sorted({int(round(float(part))) for part in text.split(",")})
        if not grid or grid[0] < 1:
            raise ValueError
        return grid
    except ValueError as exc:
        raise ValueError(f"cannot parse size grid {text!r}: "
                         "use lo:hi:count or a comma list") from exc


def parse_float_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise ValueError(f"cannot parse float list {text!r}") from exc
    if not values:
        raise ValueError("empty list")
    return values


def _spectrum_from_args(args) -> BaseSpectrum:
    coefficients = [parse_beta_spec(part, args.precision).as_fraction()
                    for part in args.beta.split(",")]
    beta = (Fraction(0), *coefficients)  # flag lists degrees 1..p
    return BaseSpectrum(beta=beta, hbar=args.hbar,
                        period=Fraction(args.period))


def _ensemble_from_args(args, dim: int) -> KickEnsemble:
    strengths = parse_float_list(args.lambdas) if args.rank else ()
    if args.rank and len(strengths) != args.rank:
        raise ValueError(f"need exactly {args.rank} values in --lambdas")
    if args.rank == 0:
        return KickEnsemble(states=(), strengths=())
    if args.kick_state == "uniform":
        if args.rank != 1:
            raise ValueError("--kick-state uniform supports rank 1 only")
        coeffs = np.full(dim, 1.0 / math.sqrt(dim), dtype=complex)
        from .spectral import KickState
        return KickEnsemble(states=(KickState(coefficients=coeffs),),
                            strengths=strengths)
    if args.rank == 1:
        state = full_support_state(args.gamma, dim)
        return KickEnsemble(states=(state,), strengths=strengths)
    return orthonormal_ensemble(args.gamma, args.rank, dim, strengths)


def _write_manifest(out: Path, command: str, params: dict, outputs) -> None:
    RunManifest.create(command, params, __version__, outputs).write(out)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_discrepancy(args) -> int:
    beta = parse_beta_spec(args.beta, args.precision)
    grid = parse_size_grid(args.n_grid)
    spec = SequenceSpec(j=args.j, beta=beta, label=args.beta)
    points = sequence_points(spec, grid[-1])
    rows = []
    for n in grid:
        prefix = points[:n]
        # building the full report re-validates d_n <= et_bound on every run
        rep = DiscrepancyReport(n_points=n,
                                d_n=discrepancy_exact(prefix).d_n,
                                et_bound=erdos_turan_bound(prefix, args.m),
                                m_used=args.m)
        rows.append((rep.n_points, rep.d_n, rep.et_bound))
    if len(rows) >= 2:
        slope = float(np.polyfit(np.log([r[0] for r in rows]),
                                 np.log([r[1] for r in rows]), 1)[0])
    else:
        slope = math.nan
    table = ResultTable(columns=("N", "D_N", "ET_bound"),
                        units=("count", "dimensionless", "dimensionless"),
                        rows=tuple(rows))
    out = Path(args.out)
    write_csv(out / "discrepancy.csv", table, footer=[("slope", slope, "")])
    params = {"command": "discrepancy", "j": args.j, "beta": args.beta,
              "n_grid": args.n_grid, "m": args.m,
              "precision": args.precision}
    _write_manifest(out, "discrepancy", params, ["discrepancy.csv"])
    print(f"wrote {out / 'discrepancy.csv'} (slope {slope:.4f})")
    return 0


def cmd_weyl(args) -> int:
    beta = parse_beta_spec(args.beta, args.precision)
    grid = parse_size_grid(args.n_grid)
    spec = SequenceSpec(j=args.j, beta=beta, label=args.beta)
    rows = []
    for n in grid:
        for h in range(1, args.h_max + 1):
            s = weyl_sum(spec, h, n)
            rows.append((n, h, s.value.real, s.value.imag, s.modulus,
                         s.modulus / n))
    table = ResultTable(
        columns=("N", "h", "re_S", "im_S", "modulus", "modulus_over_N"),
        units=("count", "harmonic", "dimensionless", "dimensionless",
               "dimensionless", "dimensionless"),
        rows=tuple(rows))
    out = Path(args.out)
    write_csv(out / "weyl.csv", table)
    summary = {
        "conjectured_exponent": conjectured_exponent(args.j, args.epsilon),
        "classical_exponent":
            classical_exponent(args.j) if args.j >= 2 else None,
    }
    atomic_write_text(out / "summary.json",
                      json.dumps(summary, indent=2, sort_keys=True) + "\n")
    params = {"command": "weyl", "j": args.j, "beta": args.beta,
              "n_grid": args.n_grid, "h_max": args.h_max,
              "epsilon": args.epsilon, "precision": args.precision}
    _write_manifest(out, "weyl", params, ["weyl.csv", "summary.json"])
    print(f"wrote {out / 'weyl.csv'}")
    return 0


def cmd_spectrum(args) -> int:
    spec = _spectrum_from_args(args)
    ensemble = _ensemble_from_args(args, args.dim)
    matrix = build_floquet(spec, ensemble, args.dim, args.convention)
    decomposition = eigen_decompose(matrix)
    k_count = len(matrix.ensemble)
    columns = ["index", "eigenphase_rad"] + [f"weight_{k}" for k in range(k_count)]
    units = ["index", "radian"] + ["probability"] * k_count
    rows = []
    for i, phase in enumerate(decomposition.eigenphases):
        rows.append((i, float(phase),
                     *(float(decomposition.weights[k, i]) for k in range(k_count))))
    out = Path(args.out)
    write_csv(out / "eigenphases.csv",
              ResultTable(columns=tuple(columns), units=tuple(units),
                          rows=tuple(rows)))
    summary = {
        "dim": args.dim,
        "convention": args.convention,
        "unitarity_defect": matrix.unitarity_defect,
        "trace_norms": [perturbation_trace_norm(s / spec.hbar)
                        for s in matrix.ensemble.strengths],
        "weight_sums": [float(decomposition.weights[k].sum())
                        for k in range(k_count)],
    }
    if k_count == 1:
        theta = theta_sequence(spec, args.dim)
        residuals = [abs(cotangent_residual(
            float(x), matrix.ensemble.states[0], theta,
            matrix.ensemble.strengths[0] / spec.hbar))
            for x in decomposition.eigenphases]
        summary["max_secular_residual"] = max(residuals)
    atomic_write_text(out / "summary.json",
                      json.dumps(summary, indent=2, sort_keys=True) + "\n")
    params = {"command": "spectrum", "beta": args.beta, "hbar": args.hbar,
              "period": args.period, "rank": args.rank, "gamma": args.gamma,
              "lambdas": args.lambdas, "dim": args.dim,
              "kick_state": args.kick_state,
              "convention": args.convention, "precision": args.precision}
    _write_manifest(out, "spectrum", params,
                    ["eigenphases.csv", "summary.json"])
    print(f"wrote {out / 'eigenphases.csv'} "
          f"(unitarity defect {matrix.unitarity_defect:.2e})")
    return 0


def cmd_scount(args) -> int:
    beta = parse_beta_spec(args.beta, args.precision)
    grid = parse_size_grid(args.n_grid)
    gammas = parse_float_list(args.gamma_grid) if args.gamma_grid \
        else (args.gamma,)
    for gamma in gammas:
        if not 0.5 < gamma <= 1.0:
            raise ValueError(f"gamma = {gamma} outside (1/2, 1]")
    if args.eta is not None:
        eta = args.eta
    else:
        eta = irrational_type_estimate(beta, 10_000).eta_hat
    if args.x_grid:
        xs = parse_float_list(args.x_grid)
    else:
        # the widest interval (smallest gamma, smallest N) governs spillage
        xs = default_x_grid(args.x_count, n_min=grid[0], gamma=min(gammas),
                            variant=args.variant)

    params = {"command": "scount", "j": args.j, "beta": args.beta,
              "gamma_grid": list(gammas), "x_grid": list(xs),
              "n_grid": grid, "variant": args.variant, "eta": eta,
              "precision": args.precision}
    key = manifest_hash(params)
    out = Path(args.out)
    cache = CellCache(out / ".cache")
    cached = cache.get(key)
    window = None
    if cached is None:
        sweep = gamma_sweep(args.j, eta, beta, gammas, xs, grid,
                            variant=args.variant, threads=args.threads)
        window = sweep.window
        cell_rows = []
        for cell in sweep.cells:
            rep = cell.report
            b_inv = math.inf if isinstance(rep.b_inverse, Divergent) \
                else rep.b_inverse
            cell_rows.append([cell.x, cell.gamma, rep.n, rep.a_count,
                              rep.s_count, rep.lhs, rep.rhs, b_inv,
                              int(rep.holds)])
        label_rows = []
        for gamma in gammas:
            for x in xs:
                label_rows.append([x, gamma, sweep.labels[(x, gamma)],
                                   int(sweep.window_membership[gamma])])
        cache.put(key, {"cells": cell_rows, "labels": label_rows})
    else:
        cell_rows = cached["cells"]
        label_rows = cached["labels"]
    if window is None:
        window = gamma_window(args.j, eta)

    write_csv(out / "cells.csv", ResultTable(
        columns=("x_rad", "gamma", "N", "a_count", "s_count", "lhs", "rhs",
                 "b_inverse", "holds"),
        units=("radian", "exponent", "count", "count", "count",
               "dimensionless", "dimensionless", "dimensionless", "bool"),
        rows=tuple(tuple(row) for row in cell_rows)))
    write_csv(out / "labels.csv", ResultTable(
        columns=("x_rad", "gamma", "label", "inside_window"),
        units=("radian", "exponent", "category", "bool"),
        rows=tuple(tuple(row) for row in label_rows)))
    summary = {
        "eta": eta,
        "window": [window.lo, window.hi],
        "labels": {f"{row[0]:.12g}|{row[1]:.12g}": row[2]
                   for row in label_rows},
    }
    atomic_write_text(out / "summary.json",
                      json.dumps(summary, indent=2, sort_keys=True) + "\n")
    _write_manifest(out, "scount", params,
                    ["cells.csv", "labels.csv", "summary.json"])
    print(f"wrote {out / 'cells.csv'} ({len(cell_rows)} cells)")
    return 0


def cmd_dynamics(args) -> int:
    spec = _spectrum_from_args(args)
    ensemble = _ensemble_from_args(args, args.dim)
    matrix = build_floquet(spec, ensemble, args.dim)
    decomposition = eigen_decompose(matrix)
    if len(matrix.ensemble):
        if not 0 <= args.state_index < len(matrix.ensemble):
            raise ValueError(f"--state-index out of range for rank {args.rank}")
        state = matrix.ensemble.states[args.state_index]
    else:
        # no kick: evolve the basis state at --state-index, which is
        # stationary under the diagonal evolution
        if not 0 <= args.state_index < args.dim:
            raise ValueError("--state-index out of range for the basis")
        from .spectral import KickState
        coeffs = np.zeros(args.dim, dtype=complex)
        coeffs[args.state_index] = 1.0
        state = KickState(coefficients=coeffs)
    trace = evolve(matrix, state, spec, args.kicks)
    survival = trace.survival()
    running = np.concatenate([[0.0], np.cumsum(survival[1:]) /
                              np.arange(1, args.kicks + 1)])
    rows = [(n, float(survival[n]), float(trace.energies[n]), float(running[n]))
            for n in range(args.kicks + 1)]
    out = Path(args.out)
    write_csv(out / "dynamics.csv", ResultTable(
        columns=("n", "survival", "energy", "running_cesaro"),
        units=("kick", "probability", "energy", "probability"),
        rows=tuple(rows)))
    summary = {
        "kicks": args.kicks,
        "cesaro_mean": trace.cesaro_mean(),
        "unitarity_defect": matrix.unitarity_defect,
    }
    if len(matrix.ensemble):
        mean, mass = wiener_average(trace, decomposition, args.state_index)
        summary["point_mass_sum"] = mass
        summary["wiener_gap"] = abs(mean - mass)
    atomic_write_text(out / "summary.json",
                      json.dumps(summary, indent=2, sort_keys=True) + "\n")
    params = {"command": "dynamics", "beta": args.beta, "hbar": args.hbar,
              "period": args.period, "rank": args.rank, "gamma": args.gamma,
              "lambdas": args.lambdas, "dim": args.dim, "kicks": args.kicks,
              "kick_state": args.kick_state, "state_index": args.state_index,
              "precision": args.precision}
    _write_manifest(out, "dynamics", params, ["dynamics.csv", "summary.json"])
    print(f"wrote {out / 'dynamics.csv'}")
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kickspec",
        description="Spectral laboratory for rank-N kicked systems")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, default_out: str):
        p.add_argument("--out", default=default_out,
                       help="output directory (default %(default)s)")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for sweeps")
        p.add_argument("--precision", type=int, default=None, metavar="BITS",
                       help="denominator bits for named constants "
                            "(default: 200 continued-fraction terms)")

    p = sub.add_parser("discrepancy",
                       help="exact D_N and Erdos-Turan bounds for (n^j beta)")
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--beta", required=True,
                   help="decimal, p/q, or named constant (golden, sqrt2)")
    p.add_argument("--n-grid", default="1e3:1e6:4")
    p.add_argument("--m", type=int, default=64,
                   help="harmonics in the Erdos-Turan bound")
    common(p, "runs/discrepancy")
    p.set_defaults(func=cmd_discrepancy)

    p = sub.add_parser("weyl", help="Weyl sums S = sum exp(2 pi i h n^j beta)")
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--beta", required=True)
    p.add_argument("--n-grid", default="1e2:1e5:4")
    p.add_argument("--h-max", type=int, default=4)
    p.add_argument("--epsilon", type=float, default=0.01)
    common(p, "runs/weyl")
    p.set_defaults(func=cmd_weyl)

    def spectrum_flags(p: argparse.ArgumentParser):
        p.add_argument("--beta", required=True,
                       help="comma list of phase coefficients (turns per n^j) "
                            "for degrees 1..p; each entry a beta spec")
        p.add_argument("--hbar", type=float, default=1.0)
        p.add_argument("--period", default="1",
                       help="kick period T as an exact fraction")
        p.add_argument("--rank", type=int, default=1,
                       help="number of kick states (0 = no kick)")
        p.add_argument("--gamma", type=float, default=0.75)
        p.add_argument("--lambdas", default="1.0",
                       help="comma list of kick strengths, one per rank")
        p.add_argument("--dim", type=int, default=64)
        p.add_argument("--kick-state", default="power",
                       choices=("power", "uniform"),
                       help="rank-1 state family: shifted power law or "
                            "equal amplitudes")

    p = sub.add_parser("spectrum",
                       help="eigenphases and spectral weights of the kicked operator")
    spectrum_flags(p)
    p.add_argument("--convention", default="additive_r_k",
                   choices=("additive_r_k", "exponential_product"))
    common(p, "runs/spectrum")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("scount",
                       help="interval and S(x) counting sweeps with growth labels")
    p.add_argument("--j", type=int, default=1)
    p.add_argument("--beta", required=True)
    p.add_argument("--gamma", type=float, default=0.75)
    p.add_argument("--gamma-grid", default=None,
                   help="comma list of exponents (overrides --gamma)")
    p.add_argument("--x-grid", default=None,
                   help="comma list of x values in radians")
    p.add_argument("--x-count", type=int, default=5,
                   help="number of default pole-avoiding x values")
    p.add_argument("--n-grid", default="1e3:1e5:3")
    p.add_argument("--variant", default="combescure",
                   choices=("combescure", "bourget"))
    p.add_argument("--eta", type=float, default=None,
                   help="irrationality type for the window annotation "
                        "(default: estimated from beta)")
    common(p, "runs/scount")
    p.set_defaults(func=cmd_scount)

    p = sub.add_parser("dynamics",
                       help="survival probability and energy over kicks")
    spectrum_flags(p)
    p.add_argument("--kicks", type=int, default=1000)
    p.add_argument("--state-index", type=int, default=0)
    common(p, "runs/dynamics")
    p.set_defaults(func=cmd_dynamics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return RESOURCE_ERROR
    except ToleranceError as exc:
        print(f"numerical tolerance violated: {exc}", file=sys.stderr)
        return TOLERANCE_ERROR
    except (ValueError, PrecisionError, IntervalRangeError, EnsembleError,
            PoleError, ProvenanceError, TrivialPerturbationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
