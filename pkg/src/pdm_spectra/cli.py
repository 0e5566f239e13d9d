"""Command-line front end.

Subcommands:

* orderings: list the built-in kinetic-ordering presets with their
  profile exponents.
* map: tabulate the change of variables and potentials as CSV.
* solve: eigenvalues of the flat-picture and/or mass-picture operator,
  written as JSON.
* verify: run one or all of the consistency checks; exit 1 on failure.
* sweep: matched-level error against a grid refinement, as CSV.
* defaults: print the full default configuration.

Exit codes: 0 success, 1 a verification check failed, 2 bad usage,
bad config, or a model/numerics error.  Output files are written
atomically; reruns with the same inputs produce identical bytes.
PDM_SPECTRA_THREADS caps the worker threads used by `verify --which all`.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .config import (
    DEFAULTS,
    RunConfig,
    build_intertwine_spec,
    build_spec,
    config_from_dict,
    load_config,
)
from .errors import ConfigError, PdmSpectraError, UnsupportedGeneratorError
from .eigen import eig
from .mapping import potential_decomposition, target_potential
from .model import ORDERING_PRESETS, delta_of
from .operators import (
    build_reference_matrix,
    build_target_matrix,
    matched_domains,
    uniform_grid,
)
from .verify import (
    VerificationReport,
    atomic_write_text,
    check_analytic,
    check_identities,
    check_intertwining,
    convergence_sweep,
    eigensolver_validation,
    isospectral_sweep,
)
from .errors import BetaMinusOneError

_CHECK_ORDER = ("isospectral", "intertwining", "analytic", "identities", "solver")


def _thread_cap() -> int | None:
    raw = os.environ.get("PDM_SPECTRA_THREADS")
    if raw is None:
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"PDM_SPECTRA_THREADS must be a positive integer, got {raw!r}")
    if value < 1:
        raise ConfigError(f"PDM_SPECTRA_THREADS must be a positive integer, got {raw!r}")
    return value


def _load(args) -> RunConfig:
    if getattr(args, "config", None):
        return load_config(args.config)
    return config_from_dict({})


def _emit(text: str, out: str | None) -> None:
    if out:
        atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def _fmt(value: float) -> str:
    return "%.17g" % value


def cmd_orderings(args) -> int:
    rows = []
    for name, ordering in ORDERING_PRESETS.items():
        try:
            delta = str(delta_of(ordering))
        except BetaMinusOneError:
            delta = "undefined"
        rows.append((name, str(ordering.alpha), str(ordering.beta), str(ordering.gamma), delta))
    if args.json:
        payload = [
            {"name": n, "alpha": a, "beta": b, "gamma": g, "delta": d}
            for n, a, b, g, d in rows
        ]
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
        return 0
    widths = [max(len(r[i]) for r in rows + [("name", "alpha", "beta", "gamma", "delta")])
              for i in range(5)]
    header = ("name", "alpha", "beta", "gamma", "delta")
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    for row in rows:
        lines.append("  ".join(v.ljust(w) for v, w in zip(row, widths)))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_map(args) -> int:
    cfg = _load(args)
    spec = build_spec(cfg)
    qa, qb = spec.q_interval
    grid_q = uniform_grid(qa, qb, args.n or cfg.n, coordinate="q")
    q = grid_q.nodes
    x = np.broadcast_to(np.asarray(spec.profile.x_from_q(q), float), q.shape)
    mu = np.broadcast_to(np.asarray(spec.profile.eval(x).mu, float), q.shape)
    veff = target_potential(spec, x)
    dec = potential_decomposition(spec, x)
    vtilde = np.broadcast_to(np.asarray(dec.vtilde, float), q.shape)
    w = np.broadcast_to(np.asarray(dec.w, float), q.shape)
    v = np.broadcast_to(np.asarray(dec.v, float), q.shape)
    lines = ["q,x,mu,veff_re,veff_im,vtilde,w,v"]
    for i in range(q.size):
        lines.append(",".join(_fmt(val) for val in (
            q[i], x[i], mu[i], veff[i].real, veff[i].imag, vtilde[i], w[i], v[i],
        )))
    _emit("\n".join(lines) + "\n", args.out or cfg.out)
    return 0


def _solve_payload(spec, picture: str, n: int) -> dict:
    if picture == "reference":
        qa, qb = spec.q_interval
        grid = uniform_grid(qa, qb, n, coordinate="q")
        matrix = build_reference_matrix(spec, grid)
    else:
        grid, _ = matched_domains(spec, n)
        matrix = build_target_matrix(spec, grid)
    spectrum = eig(matrix)
    return {
        "picture": picture,
        "n": n,
        "grid": {"kind": grid.kind, "a": grid.a, "b": grid.b},
        "eigenvalues": [
            {"re": float(v.real), "im": float(v.imag)} for v in spectrum.eigenvalues
        ],
        "matrix_norm": spectrum.matrix_norm,
        "trace_error": spectrum.trace_error,
    }


def cmd_solve(args) -> int:
    cfg = _load(args)
    spec = build_spec(cfg)
    n = args.n or cfg.n
    if args.picture == "both":
        payload = {
            "picture": "both",
            "reference": _solve_payload(spec, "reference", n),
            "target": _solve_payload(spec, "target", n),
        }
    else:
        payload = _solve_payload(spec, args.picture, n)
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out or cfg.out)
    return 0


def _run_check(name: str, cfg: RunConfig, seed: int) -> VerificationReport:
    tol = cfg.tolerances
    if name == "isospectral":
        return isospectral_sweep(
            build_spec(cfg), cfg.n_sweep, cfg.k_levels,
            tol=tol["isospectral"], min_rate=tol["iso_rate"],
        )
    if name == "intertwining":
        return check_intertwining(
            build_intertwine_spec(cfg), cfg.n_sweep, min_rate=tol["intertwine_rate"],
        )
    if name == "analytic":
        return check_analytic(
            build_spec(cfg), cfg.n, tol=tol["analytic"], im_tol=tol["im"],
        )
    if name == "identities":
        return check_identities(build_spec(cfg), tol=tol["identities"])
    if name == "solver":
        return eigensolver_validation(
            seed=seed, tol=tol["solver"], trace_tol=tol["trace"],
        )
    raise ConfigError(f"unknown check {name!r}")


def _summary_line(report: VerificationReport) -> str:
    bits = []
    for key in ("max_gap", "final_gap", "worst_gap", "rate", "bound_count", "note"):
        if key in report.details and report.details[key] is not None:
            value = report.details[key]
            bits.append(f"{key}={value:.3e}" if isinstance(value, float) else f"{key}={value}")
    verdict = "pass" if report.passed else "FAIL"
    suffix = f" ({', '.join(bits)})" if bits else ""
    return f"{report.check}: {verdict}{suffix}"


def cmd_verify(args) -> int:
    cfg = _load(args)
    seed = args.seed if args.seed is not None else cfg.seed
    if args.which == "all":
        names = list(_CHECK_ORDER)
        cap = _thread_cap() or len(names)

        def run(name: str) -> VerificationReport:
            try:
                return _run_check(name, cfg, seed)
            except UnsupportedGeneratorError as exc:
                return VerificationReport(
                    check=name, passed=True,
                    details={"note": f"skipped: {exc}"},
                )

        with ThreadPoolExecutor(max_workers=min(cap, len(names))) as pool:
            reports = list(pool.map(run, names))
        combined = VerificationReport(
            check="all",
            passed=all(r.passed for r in reports),
            details={"reports": [r.to_dict() for r in reports]},
        )
        for report in reports:
            print(_summary_line(report))
        if args.out or cfg.out:
            combined.save(args.out or cfg.out)
        return 0 if combined.passed else 1

    report = _run_check(args.which, cfg, seed)
    print(_summary_line(report))
    if args.out or cfg.out:
        report.save(args.out or cfg.out)
    return 0 if report.passed else 1


def cmd_sweep(args) -> int:
    cfg = _load(args)
    spec = build_spec(cfg)
    result = convergence_sweep(
        spec, cfg.n_sweep, picture=args.picture, oracle=cfg.oracle_level,
    )
    lines = ["n,h,error"]
    for n, h, err in zip(result["n"], result["h"], result["error"]):
        lines.append(f"{n},{_fmt(h)},{_fmt(err)}")
    _emit("\n".join(lines) + "\n", args.out or cfg.out)
    print(f"rate {result['rate']:.3f}", file=sys.stderr)
    return 0


def cmd_defaults(args) -> int:
    _emit(json.dumps(DEFAULTS, indent=2, sort_keys=True) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdm-spectra",
        description="Spectra of complexified position-dependent-mass Hamiltonians.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orderings", help="list kinetic-ordering presets")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--out", help="write to a file instead of stdout")
    p.set_defaults(func=cmd_orderings)

    p = sub.add_parser("map", help="tabulate the change of variables and potentials")
    p.add_argument("--config", help="JSON run config")
    p.add_argument("--n", type=int, help="override the number of sample points")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("solve", help="eigenvalues of the discretized operators")
    p.add_argument("--config", help="JSON run config")
    p.add_argument("--picture", choices=("reference", "target", "both"),
                   default="reference")
    p.add_argument("--n", type=int, help="override the grid size")
    p.add_argument("--out", help="JSON output path (default stdout)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="run consistency checks")
    p.add_argument("--config", help="JSON run config")
    p.add_argument("--which", choices=_CHECK_ORDER + ("all",), default="all")
    p.add_argument("--seed", type=int, help="override the RNG seed for the solver check")
    p.add_argument("--out", help="JSON report path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="error against a ladder over a grid refinement")
    p.add_argument("--config", help="JSON run config")
    p.add_argument("--picture", choices=("reference", "target"), default="reference")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("defaults", help="print the default configuration")
    p.add_argument("--out", help="write to a file instead of stdout")
    p.set_defaults(func=cmd_defaults)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PdmSpectraError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
