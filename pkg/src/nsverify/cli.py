"""Command-line front end: ``nsverify <command> ...``.

Exit status is 0 when everything passes, 1 when a verification fails and 2
for usage errors (including unknown flow names).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from nsverify import analysis, flows, quadrature, spectral
from nsverify.exactfield import Coeff, to_json, tp_eval

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Parameters shared by the subcommands.  ``t_final`` defaults to ln2/(3 kappa)."""

    command: str
    flow: str = "paper_solution"
    n: int = 32
    alpha: Optional[float] = None  # None: the flow's own wave number
    kappa: float = 0.05
    rho: float = 1.0
    dt: float = 5e-3
    t_final: Optional[float] = None
    out: Optional[str] = None
    summary: Optional[str] = None
    checkpoint: Optional[str] = None
    fmt: str = "json"
    flow_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 8:
            raise UsageError("--n must be at least 8")
        for name in ("kappa", "rho", "dt"):
            if not getattr(self, name) > 0:
                raise UsageError(f"--{name} must be positive")
        if self.alpha is not None and not self.alpha > 0:
            raise UsageError("--alpha must be positive")
        if self.t_final is None:
            self.t_final = math.log(2) / (3 * self.kappa)
        if self.t_final < 0:
            raise UsageError("--t-final must be nonnegative")

    def make_flow(self) -> flows.FlowSpec:
        if self.flow not in flows.FLOW_NAMES:
            raise UsageError(f"unknown flow {self.flow!r}; choose from {', '.join(flows.FLOW_NAMES)}")
        try:
            return flows.make_flow(self.flow, **self.flow_params)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(str(exc)) from exc


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _write(path: Optional[str], text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(path).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2)


def _flow_params(args) -> dict:
    params = {}
    if getattr(args, "abc", None) is not None:
        params["abc"] = tuple(args.abc)
    if getattr(args, "xi", None) is not None:
        params["xi"] = tuple(args.xi)
    if getattr(args, "v0", None) is not None:
        params["v0"] = args.v0
    return params


def _config(args, **extra) -> RunConfig:
    keys = ("flow", "n", "alpha", "kappa", "rho", "dt", "t_final", "out", "summary", "checkpoint", "fmt")
    kw = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    kw.update(extra)
    return RunConfig(args.command, flow_params=_flow_params(args), **kw)


# ---------------------------------------------------------------------------
# commands


def _param_str(v):
    if isinstance(v, tuple):
        return [_param_str(x) for x in v]
    return v.pretty() if isinstance(v, Coeff) else str(v)


def flow_summary(flow: flows.FlowSpec) -> dict:
    return {
        "name": flow.name,
        "params": {k: _param_str(v) for k, v in flow.params.items()},
        "alpha": flow.alpha_value(),
        "velocity_rate": str(flow.rate),
        "pressure_rate": str(flow.pressure_reference.rate) if flow.pressure_reference else None,
        "velocity_scale": flow.velocity_scale,
    }


def cmd_list(args) -> int:
    if args.export:
        cfg = _config(args, flow=args.export)
        flow = cfg.make_flow()
        body = flow_summary(flow)
        body["profiles"] = [to_json(p) for p in flow.profiles]
        _write(args.out, _dumps(body))
        return EXIT_OK
    catalog = [flow_summary(flows.make_flow(name)) for name in flows.FLOW_NAMES]
    _write(args.out, _dumps(catalog))
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _config(args, flow=args.flow_name)
    flow = cfg.make_flow()
    report = analysis.verify_flow(flow, rho=Fraction(cfg.rho).limit_denominator(10 ** 12),
                                  n=cfg.n, numeric=not args.exact_only)
    _write(cfg.out, report.to_json(indent=2))
    return EXIT_OK if report.passed else EXIT_FAIL


CSV_COLUMNS = ("t", "L2_error", "energy", "helicity", "max_div")


def cmd_evolve(args) -> int:
    cfg = _config(args)
    flow = cfg.make_flow()
    try:
        result = spectral.evolve_flow(flow, n=cfg.n, dt=cfg.dt, T=cfg.t_final, kappa=cfg.kappa,
                                      alpha=cfg.alpha)
    except spectral.InstabilityError as exc:
        print(f"nsverify evolve: {exc}", file=sys.stderr)
        _write(cfg.summary, _dumps({"status": "unstable", "diagnostics": exc.diagnostics}))
        return EXIT_FAIL
    except spectral.CFLError as exc:
        raise UsageError(str(exc)) from exc
    traj = result["trajectory"]

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in zip(traj.times, result["errors"], traj.energy, traj.helicity, traj.max_div):
        writer.writerow([repr(float(x)) for x in row])
    if cfg.out is not None:
        _write(cfg.out, buf.getvalue())

    if cfg.checkpoint:
        spectral.save_checkpoint(cfg.checkpoint, traj.final())
    tol = spectral.TOLERANCES
    ok = result["l2_error"] <= tol.trajectory and result["max_div"] <= tol.divergence
    summary = {
        "status": "pass" if ok else "fail",
        "flow": flow_summary(flow),
        "n": cfg.n, "alpha": traj.final().alpha, "kappa": cfg.kappa, "dt": cfg.dt,
        "t_final": cfg.t_final, "steps": len(traj.times) - 1,
        "L2_error": result["l2_error"],
        "energy_ratio": result["energy_ratio"],
        "expected_energy_ratio": flow.velocity.factor(cfg.t_final, traj.final().alpha, cfg.kappa) ** 2,
        "max_div": result["max_div"],
    }
    _write(cfg.summary, _dumps(summary))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_scan_phases(args) -> int:
    found = analysis.phase_condition_scan(step=args.step)
    body = {
        "unit": "pi",
        "step": str(args.step),
        "candidates": len(analysis.lattice(args.step)),
        "count": len(found),
        "phases": [analysis.phases_to_str(xi) for xi in found],
    }
    status = EXIT_OK
    if args.check:
        failures = [analysis.phases_to_str(xi) for xi in found
                    if not analysis.verify_phases(xi, numeric=False).passed]
        body["verify_failures"] = failures
        status = EXIT_FAIL if failures else EXIT_OK
    _write(args.out, _dumps(body))
    return status


def cmd_quadrature(args) -> int:
    # "--out csv" / "--out json" pick the format and print to stdout
    path, fmt = args.out, args.format
    if path in ("csv", "json"):
        path, fmt = None, path
    elif fmt is None:
        fmt = "json" if path and path.endswith(".json") else "csv"
    try:
        results = quadrature.sweep(rtol=args.rtol)
    except quadrature.QuadratureError as exc:
        print(f"nsverify quadrature: {exc}", file=sys.stderr)
        return EXIT_FAIL
    ok = all(r.rel_error <= args.rtol for r in results)
    rows = [r.to_dict() | {"status": "pass" if r.rel_error <= args.rtol else "fail"} for r in results]
    if fmt == "json":
        _write(path, _dumps({"passed": ok, "rtol": args.rtol, "results": rows}))
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        _write(path, buf.getvalue())
    return EXIT_OK if ok else EXIT_FAIL


def cmd_sample(args) -> int:
    cfg = _config(args, t_final=args.t)
    flow = cfg.make_flow()
    alpha = flow.alpha_value() if cfg.alpha is None else cfg.alpha
    if args.point is not None:
        decay = flow.velocity.factor(args.t, alpha, cfg.kappa) * flow.velocity_scale
        value = [decay * float(tp_eval(p, args.point, alpha)) for p in flow.profiles]
        _write(cfg.out, _dumps({"flow": flow.name, "point": args.point, "t": args.t, "velocity": value}))
        return EXIT_OK
    grid = spectral.grid_sample(flow, cfg.n, args.t, alpha, cfg.kappa)
    fmt = cfg.fmt if cfg.fmt != "json" else "csv"
    if fmt == "checkpoint":
        if not cfg.out or cfg.out == "-":
            raise UsageError("checkpoint output needs --out PATH")
        spectral.save_checkpoint(cfg.out, grid)
        return EXIT_OK
    x = spectral.grid_coords(cfg.n, alpha)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("x1", "x2", "x3", "v1", "v2", "v3"))
    cols = [c.ravel() for c in (*x, *grid.data)]
    for row in zip(*cols):
        writer.writerow([repr(float(c)) for c in row])
    _write(cfg.out, buf.getvalue())
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_flow_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--abc", nargs=3, type=_fraction, metavar=("A", "B", "C"),
                   help="ABC amplitudes (default 1 1 1)")
    p.add_argument("--xi", nargs=3, type=_fraction, metavar=("XI1", "XI2", "XI3"),
                   help="phases of general_xi as multiples of pi, e.g. -1/3 1/3 1/2")
    p.add_argument("--v0", type=_fraction, help="Antuono amplitude (default 1)")


def _add_numeric(p: argparse.ArgumentParser, dt: bool = True) -> None:
    p.add_argument("--n", type=int, help="grid points per direction (default 32)")
    p.add_argument("--alpha", type=float, help="wave number (default: the flow's own)")
    p.add_argument("--kappa", type=float, help="kinematic viscosity (default 0.05)")
    if dt:
        p.add_argument("--dt", type=float, help="time step (default 5e-3)")
        p.add_argument("--t-final", dest="t_final", type=float,
                       help="final time (default ln2/(3 kappa))")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nsverify", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="catalog of flows as JSON")
    p.add_argument("--export", metavar="FLOW", help="print the exact profiles of FLOW")
    _add_flow_params(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("verify", help="run the exact and numeric checks on a flow")
    p.add_argument("flow_name", metavar="FLOW")
    _add_flow_params(p)
    p.add_argument("--rho", type=float, help="density (default 1)")
    p.add_argument("--n", type=int, help="grid for the numeric projection check (default 32)")
    p.add_argument("--exact-only", action="store_true", help="skip the grid check")
    p.add_argument("--out", help="report path (default stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("evolve", help="pseudo-spectral run compared with the closed form")
    p.add_argument("--flow", default="paper_solution")
    _add_flow_params(p)
    _add_numeric(p)
    p.add_argument("--out", help="per-step CSV path")
    p.add_argument("--summary", help="summary JSON path (default stdout)")
    p.add_argument("--checkpoint", help="write the final state to this binary file")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("scan-phases", help="phase lattice scan for the solvability condition")
    p.add_argument("--step", type=_fraction, default=Fraction(1, 6), help="lattice step in units of pi")
    p.add_argument("--check", action="store_true", help="also verify every listed phase triple")
    p.add_argument("--out")
    p.set_defaults(func=cmd_scan_phases)

    p = sub.add_parser("quadrature", help="Gaussian integral identities over a parameter sweep")
    p.add_argument("--sweep", choices=("default",), default="default")
    p.add_argument("--rtol", type=float, default=1e-10)
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--out", help="output path, or just 'csv'/'json' for stdout")
    p.set_defaults(func=cmd_quadrature)

    p = sub.add_parser("sample", help="closed-form velocity on the grid or at a point")
    p.add_argument("--flow", default="paper_solution")
    _add_flow_params(p)
    _add_numeric(p, dt=False)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--point", type=float, nargs=3, metavar=("X1", "X2", "X3"))
    p.add_argument("--format", dest="fmt", choices=("csv", "checkpoint"))
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"nsverify {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
