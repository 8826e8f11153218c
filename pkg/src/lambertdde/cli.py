"""Command-line front end.

Every subcommand reads one JSON model description (``--config``) and writes
plain CSV (``--out`` or standard output).  Diagnostics go to standard error.
Exit status is 0 on success, 2 for a bad configuration and 3 when the
numerics break down (repeated root, non-convergence, blow-up).
"""

import argparse
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import BlowUpError, ConvergenceError, DegenerateRootError, ModelError
from .model import DelaySystem, Piece, Preshape, Zero, input_from_dict
from .oracle import integrate
from .response import ResponseSeries, total_response, truncation_error_curve
from .spectrum import compute_spectrum, stability

__all__ = ["ModelConfig", "SolverSettings", "GridSettings", "load_config", "main"]

EXIT_CONFIG = 2
EXIT_NUMERIC = 3


@dataclass(frozen=True)
class SolverSettings:
    branch_depth: int = 5
    newton_tol: float = 1e-10
    stability_tol: float = 1e-9

    def __post_init__(self):
        if int(self.branch_depth) != self.branch_depth or self.branch_depth < 0:
            raise ModelError("solver.branch_depth must be a non-negative integer")
        if not (self.newton_tol > 0 and self.stability_tol >= 0):
            raise ModelError("solver tolerances must be positive")
        object.__setattr__(self, "branch_depth", int(self.branch_depth))


@dataclass(frozen=True)
class GridSettings:
    t_end: float = 10.0
    points: int = 1001

    def __post_init__(self):
        if not self.t_end > 0:
            raise ModelError("grid.t_end must be positive")
        if int(self.points) != self.points or self.points < 2:
            raise ModelError("grid.points must be an integer >= 2")
        object.__setattr__(self, "points", int(self.points))

    def times(self):
        return np.linspace(0.0, self.t_end, self.points)


@dataclass(frozen=True)
class ModelConfig:
    system: DelaySystem
    preshape: Preshape
    input: object = field(default_factory=Zero)
    solver: SolverSettings = field(default_factory=SolverSettings)
    grid: GridSettings = field(default_factory=GridSettings)
    steps_per_delay: int = 64

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ModelError("config must be a JSON object")
        unknown = set(d) - {"system", "preshape", "input", "solver", "grid", "oracle"}
        if unknown:
            raise ModelError(f"unknown config section(s): {', '.join(sorted(unknown))}")
        try:
            s = d["system"]
            system = DelaySystem(
                float(s["a"]), tuple(s["delay_coeffs"]), float(s["h"]), float(s.get("b", 1.0))
            )
            p = d.get("preshape")
            if p is None:
                preshape = Preshape.zero(system.history_span)
            else:
                pieces = tuple(
                    Piece(float(q["from"]), float(q["to"]), tuple(q["coeffs"])) for q in p["pieces"]
                )
                preshape = Preshape(pieces, float(p["x0"]))
            preshape.check_covers(system)
            m = d.get("oracle", {}).get("steps_per_delay", 64)
            if int(m) != m or m < 4:
                raise ModelError("oracle.steps_per_delay must be an integer >= 4")
            return cls(
                system,
                preshape,
                input_from_dict(d.get("input")),
                SolverSettings(**d.get("solver", {})),
                GridSettings(**d.get("grid", {})),
                int(m),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ModelError):
                raise
            raise ModelError(f"malformed config: {exc!r}") from exc

    def to_dict(self):
        return {
            "system": {
                "a": self.system.a,
                "delay_coeffs": list(self.system.delay_coeffs),
                "h": self.system.h,
                "b": self.system.b,
            },
            "preshape": {
                "pieces": [
                    {"from": p.left, "to": p.right, "coeffs": list(p.coeffs)}
                    for p in self.preshape.pieces
                ],
                "x0": self.preshape.x0,
            },
            "input": self.input.to_dict(),
            "solver": {
                "branch_depth": self.solver.branch_depth,
                "newton_tol": self.solver.newton_tol,
                "stability_tol": self.solver.stability_tol,
            },
            "grid": {"t_end": self.grid.t_end, "points": self.grid.points},
            "oracle": {"steps_per_delay": self.steps_per_delay},
        }


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ModelError(f"cannot read config {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ModelError(f"config {path} is not valid JSON: {exc}") from exc
    return ModelConfig.from_dict(raw)


def _fmt(x):
    return "%.17g" % (x + 0.0)


def _write_csv(out, header, rows, trailer=()):
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(v if isinstance(v, str) else _fmt(v) for v in row) + "\n")
    for line in trailer:
        out.write(line + "\n")


def _window(text, grid):
    if text is None:
        return 0.0, grid.t_end
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise ModelError(f"--window expects 'a,b', got {text!r}") from exc
    if not a < b:
        raise ModelError("--window needs a < b")
    return a, b


def _depth(cfg, args):
    return cfg.solver.branch_depth if args.branches is None else args.branches


def _spectrum(cfg, args):
    spec = compute_spectrum(
        cfg.system, _depth(cfg, args), cfg.preshape, tol=cfg.solver.newton_tol, threads=args.threads
    )
    for w in spec.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return spec


def _oracle_on(cfg, times):
    traj = integrate(cfg.system, cfg.preshape, cfg.input, cfg.grid.t_end, cfg.steps_per_delay)
    return np.asarray(traj.metadata["dense"](times), dtype=float)


def cmd_roots(cfg, args, out):
    spec = _spectrum(cfg, args)
    counts = ", ".join(f"k={k}: {c}" for k, c in sorted(spec.counts.items()))
    print(f"roots per branch: {counts}", file=sys.stderr)
    rows = [
        (str(r.n), str(r.k), str(r.seed_j), r.S.real, r.S.imag, r.C.real, r.C.imag,
         r.CI.real, r.CI.imag, r.residual)
        for r in spec.roots
    ]
    header = ["n", "k", "seed_j", "Re_S", "Im_S", "Re_C", "Im_C", "Re_CI", "Im_CI", "residual"]
    _write_csv(out, header, rows)


def cmd_stability(cfg, args, out):
    spec = _spectrum(cfg, args)
    verdict = stability(spec, cfg.solver.stability_tol)
    S0 = spec.S0
    out.write(f"{verdict.value} Re(S0)={_fmt(S0.real)} Im(S0)={_fmt(S0.imag)}\n")


def cmd_response(cfg, args, out):
    spec = _spectrum(cfg, args)
    rs = ResponseSeries(spec, cfg.preshape.x0, cfg.preshape, cfg.input, cfg.system.b)
    traj = total_response(rs, cfg.grid.times())
    md = traj.metadata
    rows = zip(traj.times, md["initial"], md["forced"], traj.values)
    _write_csv(out, ["t", "x_initial", "x_forced", "x_total"], rows)


def cmd_compare(cfg, args, out):
    a, b = _window(args.window, cfg.grid)
    spec = _spectrum(cfg, args)
    rs = ResponseSeries(spec, cfg.preshape.x0, cfg.preshape, cfg.input, cfg.system.b)
    times = cfg.grid.times()
    spectral = total_response(rs, times).values
    reference = _oracle_on(cfg, times)
    err = np.abs(spectral - reference)
    inside = (times >= a) & (times <= b)
    sup = float(err[inside].max()) if inside.any() else float("nan")
    summary = f"# sup_abs_err window=[{_fmt(a)},{_fmt(b)}] value={_fmt(sup)}"
    _write_csv(out, ["t", "x_spectral", "x_oracle", "abs_err"],
               zip(times, spectral, reference, err), trailer=[summary])
    print(summary[2:], file=sys.stderr)


def _k_list(text, default_top):
    if text is None:
        return list(range(default_top + 1))
    try:
        ks = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ModelError(f"--k-list expects comma-separated integers, got {text!r}") from exc
    if not ks or min(ks) < 0:
        raise ModelError("--k-list needs non-negative integers")
    return ks


def cmd_error_curve(cfg, args, out):
    a, b = _window(args.window, cfg.grid)
    ks = _k_list(args.k_list, _depth(cfg, args))
    times = cfg.grid.times()
    times = times[(times >= a) & (times <= b)]
    if times.size == 0:
        raise ModelError("window contains no grid points")
    reference = _oracle_on(cfg, times)
    curve = truncation_error_curve(
        cfg.system, cfg.preshape, cfg.input, ks, times, reference, threads=args.threads
    )
    _write_csv(out, ["K", "sup_error"], ((str(k), e) for k, e in curve))


COMMANDS = {
    "roots": cmd_roots,
    "stability": cmd_stability,
    "response": cmd_response,
    "compare": cmd_compare,
    "error-curve": cmd_error_curve,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lambertdde",
        description="Spectral solution of scalar delay systems via the Lambert W function.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON model description")
        p.add_argument("--out", help="output file (default: standard output)")
        p.add_argument("--branches", type=int, help="branch depth K (overrides solver.branch_depth)")
        p.add_argument("--threads", type=int, default=1, help="worker threads for the root search")
        p.add_argument("--window", help="time window 'a,b' for error summaries")
        p.add_argument("--dump-config", action="store_true",
                       help="print the normalised configuration and exit")
        if name == "error-curve":
            p.add_argument("--k-list", help="comma-separated branch depths (default 0..K)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.threads < 1:
            raise ModelError("--threads must be >= 1")
        if args.branches is not None and args.branches < 0:
            raise ModelError("--branches must be >= 0")
        cfg = load_config(args.config)
        out = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
        try:
            if args.dump_config:
                json.dump(cfg.to_dict(), out, indent=2)
                out.write("\n")
            else:
                COMMANDS[args.command](cfg, args, out)
        finally:
            if args.out:
                out.close()
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DegenerateRootError, ConvergenceError, BlowUpError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
