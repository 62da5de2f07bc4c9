"""Command-line driver.

Every subcommand prints a short summary and, with ``--json PATH``, writes a
report ``{command, config, results, findings, seed, version, elapsed_ms}``.
Exit status is 0 on success, 1 when a checked property fails, 2 on an
invalid configuration.
"""

import argparse
import csv
import json
import logging
import math
import os
import sys
import tempfile
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .dilation import build_cross_dilation, build_dilation, default_probes, verify_dilation
from .domains import parse_r, sample_quantum_cross, sample_quantum_hyperbola
from .errors import InvalidInputError
from .estimate import (
    CITED_UPPER,
    bound_constant,
    identity_residual,
    identity_sides,
    known_bounds,
    trial_seed,
    verify_estimate,
)
from .laurent import HyperbolaFunction, is_infinite, random_hyperbola_function
from .search import cross_witness, optimize_lower_bound, sweep

log = logging.getLogger("qannulus")

COMMANDS = (
    "verify-dilation",
    "check-estimate",
    "bound",
    "estimate-k",
    "sweep",
    "cross-demo",
    "identity-check",
)
IDENTITY_TOL = 1e-9
CROSS_RATIO_SLACK = 1e-8


@dataclass
class RunConfig:
    command: str
    r: object = 2.0
    r_values: tuple = ()
    dim: int = 4
    deg: int = 12
    trials: int = 100
    grid: int = 4096
    budget: int = 100_000
    restarts: int = 8
    margin: float = 1e-3
    tol: float = 1e-8
    eps: float = 1e-6
    seed: int = 0
    workers: int = 1
    json_path: str = None
    csv_path: str = None

    def validate(self):
        if self.command not in COMMANDS:
            raise InvalidInputError(f"unknown command {self.command!r}")
        self.r = parse_r(self.r)
        self.r_values = tuple(parse_r(v) for v in self.r_values)
        for name in ("dim", "trials", "grid", "budget", "restarts", "workers"):
            if getattr(self, name) < 1:
                raise InvalidInputError(f"{name} must be a positive integer")
        if self.deg < 0:
            raise InvalidInputError("deg must be non-negative")
        if self.grid < 64:
            raise InvalidInputError("grid must be at least 64")
        if not 0 < self.margin < 0.5:
            raise InvalidInputError("margin must lie in (0, 0.5)")
        if not self.tol > 0:
            raise InvalidInputError("tol must be positive")
        if not 0 <= self.eps < 1:
            raise InvalidInputError("eps must lie in [0, 1)")
        return self

    def echo(self):
        out = asdict(self)
        out["r"] = _r_out(self.r)
        out["r_values"] = [_r_out(v) for v in self.r_values]
        return out


def _r_out(r):
    return "inf" if is_infinite(r) else r


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def results_json(report):
    """Canonical serialization of the deterministic part of a report."""
    return json.dumps(_jsonable(report["results"]), sort_keys=True)


# -- commands ---------------------------------------------------------------


def cmd_verify_dilation(cfg):
    probes = default_probes(cfg.seed)
    worst = {}
    findings = []
    for i in range(cfg.trials):
        s = trial_seed(cfg.seed, i)
        if is_infinite(cfg.r):
            mode = "structured" if i % 2 == 0 else "general"
            h = sample_quantum_cross(max(cfg.dim, 2), seed=s, mode=mode)
            d = build_cross_dilation(h)
        else:
            h = sample_quantum_hyperbola(cfg.dim, cfg.r, cfg.margin, seed=s)
            d = build_dilation(h)
        rep = verify_dilation(d, probes, tol=cfg.tol)
        for item, value in rep.residuals.items():
            worst[item] = max(worst.get(item, -math.inf), value)
            if not rep.passed[item]:
                findings.append({"kind": "dilation-property", "trial": i, "seed": s, "item": item, "residual": value})
    results = {"trials": cfg.trials, "worst_residuals": worst, "tol": cfg.tol, "all_passed": not findings}
    print(f"verify-dilation r={_r_out(cfg.r)} dim={cfg.dim} trials={cfg.trials}")
    for item, value in worst.items():
        print(f"  {item:12s} worst residual {value:.3e}")
    print("PASS" if not findings else f"FAIL ({len(findings)} findings)")
    return (0 if not findings else 1), results, findings


def cmd_check_estimate(cfg):
    rep = verify_estimate(cfg.r, cfg.dim, cfg.deg, cfg.trials, cfg.seed, cfg.grid, cfg.workers)
    findings = [dict(kind="bound-violation", **v) for v in rep.violations]
    if rep.max_identity_residual > IDENTITY_TOL:
        findings.append({"kind": "identity-residual", "value": rep.max_identity_residual, "tol": IDENTITY_TOL})
    if is_infinite(cfg.r) and rep.max_ratio > 2.0 + CROSS_RATIO_SLACK:
        findings.append({"kind": "cross-bound", "ratio": rep.max_ratio, "cap": 2.0 + CROSS_RATIO_SLACK})
    results = rep.to_dict()
    print(f"check-estimate r={_r_out(cfg.r)} trials={cfg.trials}")
    print(f"  C_r={rep.C_r:.6f} max_ratio={rep.max_ratio:.6f} max_identity_residual={rep.max_identity_residual:.3e}")
    print("PASS" if not findings else f"FAIL ({len(findings)} findings)")
    return (0 if not findings else 1), results, findings


def cmd_bound(cfg):
    c = bound_constant(cfg.r)
    if is_infinite(cfg.r):
        results = {"C_r": c, "lower": 2.0, "upper": c}
        print("C(r)=2")
        return 0, results, []
    kb = known_bounds(cfg.r)
    tag = "cited" if kb["upper_source"].startswith("cited") else "C(r)"
    note = "C(r) beats 1+sqrt(2)" if cfg.r > kb["crossover_r"] else "1+sqrt(2) beats C(r)"
    print(f"C(r)={c:.6f}, envelope upper={kb['upper']:.6f} ({tag})")
    print(f"  lower={kb['lower']:g}; crossover r*={kb['crossover_r']:.6f}: {note}")
    return 0, kb, []


def cmd_estimate_k(cfg):
    w = optimize_lower_bound(cfg.r, cfg.dim, cfg.deg, cfg.budget, cfg.restarts, cfg.seed,
                             margin=cfg.margin, grid=cfg.grid, workers=cfg.workers)
    findings = w.findings()
    print(f"estimate-k r={_r_out(cfg.r)} best ratio={w.ratio:.12f} (restart {w.meta['restart']}, dim {w.meta['dim']})")
    print("  lower-bound evidence only; not a certificate for K(r)")
    return (0 if not findings else 1), {"witness": w.to_dict()}, findings


def cmd_sweep(cfg):
    r_values = cfg.r_values or (cfg.r,)
    rows = sweep(r_values, cfg.dim, cfg.deg, cfg.budget, cfg.seed, cfg.restarts, cfg.workers)
    findings = []
    table = []
    for row in rows:
        w = row.pop("witness")
        for f in w.findings():
            findings.append(dict(r=row["r"], **f))
        if row["best_ratio"] > min(row["C_r"], CITED_UPPER) * (1 + 1e-3):
            findings.append({"kind": "exceeds-envelope", "r": row["r"], "ratio": row["best_ratio"]})
        table.append(dict(row, dim=cfg.dim, deg=cfg.deg, budget=cfg.budget, seed=cfg.seed))
        print(f"r={row['r']:g} C_r={row['C_r']:.6f} best_ratio={row['best_ratio']:.6f} gap={row['gap']:.6f}")
    if cfg.csv_path:
        header = ["r", "C_r", "best_ratio", "gap", "dim", "deg", "budget", "seed"]
        lines = [",".join(header)] + [",".join(repr(row[k]) if isinstance(row[k], float) else str(row[k]) for k in header) for row in table]
        _atomic_write(cfg.csv_path, "\n".join(lines) + "\n")
    return (0 if not findings else 1), {"rows": table}, findings


def cmd_cross_demo(cfg):
    w = cross_witness(cfg.eps)
    print(f"cross-demo eps={cfg.eps:g}: f=z+w, Z=W=(1-eps)N, ratio={w.ratio:.12g}")
    return 0, {"eps": cfg.eps, "ratio": w.ratio, "expected": 2.0 * (1.0 - cfg.eps)}, []


def _nilpotent_instance():
    from .domains import HyperbolaPair

    N = np.array([[0, 1], [0, 0]], dtype=np.complex128)
    d = build_cross_dilation(HyperbolaPair(N, N, math.inf))
    return d, HyperbolaFunction([1], 0, [1])


def cmd_identity_check(cfg):
    worst = 0.0
    rng_seeds = [trial_seed(cfg.seed, i) for i in range(cfg.trials)]
    for i, s in enumerate(rng_seeds):
        rng = np.random.default_rng(s)
        ps, fs = (int(x) for x in rng.integers(2**31, size=2))
        if is_infinite(cfg.r):
            h = sample_quantum_cross(max(cfg.dim, 2), seed=ps, mode="structured" if i % 2 == 0 else "general")
            d = build_cross_dilation(h)
        else:
            h = sample_quantum_hyperbola(cfg.dim, cfg.r, cfg.margin, seed=ps)
            d = build_dilation(h)
        dp, dm = (int(x) for x in rng.integers(0, cfg.deg + 1, size=2))
        worst = max(worst, identity_residual(random_hyperbola_function(dp, dm, fs), d))
    d, f = _nilpotent_instance()
    lhs, rhs = identity_sides(f, d)
    nil = float(np.linalg.norm(lhs - rhs, 2))
    findings = []
    if worst > IDENTITY_TOL:
        findings.append({"kind": "identity-residual", "value": worst, "tol": IDENTITY_TOL})
    print(f"identity-check r={_r_out(cfg.r)} trials={cfg.trials} max residual={worst:.3e}; nilpotent instance residual={nil:.3e}")
    results = {"trials": cfg.trials, "max_residual": worst, "nilpotent_residual": nil,
               "nilpotent_lhs_top_left": [[[z.real, z.imag] for z in row] for row in lhs[:2, :2]]}
    return (0 if not findings else 1), results, findings


HANDLERS = {
    "verify-dilation": cmd_verify_dilation,
    "check-estimate": cmd_check_estimate,
    "bound": cmd_bound,
    "estimate-k": cmd_estimate_k,
    "sweep": cmd_sweep,
    "cross-demo": cmd_cross_demo,
    "identity-check": cmd_identity_check,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="qannulus", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--r", default="2", help="radius r > 1, 'inf' for the cross; comma list for sweep")
        p.add_argument("--dim", type=int, default=4)
        p.add_argument("--deg", type=int, default=12)
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--grid", type=int, default=4096)
        p.add_argument("--budget", type=int, default=100_000)
        p.add_argument("--restarts", type=int, default=8)
        p.add_argument("--margin", type=float, default=1e-3)
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--eps", type=float, default=1e-6)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--json", dest="json_path", metavar="PATH")
        p.add_argument("--csv", "--out", dest="csv_path", metavar="PATH")
    return parser


def config_from_args(args):
    parts = [p.strip() for p in str(args.r).split(",") if p.strip()]
    if not parts:
        raise InvalidInputError("r must exceed 1 or be inf")
    cfg = RunConfig(
        command=args.command, r=parts[0], r_values=tuple(parts) if len(parts) > 1 else (),
        dim=args.dim, deg=args.deg, trials=args.trials, grid=args.grid, budget=args.budget,
        restarts=args.restarts, margin=args.margin, tol=args.tol, eps=args.eps, seed=args.seed,
        workers=args.workers, json_path=args.json_path, csv_path=args.csv_path,
    )
    return cfg.validate()


def run(cfg):
    """Execute a validated config; returns ``(exit_code, report)``."""
    t0 = time.perf_counter()
    code, results, findings = HANDLERS[cfg.command](cfg)
    report = {
        "command": cfg.command,
        "config": cfg.echo(),
        "results": results,
        "findings": findings,
        "seed": cfg.seed,
        "version": __version__,
        "elapsed_ms": round(1000.0 * (time.perf_counter() - t0), 3),
    }
    report = _jsonable(report)
    if cfg.json_path:
        _atomic_write(cfg.json_path, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return code, report


def main(argv=None):
    level = os.environ.get("QA_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(json.dumps({"command": args.command, "findings": [{"kind": "invalid-config", "message": str(exc)}]}),
              file=sys.stderr)
        return 2
    log.info("running %s with %s", cfg.command, cfg.echo())
    code, _ = run(cfg)
    return code


if __name__ == "__main__":
    sys.exit(main())
