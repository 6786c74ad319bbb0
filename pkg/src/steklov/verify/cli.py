"""Command line interface: ``steklov-verify`` / ``python3 -m steklov.verify``.

Subcommands
-----------
solve    Steklov spectrum of D + V, written to spectrum.csv
norms    L^2 -> L^p norms of unit-width spectral clusters, norms.csv
nodal    nodal measure of one eigenfunction per sampled lambda, nodal.csv
heat     3P constants, Kato modulus and two-sided envelope, heat.csv
verify   run the registered checks; CSV per check, manifest.json, summary.txt
report   print the summary of an existing output directory
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from ..fitting import fit_exponent
from ..harmonics import build_basis
from ..heat import check_3p, heat_kernel_grid, kato_modulus, required_degree, two_sided_bound_report
from ..nodal import extract_nodal_set
from ..operators import exact_norm_2_to_inf, operator_norm_2_to_p, projector_from_vectors
from ..potentials import make_potential
from ..solver import sigma, solve_spectrum
from .checks import geometric_ints
from .config import ConfigError, ExperimentConfig, load_config
from .report import format_summary, load_manifest, run_suite

__all__ = ["main", "build_parser"]


def _float_list(text: str):
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if tok:
            out.append(math.inf if tok.lower() in ("inf", "infinity") else float(tok))
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _common(p: argparse.ArgumentParser):
    p.add_argument("--dim", type=int, choices=(1, 2), help="sphere dimension n")
    p.add_argument("--max-degree", type=int, dest="max_degree", help="truncation degree K")
    p.add_argument("--potential", help="NAME[:PARAMS], e.g. cos-lowfreq or random-lipschitz:seed=1,lip=2")
    p.add_argument("--p", type=_float_list, help="comma list of exponents, inf allowed")
    p.add_argument("--alpha", type=_float_list, help="comma list of fractional orders in (0,2)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--config", help="TOML config file; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="steklov-verify", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in [
        ("solve", "Steklov spectrum of D + V"),
        ("norms", "L2 -> Lp norms of spectral clusters"),
        ("nodal", "nodal measures against lambda"),
        ("heat", "fractional heat kernel diagnostics"),
        ("verify", "run the verification suite"),
        ("report", "print the summary of an output directory"),
    ]:
        sp = sub.add_parser(name, help=text)
        _common(sp)
        if name == "verify":
            sp.add_argument("--checks", help="comma list of check ids (default all)")
    return parser


def resolve_config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    changes = {}
    for key in ("dim", "max_degree", "potential", "seed", "out"):
        val = getattr(args, key, None)
        if val is not None:
            changes[key] = val
    if args.p is not None:
        changes["p"] = tuple(args.p)
    if args.alpha is not None:
        changes["alpha"] = tuple(args.alpha)
    if getattr(args, "checks", None):
        changes["checks"] = tuple(c.strip() for c in args.checks.split(",") if c.strip())
    return cfg.replace(**changes) if changes else cfg


def _write_csv(path: Path, header, rows, cfg: ExperimentConfig):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# config_hash={cfg.config_hash()}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(["" if v is None else (repr(float(v)) if isinstance(v, (float, np.floating)) else v) for v in r])


def _setup(cfg, default_K):
    dim = cfg.dim or 1
    K = cfg.max_degree or default_K
    b = build_basis(dim, K)
    V = make_potential(cfg.potential, b.grid)
    return dim, K, b, V


def cmd_solve(cfg) -> int:
    dim, K, b, V = _setup(cfg, 64 if (cfg.dim or 1) == 1 else 24)
    sp = solve_spectrum(V, b)
    rows = [(i, float(lam), float(r), float(t)) for i, (lam, r, t) in
            enumerate(zip(sp.values, sp.residuals, sp.tail_energy))]
    out = Path(cfg.out)
    _write_csv(out / "spectrum.csv", ["index", "lambda", "residual", "tail_energy"], rows, cfg)
    print(f"dim={dim} K={K} potential={V.name}: {len(sp)} eigenvalues, "
          f"{int(sp.contaminated.sum())} flagged by the truncation tail; wrote {out / 'spectrum.csv'}")
    for lam in sp.values[:8]:
        print(f"  {lam:.10f}")
    return 0


def cmd_norms(cfg) -> int:
    dim, K, b, V = _setup(cfg, 64 if (cfg.dim or 1) == 1 else 32)
    sp = solve_spectrum(V, b)
    hi = min(cfg.fit.lambda_max, K - 4)
    ks = geometric_ints(max(2.0, min(cfg.fit.lambda_min, hi / 4)), hi, per_octave=2)
    rows = []
    for p in cfg.p:
        pts = []
        for k in ks:
            U = sp.cluster_vectors(k)
            if U.shape[1] == 0:
                continue
            P = projector_from_vectors(b, U)
            val = exact_norm_2_to_inf(P) if math.isinf(p) else operator_norm_2_to_p(P, p, seed=cfg.seed).value
            pts.append((k, val))
            rows.append((float(k), val, p))
        if len(pts) >= 4:
            f = fit_exponent(pts)
            print(f"p={p:g}: slope {f.slope:+.4f} (sigma(p) = {sigma(p, dim):.4f}), r^2 {f.r_squared:.4f}")
    _write_csv(Path(cfg.out) / "norms.csv", ["lambda", "measured", "p"], rows, cfg)
    return 0


def cmd_nodal(cfg) -> int:
    dim, K, b, V = _setup(cfg, 64 if (cfg.dim or 1) == 1 else 24)
    sp = solve_spectrum(V, b)
    hi = min(cfg.fit.lambda_max, K - 4)
    pts, rows = [], []
    for k in geometric_ints(max(2.0, min(cfg.fit.lambda_min, hi / 4)), hi, per_octave=3):
        i = int(np.argmin(np.abs(sp.values - k)))
        ns = extract_nodal_set(sp[i], refinement=cfg.nodal.refinement)
        pts.append((sp.values[i], ns.measure))
        rows.append((float(sp.values[i]), float(ns.measure), bool(ns.regularity_flag)))
    if len(pts) >= 4:
        f = fit_exponent(pts)
        print(f"nodal measure slope {f.slope:+.4f} (lower exponent {(3 - dim) / 2:g})")
    _write_csv(Path(cfg.out) / "nodal.csv", ["lambda", "measured", "regular"], rows, cfg)
    return 0


def cmd_heat(cfg) -> int:
    dim = cfg.dim or 1
    rows = []
    times = cfg.heat.times
    for a in cfg.alpha:
        r = check_3p(a, dim, 100_000, seed=cfg.seed)
        print(f"alpha={a:g}: 3P constant {r.constant:.6f} (stable: {r.stable})")
        rows.append(("3P", a, "", r.constant))
    a = 1.0 if 1.0 in cfg.alpha else cfg.alpha[0]
    K = cfg.max_degree or (required_degree(a, min(times)) if dim == 1 else 48)
    b = build_basis(dim, K)
    step = max(1, b.grid.size // 16)
    kg = heat_kernel_grid(None, a, b, [t for t in times if np.exp(-t * K**a) < 1e-14] or [max(times)],
                          rows=np.arange(0, b.grid.size, step)) if dim == 1 else None
    if kg is not None:
        sups, infs = two_sided_bound_report(kg)
        for t in kg.times:
            print(f"t={t:g}: sup p/q {sups[t]:.4f}, inf p/q {infs[t]:.4f}")
            rows.append(("sup_p_over_q", a, t, sups[t]))
            rows.append(("inf_p_over_q", a, t, infs[t]))
    V = make_potential(cfg.potential, build_basis(dim, 16).grid)
    km = kato_modulus(V, a, times, max_points=8)
    for t, c in zip(km.times, km.values):
        rows.append(("kato_modulus", a, t, c))
    print("Kato modulus c(t): " + ", ".join(f"{t:g}:{c:.4g}" for t, c in zip(km.times, km.values)))
    _write_csv(Path(cfg.out) / "heat.csv", ["quantity", "alpha", "t", "measured"], rows, cfg)
    return 0


def cmd_verify(cfg) -> int:
    def progress(res):
        tag = {"pass": "PASS", "fail": "FAIL", "errored": "ERROR", "skipped": "SKIP"}[res.status]
        print(f"{res.check_id} {tag} {res.title} ({res.runtime:.1f}s){'  ' + res.notes if res.notes else ''}", flush=True)

    report = run_suite(cfg, out_dir=cfg.out, progress=progress)
    print(f"wrote {cfg.out}/manifest.json, summary.txt and one CSV per check")
    bad = [cid for cid, s in report.statuses().items() if s in ("fail", "errored")]
    return 1 if bad else 0


def cmd_report(cfg) -> int:
    try:
        man = load_manifest(cfg.out)
    except FileNotFoundError:
        print(f"no manifest.json in {cfg.out}; run `verify` first", file=sys.stderr)
        return 2
    sys.stdout.write(format_summary(man))
    return 0


COMMANDS = {"solve": cmd_solve, "norms": cmd_norms, "nodal": cmd_nodal, "heat": cmd_heat,
            "verify": cmd_verify, "report": cmd_report}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
    except (ConfigError, OSError) as exc:
        parser.error(str(exc))
    try:
        return COMMANDS[args.command](cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
