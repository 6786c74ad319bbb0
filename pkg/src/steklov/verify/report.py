"""Suite runner and report writers (CSV per check, JSON manifest, summary)."""
from __future__ import annotations

import csv
import io
import json
import math
import platform
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path

import numpy as np

from .checks import REGISTRY, CheckResult, Context, run_check
from .config import ExperimentConfig

__all__ = ["VerificationReport", "run_suite", "versions", "load_manifest", "format_summary"]


def versions() -> dict:
    out = {"python": platform.python_version()}
    for dist in ("artifact", "numpy", "scipy", "scikit-image", "tomli-w"):
        try:
            out[dist] = metadata.version(dist)
        except metadata.PackageNotFoundError:
            out[dist] = "unknown"
    return out


def _clean(x):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    return x


@dataclass
class VerificationReport:
    config: ExperimentConfig
    results: dict = field(default_factory=dict)  # check id -> CheckResult

    @property
    def config_hash(self) -> str:
        return self.config.config_hash()

    def statuses(self) -> dict:
        return {cid: r.status for cid, r in self.results.items()}

    def registry_complete(self) -> bool:
        return sorted(self.results) == sorted(REGISTRY)

    # ------------------------------------------------------------------
    def csv_text(self, res: CheckResult) -> str:
        buf = io.StringIO(newline="")
        buf.write(f"# check={res.check_id} config_hash={self.config_hash}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([res.x_label, "measured", "predicted", "series"])
        for x, y, q, s in res.rows:
            w.writerow([repr(float(x)), repr(float(y)), "" if q is None else repr(float(q)), s])
        return buf.getvalue()

    def manifest(self, include_timing: bool = True) -> dict:
        checks = []
        for cid in sorted(self.results):
            r = self.results[cid]
            rec = {
                "id": cid,
                "title": r.title,
                "claim": r.claim,
                "status": r.status,
                "measured": _clean(r.measured),
                "tolerances": _clean(r.tolerances),
                "notes": r.notes,
            }
            if include_timing:
                rec["runtime_s"] = round(r.runtime, 3)
            checks.append(rec)
        return {
            "config_hash": self.config_hash,
            "config": _clean(self.config.to_dict()),
            "versions": versions(),
            "registry_complete": self.registry_complete(),
            "checks": checks,
        }

    def write(self, out_dir) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for cid, r in self.results.items():
            (out / f"{cid}.csv").write_text(self.csv_text(r), encoding="utf-8", newline="")
        body = json.dumps(self.manifest(), indent=2, sort_keys=True) + "\n"
        (out / "manifest.json").write_text(body, encoding="utf-8", newline="")
        (out / "summary.txt").write_text(format_summary(self.manifest()), encoding="utf-8", newline="")
        return out


def format_summary(manifest: dict) -> str:
    lines = [f"config_hash {manifest['config_hash']}"]
    for rec in manifest["checks"]:
        tag = {"pass": "PASS", "fail": "FAIL", "errored": "ERROR", "skipped": "SKIP"}.get(rec["status"], rec["status"].upper())
        line = f"{rec['id']} {tag:5s} {rec['title']}"
        if rec.get("notes"):
            line += f"  [{rec['notes']}]"
        lines.append(line)
    counts = {}
    for rec in manifest["checks"]:
        counts[rec["status"]] = counts.get(rec["status"], 0) + 1
    lines.append("totals " + ", ".join(f"{k}={v}" for k, v in sorted(counts.items())))
    return "\n".join(lines) + "\n"


def load_manifest(out_dir) -> dict:
    return json.loads((Path(out_dir) / "manifest.json").read_text(encoding="utf-8"))


def run_suite(config: ExperimentConfig, out_dir=None, progress=None) -> VerificationReport:
    """Run every registered check (or ``config.checks``) in registry order.

    Checks whose dimensions do not meet ``config.dim`` are recorded as
    skipped, so every registry id appears exactly once.  Module errors are
    captured per check.
    """
    unknown = set(config.checks) - set(REGISTRY)
    if unknown:
        raise ValueError(f"unknown check id(s): {sorted(unknown)}")
    ctx = Context(config)
    report = VerificationReport(config)
    wanted = set(config.checks) or set(REGISTRY)
    for cid, check in REGISTRY.items():
        if cid not in wanted:
            res = CheckResult(cid, check.title, check.claim, "skipped", notes="not selected")
        elif not set(check.dims) & set(ctx.dims):
            res = CheckResult(cid, check.title, check.claim, "skipped", notes=f"needs dim in {check.dims}")
        else:
            res = run_check(check, ctx)
        report.results[cid] = res
        if progress is not None:
            progress(res)
    if out_dir is not None:
        report.write(out_dir)
    return report
