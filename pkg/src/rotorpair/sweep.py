"""Parameter sweeps: a grid of runs, each in its own directory, with a
manifest written once after every point settles. Point failures are
isolated; siblings keep running."""

from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import RunConfig, SweepSpec, config_with, validate_config
from .exceptions import InvalidConfigError

MANIFEST_NAME = "manifest.json"
DEFAULT_SWEEP_DIR = "sweep_out"


def _axis_value_label(value) -> str:
    if value is None:
        return "none"
    text = json.dumps(value) if not isinstance(value, str) else value
    return "".join(ch if (ch.isalnum() or ch in "._+-") else "_" for ch in text)


def build_points(spec: SweepSpec) -> list[tuple[str, dict, RunConfig]]:
    """Expand the grid into (label, params, config) rows, axis1-major."""
    axes = [spec.axis1] + ([spec.axis2] if spec.axis2 is not None else [])
    combos: list[list[tuple[str, object]]] = [[]]
    for axis in axes:
        combos = [done + [(axis.name, v)] for done in combos for v in axis.values]
    points = []
    for k, combo in enumerate(combos):
        cfg = spec.base
        for name, value in combo:
            cfg = config_with(cfg, name, value)
        label = f"p{k:03d}_" + "__".join(f"{n}={_axis_value_label(v)}" for n, v in combo)
        points.append((label, dict(combo), cfg))
    return points


def worker_count(spec: SweepSpec, n_points: int) -> int:
    if spec.parallelism is not None:
        workers = spec.parallelism
    else:
        env = os.environ.get("SIM_THREADS")
        if env is not None:
            try:
                workers = int(env)
            except ValueError:
                raise InvalidConfigError(f"SIM_THREADS must be an integer, got {env!r}") from None
            if workers < 1:
                raise InvalidConfigError(f"SIM_THREADS must be positive, got {workers}")
        else:
            workers = os.cpu_count() or 1
    return max(1, min(workers, n_points))


def _run_point(label: str, cfg: RunConfig, point_dir: str) -> dict:
    from . import runner  # imported here so worker processes pay the cost, not the parent

    entry = {"label": label, "out_dir": point_dir, "status": "ok", "error": None, "csv": None}
    try:
        validate_config(cfg)
        result = runner.run_config(cfg, point_dir)
        entry["csv"] = str(result.csv_path)
    except Exception as exc:  # a diverging point must not take its siblings down
        entry["status"] = "failed"
        entry["error"] = f"{type(exc).__name__}: {exc}"
        failed_csv = Path(point_dir) / "timeseries.csv"
        if failed_csv.exists():
            entry["csv"] = str(failed_csv)
    return entry


def run_sweep(spec: SweepSpec) -> tuple[Path, list[dict]]:
    """Run every grid point; returns (manifest path, manifest entries)."""
    points = build_points(spec)
    out_root = Path(spec.out_dir or spec.base.output.out_dir or DEFAULT_SWEEP_DIR)
    out_root.mkdir(parents=True, exist_ok=True)
    workers = worker_count(spec, len(points))

    jobs = [(label, cfg, str(out_root / label)) for label, _, cfg in points]
    if workers == 1:
        entries = [_run_point(*job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_point, *job) for job in jobs]
            entries = [f.result() for f in futures]

    for (label, params, _), entry in zip(points, entries):
        entry["params"] = params
    manifest = {
        "points": entries,
        "n_ok": sum(1 for e in entries if e["status"] == "ok"),
        "n_failed": sum(1 for e in entries if e["status"] == "failed"),
    }
    manifest_path = out_root / MANIFEST_NAME
    with open(manifest_path, "w", encoding="utf-8", newline="") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest_path, entries
