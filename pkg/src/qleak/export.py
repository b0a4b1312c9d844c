"""CSV and manifest writers for sweep and SNR-grid results."""
from __future__ import annotations

import csv
import json
import math
import os
from datetime import datetime, timezone
from typing import Iterable, Sequence

from .experiment import SnrGridResult, SweepResult

SWEEP_COLUMNS = (
    "reset_kind", "otp", "victim_axis", "attacker_axis", "alpha_rad",
    "experiment_index", "n_shots", "p_minus_empirical", "p_minus_analytic",
)
GRID_COLUMNS = (
    "reset_kind", "param1_name", "param1_value", "param2_name", "param2_value",
    "otp", "attacker_axis", "snr_empirical", "snr_theoretical", "valid",
)


def fmt(x) -> str:
    """Shortest text that parses back to the same float (repr round-trips)."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def sweep_rows(sweeps: Iterable[SweepResult]) -> list[tuple]:
    rows = []
    for sw in sweeps:
        t = sw.template
        for i, alpha in enumerate(sw.alphas):
            for e in range(sw.n_experiments):
                rows.append((
                    t.reset.kind, t.otp.kind, t.victim_axis, t.attacker_axis, float(alpha),
                    e, t.n_shots, float(sw.p_minus_empirical[i, e]), float(sw.p_minus_analytic[i]),
                ))
    return rows


def grid_rows(grid: SnrGridResult) -> list[tuple]:
    return [
        (grid.reset_kind, grid.param1_name, c.param1_value, grid.param2_name or "", c.param2_value,
         c.otp, c.attacker_axis, c.snr_empirical, c.snr_theoretical, c.valid)
        for c in grid.cells
    ]


def write_csv(path, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([v if isinstance(v, str) else fmt(v) for v in row])


def read_csv(path) -> list[dict[str, str]]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


def write_manifest(path, *, command: str, config: dict, version: str, master_seed: int,
                   started_at: str, finished_at: str, outputs: Sequence[str], threads: int) -> None:
    manifest = {
        "command": command,
        "version": version,
        "master_seed": master_seed,
        "threads": threads,
        "started_at": started_at,
        "finished_at": finished_at,
        "outputs": [os.path.basename(p) for p in outputs],
        "config": _json_safe(config),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=False)
        fh.write("\n")
