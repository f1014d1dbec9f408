"""Benchmark harness: solve every instance in a directory, optionally in parallel."""
from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from mcut.errors import McutError
from mcut.io import read_instance
from mcut.report import dumps, solve_report


def resolve_workers(requested: int) -> int:
    env = os.environ.get("MCUT_THREADS", "").strip()
    if env:
        try:
            requested = int(env)
        except ValueError:
            pass
    return max(1, requested)


def list_instances(directory) -> list[Path]:
    return sorted(Path(directory).glob("*.mcg"))


def _one(path: str, epsilon: float, lengths: str, oracle: bool) -> tuple[str, str]:
    p = Path(path)
    try:
        inst = read_instance(p)
        if lengths == "auto":
            mode = "given" if inst.has_lengths and inst.graph.m else "lp"
        else:
            mode = lengths
        report = solve_report(inst, epsilon=epsilon, lengths=mode, oracle=oracle)
    except McutError as exc:
        report = {"instance": {"name": p.stem}, "error": f"{type(exc).__name__}: {exc}"}
    return p.stem, dumps(report)


def run_bench(directory, *, parallel: int = 1, epsilon: float = 0.1, lengths: str = "lp",
              oracle: bool = False) -> dict:
    """Per-instance report JSON keyed by instance name, in name order."""
    paths = [str(p) for p in list_instances(directory)]
    workers = resolve_workers(parallel)
    args = [(p, epsilon, lengths, oracle) for p in paths]
    if workers > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(_one, *zip(*args)))
    else:
        done = [_one(*a) for a in args]
    return dict(sorted(done))


def aggregate(reports: dict) -> dict:
    parsed = {name: json.loads(text) for name, text in reports.items()}
    ok = [n for n, r in parsed.items() if r.get("verification", {}).get("ok")]
    errors = [n for n, r in parsed.items() if "error" in r]
    return {
        "count": len(parsed),
        "ok": len(ok),
        "failed": sorted(set(parsed) - set(ok) - set(errors)),
        "errors": sorted(errors),
        "instances": parsed,
    }


def write_reports(reports: dict, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, text in reports.items():
        (out / f"{name}.json").write_text(text)
