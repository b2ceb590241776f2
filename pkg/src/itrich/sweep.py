"""Noise-augmentation sweeps: recall/specificity over a grid of noise sizes
and gap fractions, with per-run rows that make the sweep resumable.

A sweep spec is a flat ``key = value`` file; ``#`` starts a comment and lists
are comma separated::

    bases = lfr_small.txt, toy:paper-4blocks
    noise = 0, 100, 200
    r = 0, 0.5, 1
    repeats = 5
    replicates = 20
    threshold = er
    er_replicates = 5
    seed = 1
    swaps_per_edge = 10
    mu = 0.1            # any other key is kept as metadata

Relative base paths resolve against the spec file's directory.
"""
from __future__ import annotations

import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .decompose import ThresholdPolicy, run_itrich
from .evaluation import score
from .generators import NoiseSpec, ToySpec, augment_with_noise, generate_toy
from .graph import Graph, load_edge_list
from .seeding import derive_seed
from .weights import compute_weighted_graph

log = logging.getLogger(__name__)

RUN_FIELDS = ["base", "noise", "r", "repeat", "seed", "recall", "specificity", "clubs",
              "dense_size", "added_links", "initial_gap"]
SUMMARY_FIELDS = ["base", "noise", "r", "runs", "recall_mean", "recall_std",
                  "specificity_mean", "specificity_std"]

_KNOWN = {"bases", "noise", "r", "repeats", "replicates", "threshold", "er_replicates", "seed",
          "swaps_per_edge"}


@dataclass(frozen=True)
class SweepSpec:
    bases: tuple[str, ...]
    noise: tuple[int, ...]
    r: tuple[float, ...]
    repeats: int = 1
    replicates: int = 50
    threshold: str = "er"
    er_replicates: int = 10
    seed: int = 0
    swaps_per_edge: int = 10
    metadata: dict = field(default_factory=dict)
    root: Path = Path(".")

    def cells(self):
        for base in self.bases:
            for k in self.noise:
                for r in self.r:
                    yield base, k, r


def _list(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def parse_sweep_spec(path: str | Path) -> SweepSpec:
    path = Path(path)
    raw: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        raw[key.strip().lower()] = value.strip()
    return SweepSpec(
        bases=tuple(_list(raw.get("bases", ""))),
        noise=tuple(int(x) for x in _list(raw.get("noise", ""))),
        r=tuple(float(x) for x in _list(raw.get("r", ""))),
        repeats=int(raw.get("repeats", 1)),
        replicates=int(raw.get("replicates", 50)),
        threshold=raw.get("threshold", "er"),
        er_replicates=int(raw.get("er_replicates", 10)),
        seed=int(raw.get("seed", 0)),
        swaps_per_edge=int(raw.get("swaps_per_edge", 10)),
        metadata={k: v for k, v in raw.items() if k not in _KNOWN},
        root=path.parent,
    )


def load_base(name: str, root: Path = Path(".")) -> Graph:
    if name.startswith("toy:"):
        preset = name[4:]
        if preset != "paper-4blocks":
            raise ValueError(f"unknown toy preset {preset!r}")
        return generate_toy(ToySpec.paper(0))[0]
    path = Path(name)
    if not path.is_absolute():
        path = root / path
    if not path.exists():
        raise FileNotFoundError(f"sweep base network not found: {path}")
    return load_edge_list(path)


def run_cell(base: Graph, base_name: str, noise: int, r: float, repeat: int,
             spec: SweepSpec) -> dict:
    seed = derive_seed(spec.seed, "sweep", base_name, noise, int(round(r * 1000)), repeat)
    aug = augment_with_noise(NoiseSpec(base, noise, r, seed))
    wg = compute_weighted_graph(aug.graph)
    policy = ThresholdPolicy.parse(spec.threshold, spec.er_replicates)
    dec = run_itrich(wg, policy, spec.replicates, derive_seed(seed, "itrich"),
                     derive_seed(seed, "ties"), spec.swaps_per_edge)
    truth = np.array(aug.truth)
    sc = score(np.flatnonzero(truth == "D"), np.flatnonzero(truth == "ND"), dec)
    return {"base": base_name, "noise": noise, "r": r, "repeat": repeat, "seed": seed,
            "recall": sc.recall, "specificity": sc.specificity, "clubs": len(dec.clubs),
            "dense_size": len(dec.dense_part), "added_links": aug.added_links,
            "initial_gap": aug.initial_gap}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _key(row: dict) -> tuple:
    return (str(row["base"]), int(row["noise"]), float(row["r"]), int(row["repeat"]))


def read_runs(path: Path) -> list[dict]:
    if not path.exists():
        return []
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_runs(rows: list[dict], path: Path) -> None:
    rows = sorted(rows, key=_key)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(RUN_FIELDS)
        for row in rows:
            out.writerow([_fmt(row[f]) if not isinstance(row[f], str) else row[f]
                          for f in RUN_FIELDS])


def aggregate(rows: list[dict]) -> list[dict]:
    """Mean and population std of recall/specificity per (base, noise, r)."""
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault(_key(row)[:3], []).append(row)
    out = []
    for (base, noise, r), members in sorted(groups.items()):
        entry = {"base": base, "noise": noise, "r": r, "runs": len(members)}
        for metric in ("recall", "specificity"):
            xs = [float(m[metric]) for m in members if m[metric] not in ("", None)]
            entry[f"{metric}_mean"] = float(np.mean(xs)) if xs else None
            entry[f"{metric}_std"] = float(np.std(xs)) if xs else None
        out.append(entry)
    return out


def write_summary(summary: list[dict], path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh)
        out.writerow(SUMMARY_FIELDS)
        for row in summary:
            out.writerow([_fmt(row[f]) for f in SUMMARY_FIELDS])


def _job(args):
    base_name, noise, r, repeat, spec = args
    base = load_base(base_name, spec.root)
    return run_cell(base, base_name, noise, r, repeat, spec)


def run_sweep(spec: SweepSpec, out_dir: str | Path, jobs: int = 1) -> list[dict]:
    """Run every missing (base, noise, r, repeat) and write runs.csv / summary.csv."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    runs_path = out_dir / "runs.csv"
    rows = read_runs(runs_path)
    done = {_key(r) for r in rows}
    for base in spec.bases:
        load_base(base, spec.root)  # fail early on missing inputs
    pending = [(b, k, r, i, spec) for b, k, r in spec.cells() for i in range(spec.repeats)
               if (b, k, float(r), i) not in done]
    log.info("sweep: %d runs done, %d pending", len(done), len(pending))
    if jobs > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for row in pool.map(_job, pending):
                rows.append(row)
                write_runs(rows, runs_path)
    else:
        for job in pending:
            rows.append(_job(job))
            write_runs(rows, runs_path)
    write_runs(rows, runs_path)
    rows = read_runs(runs_path)
    summary = aggregate(rows)
    write_summary(summary, out_dir / "summary.csv")
    return summary


__all__ = ["SweepSpec", "aggregate", "parse_sweep_spec", "run_sweep", "run_cell"]
