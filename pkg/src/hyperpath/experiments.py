"""Monte Carlo sweeps over (alpha, d) with reproducible seeds.

Replica ``r`` of cell ``k`` (cells enumerated alpha-major over the config)
uses ``derive_seed(master_seed, k * replicas + r)``, so no two runs of one
sweep share a seed.  Each finished cell is written to ``cells/`` before the
next one starts; a rerun with the same output directory reuses them.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .analysis import expected_path_count, first_moment, survival_probability
from .edge_sampler import RandomSubgraph, derive_seed, p_from_alpha, parse_seed
from .errors import InvalidParameter
from .hypercube import WORD_DIM_CAP
from .paths import antipodal_pair_connected, classify, count_antipodal_paths, longest_length

TASKS = ("classify", "markov", "counts", "coupling")
CSV_HEADER = ("d", "alpha", "seed", "length", "class", "count", "ms")
SCHEMA = 1
COUNT_DIM_CAP = 24


def thread_count() -> int:
    raw = os.environ.get("HYPERPATH_THREADS")
    if raw:
        n = int(raw)
        if n < 1:
            raise InvalidParameter("HYPERPATH_THREADS must be >= 1")
        return n
    return len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1


@dataclass(frozen=True)
class SweepConfig:
    alphas: tuple[float, ...]
    dims: tuple[int, ...]
    replicas: int
    master_seed: int = 0
    tasks: frozenset[str] = frozenset({"classify"})
    pairs_per_replica: int = 4
    curve_points: int = 20
    timing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "tasks", frozenset(self.tasks))
        object.__setattr__(self, "master_seed", parse_seed(self.master_seed))
        if self.replicas < 1:
            raise InvalidParameter("replicas must be >= 1")
        if not self.alphas or not self.dims:
            raise InvalidParameter("alphas and dims must be non-empty")
        if any(a <= 0 for a in self.alphas):
            raise InvalidParameter("alphas must be positive")
        unknown = self.tasks - set(TASKS)
        if unknown:
            raise InvalidParameter(f"unknown tasks {sorted(unknown)}")
        cap = COUNT_DIM_CAP if "counts" in self.tasks else WORD_DIM_CAP
        if any(not 1 <= d <= min(cap, 30) for d in self.dims):
            raise InvalidParameter(f"dims must lie in [1, {min(cap, 30)}] for these tasks")

    @classmethod
    def from_dict(cls, raw: dict) -> "SweepConfig":
        raw = dict(raw)
        if "tasks" in raw:
            raw["tasks"] = frozenset(raw["tasks"])
        return cls(**raw)

    @classmethod
    def from_file(cls, path) -> "SweepConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        out = asdict(self)
        out["alphas"] = list(self.alphas)
        out["dims"] = list(self.dims)
        out["tasks"] = sorted(self.tasks)
        out["master_seed"] = f"{self.master_seed:#x}"
        return out

    def cells(self):
        for a in self.alphas:
            for d in self.dims:
                yield a, d


@dataclass(frozen=True)
class RunRecord:
    d: int
    alpha: float
    seed: int
    length: int
    classification: str
    antipodal_count: int | None = None
    wall_time: float | None = None
    seed_text: str | None = None
    pairs_connected: int | None = None
    pairs_tested: int = 0

    def csv_row(self) -> list[str]:
        return [
            str(self.d),
            repr(self.alpha),
            self.seed_text or f"{self.seed:#018x}",
            str(self.length),
            self.classification,
            "" if self.antipodal_count is None else str(self.antipodal_count),
            "" if self.wall_time is None else f"{self.wall_time * 1e3:.3f}",
        ]

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "alpha": self.alpha,
            "seed": self.seed_text or str(self.seed),
            "length": self.length,
            "classification": self.classification,
            "antipodal_count": self.antipodal_count,
        }


def run_one(d: int, alpha: float, seed, tasks=("classify",), pairs: int = 0,
            timing: bool = False) -> RunRecord:
    """One replica: ℓ, its class, and (for ``counts``) the antipodal count."""
    seed_text = seed if isinstance(seed, str) else None
    seed = parse_seed(seed)
    t0 = time.perf_counter()
    g = RandomSubgraph.from_alpha(d, alpha, seed)
    length = longest_length(g)
    count = None
    connected = None
    tested = 0
    if "counts" in tasks:
        count = count_antipodal_paths(g)
        if pairs:
            full = (1 << d) - 1
            starts = {derive_seed(seed, k) & full for k in range(pairs)}
            tested = len(starts)
            connected = sum(antipodal_pair_connected(g, u) for u in sorted(starts))
    wall = time.perf_counter() - t0 if timing else None
    return RunRecord(d, alpha, seed, length, classify(length, d), count, wall, seed_text,
                     connected, tested)


def coupled_transition_curve(d: int, seed, p_grid) -> list[tuple[float, int]]:
    """ℓ on one coupled sample at every ``p`` of an ascending grid."""
    grid = [float(p) for p in p_grid]
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise InvalidParameter("p_grid must be ascending")
    base = RandomSubgraph(d, 0.0, parse_seed(seed))
    return [(p, longest_length(base.with_p(p))) for p in grid]


def _se(p: float, n: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / n)


def summarise_cell(records: list[RunRecord], d: int, alpha: float, cfg: SweepConfig,
                   curves: list | None = None) -> dict:
    n = len(records)
    lengths = np.array([r.length for r in records], dtype=np.int64)
    z = survival_probability(alpha) if alpha > 0 else 0.0
    full = float(np.mean(lengths == d))
    dm1 = float(np.mean(lengths == d - 1))
    ge2 = float(np.mean(lengths >= d - 2))
    out = {
        "d": d,
        "alpha": alpha,
        "p": p_from_alpha(alpha, d),
        "n": n,
        "zeta": z,
        "P_full": full,
        "P_d_minus_1": dm1,
        "P_ge_d_minus_2": ge2,
        "P_le_d_minus_3": float(np.mean(lengths <= d - 3)),
        "se_full": _se(full, n),
        "se_d_minus_1": _se(dm1, n),
        "se_ge_d_minus_2": _se(ge2, n),
        "pred_full": z * z,
        "pred_d_minus_1": 2 * z * (1 - z),
        "pred_ge_d_minus_2": z * z + 2 * z * (1 - z),
        "mean_length": float(lengths.mean()),
    }
    if "markov" in cfg.tasks:
        p = p_from_alpha(alpha, d)
        rows = []
        for m in range(d + 1):
            emp = float(np.mean(lengths >= m))
            rows.append({"m": m, "P_ge_m": emp, "se": _se(emp, n),
                         "bound": expected_path_count(d, m, p)})
        out["markov"] = rows
    if "counts" in cfg.tasks:
        counts = [r.antipodal_count for r in records]
        mean = sum(counts) / n
        var = sum((c - mean) ** 2 for c in counts) / max(n - 1, 1)
        tested = sum(r.pairs_tested for r in records)
        conn = sum(r.pairs_connected or 0 for r in records)
        frac = conn / tested if tested else math.nan
        out["counts"] = {
            "mean": mean,
            "var": var,
            "se_mean": math.sqrt(var / n),
            "expected_paths": float(first_moment(d, p_from_alpha(alpha, d))),
            "pairs_tested": tested,
            "pair_connected_fraction": frac,
            "connected_pairs_estimate": frac * 2 ** (d - 1) if tested else math.nan,
            "connected_pairs_pred": z * z * 2 ** (d - 1),
        }
    if curves is not None:
        grid = [p for p, _ in curves[0]] if curves else []
        ls = np.array([[l for _, l in c] for c in curves], dtype=np.int64)
        crossings = []
        for row in ls:
            hit = np.flatnonzero(row >= d - 2)
            if hit.size:
                crossings.append(grid[hit[0]] * d)
        out["coupling"] = {
            "p_grid": grid,
            "mean_length": ls.mean(axis=0).tolist(),
            "monotone_violations": int(np.sum(np.diff(ls, axis=1) < 0)),
            "mean_crossing_alpha": float(np.mean(crossings)) if crossings else math.nan,
        }
    return out


def _records_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(r.csv_row())
    return buf.getvalue()


def _cell_name(d: int, alpha: float) -> str:
    return f"d{d}_a{alpha!r}".replace(".", "p")


def _load_cell(path: Path, d: int, alpha: float, replicas: int):
    """Records and extra fields of a finished cell, or None if incomplete."""
    csv_path, js_path = path.with_suffix(".csv"), path.with_suffix(".json")
    if not (csv_path.exists() and js_path.exists()):
        return None
    extra = json.loads(js_path.read_text())
    with csv_path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER or len(rows) - 1 != replicas:
        return None
    recs = []
    for row, ex in zip(rows[1:], extra["pairs"]):
        recs.append(RunRecord(int(row[0]), float(row[1]), parse_seed(row[2]), int(row[3]), row[4],
                              int(row[5]) if row[5] else None,
                              float(row[6]) / 1e3 if row[6] else None, row[2], ex[0], ex[1]))
    if any(r.d != d or r.alpha != alpha for r in recs):
        return None
    return recs, extra.get("curves")


@dataclass
class SweepResult:
    config: SweepConfig
    records: list[RunRecord] = field(default_factory=list)
    cells: list[dict] = field(default_factory=list)

    def csv_text(self) -> str:
        return _records_csv(self.records)

    def summary(self) -> dict:
        return {"schema": SCHEMA, "config": self.config.to_dict(), "cells": self.cells}


def run_sweep(cfg: SweepConfig, out_dir=None, resume: bool = True, plots: bool = True,
              threads: int | None = None) -> SweepResult:
    """Run every cell; write ``runs.csv``, ``summary.json`` and figures if
    ``out_dir`` is given.  Errors inside a replica end up in the summary's
    ``errors`` list rather than aborting the sweep."""
    out = Path(out_dir) if out_dir is not None else None
    cell_dir = None
    if out is not None:
        cell_dir = out / "cells"
        cell_dir.mkdir(parents=True, exist_ok=True)
    threads = threads or thread_count()
    pairs = cfg.pairs_per_replica if "counts" in cfg.tasks else 0
    result = SweepResult(cfg)
    for k, (alpha, d) in enumerate(cfg.cells()):
        seeds = [derive_seed(cfg.master_seed, k * cfg.replicas + r) for r in range(cfg.replicas)]
        loaded = None
        if cell_dir is not None and resume:
            loaded = _load_cell(cell_dir / _cell_name(d, alpha), d, alpha, cfg.replicas)
        errors = []
        if loaded is not None:
            records, curves = loaded
        else:
            def job(s, alpha=alpha, d=d):
                try:
                    return run_one(d, alpha, f"{s:#018x}", cfg.tasks, pairs, cfg.timing)
                except Exception as exc:  # recorded, not fatal
                    return exc

            if threads > 1:
                with ThreadPoolExecutor(threads) as pool:
                    got = list(pool.map(job, seeds))
            else:
                got = [job(s) for s in seeds]
            records = []
            for s, r in zip(seeds, got):
                if isinstance(r, Exception):
                    errors.append({"seed": f"{s:#018x}", "error": f"{type(r).__name__}: {r}"})
                else:
                    records.append(r)
            curves = None
            if "coupling" in cfg.tasks:
                grid = np.linspace(0.0, min(1.0, 2 * math.e / d), cfg.curve_points).tolist()
                curves = [coupled_transition_curve(d, s, grid) for s in seeds]
            if cell_dir is not None and not errors:
                base = cell_dir / _cell_name(d, alpha)
                base.with_suffix(".csv").write_text(_records_csv(records))
                base.with_suffix(".json").write_text(json.dumps(
                    {"pairs": [[r.pairs_connected, r.pairs_tested] for r in records],
                     "curves": curves}))
        result.records.extend(records)
        if records:
            cell = summarise_cell(records, d, alpha, cfg, curves)
        else:
            cell = {"d": d, "alpha": alpha, "n": 0}
        cell["errors"] = errors
        result.cells.append(cell)

    if out is not None:
        (out / "runs.csv").write_text(result.csv_text())
        (out / "summary.json").write_text(json.dumps(result.summary(), indent=2, sort_keys=True) + "\n")
        if plots:
            from .report import plot_sweep

            plot_sweep(result.cells, out)
    return result
