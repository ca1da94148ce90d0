"""Scaling sweeps over ring size with ``round(c n^alpha)`` jammers, exponent
fits and CSV / plot output."""
from __future__ import annotations

import csv
import json
import logging
import math
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .model import Partition, Rates, partition_from_placement, to_line_model, to_miniring_model
from .placement import PlacementStrategy, place, system_age
from .sim import RNG_ALGORITHM, SimConfig, simulate

logger = logging.getLogger(__name__)

PLACEMENTS = ("equidistant", "random", "adjacent")
MODELS = ("line", "miniring")
ENGINES = ("analytic", "simulate")


def n_jammers(n: int, alpha: float, c: float = 1.0) -> int:
    """``floor(c n^alpha + 1/2)`` clamped to ``[0, n]``; a 1-node ring has no link to cut."""
    if n <= 1:
        return 0
    return min(n, max(0, math.floor(c * n ** alpha + 0.5)))


@dataclass(frozen=True)
class SweepSpec:
    n_values: tuple[int, ...]
    alpha: float
    c: float = 1.0
    placements: tuple[str, ...] = PLACEMENTS
    models: tuple[str, ...] = MODELS
    engines: tuple[str, ...] = ("analytic",)
    rates_ratio: float = 1.0
    lambda_: float = 1.0
    seed: int = 0
    horizon: float = 2e4
    warmup: float | None = None
    replications: int = 20

    def __post_init__(self):
        ns = tuple(int(v) for v in self.n_values)
        object.__setattr__(self, "n_values", ns)
        for name, allowed in (("placements", PLACEMENTS), ("models", MODELS), ("engines", ENGINES)):
            vals = tuple(getattr(self, name))
            object.__setattr__(self, name, vals)
            bad = set(vals) - set(allowed)
            if bad or not vals:
                raise ValueError(f"{name} must be a non-empty subset of {allowed}, got {vals}")
        if not ns or any(v < 1 for v in ns) or list(ns) != sorted(set(ns)):
            raise ValueError(f"n_values must be non-empty, positive and strictly ascending, got {ns}")
        if not 0 <= self.alpha <= 1:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c}")
        for n in ns:
            if n > 1 and math.floor(self.c * n ** self.alpha + 0.5) > n:
                raise ValueError(f"c n^alpha exceeds n at n={n}")

    def rates(self, n: int) -> Rates:
        return Rates(self.rates_ratio * self.lambda_, self.lambda_, n)


@dataclass(frozen=True)
class ScalingRecord:
    n: int
    n_jammers: int
    alpha: float
    placement: str
    model: str
    engine: str
    system_age: float
    ci_halfwidth: float = float("nan")
    error: str = ""

    def sort_key(self):
        return (self.placement, self.model, self.engine, self.n)


def cell_partition(n: int, m: int, placement: str, model: str, seed: int) -> Partition:
    strategy = PlacementStrategy(placement, seed if placement == "random" else None)
    p = partition_from_placement(place(strategy, n, m), n)
    return to_miniring_model(p) if model == "miniring" else to_line_model(p)


def _cell(spec: SweepSpec, n: int, placement: str, model: str, engine: str) -> ScalingRecord:
    m = n_jammers(n, spec.alpha, spec.c)
    base = dict(n=n, n_jammers=m, alpha=spec.alpha, placement=placement, model=model, engine=engine)
    try:
        rates = spec.rates(n)
        p = cell_partition(n, m, placement, model, spec.seed)
        if engine == "analytic":
            return ScalingRecord(**base, system_age=system_age(p, rates))
        # same seed for every placement of a given n: common random numbers
        res = simulate(SimConfig(rates, p, horizon=spec.horizon, warmup=spec.warmup,
                                 seed=spec.seed + n, replications=spec.replications))
        return ScalingRecord(**base, system_age=res.system_age, ci_halfwidth=res.ci_halfwidth)
    except Exception as exc:  # recorded per cell, the sweep goes on
        logger.warning("cell n=%d %s/%s/%s failed: %s", n, placement, model, engine, exc)
        return ScalingRecord(**base, system_age=float("nan"), error=f"{type(exc).__name__}: {exc}")


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[ScalingRecord]:
    """Evaluate every (n, placement, model, engine) cell; rows come back sorted."""
    cells = [(n, pl, mo, en) for n in spec.n_values for pl in spec.placements
             for mo in spec.models for en in spec.engines]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            futures = [pool.submit(_cell, spec, *cell) for cell in cells]
            records = [f.result() for f in futures]
    else:
        records = [_cell(spec, *cell) for cell in cells]
    return sorted(records, key=ScalingRecord.sort_key)


def fit_exponent(records: Sequence[ScalingRecord] | Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares slope of log(age) against log(n), and its R^2.

    Accepts records of one (placement, model, engine) series or plain
    ``(n, age)`` pairs.
    """
    pts = [(r.n, r.system_age) if isinstance(r, ScalingRecord) else tuple(r) for r in records]
    if isinstance(records[0] if records else None, ScalingRecord):
        series = {(r.placement, r.model, r.engine) for r in records}
        if len(series) > 1:
            raise ValueError(f"records mix several series: {sorted(series)}")
    if len(pts) < 4:
        raise ValueError(f"need at least 4 points to fit an exponent, got {len(pts)}")
    x = np.log(np.array([p[0] for p in pts], dtype=float))
    y = np.log(np.array([p[1] for p in pts], dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), r2


def series(records: Iterable[ScalingRecord], placement: str, model: str, engine: str = "analytic"):
    return [r for r in records if (r.placement, r.model, r.engine) == (placement, model, engine)]


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

CSV_FIELDS = [f.name for f in fields(ScalingRecord)]


def write_csv(records: Iterable[ScalingRecord], path) -> Path:
    path = Path(path)
    rows = sorted(records, key=ScalingRecord.sort_key)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_FIELDS)
            for r in rows:
                w.writerow([_fmt(getattr(r, k)) for k in CSV_FIELDS])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return path


def _fmt(v):
    return repr(v) if isinstance(v, float) else v


def read_csv(path) -> list[ScalingRecord]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.append(ScalingRecord(
                n=int(row["n"]), n_jammers=int(row["n_jammers"]), alpha=float(row["alpha"]),
                placement=row["placement"], model=row["model"], engine=row["engine"],
                system_age=float(row["system_age"]), ci_halfwidth=float(row["ci_halfwidth"]),
                error=row["error"],
            ))
    return out


def plot_records(records: Sequence[ScalingRecord], path, title: str | None = None) -> Path:
    """Age against n, one line per (placement, model, engine) series."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    path = Path(path)
    fig, ax = plt.subplots(figsize=(5, 4))
    keys = sorted({(r.placement, r.model, r.engine) for r in records})
    styles = {"line": "-", "miniring": "--"}
    markers = {"equidistant": "o", "random": "s", "adjacent": "^"}
    for pl, mo, en in keys:
        rows = sorted(series(records, pl, mo, en), key=lambda r: r.n)
        xs = [r.n for r in rows]
        ys = [r.system_age for r in rows]
        label = f"{pl}, {'line' if mo == 'line' else 'mini-ring'}"
        if len(set(en for *_, en in keys)) > 1:
            label += f" ({en})"
        if en == "simulate":
            ax.errorbar(xs, ys, yerr=[r.ci_halfwidth for r in rows], fmt=markers.get(pl, "o"),
                        ls=styles.get(mo, "-"), ms=4, capsize=2, label=label)
        else:
            ax.plot(xs, ys, ls=styles.get(mo, "-"), marker=markers.get(pl, "o"), ms=4, label=label)
    ax.set_xlabel("n")
    ax.set_ylabel("average version age")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=7)
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, metadata={"Date": None} if path.suffix == ".svg" else None)
    plt.close(fig)
    return path


def run_metadata(spec: SweepSpec) -> dict:
    d = asdict(spec)
    d.update({
        "package_version": __version__,
        "numpy_version": np.__version__,
        "python_version": platform.python_version(),
        "rng": RNG_ALGORITHM,
        "jammer_rounding": "floor(c * n**alpha + 0.5), clamped to [0, n]",
    })
    return d


def emit(records: Sequence[ScalingRecord], out_dir, stem: str = "sweep", plot: bool = False,
         spec: SweepSpec | None = None) -> list[Path]:
    """Write ``<stem>.csv`` (and ``<stem>.svg`` / ``<stem>.json`` metadata)."""
    out_dir = Path(out_dir)
    written = [write_csv(records, out_dir / f"{stem}.csv")]
    if spec is not None:
        meta = out_dir / f"{stem}.json"
        meta.write_text(json.dumps(run_metadata(spec), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        written.append(meta)
    if plot and records:
        title = f"alpha = {records[0].alpha:g}"
        # the plot is drawn from the CSV just written
        written.append(plot_records(read_csv(written[0]), out_dir / f"{stem}.svg", title=title))
    return written
