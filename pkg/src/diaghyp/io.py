"""CSV artifacts and plotting-script emission."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .solver import RunResult


def fmt(v) -> str:
    return format(float(v), ".17g")


def monitor_columns(m: int):
    return (["t"] + [f"linf_{i}" for i in range(1, m + 1)]
            + [f"l1grad_{i}" for i in range(1, m + 1)]
            + ["entropy_n", "dissipation_d", "cum_dissipation", "gradsum_sup", "mono_min",
               "box_excursion"])


def _write(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_monitors(path, result: RunResult) -> Path:
    path = Path(path)
    m = result.config.system.m
    rows = []
    for r in result.monitors:
        rows.append([fmt(r.t), *map(fmt, r.linf), *map(fmt, r.l1grad), fmt(r.entropy_n),
                     fmt(r.dissipation_d), fmt(r.cum_dissipation), fmt(r.gradsum_sup),
                     fmt(r.mono_min), fmt(r.box_excursion)])
    _write(path, monitor_columns(m), rows)
    return path


def snapshot_indices(records: int, count: int):
    if count <= 1:
        return [records - 1]
    return sorted(set(int(round(v)) for v in np.linspace(0, records - 1, count)))


def write_fields(path, result: RunResult, snapshots: int = 1) -> Path:
    """Rows ``t, x, u_1..u_m`` for ``snapshots`` evenly spaced records (the final state last)."""
    path = Path(path)
    m = result.config.system.m
    x = result.final.grid.nodes
    if result.snapshots is None or snapshots <= 1:
        states = [(result.times[-1], result.final.values)]
    else:
        idx = snapshot_indices(len(result.times), snapshots)
        states = [(result.times[k], result.snapshots[k]) for k in idx]
    rows = []
    for t, vals in states:
        for j, xj in enumerate(x):
            rows.append([fmt(t), fmt(xj), *(fmt(vals[i, j]) for i in range(m))])
    _write(path, ["t", "x"] + [f"u_{i}" for i in range(1, m + 1)], rows)
    return path


def write_table(path, header, rows) -> Path:
    path = Path(path)
    _write(path, header, [[c if isinstance(c, str) else fmt(c) if isinstance(c, float) else c
                           for c in row] for row in rows])
    return path


_FIELDS_SCRIPT = '''"""Plot the profiles stored in {name}."""
import csv
from pathlib import Path

import matplotlib.pyplot as plt

here = Path(__file__).parent
with open(here / "{name}", newline="") as fh:
    rows = list(csv.DictReader(fh))
comps = [c for c in rows[0] if c.startswith("u_")]
fig, ax = plt.subplots()
for t in sorted({{float(r["t"]) for r in rows}}):
    sel = [r for r in rows if float(r["t"]) == t]
    x = [float(r["x"]) for r in sel]
    for c in comps:
        ax.plot(x, [float(r[c]) for r in sel], label=f"{{c}}, t={{t:g}}")
ax.set_xlabel("x")
ax.set_ylabel("u")
ax.legend()
fig.savefig(here / "{stem}.png", dpi=150)
'''

_MONITORS_SCRIPT = '''"""Plot the monitor time series stored in {name}."""
import csv
from pathlib import Path

import matplotlib.pyplot as plt

here = Path(__file__).parent
with open(here / "{name}", newline="") as fh:
    rows = list(csv.DictReader(fh))
t = [float(r["t"]) for r in rows]
cols = [c for c in rows[0] if c != "t"]
fig, axes = plt.subplots(len(cols), 1, sharex=True, figsize=(6, 1.6 * len(cols)))
for ax, c in zip(axes, cols):
    ax.plot(t, [float(r[c]) for r in rows])
    ax.set_ylabel(c, rotation=0, ha="right")
axes[-1].set_xlabel("t")
fig.tight_layout()
fig.savefig(here / "{stem}.png", dpi=150)
'''

_TABLE_SCRIPT = '''"""Plot the columns stored in {name} against the first one."""
import csv
from pathlib import Path

import matplotlib.pyplot as plt

here = Path(__file__).parent
with open(here / "{name}", newline="") as fh:
    rows = list(csv.DictReader(fh))
first, *rest = rows[0].keys()
fig, ax = plt.subplots()
for c in rest:
    try:
        ys = [float(r[c]) for r in rows]
    except ValueError:
        continue
    ax.loglog([float(r[first]) for r in rows], ys, "o-", label=c)
ax.set_xlabel(first)
ax.legend()
fig.savefig(here / "{stem}.png", dpi=150)
'''


def write_plot_script(csv_path) -> Path:
    csv_path = Path(csv_path)
    if not csv_path.is_file():
        raise FileNotFoundError(f"no such CSV file: {csv_path}")
    with open(csv_path, newline="", encoding="utf-8") as fh:
        header = next(csv.reader(fh), [])
    if "x" in header:
        template = _FIELDS_SCRIPT
    elif "entropy_n" in header:
        template = _MONITORS_SCRIPT
    else:
        template = _TABLE_SCRIPT
    out = csv_path.with_name(csv_path.stem + "_plot.py")
    out.write_text(template.format(name=csv_path.name, stem=csv_path.stem), encoding="utf-8")
    return out
