"""Render figures and tables from greenstream CSV artifacts.

Reads only the documented CSV files (sweep.csv, bitrates.csv); never touches
the engine. A figure spec is a small JSON file:

    {"kind": "budget_curves", "input": "sweep.csv", "output": "fig1.png"}

Kinds: budget_curves (traffic_pct vs budget, one line per group),
bitrate_shift (per-user before/after bitrates) and table (markdown layout
of traffic reduction per K/M combination and offer distribution).
Output bytes are deterministic for identical inputs.
"""
from __future__ import annotations

import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "greenstream"
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

KINDS = ("budget_curves", "bitrate_shift", "table")


class SpecError(ValueError):
    """Bad figure spec; maps to exit code 1."""


@dataclass(frozen=True)
class FigureSpec:
    input: Path
    kind: str
    output: Path
    group_by: tuple = ("k", "m")
    value: str = "traffic_pct"
    x: str = "budget"
    title: str = ""

    def validate(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown figure kind {self.kind!r}")
        if not Path(self.input).exists():
            raise SpecError(f"input file not found: {self.input}")


def load_spec(path) -> FigureSpec:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec parse failure: {exc}") from exc
    known = {"input", "kind", "output", "group_by", "value", "x", "title"}
    bad = set(raw) - known
    if bad:
        raise SpecError(f"unknown spec fields: {sorted(bad)}")
    for key in ("input", "kind", "output"):
        if key not in raw:
            raise SpecError(f"spec is missing {key!r}")
    base = Path(path).parent
    spec = FigureSpec(
        input=base / raw["input"],
        kind=raw["kind"],
        output=base / raw["output"],
        group_by=tuple(raw.get("group_by", ("k", "m"))),
        value=raw.get("value", "traffic_pct"),
        x=raw.get("x", "budget"),
        title=raw.get("title", ""),
    )
    spec.validate()
    return spec


def _read_csv(path) -> list[dict]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise SpecError(f"empty CSV: {path}")
    return rows


def _column(rows: list[dict], name: str) -> np.ndarray:
    if name not in rows[0]:
        raise SpecError(f"missing column {name!r} in CSV header")
    return np.array([float(r[name]) for r in rows])


def _group_means(rows, keys, x_col, value_col):
    """Mean of value_col per (group key, x) over replications."""
    for col in (*keys, x_col, value_col):
        if col not in rows[0]:
            raise SpecError(f"missing column {col!r} in CSV header")
    acc = {}
    for row in rows:
        gkey = tuple(float(row[c]) for c in keys)
        xval = float(row[x_col])
        acc.setdefault(gkey, {}).setdefault(xval, []).append(float(row[value_col]))
    return {
        gkey: sorted((x, float(np.mean(vals))) for x, vals in series.items())
        for gkey, series in sorted(acc.items())
    }


def _save(fig, output: Path):
    output.parent.mkdir(parents=True, exist_ok=True)
    # strip volatile metadata so identical input gives identical bytes
    if output.suffix == ".svg":
        fig.savefig(output, metadata={"Date": None})
    else:
        fig.savefig(output, metadata={"Software": None})
    plt.close(fig)


def render_budget_curves(spec: FigureSpec) -> int:
    rows = _read_csv(spec.input)
    series = _group_means(rows, spec.group_by, spec.x, spec.value)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for gkey, points in series.items():
        xs, ys = zip(*points)
        label = ", ".join(f"{c}={v:g}" for c, v in zip(spec.group_by, gkey))
        baseline = all(v == 0 for v in gkey)
        ax.plot(xs, ys, marker="o", markersize=3,
                linestyle="--" if baseline else "-",
                color="black" if baseline else None, label=label)
    ax.set_xlabel("budget (MU)")
    ax.set_ylabel(spec.value.replace("_", " "))
    ax.set_title(spec.title or Path(spec.input).stem)
    ax.legend(fontsize=6, ncol=2)
    ax.grid(alpha=0.3)
    _save(fig, spec.output)
    return len(series)


def render_bitrate_shift(spec: FigureSpec) -> int:
    rows = _read_csv(spec.input)
    x_h = _column(rows, "x_h")
    x_star = _column(rows, "x_star")
    order = np.lexsort((np.arange(len(x_h)), x_h))
    fig, ax = plt.subplots(figsize=(7, 4.5))
    idx = np.arange(len(x_h))
    ax.scatter(idx, x_h[order], s=4, label="before (x_h)", color="tab:red")
    ax.scatter(idx, x_star[order], s=4, label="after (x*)", color="tab:green")
    ax.set_xlabel("user (sorted by initial bitrate)")
    ax.set_ylabel("bitrate (kbps)")
    ax.set_title(spec.title or "bitrate shift")
    ax.legend()
    ax.grid(alpha=0.3)
    _save(fig, spec.output)
    return int((x_star < x_h).sum())


def render_table(spec: FigureSpec) -> int:
    """Markdown table: one row per K/M combination, one column per offer
    distribution present in the sweep (the no-game row plus every pair with
    both lists non-empty)."""
    rows = _read_csv(spec.input)
    for col in ("k", "m", "mu", "sigma", spec.value):
        if col not in rows[0]:
            raise SpecError(f"missing column {col!r} in CSV header")
    dists = sorted({(float(r["mu"]), float(r["sigma"])) for r in rows})
    combos = sorted({(int(float(r["k"])), int(float(r["m"]))) for r in rows})
    combos = [(k, m) for k, m in combos if (k == 0 and m == 0) or (k > 0 and m > 0)]
    acc = {}
    for r in rows:
        key = (int(float(r["k"])), int(float(r["m"])), float(r["mu"]), float(r["sigma"]))
        acc.setdefault(key, []).append(float(r[spec.value]))
    headers = ["K", "M"] + [f"N({mu:g}, {sg * sg:g})" for mu, sg in dists]
    lines = ["| " + " | ".join(headers) + " |",
             "|" + "|".join("---" for _ in headers) + "|"]
    for k, m in combos:
        cells = [str(k), str(m)]
        for mu, sg in dists:
            vals = acc.get((k, m, mu, sg))
            cells.append(f"{np.mean(vals):.1f}" if vals else "--")
        lines.append("| " + " | ".join(cells) + " |")
    spec.output.parent.mkdir(parents=True, exist_ok=True)
    spec.output.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return len(combos)


def render(spec: FigureSpec) -> int:
    """Render one spec; returns the series/row/switcher count for the kind."""
    spec.validate()
    if spec.kind == "budget_curves":
        return render_budget_curves(spec)
    if spec.kind == "bitrate_shift":
        return render_bitrate_shift(spec)
    return render_table(spec)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if len(argv) != 1 or argv[0] in ("-h", "--help"):
        print("usage: render <spec-file.json>", file=sys.stderr)
        return 1
    try:
        spec = load_spec(argv[0])
        count = render(spec)
    except SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {spec.output} ({spec.kind}, {count} series)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
