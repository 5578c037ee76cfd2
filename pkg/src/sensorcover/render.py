"""Grayscale heatmaps (binary PGM) from an aggregated sweep CSV."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class MissingMetricError(KeyError):
    pass


@dataclass(frozen=True)
class HeatmapSpec:
    metric: str
    scale: str = "unit"  # "unit" maps [0, 1]; "data" maps [min, max] of the metric
    output: Path = Path("heatmap.pgm")
    block: int = 16

    def __post_init__(self):
        if self.scale not in ("unit", "data"):
            raise ValueError(f"scale must be 'unit' or 'data', got {self.scale!r}")
        if self.block < 1:
            raise ValueError("block must be >= 1")


def read_grid(csv_text: str, metric: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(gammas, phis, values)`` with ``values[i, j]`` at ``phis[i]``, ``gammas[j]``."""
    rows = list(csv.DictReader(line for line in csv_text.splitlines() if not line.startswith("#")))
    if not rows:
        raise ValueError("aggregated CSV has no data rows")
    if metric not in rows[0]:
        raise MissingMetricError(f"metric {metric!r} not in CSV header")
    try:
        cells = {(float(r["gamma"]), float(r["phi"])): float(r[metric]) for r in rows}
    except (KeyError, ValueError) as exc:
        raise ValueError(f"malformed aggregated CSV: {exc}") from exc
    gammas = np.array(sorted({g for g, _ in cells}))
    phis = np.array(sorted({f for _, f in cells}))
    values = np.full((len(phis), len(gammas)), np.nan)
    for (g, f), v in cells.items():
        values[np.searchsorted(phis, f), np.searchsorted(gammas, g)] = v
    return gammas, phis, values


def to_gray(values: np.ndarray, scale: str) -> tuple[np.ndarray, float, float]:
    if scale == "unit":
        lo, hi = 0.0, 1.0
    else:
        finite = values[np.isfinite(values)]
        lo, hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    span = hi - lo
    if span > 0:
        scaled = np.clip((values - lo) / span, 0.0, 1.0)
    else:
        scaled = np.zeros_like(values)
    gray = np.where(np.isfinite(scaled), np.rint(scaled * 255), 0).astype(np.uint8)
    return gray, lo, hi


def render_heatmap(csv_text: str, spec: HeatmapSpec) -> dict[str, Path]:
    """Write the PGM, a value-to-gray legend and a gnuplot matrix next to ``spec.output``.

    Gamma increases to the right and phi increases upward; darker means smaller.
    """
    gammas, phis, values = read_grid(csv_text, spec.metric)
    gray, lo, hi = to_gray(values, spec.scale)
    # Row 0 of the image is the top, i.e. the largest phi.
    image = np.kron(gray[::-1], np.ones((spec.block, spec.block), dtype=np.uint8))
    h, w = image.shape

    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(image.tobytes())

    legend = out.with_suffix(".legend.txt")
    with open(legend, "w") as fh:
        fh.write(f"metric {spec.metric}\n")
        fh.write(f"scale {spec.scale}\n")
        fh.write(f"value_at_gray_0 {lo:.6g}\n")
        fh.write(f"value_at_gray_255 {hi:.6g}\n")
        fh.write("gray = round(255 * clip((value - value_at_gray_0) / (value_at_gray_255 - value_at_gray_0), 0, 1))\n")
        fh.write(f"block_pixels {spec.block}\n")
        fh.write("x_axis gamma increasing right\n")
        fh.write("y_axis phi increasing up\n")
        fh.write("gamma,phi,value,gray\n")
        for i, f in enumerate(phis):
            for j, g in enumerate(gammas):
                fh.write(f"{g:.6g},{f:.6g},{values[i, j]:.6g},{gray[i, j]}\n")

    matrix = out.with_suffix(".matrix.txt")
    with open(matrix, "w") as fh:
        fh.write(f"# {spec.metric}; gnuplot: plot '{matrix.name}' nonuniform matrix with image\n")
        fh.write(f"# first row: column count then gamma values; each row: phi then values\n")
        fh.write(" ".join([str(len(gammas))] + [f"{g:.6g}" for g in gammas]) + "\n")
        for i, f in enumerate(phis):
            cells = ["nan" if math.isnan(v) else f"{v:.6g}" for v in values[i]]
            fh.write(" ".join([f"{f:.6g}"] + cells) + "\n")
    return {"image": out, "legend": legend, "matrix": matrix}


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM")
    w, h = int(parts[1]), int(parts[2])
    return np.frombuffer(parts[4][: w * h], dtype=np.uint8).reshape(h, w)
