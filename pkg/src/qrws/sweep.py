"""Monte Carlo and grid evaluation of the probability landscape p(phi, zeta).

Datasets are flat sequences of (phi, zeta, m, p) records plus a metadata
block.  Random sweeps draw each (phi, zeta) pair from a counter-based Philox
stream keyed by (seed, record index), so record i is reproducible on its own
and the dataset is bit-identical regardless of evaluation order or degree of
parallelism.  Grid sweeps enumerate phi_i = i 2pi/steps, i = 1..steps (pi is
on-grid for even step counts) in row-major (phi, zeta) order.

Persistence: CSV with header ``phi,zeta,m,p`` at 12 significant digits, plus
a JSON sidecar (same path + ``.meta.json``) carrying the metadata block.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .walk import iteration_count, run_batch

TWO_PI = 2.0 * math.pi


@dataclass
class SweepDataset:
    """Landscape samples: parallel arrays of angles and probabilities."""

    phi: np.ndarray
    zeta: np.ndarray
    m: int
    p: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.phi.size

    def grid_shape(self) -> tuple[int, int]:
        """(phi_steps, zeta_steps) for a grid-mode dataset."""
        if self.meta.get("mode") != "grid":
            raise ValueError("not a grid-mode dataset")
        return self.meta["phi_steps"], self.meta["zeta_steps"]

    def p_grid(self) -> np.ndarray:
        """Probabilities reshaped to (phi_steps, zeta_steps); grid mode only."""
        return self.p.reshape(self.grid_shape())

    def phi_axis(self) -> np.ndarray:
        steps = self.grid_shape()[0]
        return np.arange(1, steps + 1) * TWO_PI / steps

    def zeta_axis(self) -> np.ndarray:
        steps = self.grid_shape()[1]
        return np.arange(1, steps + 1) * TWO_PI / steps


def random_angles(seed: int, index: int) -> tuple[float, float]:
    """The (phi, zeta) pair of record ``index`` in the stream keyed by ``seed``."""
    gen = np.random.Generator(np.random.Philox(key=np.array([seed, index], dtype=np.uint64)))
    phi, zeta = gen.uniform(0.0, TWO_PI, size=2)
    return float(phi), float(zeta)


def sweep_random(
    m: int,
    samples: int,
    seed: int,
    iterations: Optional[int] = None,
) -> SweepDataset:
    """Uniform random sweep over [0, 2pi]^2 with ``samples`` records."""
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    phis = np.empty(samples)
    zetas = np.empty(samples)
    for i in range(samples):
        phis[i], zetas[i] = random_angles(seed, i)
    iters = iterations if iterations is not None else iteration_count(m)
    p = run_batch(m, phis, zetas, iterations=iters)
    meta = {"mode": "random", "seed": int(seed), "samples": int(samples),
            "m": int(m), "iterations": int(iters)}
    return SweepDataset(phis, zetas, m, p, meta)


def sweep_grid(
    m: int,
    phi_steps: int,
    zeta_steps: int,
    iterations: Optional[int] = None,
) -> SweepDataset:
    """Full-grid sweep, records row-major by (phi index, zeta index)."""
    if phi_steps < 2 or zeta_steps < 2:
        raise ValueError("grid steps must be >= 2")
    phi_axis = np.arange(1, phi_steps + 1) * TWO_PI / phi_steps
    zeta_axis = np.arange(1, zeta_steps + 1) * TWO_PI / zeta_steps
    phis, zetas = np.meshgrid(phi_axis, zeta_axis, indexing="ij")
    iters = iterations if iterations is not None else iteration_count(m)
    p = run_batch(m, phis.ravel(), zetas.ravel(), iterations=iters)
    meta = {"mode": "grid", "phi_steps": int(phi_steps), "zeta_steps": int(zeta_steps),
            "m": int(m), "iterations": int(iters)}
    return SweepDataset(phis.ravel(), zetas.ravel(), m, p, meta)


def meta_path(csv_path: Path | str) -> Path:
    return Path(str(csv_path) + ".meta.json")


def save_dataset(dataset: SweepDataset, csv_path: Path | str) -> None:
    """Write the CSV records and the JSON metadata sidecar."""
    csv_path = Path(csv_path)
    with open(csv_path, "w", newline="") as fh:
        fh.write("phi,zeta,m,p\n")
        for phi, zeta, p in zip(dataset.phi, dataset.zeta, dataset.p):
            fh.write(f"{phi:.12g},{zeta:.12g},{dataset.m},{p:.12g}\n")
    with open(meta_path(csv_path), "w") as fh:
        json.dump(dataset.meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_dataset(csv_path: Path | str) -> SweepDataset:
    """Read a dataset written by ``save_dataset``."""
    csv_path = Path(csv_path)
    data = np.loadtxt(csv_path, delimiter=",", skiprows=1, ndmin=2)
    meta = {}
    side = meta_path(csv_path)
    if side.exists():
        meta = json.loads(side.read_text())
    m = int(data[0, 2]) if len(data) else int(meta.get("m", 0))
    return SweepDataset(data[:, 0], data[:, 1], m, data[:, 3], meta)
