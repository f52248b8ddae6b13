"""Derived quantities: curve profiles, stability widths, ridge fits, and
robustness fields.

* ``curve_profile`` evaluates p(phi) along one zeta(phi) relation.
* ``width`` measures the half-width eps of the phi interval around the
  profile maximum where p stays above a threshold (fraction of the maximum
  or an absolute level).
* ``extract_ridge`` / ``fit_alpha`` recover the optimal sinusoidal-relation
  parameter alpha from a grid sweep: per phi column take the argmax zeta,
  then solve the linear least-squares problem for alpha with residuals
  reduced mod 2pi.
* ``sigma_p_grid`` / ``sigma_p_prime`` / ``ratio_map`` build the
  distance-weighted r.m.s. deviation fields over the (phi, alpha) plane and
  their ratio against the uncontrolled-zeta baseline.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .coins import CurveRelation, wrap_to_pi
from .sweep import SweepDataset
from .walk import iteration_count, run_batch

TWO_PI = 2.0 * math.pi

#: Probabilities below this floor are treated as invalid in the robustness
#: fields (the relative deviation is meaningless on the dead flanks).
P_FLOOR = 1e-12


def phi_grid(steps: int) -> np.ndarray:
    """The canonical phi grid: i * 2pi/steps for i = 1..steps."""
    return np.arange(1, steps + 1) * TWO_PI / steps


@dataclass
class CurveProfile:
    """p(phi) sampled along one relation, with its maximum."""

    m: int
    relation: CurveRelation
    phis: np.ndarray
    ps: np.ndarray

    @property
    def p_max(self) -> float:
        return float(self.ps.max())

    @property
    def phi_max(self) -> float:
        return float(self.phis[int(self.ps.argmax())])


@dataclass
class WidthResult:
    """Half-width of the above-threshold interval around the profile maximum."""

    eps_minus: float
    eps_plus: float
    threshold: float
    mode: str
    unreached: bool = False

    @property
    def eps(self) -> float:
        return 0.5 * (self.eps_minus + self.eps_plus)


@dataclass
class RobustnessGrid:
    """2-D field over (phi, alpha) with a validity mask."""

    m: int
    phis: np.ndarray
    alphas: np.ndarray
    values: np.ndarray
    valid: np.ndarray
    kind: str


@dataclass
class SigmaPrimeProfile:
    """1-D relative-deviation field for the constant-zeta baseline."""

    m: int
    phis: np.ndarray
    values: np.ndarray
    valid: np.ndarray
    p: np.ndarray


def curve_profile(
    m: int,
    relation: CurveRelation,
    phi_steps: int = 180,
    iterations: Optional[int] = None,
) -> CurveProfile:
    """Evaluate p(phi, zeta(phi)) on the canonical phi grid."""
    if phi_steps < 2:
        raise ValueError("phi_steps must be >= 2")
    from .coins import zeta_of_phi

    phis = phi_grid(phi_steps)
    zetas = zeta_of_phi(relation, phis)
    ps = run_batch(m, phis, zetas, iterations=iterations)
    return CurveProfile(m, relation, phis, ps)


def width(profile: CurveProfile, mode: str, value: float) -> WidthResult:
    """Half-width of the contiguous above-threshold interval around phi_max.

    ``mode='fraction'`` uses threshold = value * p_max (value in (0, 1]);
    ``mode='absolute'`` uses threshold = value directly.  Boundary crossings
    are linearly interpolated between the last passing and first failing grid
    points.  An absolute threshold above p_max yields eps = 0 with the
    ``unreached`` flag set.
    """
    if mode == "fraction":
        if not 0.0 < value <= 1.0:
            raise ValueError(f"fraction must be in (0, 1], got {value}")
        threshold = value * profile.p_max
    elif mode == "absolute":
        if not 0.0 < value < 1.0:
            raise ValueError(f"absolute threshold must be in (0, 1), got {value}")
        threshold = value
        if threshold > profile.p_max:
            return WidthResult(0.0, 0.0, threshold, mode, unreached=True)
    else:
        raise ValueError(f"unknown width mode {mode!r}")

    phis, ps = profile.phis, profile.ps
    imax = int(ps.argmax())

    def boundary(step: int) -> float:
        i = imax
        while 0 <= i + step < len(ps) and ps[i + step] >= threshold:
            i += step
        j = i + step
        if not 0 <= j < len(ps):
            return abs(phis[i] - phis[imax])
        # crossing between the last passing point i and the failing point j
        frac = (ps[i] - threshold) / (ps[i] - ps[j])
        cross = phis[i] + frac * (phis[j] - phis[i])
        return abs(cross - phis[imax])

    return WidthResult(boundary(-1), boundary(+1), threshold, mode)


def extract_ridge(dataset: SweepDataset, floor_fraction: float = 0.9):
    """Per-phi-column argmax of a grid dataset: pairs (phi_i, zeta*_i).

    Columns whose maximum falls below ``floor_fraction`` of the global
    maximum are dropped: off the high-probability core the stripe bends away
    from the sinusoidal relation and would bias the fit.  Ties break toward
    smaller zeta.
    """
    p = dataset.p_grid()
    phis = dataset.phi_axis()
    zetas = dataset.zeta_axis()
    col_max = p.max(axis=1)
    keep = col_max >= floor_fraction * p.max()
    ridge_phi = phis[keep]
    ridge_zeta = zetas[p[keep].argmax(axis=1)]
    return np.column_stack([ridge_phi, ridge_zeta])


def fit_alpha(ridge: np.ndarray, min_sin: float = 1e-6) -> float:
    """Least-squares alpha of the sinusoidal relation through ridge points.

    Solves zeta*_i - (-2 phi_i + 3 pi) = alpha sin(2 phi_i) with the left
    side reduced into (-pi, pi]; closed form alpha = sum(r s) / sum(s^2).
    Points with |sin(2 phi)| <= ``min_sin`` are excluded.

    Raises
    ------
    ValueError
        If fewer than 3 usable points remain (underdetermined).
    """
    ridge = np.asarray(ridge, dtype=float)
    if ridge.ndim != 2 or ridge.shape[1] != 2:
        raise ValueError("ridge must be an (N, 2) array of (phi, zeta) pairs")
    s = np.sin(2.0 * ridge[:, 0])
    keep = np.abs(s) > min_sin
    if keep.sum() < 3:
        raise ValueError("underdetermined: fewer than 3 ridge points off the sin(2 phi) zeros")
    r = wrap_to_pi(ridge[keep, 1] + 2.0 * ridge[keep, 0] - 3.0 * math.pi)
    s = s[keep]
    return float(np.dot(r, s) / np.dot(s, s))


def p_of_phi_alpha(
    m: int,
    phi: float | np.ndarray,
    alpha: float,
    iterations: Optional[int] = None,
):
    """p along the sinusoidal relation with parameter ``alpha``."""
    from .coins import zeta_of_phi

    phi = np.asarray(phi, dtype=float)
    rel = CurveRelation.sinusoidal(alpha)
    p = run_batch(m, np.atleast_1d(phi), np.atleast_1d(zeta_of_phi(rel, phi)),
                  iterations=iterations)
    return float(p[0]) if phi.ndim == 0 else p


def alpha_grid(steps: int = 250, lo: float = -1.5, hi: float = 1.0) -> np.ndarray:
    return np.linspace(lo, hi, steps)


def p_phi_alpha_grid(
    m: int,
    phis: np.ndarray,
    alphas: np.ndarray,
    iterations: Optional[int] = None,
) -> np.ndarray:
    """p(phi_i, alpha_j) on the product grid, shape (len(phis), len(alphas))."""
    from .coins import zeta_of_phi

    pp, aa = np.meshgrid(phis, alphas, indexing="ij")
    zz = np.mod(-2.0 * pp + 3.0 * math.pi + aa * np.sin(2.0 * pp), TWO_PI)
    p = run_batch(m, pp.ravel(), zz.ravel(), iterations=iterations)
    return p.reshape(len(phis), len(alphas))


def sigma_p_grid(
    m: int,
    alpha_center: float,
    sigma_phi: float = 0.1,
    sigma_alpha: float = 0.1,
    phi_steps: int = 180,
    alpha_steps: int = 250,
    p_field: Optional[np.ndarray] = None,
) -> RobustnessGrid:
    """Distance-weighted relative r.m.s. deviation of p over (phi, alpha).

    sigma_p[i, j] = (1/p) sqrt((dp/dphi)^2 sigma_phi^2 (phi_i - pi)^2
                             + (dp/dalpha)^2 sigma_alpha^2 (alpha_j - alpha_center)^2)

    Derivatives are central finite differences on the grid (one-sided at the
    edges).  Cells with p below ``P_FLOOR`` are flagged invalid.  A
    precomputed ``p_field`` (from ``p_phi_alpha_grid``) may be supplied to
    avoid re-simulation.
    """
    phis = phi_grid(phi_steps)
    alphas = alpha_grid(alpha_steps)
    p = p_field if p_field is not None else p_phi_alpha_grid(m, phis, alphas)
    if p.shape != (phi_steps, alpha_steps):
        raise ValueError(f"p_field must have shape {(phi_steps, alpha_steps)}")
    dp_dphi = np.gradient(p, phis, axis=0)
    dp_dalpha = np.gradient(p, alphas, axis=1)
    valid = p >= P_FLOOR
    term_phi = dp_dphi * sigma_phi * (phis - math.pi)[:, None]
    term_alpha = dp_dalpha * sigma_alpha * (alphas - alpha_center)[None, :]
    values = np.zeros_like(p)
    np.divide(np.hypot(term_phi, term_alpha), p, out=values, where=valid)
    values[~valid] = np.nan
    return RobustnessGrid(m, phis, alphas, values, valid, "sigma_p")


def sigma_p_prime(
    m: int,
    sigma_phi: float = 0.1,
    phi_steps: int = 180,
    profile: Optional[CurveProfile] = None,
) -> SigmaPrimeProfile:
    """Relative r.m.s. deviation for the constant-zeta (uncontrolled) coin.

    sigma_p'[i] = (1/p') |dp'/dphi| sigma_phi |phi_i - pi| with p' the
    constant-relation profile.
    """
    if profile is None:
        profile = curve_profile(m, CurveRelation.constant(), phi_steps)
    phis, p = profile.phis, profile.ps
    dp = np.gradient(p, phis)
    valid = p >= P_FLOOR
    values = np.zeros_like(p)
    np.divide(np.abs(dp * sigma_phi * (phis - math.pi)), p, out=values, where=valid)
    values[~valid] = np.nan
    return SigmaPrimeProfile(m, phis, values, valid, p)


def ratio_map(sigma_grid: RobustnessGrid, sigma_prime: SigmaPrimeProfile) -> RobustnessGrid:
    """Column-wise ratio sigma_p[i, j] / sigma_p'[i].

    Cells where either operand is invalid, or sigma_p' vanishes, are flagged
    invalid.
    """
    if sigma_grid.phis.shape != sigma_prime.phis.shape or not np.allclose(
        sigma_grid.phis, sigma_prime.phis
    ):
        raise ValueError("phi grids do not match")
    denom = sigma_prime.values[:, None]
    valid = (
        sigma_grid.valid
        & sigma_prime.valid[:, None]
        & (denom != 0.0)
        & np.isfinite(denom)
    )
    values = np.full_like(sigma_grid.values, np.nan)
    np.divide(sigma_grid.values, denom, out=values, where=valid)
    values[~valid] = np.nan
    return RobustnessGrid(sigma_grid.m, sigma_grid.phis, sigma_grid.alphas,
                          values, valid, "ratio")


def central_window(profile_p: np.ndarray, floor_fraction: float = 0.5) -> np.ndarray:
    """Boolean mask of the contiguous high-p window around the profile peak.

    The window is grown outward from the argmax while p stays at or above
    ``floor_fraction`` of the maximum.
    """
    mask = np.zeros(len(profile_p), dtype=bool)
    imax = int(np.argmax(profile_p))
    thr = floor_fraction * profile_p[imax]
    i = imax
    while i >= 0 and profile_p[i] >= thr:
        mask[i] = True
        i -= 1
    i = imax + 1
    while i < len(profile_p) and profile_p[i] >= thr:
        mask[i] = True
        i += 1
    return mask


# ---------------------------------------------------------------------------
# persistence

def save_matrix_csv(grid: RobustnessGrid, path: Path | str) -> None:
    """Matrix CSV: first row the alpha grid, first column the phi grid.

    Invalid cells are written as ``nan``.
    """
    with open(Path(path), "w", newline="") as fh:
        fh.write("," + ",".join(f"{a:.12g}" for a in grid.alphas) + "\n")
        for phi, row in zip(grid.phis, grid.values):
            fh.write(f"{phi:.12g}," + ",".join(f"{v:.12g}" for v in row) + "\n")


def load_matrix_csv(path: Path | str, m: int = 0, kind: str = "") -> RobustnessGrid:
    """Read a matrix CSV written by ``save_matrix_csv``."""
    raw = np.genfromtxt(Path(path), delimiter=",")
    alphas = raw[0, 1:]
    phis = raw[1:, 0]
    values = raw[1:, 1:]
    return RobustnessGrid(m, phis, alphas, values, np.isfinite(values), kind)


def width_record(
    profile: CurveProfile, result: WidthResult, alpha: Optional[float] = None
) -> dict:
    """JSON-ready record for one width measurement."""
    rel = profile.relation
    return {
        "m": profile.m,
        "relation": rel.kind.value,
        "alpha": rel.alpha if alpha is None else alpha,
        "mode": result.mode,
        "value": result.threshold if result.mode == "absolute"
        else result.threshold / profile.p_max if profile.p_max else 0.0,
        "threshold": result.threshold,
        "eps_minus": result.eps_minus,
        "eps_plus": result.eps_plus,
        "eps": result.eps,
        "unreached": result.unreached,
        "p_max": profile.p_max,
        "phi_max": profile.phi_max,
    }


def save_width_records(records: list[dict], path: Path | str) -> None:
    with open(Path(path), "w") as fh:
        json.dump(records, fh, indent=2, sort_keys=True)
        fh.write("\n")
