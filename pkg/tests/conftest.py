"""Shared session fixtures.

The expensive artifacts (full-resolution landscape grids, robustness
fields, the trained surrogate) are built once per session and shared by
the acceptance tests.
"""

import sys

import pytest

from qrws.analysis import (
    extract_ridge,
    fit_alpha,
    ratio_map,
    sigma_p_grid,
    sigma_p_prime,
)
from qrws.surrogate import TrainConfig, train
from qrws.sweep import sweep_grid

GRID_MS = range(4, 11)
SIGMA_MS = (5, 9)
SURROGATE_MS = range(2, 11)


def _note(msg: str) -> None:
    sys.stderr.write(f"[fixtures] {msg}\n")
    sys.stderr.flush()


@pytest.fixture(scope="session")
def full_grids():
    """180 x 180 landscape grids for m = 4..10 (the slow simulations)."""
    grids = {}
    for m in GRID_MS:
        _note(f"grid sweep m={m} (180x180)...")
        grids[m] = sweep_grid(m, 180, 180)
    return grids


@pytest.fixture(scope="session")
def fitted_alphas(full_grids):
    """Ridge-fit sinusoidal-relation alpha per coin size."""
    return {m: fit_alpha(extract_ridge(ds)) for m, ds in full_grids.items()}


@pytest.fixture(scope="session")
def sigma_fields(fitted_alphas):
    """(sigma_p grid, sigma_p' profile, ratio map) for m = 5 and m = 9."""
    fields = {}
    for m in SIGMA_MS:
        _note(f"robustness fields m={m} (180x250)...")
        grid = sigma_p_grid(m, fitted_alphas[m])
        prime = sigma_p_prime(m)
        fields[m] = (grid, prime, ratio_map(grid, prime))
    return fields


@pytest.fixture(scope="session")
def trained_surrogate():
    """Surrogate fitted on 90 x 90 grids for m = 2..10, default config."""
    datasets = []
    for m in SURROGATE_MS:
        _note(f"surrogate training grid m={m} (90x90)...")
        datasets.append(sweep_grid(m, 90, 90))
    _note("training surrogate...")
    model, report = train(datasets, TrainConfig())
    _note(f"surrogate trained (val MSE {report.final_val_loss:.2e})")
    return model, report


@pytest.fixture
def criterion(capsys):
    """Reporter printing one pass/fail line per acceptance criterion."""

    def report(num: int, name: str, ok: bool, detail: str = "") -> None:
        line = f"[acceptance {num:02d}] {name}: {'PASS' if ok else 'FAIL'}"
        if detail:
            line += f" ({detail})"
        with capsys.disabled():
            print(line, flush=True)
        assert ok, line

    return report
