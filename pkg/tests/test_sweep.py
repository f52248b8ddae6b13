import math

import numpy as np
import pytest

from qrws.sweep import (
    SweepDataset,
    load_dataset,
    meta_path,
    random_angles,
    save_dataset,
    sweep_grid,
    sweep_random,
)
from qrws.walk import RunConfig, run

PI = math.pi


class TestRandomSweep:
    def test_rejects_zero_samples(self):
        with pytest.raises(ValueError):
            sweep_random(4, 0, seed=1)

    def test_single_sample_matches_run(self):
        ds = sweep_random(4, 1, seed=42)
        assert len(ds) == 1
        assert ds.p[0] == pytest.approx(run(RunConfig(4, ds.phi[0], ds.zeta[0])), abs=1e-13)

    def test_reproducible(self):
        a = sweep_random(3, 50, seed=9)
        b = sweep_random(3, 50, seed=9)
        assert np.array_equal(a.phi, b.phi)
        assert np.array_equal(a.zeta, b.zeta)
        assert np.array_equal(a.p, b.p)

    def test_record_depends_only_on_seed_and_index(self):
        # record i is derivable standalone, independent of dataset size
        ds = sweep_random(3, 20, seed=123)
        for i in (0, 7, 19):
            phi, zeta = random_angles(123, i)
            assert ds.phi[i] == phi
            assert ds.zeta[i] == zeta

    def test_different_seeds_differ(self):
        a = sweep_random(3, 10, seed=1)
        b = sweep_random(3, 10, seed=2)
        assert not np.array_equal(a.phi, b.phi)

    def test_angles_in_range(self):
        ds = sweep_random(3, 200, seed=4)
        assert ds.phi.min() >= 0 and ds.phi.max() <= 2 * PI
        assert ds.p.min() >= 0 and ds.p.max() <= 1


class TestGridSweep:
    def test_shape_and_order(self):
        ds = sweep_grid(3, 6, 4)
        assert len(ds) == 24
        assert ds.grid_shape() == (6, 4)
        # row-major: first 4 records share phi_1
        assert np.allclose(ds.phi[:4], 2 * PI / 6)
        assert np.allclose(ds.zeta[:4], np.arange(1, 5) * 2 * PI / 4)

    def test_pi_on_grid_for_even_steps(self):
        ds = sweep_grid(2, 6, 6)
        assert PI in ds.phi_axis()

    def test_rejects_tiny_grid(self):
        with pytest.raises(ValueError):
            sweep_grid(3, 1, 10)

    def test_conjugation_symmetry_at_grid_pairs(self):
        ds = sweep_grid(4, 12, 12)
        p = ds.p_grid()
        # (phi_i, zeta_j) pairs with (2pi - phi_i, 2pi - zeta_j): index i
        # (1-based) maps to steps - i, with index steps meaning angle 2pi
        for i in range(11):
            for j in range(11):
                assert p[i, j] == pytest.approx(p[10 - i, 10 - j], abs=1e-10)

    def test_grover_max_on_pi_row(self):
        ds = sweep_grid(5, 18, 18)
        p = ds.p_grid()
        i_pi = 8  # phi = 9 * 2pi/18 = pi is index 8
        assert ds.phi_axis()[i_pi] == pytest.approx(PI)
        row = p[:, i_pi]  # zeta = pi column over phi
        assert int(np.argmax(row)) == i_pi

    def test_spot_check_reevaluation(self):
        ds = sweep_grid(3, 8, 8)
        rng = np.random.default_rng(0)
        for i in rng.choice(len(ds), 5, replace=False):
            assert ds.p[i] == pytest.approx(
                run(RunConfig(3, ds.phi[i], ds.zeta[i])), abs=1e-13)


class TestPersistence:
    def test_round_trip(self, tmp_path):
        ds = sweep_grid(3, 5, 5)
        path = tmp_path / "sweep.csv"
        save_dataset(ds, path)
        back = load_dataset(path)
        assert back.m == 3
        assert back.meta == ds.meta
        assert np.allclose(back.phi, ds.phi, atol=1e-11)
        assert np.allclose(back.p, ds.p, atol=1e-11)

    def test_csv_format(self, tmp_path):
        ds = sweep_random(3, 3, seed=5)
        path = tmp_path / "sweep.csv"
        save_dataset(ds, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "phi,zeta,m,p"
        assert len(lines) == 4
        assert meta_path(path).exists()

    def test_deterministic_bytes(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        save_dataset(sweep_random(3, 10, seed=77), a)
        save_dataset(sweep_random(3, 10, seed=77), b)
        assert a.read_bytes() == b.read_bytes()

    def test_grid_accessors_require_grid_mode(self):
        ds = sweep_random(3, 5, seed=1)
        with pytest.raises(ValueError):
            ds.grid_shape()
