import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrws.coins import (
    ALPHA_BENCH,
    CoinSpec,
    CurveRelation,
    alpha_from_point,
    build_coin,
    reduce_angle,
    wrap_to_pi,
    zeta_of_phi,
)

PI = math.pi


class TestBuildCoin:
    def test_grover_coin_m2(self):
        coin = build_coin(CoinSpec(2, PI, PI))
        assert np.allclose(coin, [[0, 1], [1, 0]], atol=1e-14)

    def test_identity_at_zero_angles(self):
        for m in (2, 3, 5, 8):
            assert np.allclose(build_coin(CoinSpec(m, 0.0, 0.0)), np.eye(m), atol=1e-14)

    def test_grover_coin_m3(self):
        coin = build_coin(CoinSpec(3, PI, PI))
        expected = np.full((3, 3), 2.0 / 3.0) - np.eye(3)
        assert np.allclose(coin, expected, atol=1e-14)

    def test_rejects_small_m(self):
        with pytest.raises(ValueError):
            CoinSpec(1, 0.0, 0.0)

    def test_unitarity_random_angles(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            m = int(rng.integers(2, 9))
            coin = build_coin(CoinSpec(m, rng.uniform(0, 2 * PI), rng.uniform(0, 2 * PI)))
            err = np.abs(coin.conj().T @ coin - np.eye(m)).max()
            assert err < 1e-12

    def test_uniform_vector_eigenpair(self):
        # |chi> picks up e^{i(zeta+phi)}; the orthogonal complement e^{i zeta}
        m, phi, zeta = 5, 1.3, 2.1
        coin = build_coin(CoinSpec(m, phi, zeta))
        chi = np.full(m, 1.0 / math.sqrt(m))
        assert np.allclose(coin @ chi, np.exp(1j * (zeta + phi)) * chi, atol=1e-12)
        perp = np.zeros(m)
        perp[0], perp[1] = 1.0, -1.0
        assert np.allclose(coin @ perp, np.exp(1j * zeta) * perp, atol=1e-12)


class TestCurves:
    def test_linear_at_pi(self):
        assert zeta_of_phi(CurveRelation.linear(), PI) == pytest.approx(PI)

    def test_constant_everywhere(self):
        for phi in (0.0, 1.0, PI, 5.0):
            assert zeta_of_phi(CurveRelation.constant(), phi) == pytest.approx(PI)

    def test_sinusoidal_bench_at_half_pi(self):
        # sin(pi) = 0, so -pi/2*2 + 3pi = 2pi -> reduces to 0
        z = zeta_of_phi(CurveRelation.sinusoidal(ALPHA_BENCH), PI / 2)
        assert z == pytest.approx(0.0, abs=1e-12)

    def test_sinusoidal_zero_is_linear(self):
        phis = np.linspace(0, 2 * PI, 400)
        lin = zeta_of_phi(CurveRelation.linear(), phis)
        sin0 = zeta_of_phi(CurveRelation.sinusoidal(0.0), phis)
        assert np.array_equal(lin, sin0)

    @pytest.mark.parametrize(
        "relation",
        [CurveRelation.linear(), CurveRelation.constant(),
         CurveRelation.sinusoidal(ALPHA_BENCH), CurveRelation.sinusoidal(0.4)],
    )
    def test_axial_symmetry_about_pi(self, relation):
        phis = np.linspace(0.01, 2 * PI - 0.01, 97)
        left = zeta_of_phi(relation, 2 * PI - phis)
        right = reduce_angle(2 * PI - zeta_of_phi(relation, phis))
        diff = np.mod(left - right + PI, 2 * PI) - PI
        assert np.allclose(diff, 0, atol=1e-9)


class TestAlphaFromPoint:
    def test_direct_inversion(self):
        phi = PI / 4
        zeta = reduce_angle(-2 * phi + 3 * PI + 0.5 * math.sin(2 * phi))
        assert alpha_from_point(phi, zeta) == pytest.approx(0.5, abs=1e-12)

    def test_linear_line_gives_zero(self):
        for phi in (0.3, 1.1, 2.0, 4.0):
            zeta = zeta_of_phi(CurveRelation.linear(), phi)
            assert alpha_from_point(phi, zeta) == pytest.approx(0.0, abs=1e-12)

    def test_round_trip(self):
        phi, alpha = 1.0, -0.159
        zeta = zeta_of_phi(CurveRelation.sinusoidal(alpha), phi)
        assert alpha_from_point(phi, zeta) == pytest.approx(alpha, abs=1e-10)

    def test_indeterminate_on_sin_zeros(self):
        for phi in (0.0, PI / 2, PI, 3 * PI / 2):
            with pytest.raises(ValueError, match="indeterminate"):
                alpha_from_point(phi, 1.0)

    @given(st.floats(0.01, 2 * PI - 0.01), st.floats(-1.4, 0.9))
    @settings(max_examples=200, deadline=None)
    def test_round_trip_property(self, phi, alpha):
        if abs(math.sin(2 * phi)) < 1e-3:
            return
        zeta = zeta_of_phi(CurveRelation.sinusoidal(alpha), phi)
        # inversion recovers alpha when |alpha sin(2 phi)| stays within the
        # branch window (-pi, pi]
        if abs(alpha * math.sin(2 * phi)) < PI - 1e-6:
            assert alpha_from_point(phi, zeta) == pytest.approx(alpha, abs=1e-9)


def test_wrap_to_pi_branch():
    assert wrap_to_pi(PI) == pytest.approx(PI)
    assert wrap_to_pi(-PI) == pytest.approx(PI)
    assert wrap_to_pi(3 * PI + 0.1) == pytest.approx(-PI + 0.1)
    assert wrap_to_pi(0.25) == pytest.approx(0.25)
