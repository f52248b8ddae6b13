"""Walk-coin construction and the zeta(phi) curve relations.

The traversing coin is a single generalized Householder reflection about the
uniform coin vector, multiplied by a global phase:

    C0(phi, zeta) = e^{i zeta} (I - (1 - e^{i phi}) |chi><chi|),

with |chi> the equal-weight superposition of the ``m`` coin directions.  The
special cases are the Grover coin (phi = zeta = pi) and the identity
(phi = zeta = 0).

Three relations tie ``zeta`` to ``phi`` along the high-probability stripe of
the landscape:

* ``linear``:      zeta = -2 phi + 3 pi
* ``constant``:    zeta = pi          (the uncontrolled-zeta baseline)
* ``sinusoidal``:  zeta = -2 phi + 3 pi + alpha sin(2 phi)

All angles are reduced modulo 2 pi.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

#: Benchmark value of the sinusoidal-relation parameter, -1/(2 pi).
ALPHA_BENCH = -1.0 / TWO_PI

#: Reference optimal ``alpha`` per coin size (fitted for m <= 11, model
#: extrapolations beyond).  Used as curve defaults and robustness centers.
ALPHA_ML = {
    2: -0.558, 3: -0.552, 4: -0.142, 5: -0.155, 6: -0.163, 7: -0.209,
    8: -0.206, 9: -0.185, 10: -0.168, 11: -0.150, 12: -0.179, 13: -0.180,
    14: -0.203, 15: -0.225, 16: -0.197,
}


def reduce_angle(theta: float | np.ndarray) -> float | np.ndarray:
    """Reduce an angle (or array of angles) into [0, 2 pi)."""
    return np.mod(theta, TWO_PI)


@dataclass(frozen=True)
class CoinSpec:
    """Parameters (m, phi, zeta) of the Householder-plus-phase coin.

    Angles are stored reduced into [0, 2 pi).
    """

    m: int
    phi: float
    zeta: float

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"coin dimension must be >= 2, got {self.m}")
        object.__setattr__(self, "phi", float(reduce_angle(self.phi)))
        object.__setattr__(self, "zeta", float(reduce_angle(self.zeta)))


class CurveKind(enum.Enum):
    LINEAR = "linear"
    CONSTANT = "constant"
    SINUSOIDAL = "sinusoidal"


@dataclass(frozen=True)
class CurveRelation:
    """One of the three zeta(phi) relations.

    ``alpha`` is meaningful only for the sinusoidal kind; sinusoidal with
    alpha = 0 coincides pointwise with the linear relation.
    """

    kind: CurveKind
    alpha: float = 0.0

    @staticmethod
    def linear() -> "CurveRelation":
        return CurveRelation(CurveKind.LINEAR)

    @staticmethod
    def constant() -> "CurveRelation":
        return CurveRelation(CurveKind.CONSTANT)

    @staticmethod
    def sinusoidal(alpha: float) -> "CurveRelation":
        return CurveRelation(CurveKind.SINUSOIDAL, float(alpha))

    def label(self) -> str:
        if self.kind is CurveKind.SINUSOIDAL:
            return f"sinusoidal(alpha={self.alpha:g})"
        return self.kind.value


def build_coin(spec: CoinSpec) -> np.ndarray:
    """Return the m x m traversing coin for ``spec``.

    With |chi> uniform the projector |chi><chi| is the all-ones matrix over m,
    so the coin is e^{i zeta} (I - (1 - e^{i phi}) J / m).  The result is
    unitary to machine precision.
    """
    m = spec.m
    coin = np.full((m, m), -(1.0 - np.exp(1j * spec.phi)) / m, dtype=complex)
    coin[np.diag_indices(m)] += 1.0
    return np.exp(1j * spec.zeta) * coin


def zeta_of_phi(relation: CurveRelation, phi: float | np.ndarray):
    """Evaluate ``relation`` at ``phi``; result reduced into [0, 2 pi)."""
    phi = np.asarray(phi, dtype=float)
    if relation.kind is CurveKind.CONSTANT:
        zeta = np.full_like(phi, math.pi)
    elif relation.kind is CurveKind.LINEAR:
        zeta = -2.0 * phi + 3.0 * math.pi
    else:
        zeta = -2.0 * phi + 3.0 * math.pi + relation.alpha * np.sin(2.0 * phi)
    out = reduce_angle(zeta)
    return float(out) if out.ndim == 0 else out


def alpha_from_point(phi: float, zeta: float) -> float:
    """Invert the sinusoidal relation for ``alpha`` at a single (phi, zeta).

    The additive 2 pi ambiguity in zeta is resolved by taking the residue of
    zeta + 2 phi - 3 pi nearest zero, which keeps alpha continuous over the
    working range.  Undefined where sin(2 phi) vanishes.

    Raises
    ------
    ValueError
        If |sin(2 phi)| < 1e-9 (alpha is indeterminate on that locus).
    """
    s = math.sin(2.0 * phi)
    if abs(s) < 1e-9:
        raise ValueError(f"alpha is indeterminate at phi={phi!r}: sin(2 phi) ~ 0")
    return wrap_to_pi(zeta + 2.0 * phi - 3.0 * math.pi) / s


def wrap_to_pi(theta: float | np.ndarray):
    """Reduce an angle to its representative in (-pi, pi]."""
    out = np.mod(-np.asarray(theta, dtype=float) + math.pi, TWO_PI)
    out = -(out - math.pi)
    return float(out) if out.ndim == 0 else out
