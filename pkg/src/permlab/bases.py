"""Grid-evaluable symmetric kernels shared by the excessive-function and
matrix-algebra layers.

Every base exposes kernel(x, y); translation-invariant ones additionally have
radial(t) with kernel(x, y) = radial(x - y).  positive_domain marks state
spaces that exclude the origin (kernels of processes killed on hitting 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import exp, sqrt

from .diffusion import PQPotential, ScalePotential
from .expressions import Affine
from .potentials import LevyPotential, regular_variation_constant

__all__ = [
    "ExpDecayBase",
    "LevyBase",
    "HitZeroLevyBase",
    "StableHitZeroBase",
    "VBetaBase",
    "PQBase",
    "VPQBase",
    "ScaleMinBase",
    "brownian_unit_base",
    "brownian_min_kernel",
]


@dataclass(frozen=True)
class ExpDecayBase:
    """Closed form exp(-sqrt(beta/C)|t|) / (2 sqrt(beta C)) kernel.

    This is the exponentially killed quadratic-exponent potential written out
    explicitly; with beta = C = 1/2 it is exactly exp(-|t|).
    """

    beta: float = 0.5
    C: float = 0.5
    positive_domain: bool = False
    translation_invariant: bool = True

    def radial(self, t: float) -> float:
        return exp(-sqrt(self.beta / self.C) * abs(t)) / (2.0 * sqrt(self.beta * self.C))

    def kernel(self, x: float, y: float) -> float:
        return self.radial(x - y)


def brownian_unit_base() -> ExpDecayBase:
    """The unit-amplitude exponential kernel exp(-|x - y|)."""
    return ExpDecayBase(beta=0.5, C=0.5)


@dataclass(frozen=True)
class LevyBase:
    """Quadrature-backed translation-invariant potential, beta > 0."""

    pot: LevyPotential
    positive_domain: bool = False
    translation_invariant: bool = True

    def radial(self, t: float) -> float:
        return self.pot.u(t)

    def kernel(self, x: float, y: float) -> float:
        return self.pot.u(x - y)


@dataclass(frozen=True)
class HitZeroLevyBase:
    """Quadrature-backed kernel of the unkilled process stopped at zero."""

    pot: LevyPotential
    positive_domain: bool = True
    translation_invariant: bool = False

    def kernel(self, x: float, y: float) -> float:
        return self.pot.u0(x, y)


@dataclass(frozen=True)
class StableHitZeroBase:
    """Closed form stable hit-zero kernel (C_{rho+1}/2)(|x|^rho + |y|^rho - |x-y|^rho)."""

    rho: float
    positive_domain: bool = True
    translation_invariant: bool = False

    def kernel(self, x: float, y: float) -> float:
        c = regular_variation_constant(self.rho + 1.0) / 2.0
        return c * (abs(x) ** self.rho + abs(y) ** self.rho
                    - abs(x - y) ** self.rho)


@dataclass(frozen=True)
class VBetaBase:
    """Killed-at-zero kernel u(x-y) - u(x)u(y)/u(0), beta > 0."""

    pot: LevyPotential
    positive_domain: bool = True
    translation_invariant: bool = False

    def kernel(self, x: float, y: float) -> float:
        return self.pot.v(x, y)


@dataclass(frozen=True)
class PQBase:
    pot: PQPotential
    positive_domain: bool = False
    translation_invariant: bool = False

    def kernel(self, x: float, y: float) -> float:
        return self.pot.u(x, y)


@dataclass(frozen=True)
class VPQBase:
    pot: PQPotential
    positive_domain: bool = True
    translation_invariant: bool = False

    def kernel(self, x: float, y: float) -> float:
        return self.pot.v(x, y)


@dataclass(frozen=True)
class ScaleMinBase:
    pot: ScalePotential
    positive_domain: bool = True
    translation_invariant: bool = False

    def kernel(self, x: float, y: float) -> float:
        return self.pot.u(x, y)


def brownian_min_kernel() -> ScaleMinBase:
    """u(x, y) = 2 (x ^ y), the hit-zero kernel of the quadratic case."""
    return ScaleMinBase(ScalePotential(Affine(1.0, 0.0)))
