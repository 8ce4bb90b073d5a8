import numpy as np
import pytest

from permlab import (AtomicPotential, CharExponent, ConstantExcessive,
                     ExpDecayBase, IndicatorPotential, LevyBase, LevyPotential,
                     ScaleConcaveExcessive, StableHitZeroBase,
                     brownian_min_kernel, brownian_unit_base,
                     excessive_from_spec, gram_surrogate_min, make_flat_pair)

OU = brownian_unit_base()


def test_indicator_potential_closed_form():
    # window [0, 2] against exp(-|t|): value at 1 is the integral of exp(-|t|)
    # over [-1, 1]
    f = IndicatorPotential(OU, 0.0, 2.0)
    assert f(1.0) == pytest.approx(2 * (1 - np.exp(-1)), rel=1e-9)
    assert f(0.0) == pytest.approx(1 - np.exp(-2), rel=1e-9)


def test_indicator_matches_quadrature_base():
    pot = LevyPotential(CharExponent.gaussian(0.5), beta=0.5)
    f = IndicatorPotential(LevyBase(pot), 0.0, 2.0)
    assert f(1.0) == pytest.approx(2 * (1 - np.exp(-1)), rel=1e-6)


def test_indicator_derivative():
    f = IndicatorPotential(OU, 0.0, 2.0)
    assert f.derivative(1.0) == pytest.approx(0.0, abs=1e-8)
    assert f.derivative(0.0) == pytest.approx(1 - np.exp(-2), rel=1e-12)


def test_indicator_derivative_midpoint_stable_base():
    pot = LevyPotential(CharExponent.pure_stable(1.5), beta=1.0)
    f = IndicatorPotential(LevyBase(pot), 0.3, 1.1)
    assert f.derivative(0.7) == pytest.approx(0.0, abs=1e-8)


def test_indicator_derivative_matches_finite_differences():
    f = IndicatorPotential(OU, 0.0, 2.0)
    for x in (0.2, 0.9, 1.7, 2.5):
        h = 1e-5
        fd = (f(x + h) - f(x - h)) / (2 * h)
        assert fd == pytest.approx(f.derivative(x), rel=1e-5, abs=1e-8)


def test_indicator_needs_translation_invariance():
    with pytest.raises(ValueError):
        IndicatorPotential(brownian_min_kernel(), 0.0, 1.0)
    with pytest.raises(ValueError):
        IndicatorPotential(OU, 1.0, 1.0)


def test_atomic_potential():
    f = AtomicPotential(OU, ((0.0, 1.0),))
    assert f(0.7) == pytest.approx(np.exp(-0.7), rel=1e-12)
    two = AtomicPotential(OU, ((0.0, 0.5), (1.0, 2.0)))
    assert two(0.3) == pytest.approx(0.5 * np.exp(-0.3) + 2 * np.exp(-0.7),
                                     rel=1e-12)
    with pytest.raises(ValueError):
        AtomicPotential(OU, ((0.0, -1.0),))


def test_constant_excessive():
    c = ConstantExcessive(1.0)
    assert c(17.0) == 1.0
    with pytest.raises(ValueError):
        ConstantExcessive(-0.5)


def test_flat_pair_translation_invariant():
    f, g = make_flat_pair(OU, 1.0)
    assert abs(f.derivative(1.0)) <= 1e-8
    assert abs(g.derivative(1.0)) <= 1e-8
    # not proportional in any neighborhood: second differences disagree
    h = 0.05
    d2f = f(1 + h) - 2 * f(1.0) + f(1 - h)
    d2g = g(1 + h) - 2 * g(1.0) + g(1 - h)
    assert abs(d2f / f(1.0) - d2g / g(1.0)) > 1e-6


def test_flat_pair_scale_base():
    base = brownian_min_kernel()
    f, g = make_flat_pair(base, 1.0)
    assert isinstance(f, ScaleConcaveExcessive) and f.p == 3.0
    assert isinstance(g, ScaleConcaveExcessive) and g.p == 4.0
    assert f.derivative(1.0) == 0.0
    assert g.derivative(1.0) == 0.0
    xs = np.array([0.9, 0.95, 0.99])
    ratio = np.array([f(x) / g(x) for x in xs])
    assert np.max(ratio) - np.min(ratio) > 1e-4


def test_flat_pair_rejections():
    with pytest.raises(ValueError):
        make_flat_pair(brownian_min_kernel(), 0.0)
    with pytest.raises(ValueError):
        make_flat_pair(StableHitZeroBase(0.5), 1.0)


def test_gram_surrogate_nonnegative_for_potential_type_functions():
    pts = 1.0 + 0.3 ** np.arange(1, 8)[::-1]
    pts = np.concatenate([[1.0], pts])
    for fn in (AtomicPotential(OU, ((1.1, 1.0),)),
               ConstantExcessive(0.7),
               IndicatorPotential(OU, 0.5, 1.5)):
        assert gram_surrogate_min(OU, fn, pts) >= -1e-10


def test_gram_surrogate_detects_non_excessive():
    pts = np.array([1.0, 1.05, 1.1, 1.3, 1.6])
    # exp(x) grows too fast to be excessive for the unit exponential kernel
    assert gram_surrogate_min(OU, lambda x: np.exp(2.5 * x), pts) < 0


def test_excessive_from_spec():
    base = OU
    f = excessive_from_spec({"kind": "indicator", "a": 0.0, "b": 2.0}, base)
    assert f(1.0) == pytest.approx(2 * (1 - np.exp(-1)), rel=1e-9)
    g = excessive_from_spec({"kind": "atoms", "atoms": [[0.0, 1.0]]}, base)
    assert g(0.7) == pytest.approx(np.exp(-0.7), rel=1e-12)
    c = excessive_from_spec({"kind": "const", "c": 2.0}, base)
    assert c(5.0) == 2.0
    s = excessive_from_spec({"kind": "scale_concave", "p": 3.0, "x0": 1.0},
                            brownian_min_kernel())
    assert s(2.0) == 1.0
    with pytest.raises(ValueError):
        excessive_from_spec({"kind": "indicator", "a": 0.0, "b": 1.0,
                             "junk": 3}, base)
    with pytest.raises(ValueError):
        excessive_from_spec({"kind": "wavelet"}, base)


@pytest.mark.slow
def test_resolvent_identity_links_killed_and_unkilled_potentials():
    """U0 h = V_beta (h + beta U0 h) checked by quadrature on a window density.

    Both sides are built independently: the left from the unkilled hit-zero
    kernel, the right from the killed-at-zero kernel of the same exponent.
    """
    from permlab import QuadratureConfig
    psi = CharExponent.pure_stable(1.5)
    beta = 0.8
    cfg = QuadratureConfig(abs_tol=1e-8, rel_tol=1e-6)  # far-field evals
    pot0 = LevyPotential(psi, beta=0.0, quad=cfg)
    potb = LevyPotential(psi, beta=beta, quad=cfg)
    a, b = 0.5, 1.5

    nodes, weights = np.polynomial.legendre.leggauss(10)

    def u0_potential(x):
        # split the window at x, where the kernel has its kink
        total = 0.0
        for lo, hi in ((a, min(max(x, a), b)), (min(max(x, a), b), b)):
            if hi <= lo:
                continue
            ys = 0.5 * (lo + hi) + 0.5 * (hi - lo) * nodes
            ws = 0.5 * (hi - lo) * weights
            total += float(sum(w * pot0.u0(x, y) for y, w in zip(ys, ws)))
        return total

    # outer integral over the full line, cut off where the killed kernel is
    # negligible; panels align with the kinks of the integrand (the window
    # edges, the origin, and the diagonal point y = x)
    L = 60.0
    x = 0.8
    breaks = sorted({-L, -1.0, 0.0, a, x, b, 2.0, 5.0, 15.0, L})
    panels = []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        k = max(1, int(np.ceil((hi - lo) / 3.0))) if hi - lo > 1.5 else 2
        edges = np.linspace(lo, hi, k + 1)
        panels.extend(zip(edges[:-1], edges[1:]))
    rhs = 0.0
    for lo, hi in panels:
        ys = 0.5 * (lo + hi) + 0.5 * (hi - lo) * nodes
        ws = 0.5 * (hi - lo) * weights
        for y, w in zip(ys, ws):
            dens = beta * u0_potential(y)
            if a <= y <= b:
                dens += 1.0
            rhs += w * potb.v(x, y) * dens
    lhs = u0_potential(x)
    assert rhs == pytest.approx(lhs, rel=2e-3)
