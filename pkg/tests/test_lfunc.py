import math

import mpmath as mp
import numpy as np
import pytest

from ecdensity import arith, density, lfunc

mp.mp.dps = 25


@pytest.fixture(scope="module")
def series_t1():
    return lfunc.coefficients(arith.WashingtonCurve(1), 4000)


def test_coefficient_basics(series_t1):
    ls = series_t1
    assert ls.a[1] == 1
    assert ls.a[2] == 0 and ls.a[4] == 0      # cusp at 2
    assert ls.conductor == 1352 and ls.conductor_exact
    # multiplicativity
    assert ls.a[21] == ls.a[3] * ls.a[7]
    assert ls.a[35] == ls.a[5] * ls.a[7]
    # Hecke relation at a good prime: a(p^2) = a(p)^2 - p
    for p in (3, 5, 7, 11):
        psi = 0 if ls.conductor % p == 0 else 1
        assert ls.a[p * p] == ls.a[p] ** 2 - psi * p


def test_divisor_bound(series_t1):
    ls = series_t1
    lam = ls.lam()
    d = np.ones(ls.n_max + 1)
    for k in range(2, ls.n_max + 1):
        d[k::k] += 1
    assert (np.abs(lam) <= d[1:] + 1e-9).all()


def test_completed_against_direct_series(series_t1):
    # independent oracle in the absolutely convergent range
    ls = series_t1
    s = 2.5
    direct = sum(int(ls.a[n]) / n ** 0.5 / n ** s for n in range(1, ls.n_max + 1))
    lam_direct = (ls.sqrt_n / (2 * math.pi)) ** s * float(mp.gamma(s + 0.5)) * direct
    lam_afe = lfunc.completed_L(s, ls).value
    assert abs(lam_afe - lam_direct) < 1e-5
    s = 1.75 + 0.6j
    direct = sum(int(ls.a[n]) / n ** 0.5 * n ** (-s) for n in range(1, ls.n_max + 1))
    lam_direct = ((ls.sqrt_n / (2 * math.pi)) ** s * complex(mp.gamma(s + 0.5))
                  * direct)
    assert abs(lfunc.completed_L(s, ls).value - lam_direct) < 1e-4


def test_central_zero_and_consistency(series_t1):
    ls = series_t1
    assert abs(lfunc.completed_L(0.5, ls, Y=1.25).value) < 1e-8
    assert lfunc.afe_consistency(ls) < 1e-8
    # purely imaginary on the critical line (odd sign)
    for t in (0.4, 1.7):
        v = lfunc.completed_L(0.5 + 1j * t, ls).value
        assert abs(v.real) < 1e-10 * (1 + abs(v))


def test_wrong_conductor_detected():
    ls = lfunc.coefficients(arith.WashingtonCurve(1), 4000, conductor=676)
    assert lfunc.afe_consistency(ls) > 1e-3


def test_insufficient_budget_raises():
    ls = lfunc.coefficients(arith.WashingtonCurve(13), 500)
    with pytest.raises(ValueError):
        lfunc.completed_L(0.5, ls)


def test_confirm_conductor_guarded():
    for t in (1, -11):
        c, res, ok = lfunc.confirm_conductor(t)
        assert ok and res < 1e-8
        assert c == arith.washington_conductor(t).value


def test_confirm_conductor_unguarded():
    # polynomial value 49 = 7^2: the square factor drops out of the conductor
    c, res, ok = lfunc.confirm_conductor(5)
    assert ok and res < 1e-8
    assert c == 392
    assert arith.washington_conductor(5).value == 8 * 49 ** 2


def test_find_zeros_properties(series_t1):
    ls = series_t1
    zl = lfunc.find_zeros(ls, 10.0)
    assert zl.central_multiplicity == 1
    assert all(g > 0 for g in zl.ordinates)
    assert sorted(zl.ordinates) == zl.ordinates
    # the completed value vanishes at each reported ordinate
    for g in zl.ordinates[:4]:
        assert abs(lfunc.completed_L(0.5 + 1j * g, ls).value) < 1e-6
    assert abs(len(zl.ordinates) - zl.count_estimate) <= 2
    # simple central zero: derivative clearly nonzero
    h = 1e-3
    d1 = abs((lfunc.completed_L(0.5 + h, ls).value
              - lfunc.completed_L(0.5 - h, ls).value).real) / (2 * h)
    assert d1 > 1e-3


def test_zero_scaling(series_t1):
    zl = lfunc.find_zeros(series_t1, 4.0)
    X = 1e6
    L = density.length_scale(2, X)
    scaled = zl.scaled(X)
    assert scaled == pytest.approx([g * L / math.pi for g in zl.ordinates])


def test_empirical_central_mass():
    tf = density.gaussian_test_function()
    res = lfunc.empirical_one_level([arith.WashingtonCurve(1)], tf, 2e6)
    assert res.central_part == pytest.approx(tf.psi(0.0))
    assert res.value >= res.central_part
    assert res.per_curve[0][1] == 1352


def test_empirical_counts_with_flat_function():
    # constant test function turned into a sharp window: the statistic
    # reduces to a normalized zero count
    X = 2e6
    L = density.length_scale(2, X)
    cut = 2.0

    flat = density.TestFunction(
        "window", lambda t: 1.0 if abs(t) <= cut else 0.0,
        lambda x: 0.0, None, lambda T: 0.0)
    res = lfunc.empirical_one_level([arith.WashingtonCurve(1)], flat, X,
                                    zero_budget=cut * math.pi / L)
    ls = lfunc.coefficients(arith.WashingtonCurve(1), 1000)
    zl = lfunc.find_zeros(ls, cut * math.pi / L)
    assert res.value == pytest.approx(1 + 2 * len(zl.ordinates))
