import mpmath
import numpy as np
import pytest

from isqlab.bessel import MAX_ORDER, bessel_j, bessel_j_derivative, bessel_zeros, mcmahon_zeros
from isqlab.errors import RangeError

J0_FIRST_ZERO = 2.404825557695773


def test_spot_values():
    assert bessel_j(0, 0) == 1.0
    assert abs(bessel_j(0.5, np.pi)) < 1e-15
    assert abs(bessel_j(0, J0_FIRST_ZERO)) < 1e-12
    assert bessel_j(1.5, 0.0) == 0.0


def test_half_integer_closed_forms():
    x = np.logspace(-3, 3, 100)
    j_half = np.sqrt(2 / (np.pi * x)) * np.sin(x)
    j_3half = np.sqrt(2 / (np.pi * x)) * (np.sin(x) / x - np.cos(x))
    # relative error with an absolute floor near zeros
    np.testing.assert_allclose(bessel_j(0.5, x), j_half, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(bessel_j(1.5, x), j_3half, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("nu", [0.0, 0.3, 1.3, 2.5, 7.0, 20.0, 49.5])
def test_against_high_precision(nu):
    mpmath.mp.dps = 30
    xs = [1e-2, 0.7, 3.0, 11.0, 47.0, 300.0, 2500.0]
    got = bessel_j(nu, np.array(xs))
    for x, g in zip(xs, got):
        ref = float(mpmath.besselj(nu, x))
        assert abs(g - ref) <= 1e-12 * abs(ref) + 1e-14, (nu, x, g, ref)


def test_derivative_recurrence():
    x = np.linspace(0.5, 30, 50)
    nu = 1.7
    d = bessel_j_derivative(nu, x)
    fd = (bessel_j(nu, x + 1e-6) - bessel_j(nu, x - 1e-6)) / 2e-6
    np.testing.assert_allclose(d, fd, atol=1e-8)


def test_range_errors_name_the_parameter():
    with pytest.raises(RangeError, match="order"):
        bessel_j(MAX_ORDER + 1, 1.0)
    with pytest.raises(RangeError, match="order"):
        bessel_j(-0.5, 1.0)
    with pytest.raises(RangeError, match="argument"):
        bessel_j(1.0, -1.0)
    with pytest.raises(RangeError, match="count"):
        bessel_zeros(1.0, 0)


def test_zeros_of_sine():
    np.testing.assert_allclose(bessel_zeros(0.5, 3), [np.pi, 2 * np.pi, 3 * np.pi], rtol=1e-14)


def test_first_zero_of_j0():
    assert abs(bessel_zeros(0.0, 1)[0] - J0_FIRST_ZERO) < 1e-13


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.3, 2.5, 10.0, 49.0])
def test_zero_contract(nu):
    j = bessel_zeros(nu, 400)
    assert np.all(np.diff(j) > 0)
    resid = np.abs(bessel_j(nu, j))
    assert np.all(resid <= 1e-12 * np.maximum(1.0, np.abs(bessel_j_derivative(nu, j)) * j))
    # interlacing with the zeros of J_{nu+1}
    k = bessel_zeros(nu + 1.0, 400)
    assert np.all(j < k)
    assert np.all(k[:-1] < j[1:])


def test_mcmahon_is_a_good_guess():
    j = bessel_zeros(2.0, 200)
    guess = mcmahon_zeros(2.0, np.arange(1, 201))
    assert np.max(np.abs(guess[20:] - j[20:])) < 1e-6
