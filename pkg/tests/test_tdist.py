import math

import mpmath as mp
import pytest

from successodds.tdist import betainc, t_cdf, t_ppf, t_tail2

mp.mp.dps = 40


def t_cdf_reference(x, df):
    """Quadrature of the t density at 40 digits."""
    nu = mp.mpf(df)
    c = mp.gamma((nu + 1) / 2) / (mp.sqrt(nu * mp.pi) * mp.gamma(nu / 2))
    pdf = lambda u: c * (1 + u * u / nu) ** (-(nu + 1) / 2)
    if x == 0:
        return mp.mpf("0.5")
    half = mp.quad(pdf, [0, abs(x)])
    return mp.mpf("0.5") + (half if x > 0 else -half)


@pytest.mark.parametrize("df", [1, 2.5, 10, 30, 100])
@pytest.mark.parametrize("x", [0, 1, -1, 2.5, -2.5])
def test_cdf_grid(df, x):
    assert abs(t_cdf(x, df) - float(t_cdf_reference(x, df))) < 1e-10


def test_cauchy_closed_form():
    for x in (-3.0, -0.2, 0.7, 12.0):
        assert t_cdf(x, 1) == pytest.approx(0.5 + math.atan(x) / math.pi, abs=1e-13)


@pytest.mark.parametrize("a, b, x", [(0.5, 0.5, 0.3), (2, 3, 0.9), (15, 0.5, 0.6), (0.5, 40, 0.01)])
def test_betainc_against_mpmath(a, b, x):
    assert betainc(a, b, x) == pytest.approx(float(mp.betainc(a, b, 0, x, regularized=True)), abs=1e-13)


def test_betainc_edges():
    assert betainc(2, 3, 0.0) == 0.0 and betainc(2, 3, 1.0) == 1.0
    with pytest.raises(ValueError):
        betainc(0, 1, 0.5)


@pytest.mark.parametrize("df", [1, 2.5, 6, 30, 1000])
@pytest.mark.parametrize("p", [0.001, 0.025, 0.3, 0.5, 0.9, 0.975])
def test_ppf_inverts_cdf(df, p):
    q = t_ppf(p, df)
    assert t_cdf(q, df) == pytest.approx(p, abs=1e-12)


def test_known_quantiles():
    assert t_ppf(0.975, 10) == pytest.approx(2.2281388519649, abs=1e-10)
    assert t_ppf(0.975, 1) == pytest.approx(12.706204736174698, abs=1e-9)


def test_tail_symmetry():
    for t in (0.3, 1.7, 9.0):
        assert t_tail2(t, 4.2) == t_tail2(-t, 4.2)
        assert t_tail2(t, 4.2) == pytest.approx(2 * t_cdf(-t, 4.2), abs=1e-15)
    assert t_tail2(0.0, 3) == 1.0
