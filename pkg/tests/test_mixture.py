import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spinscape.complexity import theta_k
from spinscape.errors import (
    DuplicateDegree,
    MixtureParseError,
    NoCriticalWeight,
    NonPositiveWeight,
    NotNormalized,
)
from spinscape.mixture import (
    MixtureClass,
    eval_nu,
    format_mixture,
    make_mixture,
    mu_critical,
    parse_mixture,
    profile,
    random_mixture,
    sigma_total,
    two_spin_family,
)

mixtures = st.builds(
    lambda seed: random_mixture(np.random.default_rng(seed)), st.integers(0, 2**32 - 1)
)


def test_make_mixture_examples():
    m = make_mixture([(3, 1.0)])
    assert m.is_pure and m.nu_prime == 3.0
    m = make_mixture([(2, 0.5), (4, 0.5)])
    assert eval_nu(m, 0.5) == pytest.approx(0.15625, abs=1e-15)


@pytest.mark.parametrize(
    "terms, err",
    [
        ([(2, 0.5), (2, 0.5)], DuplicateDegree),
        ([(2, 1.0), (3, 0.0)], NonPositiveWeight),
        ([(2, 1.2), (3, -0.2)], NonPositiveWeight),
        ([(2, 0.5), (3, 0.4)], NotNormalized),
    ],
)
def test_make_mixture_errors(terms, err):
    with pytest.raises(err):
        make_mixture(terms)


def test_normalize_flag():
    m = make_mixture([(2, 1.0), (4, 3.0)], normalize=True)
    assert m.weights.tolist() == [0.25, 0.75]


def test_eval_nu_pure3(pure3):
    assert eval_nu(pure3, 1.0) == 1.0
    assert eval_nu(pure3, -1.0) == -1.0


@given(mixtures, st.floats(-1.0, 1.0))
def test_eval_nu_bounded(m, t):
    assert abs(eval_nu(m, t)) <= 1.0 + 1e-12
    assert eval_nu(m, 1.0) == pytest.approx(1.0, abs=1e-12)


def test_profile_pure3(pure3):
    p = profile(pure3)
    target = 2.0 * math.sqrt(2.0 / 3.0)
    assert (p.nu_prime, p.nu_double, p.alpha2) == (3.0, 6.0, 0.0)
    for e in (p.e_inf, p.e_inf_prime, p.e_inf_minus):
        assert e == pytest.approx(target, abs=1e-10)
    assert p.mixture_class is MixtureClass.PURE_LIKE


def test_profile_pure2(pure2):
    p = profile(pure2)
    assert p.g_value == 0.0
    assert p.mixture_class is MixtureClass.CRITICAL
    for e in (p.e_inf, p.e_inf_prime, p.e_inf_minus, p.e_inf_plus):
        assert e == pytest.approx(math.sqrt(2.0), abs=1e-12)


def test_profile_full(full):
    p = profile(full)
    assert p.nu_prime == pytest.approx(2.8)
    assert p.nu_double == pytest.approx(10.8)
    assert p.g_value == pytest.approx(-0.147, abs=5e-4)
    assert p.mixture_class is MixtureClass.FULL_MIXTURE


@pytest.mark.parametrize(
    "text, value",
    [("2:1.0", 0.0), ("3:1.0", 0.5 * math.log(2.0) - 1.0 / 3.0), ("4:1.0", 0.0493061)],
)
def test_sigma_total(text, value):
    assert sigma_total(parse_mixture(text)) == pytest.approx(value, abs=1e-7)


def test_mu_critical_p3():
    with pytest.raises(NoCriticalWeight):
        mu_critical(3)


@pytest.mark.parametrize("p", [4, 10])
def test_mu_critical_brackets_sign_change(p):
    mu = mu_critical(p)
    assert 0.0 < mu < 1.0
    assert profile(two_spin_family(mu - 1e-4, p)).g_value > 0.0
    assert profile(two_spin_family(mu + 1e-4, p)).g_value < 0.0


def test_family_class_flips_once():
    mus = np.linspace(1e-4, 1.0 - 1e-4, 10_000)
    classes = [profile(two_spin_family(mu, 6)).mixture_class for mu in mus]
    flips = sum(1 for a, b in zip(classes, classes[1:]) if a != b)
    assert flips == 1


@given(mixtures)
def test_threshold_ordering(m):
    p = profile(m)
    assert p.nu_double > p.nu_prime
    assert p.alpha2 > 0.0
    assert p.e_inf_minus < p.e_inf_prime < p.e_inf


@given(mixtures)
def test_g_two_ways(m):
    # The closed form carries an overall factor 2 relative to the complexity.
    p = profile(m)
    assert p.g_value == pytest.approx(2.0 * theta_k(0, -p.e_inf, m), abs=1e-10)


@given(mixtures)
def test_sigma_nonnegative(m):
    assert sigma_total(m) > 0.0


@given(mixtures)
def test_format_parse_round_trip(m):
    assert parse_mixture(format_mixture(m)) == m


@pytest.mark.parametrize("text", ["", "2", "2:", "a:1", "2:0.5,,3:0.5", "1:1.0", "2:0.5,2:0.5"])
def test_parse_errors(text):
    with pytest.raises(MixtureParseError):
        parse_mixture(text)


def test_format_examples():
    assert format_mixture(parse_mixture("3:1")) == "3:1.0"
    assert format_mixture(parse_mixture("10:0.1, 2:0.9")) == "2:0.9,10:0.1"
