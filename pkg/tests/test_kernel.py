import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from sgreg.checks import degeneracy_error
from sgreg.errors import DomainError, HypothesisError, OrderingError, SaturationError
from sgreg.kernel import (
    KernelParams,
    filter_value,
    growth_factor,
    lemma1_bound,
    log_growth,
    shifted_bound,
    shifted_filter_value,
    unregularized_cosh_sinh,
)

# mpmath, 30 digits
PSI_EXAMPLE = 2.2422315301555922232771643478
BOUND_EXAMPLE = 6.01591280067048392366529380915
COSH_1 = 1.54308063481524377847790562076
SINH_1 = 1.1752011936438014568823818506
COSH_2PI = 267.746761483748222245931879901
SINH_2PI_OVER_2PI = 42.6129233742435299269536331216
HALF_E = 1.35914091422952261768014373568


def test_filter_matches_oracle():
    p = KernelParams(alpha=1.0, a=1.0, k=1, beta=1e-3)
    assert filter_value(p, math.pi**2, 0.5) == pytest.approx(PSI_EXAMPLE, rel=1e-14)


def test_shifted_filter_equals_unshifted_at_lag():
    p = KernelParams(alpha=1.0, a=1.0, k=1, beta=1e-3)
    assert shifted_filter_value(p, math.pi**2, 0.8, 0.3) == pytest.approx(PSI_EXAMPLE, rel=1e-14)


def test_bound_matches_oracle():
    p = KernelParams(alpha=1.0, a=1.0, k=1, beta=1e-3)
    assert lemma1_bound(p, 0.5) == pytest.approx(BOUND_EXAMPLE, rel=1e-14)


def test_bound_at_zero_is_half():
    p = KernelParams(alpha=1.0, a=1.0, k=2, beta=1e-4)
    assert lemma1_bound(p, 0.0) == 0.5
    assert growth_factor(p, 0.0) == 1.0


def test_beta_zero_is_half_exponential():
    p = KernelParams(alpha=1.0, a=1.0, beta=0.0)
    assert filter_value(p, 1.0, 1.0) == pytest.approx(HALF_E, rel=1e-15)


def test_degeneracy_small():
    for alpha in (0.5, 1.0, 2.0):
        assert degeneracy_error(alpha, 1.0, 50, math.pi) <= 1e-13


def test_filter_large_s_underflows_to_zero():
    p = KernelParams(alpha=1.0, a=1.0, beta=1e-3)
    v = filter_value(p, 1e8, 0.2)
    assert v == 0.0 or (np.isfinite(v) and v >= 0)


@pytest.mark.parametrize("x", [-0.1, 1.1])
def test_filter_domain(x):
    p = KernelParams(alpha=1.0, a=1.0, beta=1e-3)
    with pytest.raises(DomainError):
        filter_value(p, 1.0, x)


def test_shifted_ordering():
    p = KernelParams(alpha=1.0, a=1.0, beta=1e-3)
    with pytest.raises(OrderingError):
        shifted_filter_value(p, 1.0, 0.2, 0.3)
    with pytest.raises(OrderingError):
        shifted_bound(p, 0.2, 0.3)


@pytest.mark.parametrize("a,k,beta", [(1.0, 2, 0.6), (0.5, 1, 0.5), (1.0, 1, 0.0)])
def test_hypothesis_violation(a, k, beta):
    p = KernelParams(alpha=1.0, a=a, k=k, beta=beta)
    assert not p.hypothesis_ok
    with pytest.raises(HypothesisError, match="Lemma-1") as info:
        lemma1_bound(p, 0.1)
    assert info.value.beta == beta


def test_param_validation():
    with pytest.raises(ValueError):
        KernelParams(alpha=0.0, a=1.0)
    with pytest.raises(ValueError):
        KernelParams(alpha=1.0, a=1.0, k=0.5)
    with pytest.raises(ValueError):
        KernelParams(alpha=1.0, a=1.0, beta=-1e-3)


def test_cosh_sinh_oracle():
    c, sh = unregularized_cosh_sinh(1.0, 1.0, 1.0)
    assert c == pytest.approx(COSH_1, rel=1e-15)
    assert sh == pytest.approx(SINH_1, rel=1e-15)
    c, sh = unregularized_cosh_sinh(1.0, 4 * math.pi**2, 1.0)
    assert c == pytest.approx(COSH_2PI, rel=1e-14)
    assert sh == pytest.approx(SINH_2PI_OVER_2PI, rel=1e-14)


def test_cosh_sinh_saturates():
    with pytest.raises(SaturationError):
        unregularized_cosh_sinh(2.0, (200 * math.pi) ** 2, 1.0)


def test_cosh_sinh_negative_x():
    with pytest.raises(DomainError):
        unregularized_cosh_sinh(1.0, 1.0, -1.0)


@settings(max_examples=200, deadline=None)
@given(a=st.floats(0.05, 5.0), k=st.floats(1.0, 4.0), frac=st.floats(1e-9, 0.999))
def test_property_envelope_grows(a, k, frac):
    # whenever the hypothesis holds the envelope is increasing in x
    p = KernelParams(alpha=1.0, a=a, k=k, beta=frac * a**k / k)
    assert p.hypothesis_ok
    assert log_growth(p) > 0


params = st.builds(
    lambda alpha, k, beta_exp, n, x: (KernelParams(alpha=alpha, a=1.0, k=k, beta=10.0**beta_exp), n, x),
    alpha=st.floats(0.1, 5.0),
    k=st.sampled_from([1.0, 2.0, 3.0]),
    beta_exp=st.floats(-12, -0.5),
    n=st.integers(1, 400),
    x=st.floats(0.0, 1.0),
)


@settings(max_examples=200, deadline=None)
@given(params)
def test_property_filter_below_bound(args):
    p, n, x = args
    assume(p.hypothesis_ok)
    lam = float(n * n)
    assert filter_value(p, lam, x) <= lemma1_bound(p, x) * (1 + 1e-12)


@settings(max_examples=200, deadline=None)
@given(params, st.floats(0.0, 1.0))
def test_property_shifted_below_bound(args, frac):
    p, n, x = args
    assume(p.hypothesis_ok)
    xi = frac * x
    lam = float(n * n)
    assert shifted_filter_value(p, lam, x, xi) <= shifted_bound(p, x, xi) * (1 + 1e-12)


@settings(max_examples=100, deadline=None)
@given(params)
def test_property_filter_positive_finite(args):
    p, n, x = args
    v = filter_value(p, float(n * n), x)
    assert np.isfinite(v) and v >= 0
