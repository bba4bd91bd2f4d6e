import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sgreg.checks import invariant_suite, lipschitz_margin, noise_calibration_error
from sgreg.errors import ConfigurationError, IncompatibleGridError
from sgreg.model import (
    CauchyData,
    GevreyParams,
    ProblemSpec,
    gevrey_norm,
    lipschitz_constants,
    lipschitz_matrix,
    make_noisy,
    nonlinearity_F,
)
from sgreg.spectral_basis import BasisConfig, GridFunction, SpectralField, quadrature_nodes

# mpmath, 30 digits: sqrt(1 * e^0.2 + 4 * e^0.8)
GEVREY_TWO_MODE = 3.18175525019289324046810230482


def test_gevrey_oracle():
    cfg = BasisConfig(b=math.pi, n_modes=2)
    f = SpectralField([1.0, 1.0])
    assert gevrey_norm(f, GevreyParams(1.0, 0.1), cfg) == pytest.approx(GEVREY_TWO_MODE, rel=1e-14)


def test_gevrey_reduces_to_l2():
    cfg = BasisConfig(b=2.0, n_modes=6)
    c = np.arange(1.0, 7.0)
    assert gevrey_norm(SpectralField(c), GevreyParams(0.0, 0.0), cfg) == np.linalg.norm(c)


def test_gevrey_overflow_is_inf():
    cfg = BasisConfig(b=math.pi, n_modes=64)
    f = SpectralField(np.ones(64))
    assert gevrey_norm(f, GevreyParams(1.0, 1.0), cfg) == float("inf")


def test_gevrey_negative_nu():
    with pytest.raises(ValueError):
        GevreyParams(1.0, -0.1)


def test_noise_norm_exact():
    cfg = BasisConfig(b=1.0, n_modes=32)
    assert noise_calibration_error(cfg, 1e-3, seed=3) <= 4
    sample = make_noisy(CauchyData.zeros(cfg), 1e-2, 7)
    norms = np.linalg.norm(sample.data.as_array(), axis=1)
    assert np.allclose(norms, 1e-2, rtol=1e-14, atol=0)


def test_noise_reproducible_and_seed_dependent():
    cfg = BasisConfig(b=1.0, n_modes=8)
    d = CauchyData.zeros(cfg)
    a = make_noisy(d, 1e-3, 5).data.as_array()
    b = make_noisy(d, 1e-3, 5).data.as_array()
    c = make_noisy(d, 1e-3, 6).data.as_array()
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_noise_fields_independent():
    cfg = BasisConfig(b=1.0, n_modes=8)
    p = make_noisy(CauchyData.zeros(cfg), 1.0, 1).perturbation
    assert len({tuple(row) for row in p}) == 4


def test_noise_rejects_nonpositive_epsilon():
    cfg = BasisConfig(b=1.0, n_modes=4)
    with pytest.raises(ValueError):
        make_noisy(CauchyData.zeros(cfg), 0.0, 1)


def test_cauchy_data_round_trip():
    arr = np.arange(12.0).reshape(4, 3)
    assert np.array_equal(CauchyData.from_array(arr).as_array(), arr)
    with pytest.raises(IncompatibleGridError):
        CauchyData(*(SpectralField(np.zeros(n)) for n in (3, 3, 3, 4)))


def test_problem_spec_validation():
    with pytest.raises(ConfigurationError):
        ProblemSpec(a=0.0, b=1.0, alpha1=1.0, alpha2=1.0)
    with pytest.raises(ConfigurationError):
        ProblemSpec(a=1.0, b=1.0, alpha1=1.0, alpha2=1.0, delta=[1.0, 2.0])
    with pytest.raises(ConfigurationError):
        ProblemSpec(a=1.0, b=1.0, alpha1=1.0, alpha2=1.0, f1=np.zeros((3, 4)))


def test_forcing_shape_checked():
    cfg = BasisConfig(b=1.0, n_modes=4)
    spec = ProblemSpec(a=1.0, b=1.0, alpha1=1.0, alpha2=1.0, f1=np.zeros((5, 4)), f2=np.zeros((5, 4)))
    assert spec.forcing(1, 5, cfg).shape == (5, 4)
    with pytest.raises(IncompatibleGridError):
        spec.forcing(2, 6, cfg)


def test_lipschitz_constants_known():
    spec = ProblemSpec(
        a=1.0, b=1.0, alpha1=1.0, alpha2=1.0, gamma1=2.0, gamma2=1.0,
        delta=[[1.0, -0.5], [0.0, 1.0]], sigma=[[0.5, 0.0], [0.0, -1.0]],
    )
    L = lipschitz_matrix(spec)
    assert np.allclose(L, [[2.5, 1.0], [0.0, 2.0]])
    c1, c2, c = lipschitz_constants(spec)
    assert (c1, c2, c) == pytest.approx((7.25, 4.0, 11.25))


def test_nonlinearity_pointwise():
    cfg = BasisConfig(b=1.0, n_modes=4)
    nodes = quadrature_nodes(cfg)
    spec = ProblemSpec(
        a=1.0, b=1.0, alpha1=1.0, alpha2=1.0, gamma1=1.0, gamma2=0.0,
        delta=[[1.0, 1.0], [0.0, 0.0]], sigma=[[0.0, 0.0], [2.0, 0.0]],
    )
    u = GridFunction(np.full_like(nodes, 0.3), nodes)
    v = GridFunction(np.full_like(nodes, 0.2), nodes)
    F1 = nonlinearity_F(1, spec, 0, u, v, cfg)
    F2 = nonlinearity_F(2, spec, 0, u, v, cfg)
    assert np.allclose(F1.values, -math.sin(0.5))
    assert np.allclose(F2.values, -0.6)
    with pytest.raises(ValueError):
        nonlinearity_F(3, spec, 0, u, v, cfg)


def test_invariant_suite_default(nonlinear_constants, cfg):
    assert all(invariant_suite(nonlinear_constants, cfg).values())


@settings(max_examples=30, deadline=None)
@given(
    gamma=st.tuples(st.floats(-3, 3), st.floats(-3, 3)),
    delta=st.lists(st.floats(-2, 2), min_size=4, max_size=4),
    sigma=st.lists(st.floats(-2, 2), min_size=4, max_size=4),
    seed=st.integers(0, 2**16),
)
def test_property_lipschitz(gamma, delta, sigma, seed):
    spec = ProblemSpec(
        a=1.0, b=1.0, alpha1=1.0, alpha2=1.0, gamma1=gamma[0], gamma2=gamma[1],
        delta=np.reshape(delta, (2, 2)), sigma=np.reshape(sigma, (2, 2)),
    )
    assert lipschitz_margin(spec, BasisConfig(b=1.0, n_modes=8), seed=seed, trials=3) <= 0


@settings(max_examples=50, deadline=None)
@given(eps=st.floats(1e-12, 1e2), seed=st.integers(0, 2**31))
def test_property_noise_norm(eps, seed):
    cfg = BasisConfig(b=1.0, n_modes=16)
    p = make_noisy(CauchyData.zeros(cfg), eps, seed).perturbation
    assert np.allclose(np.linalg.norm(p, axis=1), eps, rtol=1e-14, atol=0)


@settings(max_examples=50, deadline=None)
@given(
    coeffs=st.lists(st.floats(-5, 5, allow_nan=False), min_size=6, max_size=6),
    s=st.floats(0, 3),
    nu=st.floats(0, 0.5),
)
def test_property_gevrey_dominates_l2(coeffs, s, nu):
    # lambda_n >= 1 for b = pi, so every weight is >= 1
    cfg = BasisConfig(b=math.pi, n_modes=6)
    f = SpectralField(coeffs)
    assert gevrey_norm(f, GevreyParams(s, nu), cfg) >= np.linalg.norm(coeffs) * (1 - 1e-14)
