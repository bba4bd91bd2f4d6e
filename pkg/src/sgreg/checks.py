"""Invariant suites for the basis, kernel and model, used by ``sgreg verify``."""

from __future__ import annotations

import numpy as np

from .kernel import KernelParams, filter_value
from .model import (
    CauchyData,
    GevreyParams,
    ProblemSpec,
    gevrey_norm,
    lipschitz_matrix,
    make_noisy,
    nonlinearity_values,
)
from .spectral_basis import (
    BasisConfig,
    SpectralField,
    analyze_values,
    basis_matrix,
    eigenvalues,
    l2_norm,
    quadrature,
    synthesize_values,
)


def orthonormality_error(cfg: BasisConfig) -> float:
    phi = basis_matrix(cfg)
    gram = quadrature(phi[:, None, :] * phi[None, :, :], cfg)
    return float(np.max(np.abs(gram - np.eye(cfg.n_modes))))


def parseval_error(cfg: BasisConfig, seed: int = 0, trials: int = 5) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        c = rng.standard_normal(cfg.n_modes)
        g = synthesize_values(c, cfg)
        back = analyze_values(g, cfg)
        worst = max(
            worst,
            abs(l2_norm(back) ** 2 - float(quadrature(g * g, cfg))),
            float(np.max(np.abs(back - c))),
        )
    return worst


def degeneracy_error(alpha: float, a: float, n_max: int, b: float, n_x: int = 21) -> float:
    """Max relative gap between the beta = 0 filter and ``exp(s x) / 2``."""
    lam = eigenvalues(BasisConfig(b=b, n_modes=n_max))
    x = np.linspace(0.0, a, n_x)
    p = KernelParams(alpha=alpha, a=a, k=1.0, beta=0.0)
    s = np.sqrt(alpha * lam)[:, None]
    with np.errstate(over="ignore"):
        ref = 0.5 * np.exp(s * x[None, :])
    val = filter_value(p, lam[:, None], x[None, :])
    ok = np.isfinite(ref)
    return float(np.max(np.abs(val[ok] - ref[ok]) / ref[ok]))


def lipschitz_margin(spec: ProblemSpec, cfg: BasisConfig, seed: int = 0, trials: int = 20) -> float:
    """Largest ``lhs - rhs`` of the Lipschitz estimate over random pairs (<= 0 passes)."""
    rng = np.random.default_rng(seed)
    L = lipschitz_matrix(spec)
    zero = np.zeros(cfg.n_quad)
    worst = -np.inf
    for _ in range(trials):
        u, v, U, V = (synthesize_values(rng.standard_normal(cfg.n_modes), cfg) for _ in range(4))
        du = np.sqrt(quadrature((u - U) ** 2, cfg))
        dv = np.sqrt(quadrature((v - V) ** 2, cfg))
        for i in (1, 2):
            diff = nonlinearity_values(i, spec, zero, u, v) - nonlinearity_values(i, spec, zero, U, V)
            lhs = np.sqrt(quadrature(diff**2, cfg))
            rhs = L[i - 1, 0] * du + L[i - 1, 1] * dv
            worst = max(worst, float(lhs - rhs * (1 + 1e-12)))
    return worst


def noise_calibration_error(cfg: BasisConfig, epsilon: float = 1e-3, seed: int = 0) -> float:
    """Largest deviation of a perturbation norm from ``epsilon``, in units of ``eps*ulp``."""
    data = CauchyData.zeros(cfg)
    sample = make_noisy(data, epsilon, seed)
    norms = np.linalg.norm(sample.perturbation, axis=1)
    return float(np.max(np.abs(norms - epsilon)) / np.spacing(epsilon))


def gevrey_l2_gap(cfg: BasisConfig, seed: int = 0) -> float:
    c = np.random.default_rng(seed).standard_normal(cfg.n_modes)
    f = SpectralField(c)
    return abs(gevrey_norm(f, GevreyParams(0.0, 0.0), cfg) - l2_norm(f))


def invariant_suite(spec: ProblemSpec, cfg: BasisConfig) -> dict[str, bool]:
    return {
        "orthonormality": orthonormality_error(cfg) <= 1e-10,
        "parseval": parseval_error(cfg) <= 1e-10,
        "kernel_degeneracy": degeneracy_error(spec.alpha1, spec.a, 50, spec.b) <= 1e-13
        and degeneracy_error(spec.alpha2, spec.a, 50, spec.b) <= 1e-13,
        "lipschitz": lipschitz_margin(spec, cfg) <= 0,
        "noise_calibration": noise_calibration_error(cfg) <= 4,
        "gevrey_l2": gevrey_l2_gap(cfg) == 0.0,
    }
