"""Regularized and unregularized mild-solution solvers on a uniform x-grid.

Per mode ``n`` and equation ``i`` (rate ``s = sqrt(alpha_i lambda_n)``) the
regularized solution satisfies

    u_n(x) = (psi(x) + e^{-sx}/2) u0_n + (psi(x) - e^{-sx}/2) u1_n / s
             + int_0^x (psi(x - xi) - e^{-s(x - xi)}/2) F_n(xi) / s dxi

and is computed by plain Picard iteration.  The nonlinearity is applied
pseudo-spectrally on the y-quadrature nodes; the xi-integral is the
composite trapezoid rule over grid nodes up to ``x``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, HypothesisError, IncompatibleGridError
from .kernel import KernelParams, _psi
from .model import CauchyData, ProblemSpec, nonlinearity_values
from .spectral_basis import (
    BasisConfig,
    SpectralField,
    analyze_values,
    eigenvalues,
    synthesize_values,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Discretization:
    basis: BasisConfig
    n_x: int = 101
    picard_tol: float = 1e-10
    picard_max_iters: int = 200

    def __post_init__(self):
        if int(self.n_x) != self.n_x or self.n_x < 2:
            raise ConfigurationError(f"n_x must be an integer >= 2, got {self.n_x!r}")
        if not self.picard_tol > 0:
            raise ConfigurationError(f"picard_tol must be positive, got {self.picard_tol!r}")
        if int(self.picard_max_iters) != self.picard_max_iters or self.picard_max_iters < 1:
            raise ConfigurationError("picard_max_iters must be a positive integer")

    def x_nodes(self, a: float) -> np.ndarray:
        return np.linspace(0.0, a, self.n_x)


@dataclass(frozen=True)
class RegularizationConfig:
    """Noise level, ``beta = epsilon**m`` unless ``beta`` is given explicitly.

    ``theorem_mode`` demands ``0 < beta < 1``; the kernel-bound hypothesis
    ``a**k > k*beta`` is checked against the problem in ``check``.
    """

    epsilon: float
    m: float = 1.0
    k: float = 1.0
    beta: float | None = None
    theorem_mode: bool = True

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigurationError(f"epsilon must be positive, got {self.epsilon!r}")
        if not 0 < self.m <= 1:
            raise ConfigurationError(f"m must lie in (0, 1], got {self.m!r}")
        if not self.k >= 1:
            raise ConfigurationError(f"k must be >= 1, got {self.k!r}")
        if self.beta is None:
            object.__setattr__(self, "beta", float(self.epsilon**self.m))
        if not self.beta >= 0:
            raise ConfigurationError(f"beta must be >= 0, got {self.beta!r}")
        if self.theorem_mode and not 0 < self.beta < 1:
            raise ConfigurationError(f"theorem mode needs 0 < beta < 1, got beta={self.beta!r}")

    def kernel(self, alpha: float, a: float) -> KernelParams:
        return KernelParams(alpha=alpha, a=a, k=self.k, beta=self.beta)

    def check(self, a: float) -> None:
        if self.theorem_mode:
            p = KernelParams(alpha=1.0, a=a, k=self.k, beta=self.beta)
            try:
                p.require_hypothesis()
            except HypothesisError as exc:
                raise ConfigurationError(str(exc)) from exc


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Coefficients of ``u`` and ``v`` at every x-node, each of shape ``(M, N)``."""

    x_nodes: np.ndarray
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        x = np.array(self.x_nodes, dtype=float)
        u = np.array(self.u, dtype=float)
        v = np.array(self.v, dtype=float)
        if u.ndim != 2 or u.shape != v.shape or u.shape[0] != x.shape[0]:
            raise IncompatibleGridError(
                f"inconsistent trajectory shapes: x {x.shape}, u {u.shape}, v {v.shape}"
            )
        for arr in (x, u, v):
            arr.setflags(write=False)
        object.__setattr__(self, "x_nodes", x)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    def u_at(self, j: int) -> SpectralField:
        return SpectralField(self.u[j])

    def v_at(self, j: int) -> SpectralField:
        return SpectralField(self.v[j])

    def index_of(self, x: float) -> int:
        j = int(np.argmin(np.abs(self.x_nodes - x)))
        h = self.x_nodes[-1] / max(len(self.x_nodes) - 1, 1)
        if abs(self.x_nodes[j] - x) > 1e-9 * max(h, 1.0):
            raise IncompatibleGridError(f"x={x} is not a grid node")
        return j


@dataclass
class SolveDiagnostics:
    iterations: int
    successive_diffs: list[float]
    converged: bool
    residual: float

    def contraction_ratios(self) -> np.ndarray:
        d = np.asarray(self.successive_diffs)
        with np.errstate(divide="ignore", invalid="ignore"):
            return d[1:] / d[:-1]


@dataclass
class MildDiagnostics:
    """Which modes of the unregularized evaluation left the float range."""

    saturated_u: np.ndarray
    saturated_v: np.ndarray
    notes: list[str] = field(default_factory=list)

    @property
    def saturated(self) -> bool:
        return bool(self.saturated_u.any() or self.saturated_v.any())


def trapezoid_convolution(g: np.ndarray, F: np.ndarray, h: float) -> np.ndarray:
    """``I[j] = int_0^{x_j} g(x_j - xi) F(xi) dxi`` by trapezoid on the grid.

    ``g`` and ``F`` have shape ``(M, N)``; ``g[d]`` is the kernel at lag ``d*h``.
    Summation order is fixed, so results are bit-reproducible.
    """
    M = F.shape[0]
    out = np.zeros_like(F)
    for d in range(M):
        out[d:] += g[d] * F[: M - d]
    out -= 0.5 * (g * F[0] + g[0] * F)
    out[0] = 0.0
    return out * h


class _Operator:
    """Precomputed propagators for one equation of the system."""

    def __init__(self, A, B, G):
        self.A = A  # multiplies u0, (M, N)
        self.B = B  # multiplies u1, (M, N)
        self.G = G  # integral kernel by lag, (M, N)

    def data_term(self, c0, c1):
        return self.A * c0 + self.B * c1


def _regularized_operator(alpha, lam, x, reg: RegularizationConfig, a: float) -> _Operator:
    p = reg.kernel(alpha, a)
    s = np.sqrt(alpha * lam)[None, :]
    xx = x[:, None]
    psi = _psi(p, s, xx)
    half = 0.5 * np.exp(-s * xx)
    # x - xi runs over the same uniform lags as x itself
    return _Operator(psi + half, (psi - half) / s, (psi - half) / s)


def _mild_operator(alpha, lam, x) -> _Operator:
    s = np.sqrt(alpha * lam)[None, :]
    xx = x[:, None]
    with np.errstate(over="ignore", invalid="ignore"):
        c = np.cosh(s * xx)
        sh = np.sinh(s * xx) / s
    return _Operator(c, sh, sh)


def _forcing_values(spec: ProblemSpec, disc: Discretization):
    cfg = disc.basis
    f1 = spec.forcing(1, disc.n_x, cfg)
    f2 = spec.forcing(2, disc.n_x, cfg)
    return synthesize_values(f1, cfg), synthesize_values(f2, cfg)


def _projected_nonlinearity(spec, cfg, fq, u, v):
    uq = synthesize_values(u, cfg)
    vq = synthesize_values(v, cfg)
    F1 = analyze_values(nonlinearity_values(1, spec, fq[0], uq, vq), cfg)
    F2 = analyze_values(nonlinearity_values(2, spec, fq[1], uq, vq), cfg)
    return F1, F2


def _sup_distance(u, v, U, V) -> float:
    with np.errstate(over="ignore", invalid="ignore"):
        d = np.sqrt(np.sum((u - U) ** 2 + (v - V) ** 2, axis=1))
    return float(np.max(d))


def _check_inputs(spec: ProblemSpec, data: CauchyData, disc: Discretization):
    cfg = disc.basis
    if abs(cfg.b - spec.b) > 1e-12 * spec.b:
        raise IncompatibleGridError(f"basis b={cfg.b} does not match problem b={spec.b}")
    for f in data.fields():
        f.check(cfg)


def solve_regularized(
    spec: ProblemSpec,
    data: CauchyData,
    reg: RegularizationConfig,
    disc: Discretization,
) -> tuple[Trajectory, SolveDiagnostics]:
    """Picard fixed point of the regularized integral equations.

    Never raises on non-convergence: the last iterate is returned with
    ``converged=False`` so sweeps can record divergent cells.
    """
    _check_inputs(spec, data, disc)
    reg.check(spec.a)
    cfg = disc.basis
    x = disc.x_nodes(spec.a)
    h = x[1] - x[0]
    lam = eigenvalues(cfg)
    ops = (
        _regularized_operator(spec.alpha1, lam, x, reg, spec.a),
        _regularized_operator(spec.alpha2, lam, x, reg, spec.a),
    )
    c = data.as_array()
    base_u = ops[0].data_term(c[0], c[1])
    base_v = ops[1].data_term(c[2], c[3])
    fq = _forcing_values(spec, disc)

    def apply(u, v):
        F1, F2 = _projected_nonlinearity(spec, cfg, fq, u, v)
        return (
            base_u + trapezoid_convolution(ops[0].G, F1, h),
            base_v + trapezoid_convolution(ops[1].G, F2, h),
        )

    u, v = base_u, base_v
    diffs: list[float] = []
    converged = False
    for _ in range(disc.picard_max_iters):
        un, vn = apply(u, v)
        diff = _sup_distance(un, vn, u, v)
        diffs.append(diff)
        u, v = un, vn
        if not np.isfinite(diff):
            break
        if diff <= disc.picard_tol:
            converged = True
            break
    if np.all(np.isfinite(u)) and np.all(np.isfinite(v)):
        ru, rv = apply(u, v)
        residual = _sup_distance(ru, rv, u, v)
    else:
        residual = float("inf")
    if not converged:
        log.warning("Picard iteration did not converge after %d iterations", len(diffs))
    diag = SolveDiagnostics(
        iterations=len(diffs), successive_diffs=diffs, converged=converged, residual=residual
    )
    return Trajectory(x, u, v), diag


def evaluate_exact_mild(
    spec: ProblemSpec,
    data: CauchyData,
    known: Trajectory,
    disc: Discretization,
) -> tuple[Trajectory, MildDiagnostics]:
    """Evaluate the unregularized cosh/sinh formulas with ``known`` inside the nonlinearity.

    Modes whose propagators overflow are marked in the diagnostics and their
    coefficients are left non-finite.
    """
    _check_inputs(spec, data, disc)
    cfg = disc.basis
    x = disc.x_nodes(spec.a)
    if known.u.shape != (disc.n_x, cfg.n_modes) or not np.allclose(known.x_nodes, x):
        raise IncompatibleGridError("known trajectory does not match the discretization")
    h = x[1] - x[0]
    lam = eigenvalues(cfg)
    fq = _forcing_values(spec, disc)
    F1, F2 = _projected_nonlinearity(spec, cfg, fq, known.u, known.v)
    c = data.as_array()
    out = []
    masks = []
    with np.errstate(over="ignore", invalid="ignore"):
        for alpha, c0, c1, F in ((spec.alpha1, c[0], c[1], F1), (spec.alpha2, c[2], c[3], F2)):
            op = _mild_operator(alpha, lam, x)
            w = op.data_term(c0, c1) + trapezoid_convolution(op.G, F, h)
            sat = ~np.all(np.isfinite(op.A), axis=0) | ~np.all(np.isfinite(w), axis=0)
            w[:, sat] = np.inf
            out.append(w)
            masks.append(sat)
    diag = MildDiagnostics(masks[0], masks[1])
    if diag.saturated:
        diag.notes.append(
            f"saturated modes: u {np.flatnonzero(masks[0]) + 1}, v {np.flatnonzero(masks[1]) + 1}"
        )
    return Trajectory(x, out[0], out[1]), diag


def trajectory_error(approx: Trajectory, exact: Trajectory) -> np.ndarray:
    """Per-node ``sqrt(|u - u*|^2 + |v - v*|^2)`` in the coefficient norm."""
    if approx.u.shape != exact.u.shape or not np.allclose(approx.x_nodes, exact.x_nodes):
        raise IncompatibleGridError("trajectories live on different grids")
    with np.errstate(over="ignore", invalid="ignore"):
        return np.sqrt(np.sum((approx.u - exact.u) ** 2 + (approx.v - exact.v) ** 2, axis=1))
