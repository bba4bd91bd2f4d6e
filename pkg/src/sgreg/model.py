"""Problem data: constants, forcings, Cauchy data, nonlinearities, noise."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigurationError, IncompatibleGridError
from .spectral_basis import (
    BasisConfig,
    GridFunction,
    SpectralField,
    eigenvalues,
    quadrature_nodes,
    synthesize_values,
)


def _as_2x2(name, value):
    arr = np.array(value, dtype=float)
    if arr.shape != (2, 2):
        raise ConfigurationError(f"{name} must be a 2x2 matrix, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """Constants of the coupled system and its forcings.

    ``f1``/``f2`` hold spectral coefficients of the forcings at every x-grid
    node, shape ``(M, N)``; ``None`` means zero forcing.
    """

    a: float
    b: float
    alpha1: float
    alpha2: float
    gamma1: float = 0.0
    gamma2: float = 0.0
    delta: np.ndarray = field(default_factory=lambda: np.zeros((2, 2)))
    sigma: np.ndarray = field(default_factory=lambda: np.zeros((2, 2)))
    f1: np.ndarray | None = None
    f2: np.ndarray | None = None

    def __post_init__(self):
        for name in ("a", "b", "alpha1", "alpha2"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive, got {getattr(self, name)!r}")
        object.__setattr__(self, "delta", _as_2x2("delta", self.delta))
        object.__setattr__(self, "sigma", _as_2x2("sigma", self.sigma))
        for name in ("f1", "f2"):
            f = getattr(self, name)
            if f is not None:
                f = np.array(f, dtype=float)
                if f.ndim != 2:
                    raise ConfigurationError(f"{name} must have shape (n_x, n_modes)")
                f.setflags(write=False)
                object.__setattr__(self, name, f)
        if (self.f1 is None) != (self.f2 is None) or (
            self.f1 is not None and self.f1.shape != self.f2.shape
        ):
            raise ConfigurationError("f1 and f2 must both be given with equal shapes, or both omitted")

    @property
    def alpha(self) -> tuple[float, float]:
        return (self.alpha1, self.alpha2)

    @property
    def gamma(self) -> tuple[float, float]:
        return (self.gamma1, self.gamma2)

    def with_forcing(self, f1, f2) -> "ProblemSpec":
        return replace(self, f1=f1, f2=f2)

    def forcing(self, which: int, n_x: int, cfg: BasisConfig) -> np.ndarray:
        """Forcing coefficients ``(n_x, N)`` for equation ``which``, checked against the grid."""
        f = self.f1 if which == 1 else self.f2
        if f is None:
            return np.zeros((n_x, cfg.n_modes))
        if f.shape != (n_x, cfg.n_modes):
            raise IncompatibleGridError(
                f"forcing f{which} has shape {f.shape}, grid needs {(n_x, cfg.n_modes)}"
            )
        return f

    def constants(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "alpha1": self.alpha1,
            "alpha2": self.alpha2,
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "delta": self.delta.tolist(),
            "sigma": self.sigma.tolist(),
        }


@dataclass(frozen=True)
class CauchyData:
    """Values (``u0``, ``v0``) and x-derivatives (``u1``, ``v1``) at x = 0."""

    u0: SpectralField
    u1: SpectralField
    v0: SpectralField
    v1: SpectralField

    def __post_init__(self):
        sizes = {len(f) for f in self.fields()}
        if len(sizes) != 1:
            raise IncompatibleGridError("Cauchy data fields must share one basis")

    def fields(self) -> tuple[SpectralField, ...]:
        return (self.u0, self.u1, self.v0, self.v1)

    def as_array(self) -> np.ndarray:
        return np.stack([f.coeffs for f in self.fields()])

    @classmethod
    def from_array(cls, arr) -> "CauchyData":
        arr = np.asarray(arr, dtype=float)
        return cls(*(SpectralField(row) for row in arr))

    @classmethod
    def zeros(cls, cfg: BasisConfig) -> "CauchyData":
        return cls.from_array(np.zeros((4, cfg.n_modes)))


@dataclass(frozen=True)
class NoisySample:
    data: CauchyData
    epsilon: float
    seed: int
    clean: CauchyData
    perturbation: np.ndarray = field(repr=False, compare=False)


@dataclass(frozen=True)
class GevreyParams:
    s: float
    nu: float

    def __post_init__(self):
        if self.nu < 0:
            raise ValueError(f"nu must be non-negative, got {self.nu!r}")


def nonlinearity_values(which: int, spec: ProblemSpec, f_vals, u_vals, v_vals) -> np.ndarray:
    """Pointwise ``f_i - gamma_i sin(delta_i1 u + delta_i2 v) - sigma_i1 u - sigma_i2 v``."""
    i = which - 1
    d = spec.delta[i]
    s = spec.sigma[i]
    g = spec.gamma[i]
    out = f_vals - s[0] * u_vals - s[1] * v_vals
    if g != 0.0:
        out = out - g * np.sin(d[0] * u_vals + d[1] * v_vals)
    return out


def nonlinearity_F(
    which: int,
    spec: ProblemSpec,
    x_index: int,
    u: GridFunction,
    v: GridFunction,
    cfg: BasisConfig,
) -> GridFunction:
    if which not in (1, 2):
        raise ValueError(f"which must be 1 or 2, got {which!r}")
    nodes = quadrature_nodes(cfg)
    for g in (u, v):
        if g.nodes.shape != nodes.shape or not np.allclose(g.nodes, nodes, rtol=0, atol=1e-12 * cfg.b):
            raise IncompatibleGridError("u and v must be sampled on the basis quadrature nodes")
    f = spec.f1 if which == 1 else spec.f2
    if f is None:
        f_vals = np.zeros_like(nodes)
    else:
        if not -f.shape[0] <= x_index < f.shape[0]:
            raise IncompatibleGridError(f"x_index {x_index} outside forcing grid of {f.shape[0]} nodes")
        f_vals = synthesize_values(f[x_index], cfg)
    return GridFunction(nonlinearity_values(which, spec, f_vals, u.values, v.values), nodes)


def lipschitz_matrix(spec: ProblemSpec) -> np.ndarray:
    """Entries ``|gamma_i| |delta_ij| + |sigma_ij|``."""
    g = np.abs(np.array(spec.gamma))[:, None]
    return g * np.abs(spec.delta) + np.abs(spec.sigma)


def lipschitz_constants(spec: ProblemSpec) -> tuple[float, float, float]:
    """Row sums of squared Lipschitz entries (C1, C2) and their total C."""
    sq = lipschitz_matrix(spec) ** 2
    c1, c2 = sq.sum(axis=1)
    return float(c1), float(c2), float(c1 + c2)


def gevrey_norm(f: SpectralField, p: GevreyParams, cfg: BasisConfig) -> float:
    """``sqrt(sum lambda_n^s exp(2 nu lambda_n) |c_n|^2)``, ``inf`` if it overflows."""
    c = f.check(cfg).coeffs
    nz = c != 0
    if not np.any(nz):
        return 0.0
    lam = eigenvalues(cfg)[nz]
    if p.s == 0 and p.nu == 0:
        return float(np.linalg.norm(c))
    log_terms = p.s * np.log(lam) + 2.0 * p.nu * lam + 2.0 * np.log(np.abs(c[nz]))
    top = log_terms.max()
    log_sq = top + np.log(np.sum(np.exp(log_terms - top)))
    if 0.5 * log_sq >= np.log(np.finfo(float).max):
        return float("inf")
    return float(np.exp(0.5 * log_sq))


def make_noisy(data: CauchyData, epsilon: float, seed: int) -> NoisySample:
    """Perturb each Cauchy field by an independent random vector of norm exactly ``epsilon``."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon!r}")
    clean = data.as_array()
    rng = np.random.default_rng(seed)
    p = rng.standard_normal(clean.shape)
    p *= epsilon / np.linalg.norm(p, axis=1, keepdims=True)
    noisy = CauchyData.from_array(clean + p)
    p.setflags(write=False)
    return NoisySample(data=noisy, epsilon=float(epsilon), seed=int(seed), clean=data, perturbation=p)
