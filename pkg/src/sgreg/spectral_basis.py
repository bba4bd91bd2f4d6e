"""Neumann cosine eigenbasis of -d^2/dy^2 on (0, b).

The basis is ``phi_n(y) = sqrt(2/b) cos(n pi y / b)`` with eigenvalue
``lambda_n = (n pi / b)**2`` for ``n = 1..N``.  The constant Neumann mode
(eigenvalue zero) is excluded, so every field handled here is implicitly
mean-zero.  Projections use the composite trapezoid rule on ``Q`` uniform
nodes including both endpoints.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError, IncompatibleGridError, InvalidIndexError

DEFAULT_N_MODES = 32


@dataclass(frozen=True)
class BasisConfig:
    b: float
    n_modes: int = DEFAULT_N_MODES
    n_quad: int | None = None

    def __post_init__(self):
        if not self.b > 0:
            raise ValueError(f"b must be positive, got {self.b!r}")
        if int(self.n_modes) != self.n_modes or self.n_modes < 1:
            raise ValueError(f"n_modes must be an integer >= 1, got {self.n_modes!r}")
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "n_modes", int(self.n_modes))
        if self.n_quad is None:
            object.__setattr__(self, "n_quad", 4 * self.n_modes)
        if int(self.n_quad) != self.n_quad or self.n_quad < 4 * self.n_modes:
            # below 4N the projection of band-limited data starts to alias
            raise ValueError(
                f"n_quad must be an integer >= 4*n_modes={4 * self.n_modes}, "
                f"got {self.n_quad!r}"
            )
        object.__setattr__(self, "n_quad", int(self.n_quad))


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Coefficients ``<u, phi_n>`` for ``n = 1..N``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 1:
            raise ValueError("coeffs must be a 1-D vector")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __len__(self):
        return len(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, SpectralField):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None

    @classmethod
    def zeros(cls, cfg: BasisConfig) -> "SpectralField":
        return cls(np.zeros(cfg.n_modes))

    def check(self, cfg: BasisConfig) -> "SpectralField":
        if len(self.coeffs) != cfg.n_modes:
            raise IncompatibleGridError(
                f"field has {len(self.coeffs)} coefficients, basis has {cfg.n_modes} modes"
            )
        return self


@dataclass(frozen=True, eq=False)
class GridFunction:
    values: np.ndarray
    nodes: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        nodes = np.array(self.nodes, dtype=float)
        if values.shape != nodes.shape or nodes.ndim != 1:
            raise IncompatibleGridError(
                f"values shape {values.shape} does not match nodes shape {nodes.shape}"
            )
        if nodes.size > 1 and not np.all(np.diff(nodes) > 0):
            raise DomainError("nodes must be strictly increasing")
        values.setflags(write=False)
        nodes.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "nodes", nodes)


def eigenvalue(n: int, cfg: BasisConfig) -> float:
    if n < 1:
        raise InvalidIndexError(f"mode index must be >= 1, got {n}")
    return (n * np.pi / cfg.b) ** 2


@lru_cache(maxsize=64)
def _eigenvalues(cfg: BasisConfig) -> np.ndarray:
    lam = (np.arange(1, cfg.n_modes + 1) * np.pi / cfg.b) ** 2
    lam.setflags(write=False)
    return lam


def eigenvalues(cfg: BasisConfig) -> np.ndarray:
    """All ``lambda_n`` for ``n = 1..N`` as a read-only array."""
    return _eigenvalues(cfg)


def _check_in_domain(y, cfg: BasisConfig):
    y = np.asarray(y, dtype=float)
    if np.any(y < 0) or np.any(y > cfg.b) or np.any(np.isnan(y)):
        raise DomainError(f"y must lie in [0, {cfg.b}]")
    return y


def eigenfunction_at(n: int, y: float, cfg: BasisConfig) -> float:
    if n < 1:
        raise InvalidIndexError(f"mode index must be >= 1, got {n}")
    y = _check_in_domain(y, cfg)
    return float(np.sqrt(2.0 / cfg.b) * np.cos(n * np.pi * y / cfg.b))


@lru_cache(maxsize=64)
def _quadrature(cfg: BasisConfig):
    nodes = np.linspace(0.0, cfg.b, cfg.n_quad)
    h = cfg.b / (cfg.n_quad - 1)
    weights = np.full(cfg.n_quad, h)
    weights[0] = weights[-1] = 0.5 * h
    phi = _basis_matrix(nodes, cfg)
    for arr in (nodes, weights, phi):
        arr.setflags(write=False)
    # analysis operator: coeffs = values @ projector
    projector = (phi * weights).T.copy()
    projector.setflags(write=False)
    return nodes, weights, phi, projector


def _basis_matrix(nodes: np.ndarray, cfg: BasisConfig) -> np.ndarray:
    n = np.arange(1, cfg.n_modes + 1)
    return np.sqrt(2.0 / cfg.b) * np.cos(np.outer(n, nodes) * (np.pi / cfg.b))


def quadrature_nodes(cfg: BasisConfig) -> np.ndarray:
    return _quadrature(cfg)[0]


def quadrature_weights(cfg: BasisConfig) -> np.ndarray:
    return _quadrature(cfg)[1]


def basis_matrix(cfg: BasisConfig) -> np.ndarray:
    """``phi_n(y_q)`` with shape ``(N, Q)`` on the quadrature nodes."""
    return _quadrature(cfg)[2]


def quadrature(values, cfg: BasisConfig) -> np.ndarray:
    """Trapezoid integral over [0, b] along the last axis."""
    return np.asarray(values, dtype=float) @ quadrature_weights(cfg)


def analyze_values(values, cfg: BasisConfig) -> np.ndarray:
    """Project samples on the quadrature nodes (last axis) to coefficients."""
    values = np.asarray(values, dtype=float)
    if values.shape[-1] != cfg.n_quad:
        raise IncompatibleGridError(
            f"expected {cfg.n_quad} samples on the last axis, got {values.shape[-1]}"
        )
    return values @ _quadrature(cfg)[3]


def synthesize_values(coeffs, cfg: BasisConfig) -> np.ndarray:
    """Evaluate coefficient arrays (last axis N) on the quadrature nodes."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape[-1] != cfg.n_modes:
        raise IncompatibleGridError(
            f"expected {cfg.n_modes} coefficients on the last axis, got {coeffs.shape[-1]}"
        )
    return coeffs @ basis_matrix(cfg)


def analyze(g: GridFunction, cfg: BasisConfig) -> SpectralField:
    nodes = quadrature_nodes(cfg)
    if g.nodes.shape != nodes.shape or not np.allclose(g.nodes, nodes, rtol=0, atol=1e-12 * cfg.b):
        raise IncompatibleGridError("grid function is not sampled on the basis quadrature nodes")
    return SpectralField(analyze_values(g.values, cfg))


def synthesize(f: SpectralField, nodes, cfg: BasisConfig) -> GridFunction:
    f.check(cfg)
    nodes = _check_in_domain(np.atleast_1d(nodes), cfg)
    values = f.coeffs @ _basis_matrix(nodes, cfg)
    return GridFunction(values, nodes)


def grid_function(func, cfg: BasisConfig) -> GridFunction:
    """Sample a callable of ``y`` on the quadrature nodes."""
    nodes = quadrature_nodes(cfg)
    return GridFunction(np.asarray(func(nodes), dtype=float) * np.ones_like(nodes), nodes)


def l2_norm(f) -> float:
    coeffs = f.coeffs if isinstance(f, SpectralField) else np.asarray(f, dtype=float)
    return float(np.linalg.norm(coeffs))


def quadrature_l2_norm(g: GridFunction, cfg: BasisConfig) -> float:
    """L2(0, b) norm of a grid function by trapezoid quadrature."""
    return float(np.sqrt(quadrature(g.values**2, cfg)))
