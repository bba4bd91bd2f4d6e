"""Regularizing filter, its Lemma-1 envelope, and the raw cosh/sinh propagators.

For a mode with ``s = sqrt(alpha * lambda_n)`` the filter is

    psi(x) = exp(-s (a - x)) / (2 beta s**k + 2 exp(-s a))

which we always evaluate as ``1 / (2 beta s**k exp(s (a - x)) + 2 exp(-s x))``
so large ``s`` underflows to zero instead of producing ``0/0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, HypothesisError, OrderingError, SaturationError


@dataclass(frozen=True)
class KernelParams:
    alpha: float
    a: float
    k: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha!r}")
        if not self.a > 0:
            raise ValueError(f"a must be positive, got {self.a!r}")
        if not self.k >= 1:
            raise ValueError(f"k must be >= 1, got {self.k!r}")
        if not self.beta >= 0:
            raise ValueError(f"beta must be >= 0, got {self.beta!r}")

    @property
    def hypothesis_ok(self) -> bool:
        return self.beta > 0 and self.a**self.k > self.k * self.beta

    def require_hypothesis(self) -> None:
        if not self.hypothesis_ok:
            raise HypothesisError(self.a, self.k, self.beta)


def _check_x(x, a):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(x > a) or np.any(np.isnan(x)):
        raise DomainError(f"x must lie in [0, {a}]")
    return x


def _rate(alpha, lambda_n):
    lam = np.asarray(lambda_n, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("lambda_n must be positive")
    return np.sqrt(alpha * lam)


def _psi(p: KernelParams, s, r):
    """Filter at distance ``r`` from the far end, no argument checks."""
    with np.errstate(over="ignore", divide="ignore", under="ignore"):
        if p.beta > 0:
            damping = 2.0 * p.beta * s**p.k * np.exp(s * (p.a - r))
        else:
            damping = 0.0
        out = 1.0 / (damping + 2.0 * np.exp(-s * r))
    return out


def filter_value(p: KernelParams, lambda_n, x):
    """Filter ``psi_{n,k}(beta, x)``; broadcasts over ``lambda_n`` and ``x``."""
    x = _check_x(x, p.a)
    out = _psi(p, _rate(p.alpha, lambda_n), x)
    return out if np.ndim(out) else float(out)


def shifted_filter_value(p: KernelParams, lambda_n, x, xi):
    """Filter with the far-end distance ``a - x + xi``, i.e. ``psi(x - xi)``."""
    x = _check_x(x, p.a)
    xi = _check_x(xi, p.a)
    if np.any(xi > x):
        raise OrderingError("shifted filter needs xi <= x")
    out = _psi(p, _rate(p.alpha, lambda_n), x - xi)
    return out if np.ndim(out) else float(out)


def log_growth(p: KernelParams) -> float:
    """``log`` of ``(ka)^k beta^-1 ln(a^k/(k beta))^-k``, the envelope at x = a (times 2)."""
    p.require_hypothesis()
    log_arg = math.log(p.a**p.k / (p.k * p.beta))
    return p.k * math.log(p.k * p.a) - math.log(p.beta) - p.k * math.log(log_arg)


def lemma1_bound(p: KernelParams, x):
    """Upper bound ``(1/2) (ka)^{kx/a} beta^{-x/a} ln(a^k/(k beta))^{-kx/a}`` on the filter."""
    lg = log_growth(p)
    x = _check_x(x, p.a)
    out = 0.5 * np.exp(lg * x / p.a)
    return out if np.ndim(out) else float(out)


def shifted_bound(p: KernelParams, x, xi):
    x = _check_x(x, p.a)
    xi = _check_x(xi, p.a)
    if np.any(xi > x):
        raise OrderingError("shifted bound needs xi <= x")
    return lemma1_bound(p, x - xi)


def growth_factor(p: KernelParams, x):
    """``(ka)^{2kx/a} beta^{-2x/a} ln(a^k/(k beta))^{-2kx/a}``, the squared envelope times 4."""
    b = lemma1_bound(p, x)
    return (2.0 * b) ** 2


def unregularized_cosh_sinh(alpha: float, lambda_n, x):
    """``(cosh(s x), sinh(s x) / s)`` with ``s = sqrt(alpha lambda_n)``.

    Raises SaturationError rather than returning infinities.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("x must be non-negative")
    s = _rate(alpha, lambda_n)
    with np.errstate(over="ignore"):
        c = np.cosh(s * x)
        sh = np.sinh(s * x) / s
    if not (np.all(np.isfinite(c)) and np.all(np.isfinite(sh))):
        raise SaturationError(
            f"cosh/sinh overflow for s*x up to {float(np.max(s * x)):.6g}"
        )
    if np.ndim(c) == 0:
        return float(c), float(sh)
    return c, sh
