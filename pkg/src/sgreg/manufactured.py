"""Manufactured solutions: pick (u*, v*), derive the forcing that makes them exact.

Every ansatz is a finite sum of ``A cos(n pi y / b) P(x)`` terms, so the
truth is band-limited and its coefficients are known in closed form.  The
forcing of equation ``i`` is

    f_i = u*_xx + alpha_i u*_yy + gamma_i sin(delta_i1 u* + delta_i2 v*)
          + sigma_i1 u* + sigma_i2 v*

(with ``u`` replaced by ``v`` in the differential part of the second equation).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .model import CauchyData, ProblemSpec
from .solver import Discretization, Trajectory
from .spectral_basis import analyze_values, eigenvalue, synthesize_values


@dataclass(frozen=True)
class Term:
    """``amplitude * cos(mode pi y / b) * profile(x)`` added to field ``u`` or ``v``.

    ``profile`` is one of
      * ``("harmonic",)`` -- ``exp(-s x)`` with ``s = sqrt(alpha lambda_mode)``,
        which solves the linear part exactly and decays,
      * ``("exp", c)`` -- ``exp(c x)``,
      * ``("poly", (p0, p1, ...))`` -- ``sum p_k x**k``.
    """

    field: str
    mode: int
    amplitude: float
    profile: tuple

    def rate(self, alpha: float, b: float) -> float:
        return float(np.sqrt(alpha) * self.mode * np.pi / b)

    def evaluate(self, x: np.ndarray, alpha: float, b: float):
        """Profile value, first and second x-derivative."""
        kind = self.profile[0]
        if kind == "harmonic":
            c = -self.rate(alpha, b)
            e = np.exp(c * x)
            return e, c * e, c * c * e
        if kind == "exp":
            c = float(self.profile[1])
            e = np.exp(c * x)
            return e, c * e, c * c * e
        if kind == "poly":
            p = np.polynomial.Polynomial(self.profile[1])
            return p(x), p.deriv(1)(x), p.deriv(2)(x)
        raise ConfigurationError(f"unknown profile kind {kind!r}")


RECIPES: dict[str, tuple[Term, ...]] = {
    "zero": (),
    "decaying_mode": (Term("u", 1, None, ("harmonic",)),),
    "single_exp": (Term("u", 1, 1.0, ("exp", -1.0)),),
    "decay": (
        Term("u", 1, 1.0, ("harmonic",)),
        Term("u", 2, 0.1, ("harmonic",)),
        Term("v", 1, 0.5, ("harmonic",)),
    ),
    "growth": (
        Term("u", 1, 1.0, ("exp", 0.5)),
        Term("v", 2, 0.5, ("exp", 0.25)),
    ),
    "polynomial": (
        Term("u", 1, 1.0, ("poly", (1.0, -1.0, 0.5))),
        Term("v", 1, 0.5, ("poly", (0.5, 0.0, 1.0))),
    ),
    "mixed": (
        Term("u", 1, 1.0, ("exp", -0.5)),
        Term("u", 3, 0.2, ("poly", (1.0, 0.0, -1.0))),
        Term("v", 2, 0.5, ("exp", -1.0)),
    ),
}


def recipe_terms(recipe, b: float) -> tuple[Term, ...]:
    if isinstance(recipe, str):
        if recipe not in RECIPES:
            raise ConfigurationError(
                f"unknown recipe {recipe!r}; choose from {sorted(RECIPES)}"
            )
        terms = RECIPES[recipe]
        if recipe == "decaying_mode":
            # unit coefficient on phi_1: amplitude sqrt(2/b) in cosine units
            terms = (Term("u", 1, float(np.sqrt(2.0 / b)), ("harmonic",)),)
        return terms
    return tuple(recipe)


def manufactured_problem(recipe, constants: ProblemSpec, disc: Discretization):
    """Return ``(spec_with_forcing, exact_cauchy_data, exact_trajectory)``.

    ``constants`` supplies a, b and the coefficients; any forcing it carries
    is replaced.
    """
    cfg = disc.basis
    b = constants.b
    terms = recipe_terms(recipe, b)
    x = disc.x_nodes(constants.a)
    N = cfg.n_modes
    M = disc.n_x
    alphas = {"u": constants.alpha1, "v": constants.alpha2}
    # (field, derivative order) -> (M, N) coefficients
    coef = {(f, d): np.zeros((M, N)) for f in "uv" for d in range(3)}
    # differential part -alpha lambda in y is field specific; accumulate directly
    lap = {"u": np.zeros((M, N)), "v": np.zeros((M, N))}
    for t in terms:
        if t.field not in alphas:
            raise ConfigurationError(f"term field must be 'u' or 'v', got {t.field!r}")
        if not 1 <= t.mode <= N:
            raise ConfigurationError(f"term mode {t.mode} outside 1..{N}")
        alpha = alphas[t.field]
        c = t.amplitude * np.sqrt(b / 2.0)
        P, dP, d2P = t.evaluate(x, alpha, b)
        lam = eigenvalue(t.mode, cfg)
        n = t.mode - 1
        coef[t.field, 0][:, n] += c * P
        coef[t.field, 1][:, n] += c * dP
        coef[t.field, 2][:, n] += c * d2P
        lap[t.field][:, n] += c * (d2P - alpha * lam * P)

    u, v = coef["u", 0], coef["v", 0]
    uq = synthesize_values(u, cfg)
    vq = synthesize_values(v, cfg)
    forcing = []
    for i, w in ((0, "u"), (1, "v")):
        d = constants.delta[i]
        s = constants.sigma[i]
        f = lap[w] + s[0] * u + s[1] * v
        g = constants.gamma[i]
        if g != 0.0:
            f = f + g * analyze_values(np.sin(d[0] * uq + d[1] * vq), cfg)
        forcing.append(f)
    spec = constants.with_forcing(forcing[0], forcing[1])
    data = CauchyData.from_array(
        np.stack([coef["u", 0][0], coef["u", 1][0], coef["v", 0][0], coef["v", 1][0]])
    )
    return spec, data, Trajectory(x, u, v)
