"""Verification studies: kernel bound sweeps, stability, convergence rates, blow-up."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigurationError, DivergenceError, StudyError
from .kernel import KernelParams, _psi, growth_factor, log_growth
from .manufactured import manufactured_problem
from .model import CauchyData, ProblemSpec, lipschitz_constants, make_noisy
from .solver import (
    Discretization,
    RegularizationConfig,
    Trajectory,
    evaluate_exact_mild,
    solve_regularized,
    trajectory_error,
)
from .spectral_basis import BasisConfig, eigenvalue, eigenvalues

log = logging.getLogger(__name__)

CSV_HEADER = ("epsilon", "seed", "x", "error", "beta", "iterations", "converged")

RATE_TOL_INTERIOR = 0.3
RATE_TOL_BOUNDARY = 0.15
LOGLAW_MAX_SLOPE = 0.2
MONOTONE_SLACK = 0.05
FLOOR_FACTOR = 10.0
BLOWUP_MIN_RATIO = 1e3


@dataclass(frozen=True)
class SweepPlan:
    epsilons: tuple[float, ...]
    m: float = 1.0
    k: float = 1.0
    seeds: tuple[int, ...] = (1, 2, 3)
    probe_x: tuple[float, ...] = (0.0,)

    def __post_init__(self):
        eps = tuple(float(e) for e in self.epsilons)
        if not eps:
            raise ConfigurationError("plan needs at least one epsilon")
        if any(e <= 0 for e in eps):
            raise ConfigurationError("epsilons must be positive")
        if any(e2 >= e1 for e1, e2 in zip(eps, eps[1:])):
            raise ConfigurationError("epsilons must be strictly decreasing")
        if not self.seeds:
            raise ConfigurationError("plan needs at least one seed")
        if not 0 < self.m <= 1:
            raise ConfigurationError(f"m must lie in (0, 1], got {self.m!r}")
        if not self.k >= 1:
            raise ConfigurationError(f"k must be >= 1, got {self.k!r}")
        object.__setattr__(self, "epsilons", eps)
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        object.__setattr__(self, "probe_x", tuple(float(x) for x in self.probe_x))

    def check(self, a: float) -> None:
        if any(x < 0 or x > a for x in self.probe_x):
            raise ConfigurationError(f"probe_x must lie in [0, {a}]")


@dataclass(frozen=True)
class Row:
    epsilon: float
    seed: int
    x: float
    error: float
    beta: float
    iterations: int
    converged: bool


@dataclass
class StudyReport:
    kind: str
    rows: list[Row] = field(default_factory=list)
    fitted_slopes: dict[float, float] = field(default_factory=dict)
    verdicts: dict[str, bool] = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    runtime_ms: int = 0

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def sorted_rows(self) -> list[Row]:
        return sorted(self.rows, key=lambda r: (r.epsilon, r.seed, r.x))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.sorted_rows():
            w.writerow(
                [
                    repr(float(r.epsilon)),
                    r.seed,
                    repr(float(r.x)),
                    repr(float(r.error)),
                    repr(float(r.beta)),
                    r.iterations,
                    "true" if r.converged else "false",
                ]
            )
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            "verdicts": dict(self.verdicts),
            "passed": self.passed,
            "fitted_slopes": {repr(float(x)): s for x, s in self.fitted_slopes.items()},
            "runtime_ms": self.runtime_ms,
            "details": _jsonable(self.details),
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True, allow_nan=True)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def fit_slope(epsilons, errors) -> float:
    """Least-squares slope of ``log(error)`` against ``log(epsilon)``."""
    e = np.asarray(epsilons, dtype=float)
    r = np.asarray(errors, dtype=float)
    ok = np.isfinite(r) & (r > 0)
    if ok.sum() < 2:
        raise StudyError("need at least two positive errors to fit a slope")
    return float(np.polyfit(np.log(e[ok]), np.log(r[ok]), 1)[0])


def _timer():
    t0 = time.perf_counter()
    return lambda: int(round(1000 * (time.perf_counter() - t0)))


def _probe_indices(plan: SweepPlan, x_nodes: np.ndarray) -> list[int]:
    h = x_nodes[1] - x_nodes[0]
    idx = []
    for x in plan.probe_x:
        j = int(round(x / h))
        if abs(x_nodes[j] - x) > 1e-9 * max(x_nodes[-1], 1.0):
            raise ConfigurationError(f"probe x={x} is not an x-grid node (spacing {h})")
        idx.append(j)
    return idx


def quadrature_floor(recipe, constants: ProblemSpec, reg: RegularizationConfig, disc: Discretization):
    """Richardson estimate of the x-quadrature error of a clean-data solve, per x-node."""
    spec, data, _ = manufactured_problem(recipe, constants, disc)
    fine = replace(disc, n_x=2 * disc.n_x - 1)
    spec_f, data_f, _ = manufactured_problem(recipe, constants, fine)
    coarse, _ = solve_regularized(spec, data, reg, disc)
    refined, _ = solve_regularized(spec_f, data_f, reg, fine)
    sub = Trajectory(coarse.x_nodes, refined.u[::2], refined.v[::2])
    return trajectory_error(coarse, sub) * (4.0 / 3.0)


def run_convergence_study(
    recipe,
    constants: ProblemSpec,
    plan: SweepPlan,
    disc: Discretization,
    noise: bool = True,
) -> StudyReport:
    """Error of the regularized solution against the manufactured truth over an epsilon sweep.

    With ``noise=False`` the clean data are used (beta still follows epsilon),
    which isolates the regularization bias.
    """
    elapsed = _timer()
    a = constants.a
    plan.check(a)
    spec, data, truth = manufactured_problem(recipe, constants, disc)
    x_nodes = truth.x_nodes
    probes = _probe_indices(plan, x_nodes)
    seeds = plan.seeds if noise else plan.seeds[:1]

    floor_reg = RegularizationConfig(plan.epsilons[-1], plan.m, plan.k)
    floor = quadrature_floor(recipe, constants, floor_reg, disc)

    report = StudyReport(kind="convergence" if noise else "convergence-clean")
    flagged = []
    for eps in plan.epsilons:
        reg = RegularizationConfig(eps, plan.m, plan.k)
        reg.check(a)
        for seed in seeds:
            sample = make_noisy(data, eps, seed).data if noise else data
            traj, diag = solve_regularized(spec, sample, reg, disc)
            err = trajectory_error(traj, truth)
            for j in probes:
                row = Row(eps, seed, float(x_nodes[j]), float(err[j]), reg.beta, diag.iterations, diag.converged)
                report.rows.append(row)
                if diag.converged and err[j] < FLOOR_FACTOR * floor[j]:
                    flagged.append(row)
            if not diag.converged:
                log.warning("eps=%g seed=%d did not converge; excluded from fits", eps, seed)

    if not any(r.converged for r in report.rows):
        raise DivergenceError("every solve in the sweep diverged")

    flagged_set = set(flagged)
    means = {}
    for j in probes:
        x = float(x_nodes[j])
        per_eps = []
        for eps in plan.epsilons:
            vals = [
                r.error
                for r in report.rows
                if r.epsilon == eps and r.x == x and r.converged and r not in flagged_set
            ]
            per_eps.append(float(np.mean(vals)) if vals else float("nan"))
        means[x] = per_eps

    theory = {}
    for x, per_eps in means.items():
        theory[x] = {
            "m(1-x/a)": plan.m * (1 - x / a),
            "1-mx/a": 1 - plan.m * x / a,
        }
        try:
            report.fitted_slopes[x] = fit_slope(plan.epsilons, per_eps)
        except StudyError:
            report.fitted_slopes[x] = float("nan")

    for x, per_eps in means.items():
        vals = np.asarray(per_eps)
        finite = vals[np.isfinite(vals)]
        report.verdicts[f"monotone({x:g})"] = bool(
            np.all(finite[1:] <= (1 + MONOTONE_SLACK) * finite[:-1])
        )
        slope = report.fitted_slopes[x]
        if x < a:
            tol = RATE_TOL_BOUNDARY if x == 0 else RATE_TOL_INTERIOR
            report.verdicts[f"rate_ok({x:g})"] = bool(
                np.isfinite(slope) and abs(slope - plan.m * (1 - x / a)) <= tol
            )
        else:
            report.verdicts["loglaw_ok"] = _loglaw_verdict(vals, slope)

    report.details = {
        "mean_errors": {repr(x): v for x, v in means.items()},
        "theory_exponents": {repr(x): v for x, v in theory.items()},
        "quadrature_floor": {repr(float(x_nodes[j])): float(floor[j]) for j in probes},
        "floor_flagged_rows": len(flagged),
        "non_converged_rows": sum(not r.converged for r in report.rows),
        "epsilons": list(plan.epsilons),
        "noise": noise,
    }
    report.runtime_ms = elapsed()
    return report


def _loglaw_verdict(mean_errors, slope) -> bool:
    vals = np.asarray(mean_errors)
    if not np.all(np.isfinite(vals)) or not np.isfinite(slope):
        return False
    return bool(np.all(vals[1:] < vals[:-1]) and slope <= LOGLAW_MAX_SLOPE)


def run_loglaw_check(recipe, constants: ProblemSpec, plan: SweepPlan, disc: Discretization) -> StudyReport:
    """Logarithmic-only decay at ``x = a``, compared against the interior point ``a/2``."""
    if len(plan.epsilons) < 2:
        raise StudyError("the log-law check needs at least two noise levels to fit")
    a = constants.a
    plan = replace(plan, probe_x=(a / 2, a))
    rep = run_convergence_study(recipe, constants, plan, disc)
    rep.kind = "loglaw"
    keep = {"loglaw_ok": rep.verdicts["loglaw_ok"]}
    interior = rep.fitted_slopes[a / 2]
    rep.details["interior_slope"] = interior
    rep.details["interior_faster"] = bool(interior >= LOGLAW_MAX_SLOPE)
    rep.verdicts = keep
    return rep


def stability_bound(spec: ProblemSpec, reg: RegularizationConfig, cfg: BasisConfig, x, delta0, delta1):
    """Right-hand side of the explicit stability estimate at ``x``."""
    p = KernelParams(alpha=1.0, a=spec.a, k=reg.k, beta=reg.beta)
    alpha = min(spec.alpha1, spec.alpha2)
    lam1 = eigenvalue(1, cfg)
    _, _, C = lipschitz_constants(spec)
    x = np.asarray(x, dtype=float)
    return growth_factor(p, x) * (delta0 + 2.0 / (alpha * lam1) * delta1) * np.exp(
        2.0 * C * x / (alpha * lam1)
    )


def run_stability_check(
    spec: ProblemSpec,
    data: CauchyData,
    reg: RegularizationConfig,
    disc: Discretization,
    seeds: tuple[int, int],
    epsilon: float,
) -> StudyReport:
    """Two noisy samples, two solves, and the explicit bound on their squared distance."""
    elapsed = _timer()
    report = StudyReport(kind="stability")
    p = KernelParams(alpha=1.0, a=spec.a, k=reg.k, beta=reg.beta)
    # the estimate assumes the growth factor is >= 1 on all of [0, a]
    applicable = reg.beta < 1 and p.hypothesis_ok and log_growth(p) >= 0
    s1, s2 = seeds
    A = make_noisy(data, epsilon, s1)
    B = make_noisy(data, epsilon, s2)
    solved = []
    for seed, sample in ((s1, A), (s2, B)):
        traj, diag = solve_regularized(spec, sample.data, reg, disc)
        if not diag.converged:
            raise DivergenceError(f"solve for seed {seed} did not converge")
        solved.append((traj, diag))
    (ta, da), (tb, db) = solved
    d = trajectory_error(ta, tb) ** 2
    ca, cb = A.data.as_array(), B.data.as_array()
    delta0 = float(np.sum((ca[0] - cb[0]) ** 2) + np.sum((ca[2] - cb[2]) ** 2))
    delta1 = float(np.sum((ca[1] - cb[1]) ** 2) + np.sum((ca[3] - cb[3]) ** 2))
    iters = max(da.iterations, db.iterations)
    for x, dx in zip(ta.x_nodes, d):
        report.rows.append(Row(epsilon, s1, float(x), float(dx), reg.beta, iters, True))
    if applicable:
        bound = stability_bound(spec, reg, disc.basis, ta.x_nodes, delta0, delta1)
        violations = int(np.sum(d > bound))
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(bound > 0, d / bound, 0.0)
        report.verdicts["theorem3_ok"] = violations == 0
        report.details.update(
            violations=violations,
            max_ratio=float(np.max(ratio)),
            bound_at_a=float(bound[-1]),
        )
    else:
        report.verdicts["theorem3_applicable"] = False
        report.details["status"] = "inapplicable"
    report.details.update(seeds=[s1, s2], delta0=delta0, delta1=delta1, max_d=float(np.max(d)))
    report.runtime_ms = elapsed()
    return report


def run_lemma_sweep(
    a: float,
    k_values,
    beta_values,
    n_max: int,
    alpha=1.0,
    n_x: int = 21,
    b: float = np.pi,
) -> StudyReport:
    """Check the filter and its shifted form against their envelopes on a parameter grid.

    ``alpha`` may be a scalar or a sequence.  (k, beta) pairs violating the
    hypothesis are skipped and counted.
    """
    elapsed = _timer()
    report = StudyReport(kind="lemma")
    alphas = np.atleast_1d(np.asarray(alpha, dtype=float))
    lam = eigenvalues(BasisConfig(b=b, n_modes=n_max))
    x = np.linspace(0.0, a, n_x)
    skipped = 0
    max_ratio = 0.0
    max_shift_ratio = 0.0
    violations = 0
    shift_violations = 0
    # lag grid for the shifted form: x - xi over all node pairs with xi <= x
    xx, xi = np.meshgrid(x, x, indexing="ij")
    lower = xi <= xx
    r = (xx - xi)[lower]
    for k in k_values:
        for beta in beta_values:
            p0 = KernelParams(alpha=1.0, a=a, k=float(k), beta=float(beta))
            if not p0.hypothesis_ok:
                skipped += 1
                continue
            lg = log_growth(p0)
            bound_x = 0.5 * np.exp(lg * x / a)
            bound_r = 0.5 * np.exp(lg * r / a)
            row_max = np.zeros_like(x)
            for al in alphas:
                p = replace(p0, alpha=float(al))
                s = np.sqrt(al * lam)[:, None]
                ratio = _psi(p, s, x[None, :]) / bound_x
                # shifted: numerator exp(-s(a - x + xi)) equals psi at lag x - xi
                sratio = _psi(p, s, r[None, :]) / bound_r
                violations += int(np.sum(ratio > 1))
                shift_violations += int(np.sum(sratio > 1))
                max_ratio = max(max_ratio, float(ratio.max()))
                max_shift_ratio = max(max_shift_ratio, float(sratio.max()))
                row_max = np.maximum(row_max, ratio.max(axis=0))
            for xv, rv in zip(x, row_max):
                report.rows.append(Row(float("nan"), 0, float(xv), float(rv), float(beta), 0, True))
    report.verdicts["lemma1_ok"] = violations == 0 and max_ratio <= 1.0
    report.verdicts["shifted_ok"] = shift_violations == 0 and max_shift_ratio <= 1.0
    report.details = {
        "max_ratio": max_ratio,
        "max_shifted_ratio": max_shift_ratio,
        "violations": violations,
        "shifted_violations": shift_violations,
        "hypothesis_skipped": skipped,
        "n_max": n_max,
        "alphas": alphas.tolist(),
    }
    report.runtime_ms = elapsed()
    return report


def run_blowup_contrast(
    recipe,
    constants: ProblemSpec,
    epsilon: float,
    disc: Discretization,
    seed: int,
    m: float = 1.0,
    k: float = 1.0,
) -> StudyReport:
    """Unregularized versus regularized error at ``x = a`` on one noisy sample."""
    elapsed = _timer()
    cfg = disc.basis
    alpha = min(constants.alpha1, constants.alpha2)
    top_rate = math.sqrt(alpha * eigenvalue(cfg.n_modes, cfg)) * constants.a
    if top_rate < 30:
        raise ConfigurationError(
            f"blow-up contrast needs sqrt(alpha lambda_N) a >= 30, got {top_rate:.3g}; raise n_modes"
        )
    spec, data, truth = manufactured_problem(recipe, constants, disc)
    sample = make_noisy(data, epsilon, seed)
    reg = RegularizationConfig(epsilon, m, k)
    exact, mdiag = evaluate_exact_mild(spec, sample.data, truth, disc)
    regd, diag = solve_regularized(spec, sample.data, reg, disc)
    e_exact = trajectory_error(exact, truth)
    e_reg = trajectory_error(regd, truth)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ratio = float(e_exact[-1] / e_reg[-1]) if e_reg[-1] > 0 else float("inf")
    report = StudyReport(kind="blowup")
    a = float(truth.x_nodes[-1])
    report.rows.append(Row(epsilon, seed, a, float(e_exact[-1]), 0.0, 0, True))
    report.rows.append(Row(epsilon, seed, a, float(e_reg[-1]), reg.beta, diag.iterations, diag.converged))
    ok = mdiag.saturated or (np.isfinite(ratio) and ratio >= BLOWUP_MIN_RATIO) or ratio == float("inf")
    report.verdicts["blowup_ok"] = bool(ok and diag.converged)
    report.details = {
        "exact_error_at_a": float(e_exact[-1]),
        "regularized_error_at_a": float(e_reg[-1]),
        "ratio": ratio,
        "saturated": mdiag.saturated,
        "saturation_notes": list(mdiag.notes),
        "top_rate": top_rate,
        "regularized_converged": diag.converged,
    }
    report.runtime_ms = elapsed()
    return report
