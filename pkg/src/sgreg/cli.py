"""Command-line front end: ``sgreg verify | solve | study <kind>``.

Exit codes: 0 pass, 2 configuration error, 3 solver non-convergence,
4 study verdict failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

from .checks import invariant_suite
from .config import RunConfig, default_config, load_config
from .errors import ConfigurationError, DivergenceError, StudyError
from .experiments import (
    run_blowup_contrast,
    run_convergence_study,
    run_lemma_sweep,
    run_loglaw_check,
    run_stability_check,
)
from .manufactured import manufactured_problem
from .model import make_noisy
from .solver import solve_regularized, trajectory_error

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NONCONVERGED = 3
EXIT_VERDICT = 4

STUDY_KINDS = ("convergence", "stability", "loglaw", "blowup")

log = logging.getLogger("sgreg")


def write_atomic(path: Path, text: str) -> None:
    """Write via a temp file in the same directory and rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else default_config()
    if args.out is not None:
        cfg = replace(cfg, output=replace(cfg.output, dir=args.out))
    if args.seed is not None:
        cfg = replace(cfg, regularization=replace(cfg.regularization, seed=args.seed))
    return cfg


def _verdict_line(verdicts: dict) -> str:
    return "  ".join(f"{k}={'PASS' if v else 'FAIL'}" for k, v in verdicts.items())


def cmd_verify(cfg: RunConfig) -> int:
    spec = cfg.problem_spec()
    v = cfg.verify
    lemma = run_lemma_sweep(
        spec.a, v.k_values, v.beta_values, v.n_max, alpha=v.alpha_values, b=spec.b
    )
    verdicts = dict(lemma.verdicts)
    verdicts.update(invariant_suite(spec, cfg.basis()))
    out = Path(cfg.output.dir)
    write_atomic(out / "verify.json", json.dumps(
        {"verdicts": verdicts, "lemma": lemma.summary()}, indent=2, sort_keys=True
    ))
    print(_verdict_line(verdicts))
    return EXIT_OK if all(verdicts.values()) else EXIT_VERDICT


def cmd_solve(cfg: RunConfig) -> int:
    disc = cfg.discretization_obj()
    reg = cfg.regularization_obj()
    r = cfg.regularization
    spec, data, truth = manufactured_problem(cfg.problem.recipe, cfg.problem_spec(), disc)
    if r.add_noise:
        data = make_noisy(data, r.epsilon, r.seed).data
    traj, diag = solve_regularized(spec, data, reg, disc)

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("x", "mode", "u_coeff", "v_coeff"))
    for j, x in enumerate(traj.x_nodes):
        for n in range(traj.u.shape[1]):
            w.writerow((repr(float(x)), n + 1, repr(float(traj.u[j, n])), repr(float(traj.v[j, n]))))
    out = Path(cfg.output.dir)
    write_atomic(out / "trajectory.csv", buf.getvalue())
    err = trajectory_error(traj, truth)
    summary = {
        "converged": diag.converged,
        "iterations": diag.iterations,
        "successive_diffs": diag.successive_diffs,
        "residual": diag.residual,
        "epsilon": r.epsilon,
        "beta": reg.beta,
        "seed": r.seed,
        "noisy": r.add_noise,
        "recipe": cfg.problem.recipe,
        "max_error_vs_truth": float(err.max()),
        "error_at_a": float(err[-1]),
    }
    write_atomic(out / "diagnostics.json", json.dumps(summary, indent=2, sort_keys=True))
    print(
        f"converged={diag.converged} iterations={diag.iterations} "
        f"residual={diag.residual:.3e} max_error={err.max():.3e}"
    )
    return EXIT_OK if diag.converged else EXIT_NONCONVERGED


def cmd_study(kind: str, cfg: RunConfig) -> int:
    disc = cfg.discretization_obj()
    reg = cfg.regularization_obj()
    constants = cfg.problem_spec()
    recipe = cfg.problem.recipe
    plan = cfg.plan_obj()
    r = cfg.regularization
    if kind in ("convergence", "loglaw") and len(plan.epsilons) < 2:
        raise ConfigurationError(f"plan.epsilons: the {kind} study needs at least two noise levels")
    if kind == "convergence":
        report = run_convergence_study(recipe, constants, plan, disc)
    elif kind == "loglaw":
        report = run_loglaw_check(recipe, constants, plan, disc)
    elif kind == "stability":
        spec, data, _ = manufactured_problem(recipe, constants, disc)
        report = run_stability_check(spec, data, reg, disc, tuple(cfg.plan.stability_seeds), r.epsilon)
    elif kind == "blowup":
        report = run_blowup_contrast(recipe, constants, r.epsilon, disc, r.seed, m=r.m, k=r.k)
    else:
        raise ConfigurationError(f"unknown study kind {kind!r}")

    out = Path(cfg.output.dir)
    write_atomic(out / f"study_{kind}.csv", report.to_csv())
    write_atomic(out / f"study_{kind}.json", report.to_json())
    if report.fitted_slopes:
        lines = ["x,slope"] + [f"{x!r},{s!r}" for x, s in sorted(report.fitted_slopes.items())]
        write_atomic(out / f"study_{kind}_slopes.csv", "\n".join(lines) + "\n")
    print(_verdict_line(report.verdicts))
    return EXIT_OK if report.passed else EXIT_VERDICT


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML run configuration (default: the shipped config)")
    common.add_argument("--out", help="output directory (overrides output.dir)")
    common.add_argument("--seed", type=int, help="override regularization.seed")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="sgreg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="kernel bound sweep and invariant suites")
    sub.add_parser("solve", parents=[common], help="single regularized solve")
    st = sub.add_parser("study", parents=[common], help="run a verification study")
    st.add_argument("kind", choices=STUDY_KINDS)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = _load(args)
        if args.command == "verify":
            return cmd_verify(cfg)
        if args.command == "solve":
            return cmd_solve(cfg)
        return cmd_study(args.kind, cfg)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"solver did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGED
    except StudyError as exc:
        print(f"study failed: {exc}", file=sys.stderr)
        return EXIT_VERDICT


if __name__ == "__main__":
    sys.exit(main())
