"""Run configuration: a YAML file with one section per concern.

Every key is optional and falls back to the default below; unknown keys
are rejected.  Loading re-validates all domain invariants so a config that
loads is a config that runs.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from pathlib import Path

import yaml

from .errors import ConfigurationError, HypothesisError
from .experiments import SweepPlan
from .kernel import KernelParams
from .manufactured import RECIPES
from .model import ProblemSpec
from .solver import Discretization, RegularizationConfig
from .spectral_basis import BasisConfig

DEFAULT_CONFIG = "default.yaml"


@dataclass(frozen=True)
class ProblemSection:
    a: float = 1.0
    b: float = math.pi
    alpha1: float = 1.0
    alpha2: float = 1.0
    gamma1: float = 1.0
    gamma2: float = 1.0
    delta: tuple = ((1.0, 0.5), (0.5, 1.0))
    sigma: tuple = ((0.0, 0.0), (0.0, 0.0))
    recipe: str = "decay"


@dataclass(frozen=True)
class DiscretizationSection:
    n_modes: int = 32
    n_x: int = 101
    n_quad: int = 128
    picard_tol: float = 1e-10
    picard_max_iters: int = 200


@dataclass(frozen=True)
class RegularizationSection:
    epsilon: float = 1e-2
    m: float = 1.0
    k: float = 1.0
    beta: float | None = None
    theorem_mode: bool = True
    add_noise: bool = True
    seed: int = 1


@dataclass(frozen=True)
class PlanSection:
    epsilons: tuple = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
    seeds: tuple = (1, 2, 3)
    probe_x: tuple = (0.0, 0.25, 0.5, 1.0)
    stability_seeds: tuple = (1, 2)


@dataclass(frozen=True)
class VerifySection:
    k_values: tuple = (1.0, 2.0, 3.0)
    beta_values: tuple = (1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)
    n_max: int = 200
    alpha_values: tuple = (0.5, 1.0, 2.0)


@dataclass(frozen=True)
class OutputSection:
    dir: str = "out"


SECTIONS = {
    "problem": ProblemSection,
    "discretization": DiscretizationSection,
    "regularization": RegularizationSection,
    "plan": PlanSection,
    "verify": VerifySection,
    "output": OutputSection,
}


def _coerce(path: str, value, default):
    """Coerce a YAML value to the type of ``default``; tuples recurse element-wise."""
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigurationError(f"{path}: expected true/false, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigurationError(f"{path}: expected an integer, got {value!r}")
        return value
    if isinstance(default, float) or default is None:
        if default is None and value is None:
            return None
        if isinstance(value, bool):
            raise ConfigurationError(f"{path}: expected a number, got {value!r}")
        try:
            # PyYAML reads "1e-3" (no dot) as a string
            return float(value)
        except (TypeError, ValueError):
            raise ConfigurationError(f"{path}: expected a number, got {value!r}") from None
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigurationError(f"{path}: expected a string, got {value!r}")
        return value
    if isinstance(default, tuple):
        if not isinstance(value, (list, tuple)):
            raise ConfigurationError(f"{path}: expected a list, got {value!r}")
        proto = default[0] if default else 0.0
        return tuple(_coerce(f"{path}[{i}]", v, proto) for i, v in enumerate(value))
    raise ConfigurationError(f"{path}: unsupported value {value!r}")


@dataclass(frozen=True)
class RunConfig:
    problem: ProblemSection = field(default_factory=ProblemSection)
    discretization: DiscretizationSection = field(default_factory=DiscretizationSection)
    regularization: RegularizationSection = field(default_factory=RegularizationSection)
    plan: PlanSection = field(default_factory=PlanSection)
    verify: VerifySection = field(default_factory=VerifySection)
    output: OutputSection = field(default_factory=OutputSection)

    @classmethod
    def from_dict(cls, raw) -> "RunConfig":
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise ConfigurationError("config root must be a mapping of sections")
        unknown = set(raw) - set(SECTIONS)
        if unknown:
            raise ConfigurationError(f"unknown section(s): {', '.join(sorted(unknown))}")
        kwargs = {}
        for name, section_cls in SECTIONS.items():
            body = raw.get(name) or {}
            if not isinstance(body, dict):
                raise ConfigurationError(f"{name}: section must be a mapping")
            known = {f.name: f for f in fields(section_cls)}
            bad = set(body) - set(known)
            if bad:
                raise ConfigurationError(f"{name}: unknown key(s): {', '.join(sorted(bad))}")
            defaults = section_cls()
            values = {}
            for key, val in body.items():
                values[key] = _coerce(f"{name}.{key}", val, getattr(defaults, key))
            kwargs[name] = section_cls(**values)
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        def plain(v):
            if isinstance(v, tuple):
                return [plain(x) for x in v]
            return v

        return {name: {k: plain(v) for k, v in asdict(getattr(self, name)).items()} for name in SECTIONS}

    def dump(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=None)

    def validate(self) -> None:
        if self.problem.recipe not in RECIPES:
            raise ConfigurationError(
                f"problem.recipe: unknown recipe {self.problem.recipe!r}; choose from {sorted(RECIPES)}"
            )
        for what, build in (
            ("problem", self.problem_spec),
            ("discretization", self.discretization_obj),
            ("regularization", self.regularization_obj),
            ("plan", self.plan_obj),
        ):
            try:
                build()
            except ConfigurationError:
                raise
            except (ValueError, TypeError) as exc:
                raise ConfigurationError(f"{what}: {exc}") from exc
        v = self.verify
        if v.n_max < 1 or not v.k_values or not v.beta_values or not v.alpha_values:
            raise ConfigurationError("verify: n_max >= 1 and non-empty k/beta/alpha lists required")
        if len(self.plan.stability_seeds) != 2:
            raise ConfigurationError("plan.stability_seeds: exactly two seeds required")

    def problem_spec(self) -> ProblemSpec:
        p = self.problem
        return ProblemSpec(
            a=p.a, b=p.b, alpha1=p.alpha1, alpha2=p.alpha2, gamma1=p.gamma1,
            gamma2=p.gamma2, delta=p.delta, sigma=p.sigma,
        )

    def basis(self) -> BasisConfig:
        d = self.discretization
        return BasisConfig(b=self.problem.b, n_modes=d.n_modes, n_quad=d.n_quad)

    def discretization_obj(self) -> Discretization:
        d = self.discretization
        return Discretization(
            basis=self.basis(), n_x=d.n_x, picard_tol=d.picard_tol, picard_max_iters=d.picard_max_iters
        )

    def regularization_obj(self) -> RegularizationConfig:
        r = self.regularization
        beta = r.beta if r.beta is not None else r.epsilon**r.m if r.epsilon > 0 else None
        if r.theorem_mode and beta is not None and beta > 0 and r.k >= 1:
            try:
                KernelParams(alpha=1.0, a=self.problem.a, k=r.k, beta=beta).require_hypothesis()
            except HypothesisError as exc:
                raise ConfigurationError(f"regularization.beta: {exc}") from exc
        try:
            reg = RegularizationConfig(
                epsilon=r.epsilon, m=r.m, k=r.k, beta=r.beta, theorem_mode=r.theorem_mode
            )
        except ConfigurationError as exc:
            raise ConfigurationError(f"regularization: {exc}") from exc
        reg.check(self.problem.a)
        return reg

    def plan_obj(self) -> SweepPlan:
        r = self.regularization
        plan = SweepPlan(
            epsilons=self.plan.epsilons, m=r.m, k=r.k, seeds=self.plan.seeds, probe_x=self.plan.probe_x
        )
        try:
            plan.check(self.problem.a)
        except ConfigurationError as exc:
            raise ConfigurationError(f"plan.probe_x: {exc}") from exc
        return plan


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    return loads_config(text, source=str(path))


def loads_config(text: str, source: str = "<string>") -> RunConfig:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigurationError(f"{source}: malformed YAML{where}: {problem}") from exc
    try:
        return RunConfig.from_dict(raw)
    except ConfigurationError as exc:
        raise ConfigurationError(f"{source}: {exc}") from exc


def default_config_text() -> str:
    return resources.files("sgreg").joinpath("data", DEFAULT_CONFIG).read_text()


def default_config() -> RunConfig:
    return loads_config(default_config_text(), source=DEFAULT_CONFIG)
