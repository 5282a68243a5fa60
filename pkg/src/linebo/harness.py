"""Experiment configuration, orchestration, and the random-search baseline.

Configs are INI files with sections ``[objective]``, ``[method]``,
``[kernel]``, ``[solver]``, ``[noise]``, ``[init]``; unknown sections or
keys are errors.  One run produces one trace CSV plus a JSON metadata
sidecar; an experiment produces one file pair per seed plus an aggregate
JSON with per-evaluation mean/median regret and standard error across
seeds.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .benchmarks import NoiseModel, ObjectiveSpec, make_objective, noisy_eval
from .exceptions import ConfigError
from .kernels import make_kernel
from .optimizer import LineBO
from .trace import RegretTrace, TraceRecorder

__all__ = ["ExperimentConfig", "parse_config", "random_search", "run_single",
           "run_experiment", "aggregate_traces", "aggregate_directory", "METHODS"]

#: Method name -> LineBO settings (random-search is handled separately).
METHODS = {
    "random-search": None,
    "linebo-random": {"direction": "random", "safe": False},
    "linebo-coordinate": {"direction": "coordinate", "safe": False},
    "linebo-descent": {"direction": "descent", "safe": False},
    "safelinebo-random": {"direction": "random", "safe": True},
    "safelinebo-coordinate": {"direction": "coordinate", "safe": True},
    "safelinebo-descent": {"direction": "descent", "safe": True},
}

#: GP likelihood noise is floored here so noiseless experiments stay
#: numerically well posed.
MODEL_NOISE_FLOOR = 1e-4


@dataclass
class ExperimentConfig:
    """Fully resolved experiment description (defaults match the INI schema)."""

    objective_name: str
    method: str
    budget: int = 400
    seeds: tuple = (0,)
    dim: int = 10
    augment_dims: int = 0
    augment_seed: int = 0
    constraint_tau: float | None = None
    constraint_flip: bool = False
    kernel_family: str = "rbf"
    lengthscale: float = 1.0
    variance: float = 1.0
    epsilon: float = 0.05
    beta: float = 2.0
    grid_size: int = 200
    max_evals_per_line: int = 30
    buffer_cap: int = 2000
    noise_std: float = 0.2
    init_mode: str = "uniform"
    init_level: float | None = None
    lipschitz: float | None = None
    coordinate_policy: str = "cycle"
    descent_step: float = 0.1
    descent_evals: int | None = None
    descent_switch_norm: float = 1e-6
    descent_normalize: bool = True

    def __post_init__(self):
        self.seeds = tuple(int(s) for s in self.seeds)
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; choose from {sorted(METHODS)}")
        if self.budget < 1:
            raise ConfigError(f"budget must be >= 1, got {self.budget}")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if self.init_mode not in ("uniform", "uniform-safe", "levelset"):
            raise ConfigError(f"unknown init mode {self.init_mode!r}")
        if self.init_mode == "levelset" and self.init_level is None:
            raise ConfigError("levelset initialization requires an init level")
        if METHODS[self.method] and METHODS[self.method]["safe"] and self.lipschitz is None:
            raise ConfigError(f"method {self.method!r} requires a lipschitz constant")

    @property
    def repeats(self) -> int:
        return len(self.seeds)

    def objective(self) -> ObjectiveSpec:
        try:
            return make_objective(self.objective_name, dim=self.dim,
                                  augment_dims=self.augment_dims,
                                  augment_seed=self.augment_seed,
                                  tau=self.constraint_tau,
                                  constraint_flip=self.constraint_flip)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def noise(self) -> NoiseModel:
        return NoiseModel(std=self.noise_std)

    def build_optimizer(self) -> LineBO:
        settings = METHODS[self.method]
        if settings is None:
            raise ConfigError("random-search is not a LineBO method")
        kernel = make_kernel(self.kernel_family, self.lengthscale, self.variance)
        return LineBO(kernel=kernel,
                      noise_std=max(self.noise_std, MODEL_NOISE_FLOOR),
                      beta=self.beta, epsilon=self.epsilon, budget=self.budget,
                      max_evals_per_line=self.max_evals_per_line,
                      grid_size=self.grid_size,
                      direction=settings["direction"],
                      coordinate_policy=self.coordinate_policy,
                      descent_step=self.descent_step,
                      descent_evals=self.descent_evals,
                      descent_switch_norm=self.descent_switch_norm,
                      descent_normalize=self.descent_normalize,
                      safe=settings["safe"], lipschitz=self.lipschitz,
                      buffer_cap=self.buffer_cap)

    def config_hash(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True, default=str)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def run_name(self) -> str:
        return f"{self.method}_{self.objective_name}".replace("/", "-")


# ----------------------------------------------------------------------
# INI parsing
# ----------------------------------------------------------------------

def _to_int(raw):
    return int(raw)


def _to_float(raw):
    return float(raw)


def _to_bool(raw):
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _to_str(raw):
    return raw.strip()


def _to_seeds(raw):
    return tuple(int(part) for part in raw.replace(" ", "").split(",") if part)


_SCHEMA = {
    "objective": {
        "name": ("objective_name", _to_str),
        "dim": ("dim", _to_int),
        "augment_dims": ("augment_dims", _to_int),
        "augment_seed": ("augment_seed", _to_int),
        "constraint_tau": ("constraint_tau", _to_float),
        "constraint_flip": ("constraint_flip", _to_bool),
    },
    "method": {
        "name": ("method", _to_str),
        "budget": ("budget", _to_int),
        "seeds": ("seeds", _to_seeds),
        "repeats": ("_repeats", _to_int),
        "lipschitz": ("lipschitz", _to_float),
        "coordinate_policy": ("coordinate_policy", _to_str),
        "descent_step": ("descent_step", _to_float),
        "descent_evals": ("descent_evals", _to_int),
        "descent_switch_norm": ("descent_switch_norm", _to_float),
        "descent_normalize": ("descent_normalize", _to_bool),
    },
    "kernel": {
        "family": ("kernel_family", _to_str),
        "lengthscale": ("lengthscale", _to_float),
        "variance": ("variance", _to_float),
    },
    "solver": {
        "epsilon": ("epsilon", _to_float),
        "beta": ("beta", _to_float),
        "grid_size": ("grid_size", _to_int),
        "max_evals_per_line": ("max_evals_per_line", _to_int),
        "buffer_cap": ("buffer_cap", _to_int),
    },
    "noise": {
        "std": ("noise_std", _to_float),
    },
    "init": {
        "mode": ("init_mode", _to_str),
        "level": ("init_level", _to_float),
    },
}


def parse_config(path, seeds=None, method=None, budget=None) -> ExperimentConfig:
    """Parse an INI experiment config, with optional CLI overrides.

    Unknown sections, unknown keys, and malformed values raise
    :class:`ConfigError`.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        read = parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not read:
        raise ConfigError(f"config file not found: {path}")

    fields: dict = {}
    repeats_declared = None
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            name, convert = _SCHEMA[section][key]
            try:
                value = convert(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for [{section}] {key} = {raw!r}: {exc}") from exc
            if name == "_repeats":
                repeats_declared = value
            else:
                fields[name] = value

    if "objective_name" not in fields:
        raise ConfigError("missing [objective] name")
    if "method" not in fields:
        raise ConfigError("missing [method] name")

    if seeds is not None:
        fields["seeds"] = _to_seeds(seeds) if isinstance(seeds, str) else tuple(seeds)
    if method is not None:
        fields["method"] = method
    if budget is not None:
        fields["budget"] = int(budget)

    cfg = ExperimentConfig(**fields)
    if repeats_declared is not None and repeats_declared != cfg.repeats:
        raise ConfigError(
            f"repeats = {repeats_declared} does not match the {cfg.repeats} seeds given")
    return cfg


# ----------------------------------------------------------------------
# runs
# ----------------------------------------------------------------------

def random_search(objective: ObjectiveSpec, noise: NoiseModel, budget: int,
                  seed: int = 0) -> RegretTrace:
    """Uniform random search reporting the best noisy observation so far.

    The candidate at each step is the point of the lowest *observed* value,
    with no control of the noise, so under noise the reported candidate can
    regress in true value.
    """
    if budget < 1:
        raise ValueError(f"budget must be >= 1, got {budget}")
    alg_ss, noise_ss = np.random.SeedSequence(seed).spawn(2)
    rng = np.random.default_rng(alg_ss)
    noise_rng = np.random.default_rng(noise_ss)
    recorder = TraceRecorder(objective, noise)
    started = time.perf_counter()
    best_y = np.inf
    best_x = None
    for _ in range(budget):
        x = objective.domain.sample_uniform(rng)
        y, _ = noisy_eval(objective, noise, x, noise_rng)
        if y < best_y:
            best_y, best_x = y, x
        recorder.record(x, y, best_x)
    return recorder.finalize({
        "objective": objective.name,
        "budget": budget,
        "seed": seed,
        "wall_time_s": time.perf_counter() - started,
    })


def run_single(cfg: ExperimentConfig, seed: int) -> RegretTrace:
    """Execute one seeded run of the configured method."""
    objective = cfg.objective()
    noise = cfg.noise()
    if cfg.method == "random-search":
        trace = random_search(objective, noise, cfg.budget, seed=seed)
    else:
        optimizer = cfg.build_optimizer()
        trace = optimizer.minimize(objective, noise=noise, init=cfg.init_mode,
                                   level=cfg.init_level, seed=seed)
    trace.metadata["method"] = cfg.method
    trace.metadata["config_hash"] = cfg.config_hash()
    return trace


def run_experiment(cfg: ExperimentConfig, out_dir) -> dict:
    """Run every seed, write per-run trace files, and aggregate the results.

    Failed runs are recorded (not raised) and excluded from the aggregate,
    which reports their count.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    traces = []
    trace_paths = []
    failures = []
    for seed in cfg.seeds:
        try:
            trace = run_single(cfg, seed)
        except Exception as exc:  # noqa: BLE001 - per-run isolation is the contract
            failures.append({"seed": seed, "error": f"{type(exc).__name__}: {exc}"})
            continue
        path = out / f"{cfg.run_name()}_seed{seed}.csv"
        trace.to_csv(path)
        traces.append(trace)
        trace_paths.append(path)

    aggregate = aggregate_traces(traces) if traces else {"n_runs": 0}
    aggregate["n_failed"] = len(failures)
    aggregate["failures"] = failures
    aggregate["config_hash"] = cfg.config_hash()
    aggregate_path = out / "aggregate.json"
    with aggregate_path.open("w") as fh:
        json.dump(aggregate, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return {"n_runs": len(traces), "n_failed": len(failures),
            "trace_paths": trace_paths, "aggregate_path": aggregate_path,
            "failures": failures}


def aggregate_traces(traces: list[RegretTrace]) -> dict:
    """Per-evaluation-index mean/median regret and standard error across runs."""
    if not traces:
        raise ValueError("no traces to aggregate")
    lengths = {t.n_evals for t in traces}
    if len(lengths) != 1:
        raise ValueError(f"traces have mismatched lengths: {sorted(lengths)}")
    regret = np.stack([t.regret for t in traces])
    n = regret.shape[0]
    stderr = (regret.std(axis=0, ddof=1) / np.sqrt(n) if n > 1
              else np.zeros(regret.shape[1]))
    return {
        "n_runs": n,
        "eval_index": list(range(regret.shape[1])),
        "mean_regret": regret.mean(axis=0).tolist(),
        "median_regret": np.median(regret, axis=0).tolist(),
        "stderr_regret": stderr.tolist(),
        "violations_per_run": [int(t.violation.sum()) for t in traces],
    }


def aggregate_directory(in_dir) -> dict:
    """Aggregate every trace CSV found in a directory."""
    paths = sorted(Path(in_dir).glob("*.csv"))
    if not paths:
        raise ValueError(f"no trace CSV files in {in_dir}")
    traces = [RegretTrace.from_csv(p) for p in paths]
    result = aggregate_traces(traces)
    result["sources"] = [p.name for p in paths]
    return result
