"""Per-evaluation regret traces and their on-disk format.

A trace has exactly one record per oracle evaluation: the candidate point
the optimizer would report at that time, its true (noiseless) objective
value and simple regret, the noisy observation received, and whether the
evaluated point violated the true constraint.  Traces serialize to plain
CSV (floats at 17 significant digits, so files round-trip exactly and are
byte-identical across reruns) with a JSON metadata sidecar.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .benchmarks import NoiseModel, ObjectiveSpec

__all__ = ["RegretTrace", "TraceRecorder"]

_FLOAT_FMT = "{:.17g}"


@dataclass(eq=False)
class RegretTrace:
    """Immutable record of one optimization run."""

    candidate: np.ndarray   # (n_evals, d)
    y_noisy: np.ndarray     # (n_evals,)
    true_f: np.ndarray      # (n_evals,)
    regret: np.ndarray      # (n_evals,)
    violation: np.ndarray   # (n_evals,) bool
    metadata: dict = field(default_factory=dict)

    @property
    def n_evals(self) -> int:
        return self.candidate.shape[0]

    @property
    def dim(self) -> int:
        return self.candidate.shape[1]

    def to_csv(self, path) -> None:
        """Write the trace as CSV; metadata goes to a ``.json`` sidecar."""
        path = Path(path)
        header = (["eval_index"] + [f"x{i}" for i in range(self.dim)]
                  + ["y_noisy", "true_f", "regret", "violation"])
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for t in range(self.n_evals):
                row = [str(t)]
                row += [_FLOAT_FMT.format(v) for v in self.candidate[t]]
                row += [_FLOAT_FMT.format(self.y_noisy[t]),
                        _FLOAT_FMT.format(self.true_f[t]),
                        _FLOAT_FMT.format(self.regret[t]),
                        str(int(self.violation[t]))]
                writer.writerow(row)
        with path.with_suffix(".json").open("w") as fh:
            json.dump(self.metadata, fh, indent=2, sort_keys=True, default=_jsonable)
            fh.write("\n")

    @classmethod
    def from_csv(cls, path) -> "RegretTrace":
        path = Path(path)
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            dim = sum(1 for name in header if name.startswith("x"))
            rows = list(reader)
        candidate = np.array([[float(v) for v in row[1:1 + dim]] for row in rows])
        y_noisy = np.array([float(row[1 + dim]) for row in rows])
        true_f = np.array([float(row[2 + dim]) for row in rows])
        regret = np.array([float(row[3 + dim]) for row in rows])
        violation = np.array([bool(int(row[4 + dim])) for row in rows])
        metadata = {}
        sidecar = path.with_suffix(".json")
        if sidecar.exists():
            metadata = json.loads(sidecar.read_text())
        return cls(candidate=candidate, y_noisy=y_noisy, true_f=true_f,
                   regret=regret, violation=violation, metadata=metadata)


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    raise TypeError(f"cannot serialize {type(value)!r}")


class TraceRecorder:
    """Accumulates one record per oracle evaluation during a run.

    True objective and constraint values come from the benchmark's ground
    truth and are used for reporting only, never fed back into the
    optimizer.
    """

    def __init__(self, objective: ObjectiveSpec, noise: NoiseModel | None = None):
        self.objective = objective
        self.noise = noise
        self._candidates: list[np.ndarray] = []
        self._y: list[float] = []
        self._true_f: list[float] = []
        self._violations: list[bool] = []

    @property
    def n_records(self) -> int:
        return len(self._y)

    def record(self, x_eval, y_noisy: float, candidate) -> None:
        candidate = np.asarray(candidate, dtype=float)
        self._candidates.append(candidate.copy())
        self._y.append(float(y_noisy))
        self._true_f.append(float(self.objective.truth(candidate)))
        violated = (self.objective.constraint is not None
                    and float(self.objective.constraint(x_eval)) > 0)
        self._violations.append(violated)

    def finalize(self, metadata: dict | None = None) -> RegretTrace:
        true_f = np.array(self._true_f)
        meta = dict(metadata or {})
        meta.setdefault("violations_total", int(sum(self._violations)))
        return RegretTrace(
            candidate=np.array(self._candidates).reshape(len(self._y), -1),
            y_noisy=np.array(self._y),
            true_f=true_f,
            regret=true_f - self.objective.f_star,
            violation=np.array(self._violations, dtype=bool),
            metadata=meta,
        )
