from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from ..matrix_io import matrix_to_json

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"

TAU_PSD = 1e-9
# violations below this magnitude are reported as inconclusive, not fail
WITNESS_THRESHOLD = 1e-4


@dataclass
class MonotonicityVerdict:
    """Outcome of a randomised monotonicity check.

    ``witness`` is present whenever ``status`` is ``"fail"`` (and for
    ``"inconclusive"``) and holds enough data to recompute the violation
    from scratch.
    """

    test: str
    status: str
    trials: int
    tolerance: float
    worst: float
    witness: dict | None = None
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def as_dict(self) -> dict:
        return {
            "test": self.test,
            "status": self.status,
            "trials": self.trials,
            "tolerance": self.tolerance,
            "worst": self.worst,
            "witness": jsonable(self.witness),
            "info": jsonable(self.info),
        }


def jsonable(obj: Any):
    if obj is None or isinstance(obj, (bool, str, int)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if obj.ndim == 2 and obj.shape[0] == obj.shape[1] and np.iscomplexobj(obj):
            return matrix_to_json(obj)
        if np.iscomplexobj(obj):
            return [[float(z.real), float(z.imag)] for z in obj.ravel()]
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return str(obj)


def classify(violations: list[float], threshold: float = WITNESS_THRESHOLD) -> tuple[str, int | None]:
    """Status and index of the worst trial, given per-trial violations
    (positive = beyond tolerance, ``nan`` or <= 0 = within)."""
    v = np.array([x if x is not None else np.nan for x in violations], dtype=float)
    if v.size == 0 or not np.any(v > 0):
        return PASS, None
    worst = int(np.nanargmax(v))
    return (FAIL if v[worst] > threshold else INCONCLUSIVE), worst


def trial_rngs(seed, n: int) -> list[np.random.Generator]:
    """Independent generator per trial, so results do not depend on ``jobs``."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def run_trials(fn: Callable[[np.random.Generator], Any], seed, n: int, jobs: int = 1) -> list:
    rngs = trial_rngs(seed, n)
    if jobs <= 1:
        return [fn(r) for r in rngs]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, rngs))
