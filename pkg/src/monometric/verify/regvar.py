"""Numerical index of regular variation.

``h`` is regularly varying of index ``p`` at the origin when
``h(tx) / h(x) -> t^p`` as ``x -> 0+`` for every ``t > 0``. The estimator
evaluates ``log(h(tx) / h(x)) / log t`` along a geometric sequence toward
the limit point and averages the tail of the sequence. Slowly varying
factors such as ``log x`` converge only like ``1 / |log x|``, which shows
up in ``stderr`` instead of being smoothed away.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .._grammar import parse_spec
from ..cm_kernel import read_table, tabulated
from ..exceptions import DomainError, ValidationError
from ..pullback import wyd_pair

__all__ = ["RVEstimate", "rv_index", "lookup_h", "default_sequence"]

DEFAULT_T_GRID = (0.1, 0.5, 2.0, 10.0)


@dataclass
class RVEstimate:
    index_p: float
    stderr: float
    samples: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "index_p": self.index_p,
            "stderr": self.stderr,
            "samples": [[float(x), float(t), float(r)] for x, t, r in self.samples],
        }


def default_sequence(side: str, n: int = 20, ratio: float = 10.0, first: float | None = None) -> np.ndarray:
    """Geometric sequence of ``n`` terms toward ``0`` or ``+inf``; the first
    term defaults to ``1/ratio`` (resp. ``ratio``)."""
    if ratio <= 1.0:
        raise ValidationError("sequence ratio must be > 1")
    k = np.arange(n, dtype=float)
    if side == "zero":
        return (1.0 / ratio if first is None else first) * ratio ** (-k)
    if side == "infinity":
        return (ratio if first is None else first) * ratio**k
    raise ValidationError(f"side must be 'zero' or 'infinity', got {side!r}")


def rv_index(h, side: str = "zero", t_grid=DEFAULT_T_GRID, x_sequence=None,
             plateau: int = 5) -> RVEstimate:
    """Estimate the index of regular variation of ``h`` at ``0+`` or ``+inf``.

    Parameters
    ----------
    h : callable
        Vectorised, positive on the sampled points.
    side : {"zero", "infinity"}
    t_grid : sequence of float
        Scale factors ``t`` (``t != 1``).
    x_sequence : array_like, optional
        Points approaching the limit, ordered toward it. Defaults to
        ``10^-1 ... 10^-20`` (or ``10^1 ... 10^20``).
    plateau : int
        Number of final sequence points averaged.
    """
    xs = default_sequence(side) if x_sequence is None else np.asarray(x_sequence, dtype=float)
    ts = np.asarray(t_grid, dtype=float)
    if np.any(ts <= 0) or np.any(ts == 1.0):
        raise ValidationError("t values must be positive and != 1")
    if plateau < 1 or plateau > len(xs):
        raise ValidationError(f"plateau must be between 1 and {len(xs)}")
    samples = []
    tail = []
    for i, x in enumerate(xs):
        hx = _positive(h, x)
        for t in ts:
            ratio = float(np.log(_positive(h, t * x) / hx) / np.log(t))
            samples.append((float(x), float(t), ratio))
            if i >= len(xs) - plateau:
                tail.append(ratio)
    tail = np.array(tail)
    return RVEstimate(float(tail.mean()), float(tail.std()), samples)


def _positive(h, x: float) -> float:
    with np.errstate(all="ignore"):
        v = float(np.asarray(h(np.array([x])), dtype=float).ravel()[0])
    if not np.isfinite(v) or v <= 0:
        raise DomainError(f"h must be positive and finite, got h({x:g}) = {v}")
    return v


def lookup_h(spec: str):
    """Named test functions for the CLI.

    ``power:p=`` gives ``x^p``; ``powerlog:p=`` gives ``x^p (1 + |log x|)``;
    ``log`` gives ``log(1/x)``; ``wyd-product:p=`` gives ``phi_p(x) chi_p(x)``;
    ``table:<csv with x,h>`` interpolates in log-log space.
    """
    name, params = parse_spec(spec)
    if name == "log" and not params:
        return lambda x: np.log(1.0 / np.asarray(x, dtype=float))
    if name == "table":
        data = read_table(params["path"], 2)
        return tabulated(data[:, 0], data[:, 1], name=spec)
    if set(params) != {"p"}:
        raise ValidationError(f"unknown h spec {spec!r}")
    p = params["p"]
    if name == "power":
        return lambda x: np.asarray(x, dtype=float) ** p
    if name == "powerlog":
        return lambda x: np.asarray(x, dtype=float) ** p * (1.0 + np.abs(np.log(x)))
    if name == "wyd-product":
        pair = wyd_pair(p)
        return lambda x: pair.phi(x) * pair.chi(x)
    raise ValidationError(f"unknown h spec {spec!r}")
