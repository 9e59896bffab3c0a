"""Numerical characterisation of embedding pairs.

A pair ``(phi, chi)`` induces a paired monotone metric when the product of
divided differences ``c(x, y) = phi^(x, y) chi^(x, y)`` is the CM kernel of
a normalised symmetric operator monotone function. :func:`characterize_pair`
checks the necessary conditions one by one on sampled grids and reports
each with its worst residual, so a failing pair always names the condition
it breaks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..cm_kernel import check_normalized_symmetric, from_callable
from ..exceptions import ValidationError
from ..pullback import EmbeddingPair
from .opmono import loewner_test

__all__ = ["CheckResult", "PairCharacterization", "normalize_pair", "characterize_pair"]


def normalize_pair(pair: EmbeddingPair) -> EmbeddingPair:
    """Canonical representative ``((phi - phi(1)) / phi'(1), (chi - chi(1)) phi'(1))``.

    The product of slopes, and hence the paired metric, is unchanged.
    """
    one = np.array([1.0])
    a = float(pair.dphi(one)[0])
    if a == 0 or not np.isfinite(a):
        raise ValidationError(f"cannot normalise {pair.name!r}: phi'(1) = {a}")
    phi1, chi1 = float(pair.phi(one)[0]), float(pair.chi(one)[0])
    if phi1 == 0.0 and chi1 == 0.0 and a == 1.0:
        return pair
    return EmbeddingPair(
        f"canonical({pair.name})" if not pair.name.startswith("canonical(") else pair.name,
        lambda x: (pair.phi(x) - phi1) / a,
        lambda x: pair.dphi(x) / a,
        lambda x: (pair.chi(x) - chi1) * a,
        lambda x: pair.dchi(x) * a,
    )


@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    tolerance: float
    witness: dict | None = None

    def as_dict(self) -> dict:
        from ._verdict import jsonable

        return {
            "name": self.name,
            "pass": self.passed,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "witness": jsonable(self.witness),
        }


@dataclass
class PairCharacterization:
    pair: str
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed_checks(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def check(self, name: str) -> CheckResult:
        return next(c for c in self.checks if c.name == name)

    def as_dict(self) -> dict:
        return {"pair": self.pair, "pass": self.passed, "checks": [c.as_dict() for c in self.checks]}


def _grid(n: int, lo: float, hi: float):
    g = np.geomspace(lo, hi, n)
    X, Y = np.meshgrid(g, g, indexing="ij")
    off = ~np.eye(n, dtype=bool)
    return X[off], Y[off]


def characterize_pair(pair: EmbeddingPair, grid_points: int = 12, lo: float = 1e-2, hi: float = 1e2,
                      scales=(0.1, 0.5, 2.0, 10.0), tol: float = 1e-8, loewner_sets: int = 200,
                      seed=0) -> PairCharacterization:
    """Run checks (a)-(d) on the canonical form of ``pair``.

    (a) ``symmetry``: ``c(x, y) = c(y, x)``.
    (b) ``homogeneity``: ``t c(tx, ty) = c(x, y)`` for ``t`` in ``scales``.
    (c) ``slope_product``: ``x phi'(x) chi'(x) = 1`` (the diagonal limit of
        a normalised kernel), on a grid containing ``x = 1``.
    (d) ``recovered_f``: ``f(x) = 1 / c(x, 1)`` is positive, normalised,
        symmetric and passes :func:`loewner_test`.

    Residuals of (a)-(c) are relative. The pair passes iff all four pass.
    """
    can = normalize_pair(pair)
    report = PairCharacterization(pair.name)
    x, y = _grid(grid_points, lo, hi)
    # spot point used in the perturbation corpus
    x = np.append(x, 2.0)
    y = np.append(y, 1.0)
    c = can.kernel(x, y)

    res = np.abs(c - can.kernel(y, x)) / np.abs(c)
    i = int(np.argmax(res))
    report.checks.append(CheckResult("symmetry", bool(res[i] <= tol), float(res[i]), tol,
                                     {"x": x[i], "y": y[i]}))

    worst, wit = 0.0, None
    for t in scales:
        r = np.abs(t * can.kernel(t * x, t * y) - c) / np.abs(c)
        j = int(np.argmax(r))
        if r[j] > worst or wit is None:
            worst, wit = float(r[j]), {"x": x[j], "y": y[j], "t": t,
                                        "c_xy": c[j], "t_c_txty": t * can.kernel(t * x[j], t * y[j])}
    report.checks.append(CheckResult("homogeneity", worst <= tol, worst, tol, wit))

    g = np.union1d(np.geomspace(lo / 10, hi * 10, 41), [1.0])
    slope = g * can.dphi(g) * can.dchi(g)
    res = np.abs(slope - 1.0)
    k = int(np.argmax(res))
    report.checks.append(CheckResult("slope_product", bool(res[k] <= tol), float(res[k]), tol,
                                     {"x": g[k], "x_dphi_dchi": slope[k]}))

    report.checks.append(_check_recovered(can, g, tol, loewner_sets, seed))
    return report


def _check_recovered(can: EmbeddingPair, g, tol, loewner_sets, seed) -> CheckResult:
    f = from_callable(f"recovered({can.name})", lambda s: 1.0 / can.kernel(s, 1.0))
    vals = f(g)
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
        k = int(np.argmin(np.where(np.isfinite(vals), vals, -np.inf)))
        return CheckResult("recovered_f", False, float("inf"), tol,
                           {"reason": "f not positive", "x": g[k], "f": vals[k]})
    ns = check_normalized_symmetric(f, g, tol)
    if not ns.passed:
        return CheckResult("recovered_f", False, max(ns.symmetry_residual, ns.normalization_residual), tol,
                           {"reason": "f not normalised/symmetric",
                            "symmetry_residual": ns.symmetry_residual,
                            "normalization_residual": ns.normalization_residual})
    verdict = loewner_test(f, n_sets=loewner_sets, seed=seed)
    if verdict.passed:
        return CheckResult("recovered_f", True, max(0.0, -verdict.worst), tol)
    wit = dict(verdict.witness or {})
    wit["reason"] = f"Loewner test {verdict.status}"
    return CheckResult("recovered_f", False, float(wit.get("violation", -verdict.worst)), tol, wit)
