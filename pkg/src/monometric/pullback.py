"""Embedding pairs and paired metrics.

A pair ``(phi, chi)`` of C^1 functions on ``(0, inf)`` turns into a bilinear
form on the tangent space of density matrices by pulling back the
Hilbert-Schmidt pairing through the matrix functions ``rho -> phi(rho)`` and
``rho -> chi(rho)``::

    <A, B>^{phi,chi}_rho = Tr(D_rho phi(A) . D_rho chi(B))

The derivative ``D_rho phi`` acts in the eigenbasis of ``rho`` as an
entrywise product with divided differences of ``phi`` (Daleckii-Krein).
The pair reproduces the monotone metric of ``f`` exactly when the product
of divided differences equals the CM kernel of ``f``;
:func:`pairing_residual` measures that on a grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from ._grammar import format_param, parse_spec
from .cm_kernel import MonotoneFunction, cm_eval, read_table
from .exceptions import DomainError, ValidationError
from .metrics import check_simplex_point, check_simplex_tangent, metric_eval
from .spectra import (
    as_density,
    check_hermitian,
    commutator,
    decompose_tangent,
    divided_difference,
    divided_differences,
    mat_fn,
    random_density,
    random_tangent,
)

__all__ = [
    "EmbeddingPair",
    "NqVector",
    "PairingReport",
    "wyd_pair",
    "log_pair",
    "amari_pair",
    "lookup_pair",
    "d_embed",
    "d_embed_split",
    "paired_metric",
    "kernel_grid",
    "pairing_residual",
    "matrix_pairing_residual",
    "pairing_check",
    "dual_index",
    "nq_norm",
    "amari_embedding",
    "duality_map",
    "duality_pairing",
    "amari_pullback",
    "amari_pullback_commutative",
]


@dataclass(frozen=True, eq=False)
class EmbeddingPair:
    name: str
    phi: Callable[[np.ndarray], np.ndarray]
    dphi: Callable[[np.ndarray], np.ndarray]
    chi: Callable[[np.ndarray], np.ndarray]
    dchi: Callable[[np.ndarray], np.ndarray]

    def kernel(self, x, y):
        """Candidate CM kernel ``phi^(x, y) * chi^(x, y)`` (elementwise)."""
        return (divided_difference(self.phi, self.dphi, x, y)
                * divided_difference(self.chi, self.dchi, x, y))

    def __repr__(self):
        return f"EmbeddingPair({self.name!r})"


def log_pair(name: str = "log") -> EmbeddingPair:
    """``(x, log x)``, the BKM endpoint of the WYD family."""
    return EmbeddingPair(
        name,
        lambda x: np.asarray(x, dtype=float),
        lambda x: np.ones_like(np.asarray(x, dtype=float)),
        lambda x: np.log(x),
        lambda x: 1.0 / np.asarray(x, dtype=float),
    )


def wyd_pair(p: float) -> EmbeddingPair:
    """``(x^p / p, x^(1-p) / (1-p))``, or ``(x, log x)`` for ``p`` in {0, 1}."""
    p = float(p)
    name = f"wyd:p={format_param(p)}"
    if p in (0.0, 1.0):
        return log_pair(name)
    q = 1.0 - p
    return EmbeddingPair(
        name,
        lambda x: np.asarray(x, dtype=float) ** p / p,
        lambda x: np.asarray(x, dtype=float) ** (p - 1.0),
        lambda x: np.asarray(x, dtype=float) ** q / q,
        lambda x: np.asarray(x, dtype=float) ** (-p),
    )


def dual_index(q: float) -> float:
    if not q > 1.0:
        raise ValidationError(f"N^q needs q > 1, got {q}")
    return q / (q - 1.0)


def amari_pair(q: float) -> EmbeddingPair:
    """Amari embedding ``phi = q x^(1/q)`` paired with ``J o phi``.

    On the Amari sphere the duality map acts as ``v -> q~ (v/q)^(q-1)``,
    so ``J o phi`` is obtained by composing that scalar map with ``phi``.
    """
    qt = dual_index(q)

    def phi(x):
        return q * np.asarray(x, dtype=float) ** (1.0 / q)

    def dphi(x):
        return np.asarray(x, dtype=float) ** (1.0 / q - 1.0)

    def chi(x):
        return qt * (phi(x) / q) ** (q - 1.0)

    def dchi(x):
        return qt * (q - 1.0) * (phi(x) / q) ** (q - 2.0) * dphi(x) / q

    return EmbeddingPair(f"amari:q={format_param(q)}", phi, dphi, chi, dchi)


def tabulated_pair(xs, phis, chis, name: str = "table") -> EmbeddingPair:
    """Pair sampled on ``xs``; cubic splines in ``log x``."""
    xs = np.asarray(xs, dtype=float)
    order = np.argsort(xs)
    xs = xs[order]
    if len(xs) < 4 or np.any(xs <= 0):
        raise ValidationError("pair table needs >= 4 rows with positive x")
    sp_phi = CubicSpline(np.log(xs), np.asarray(phis, dtype=float)[order])
    sp_chi = CubicSpline(np.log(xs), np.asarray(chis, dtype=float)[order])
    lo, hi = xs[0], xs[-1]

    def _u(x):
        x = np.asarray(x, dtype=float)
        if np.any((x < lo * (1 - 1e-12)) | (x > hi * (1 + 1e-12))):
            raise DomainError(f"pair table {name!r} only covers [{lo:g}, {hi:g}]")
        return np.log(x)

    return EmbeddingPair(
        name,
        lambda x: sp_phi(_u(x)),
        lambda x: sp_phi(_u(x), 1) / np.asarray(x, dtype=float),
        lambda x: sp_chi(_u(x)),
        lambda x: sp_chi(_u(x), 1) / np.asarray(x, dtype=float),
    )


def lookup_pair(spec: str) -> EmbeddingPair:
    """Resolve ``"wyd:p=0.5"``, ``"p=0.5"``, ``"log"``/``"bkm"``,
    ``"amari:q=3"`` or ``"table:<csv with x,phi,chi>"``."""
    spec = spec.strip()
    if spec.startswith("p="):
        spec = "wyd:" + spec
    name, params = parse_spec(spec)
    if name in ("log", "bkm") and not params:
        return log_pair(name)
    if name == "wyd" and set(params) == {"p"}:
        return wyd_pair(params["p"])
    if name == "amari" and set(params) == {"q"}:
        return amari_pair(params["q"])
    if name == "table":
        data = read_table(params["path"], 3)
        return tabulated_pair(data[:, 0], data[:, 1], data[:, 2], name=spec)
    raise ValidationError(f"unknown pair {spec!r}")


def d_embed(func: Callable, deriv: Callable, rho, A) -> np.ndarray:
    """Derivative of ``rho -> func(rho)`` in direction ``A``.

    Entry ``(i, j)`` in the eigenbasis is ``A_ij`` times the divided
    difference of ``func`` at ``(lambda_i, lambda_j)``, with ``func'`` on
    (near-)degenerate pairs.
    """
    rho = as_density(rho, unit_trace=False)
    A = check_hermitian(A)
    w = rho.eigenvalues
    L = divided_differences(func, deriv, w)
    out = rho.from_eigenbasis(L * rho.to_eigenbasis(A))
    return 0.5 * (out + out.conj().T)


def d_embed_split(func: Callable, deriv: Callable, rho, A) -> np.ndarray:
    """Same derivative written as ``func'(rho) A^c + i[func(rho), U]``."""
    rho = as_density(rho, unit_trace=False)
    split = decompose_tangent(rho, A)
    out = mat_fn(rho, deriv) @ split.commuting + 1j * commutator(mat_fn(rho, func), split.generator)
    return 0.5 * (out + out.conj().T)


def paired_metric(pair: EmbeddingPair, rho, A, B=None) -> float:
    """``Tr(D_rho phi(A) . D_rho chi(B))``; ``B`` defaults to ``A``."""
    rho = as_density(rho)
    B = A if B is None else B
    Dphi = d_embed(pair.phi, pair.dphi, rho, A)
    Dchi = d_embed(pair.chi, pair.dchi, rho, B)
    return float(np.trace(Dphi @ Dchi).real)


def kernel_grid(n: int = 40, lo: float = 1e-3, hi: float = 1e3) -> tuple[np.ndarray, np.ndarray]:
    """Log-uniform ``n x n`` grid on ``[lo, hi]^2`` with the diagonal removed."""
    g = np.geomspace(lo, hi, n)
    X, Y = np.meshgrid(g, g, indexing="ij")
    off = ~np.eye(n, dtype=bool)
    return X[off], Y[off]


def pairing_residual(f: MonotoneFunction, pair: EmbeddingPair, grid=None) -> float:
    """Max relative gap between ``c_f(x, y)`` and the pair's kernel on ``grid``.

    ``grid`` is a tuple ``(x, y)`` of equal-length arrays; defaults to
    :func:`kernel_grid`.
    """
    x, y = kernel_grid() if grid is None else (np.asarray(grid[0]), np.asarray(grid[1]))
    c = cm_eval(f, x, y)
    return float(np.max(np.abs(c - pair.kernel(x, y)) / np.abs(c)))


def matrix_pairing_residual(f: MonotoneFunction, pair: EmbeddingPair, dims=range(2, 7),
                            trials: int = 20, seed=0) -> float:
    """Max of ``|paired_metric - metric_eval| / (1 + |metric_eval|)`` over
    random ``(rho, A, B)`` for each dimension in ``dims``."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n in dims:
        for _ in range(trials):
            rho = random_density(n, rng)
            A, B = random_tangent(n, rng), random_tangent(n, rng)
            g = metric_eval(f, rho, A, B)
            worst = max(worst, abs(paired_metric(pair, rho, A, B) - g) / (1.0 + abs(g)))
    return worst


@dataclass(frozen=True)
class PairingReport:
    f: str
    pair: str
    scalar_residual: float
    matrix_residual: float
    scalar_tol: float
    matrix_tol: float

    @property
    def passed(self) -> bool:
        return self.scalar_residual <= self.scalar_tol and self.matrix_residual <= self.matrix_tol

    def as_dict(self) -> dict:
        return {
            "f": self.f,
            "pair": self.pair,
            "scalar_residual": self.scalar_residual,
            "matrix_residual": self.matrix_residual,
            "scalar_tol": self.scalar_tol,
            "matrix_tol": self.matrix_tol,
            "pass": self.passed,
        }


def pairing_check(f: MonotoneFunction, pair: EmbeddingPair, dims=range(2, 7), trials: int = 20,
                  seed=0, scalar_tol: float = 1e-9, matrix_tol: float = 1e-8) -> PairingReport:
    """Scalar grid test and randomised matrix test of one ``(f, pair)`` combination.

    The scalar test is the stricter one: the matrix residual only sees the
    kernel at eigenvalue pairs of the sampled states.
    """
    return PairingReport(
        f.name,
        pair.name,
        pairing_residual(f, pair),
        matrix_pairing_residual(f, pair, dims, trials, seed),
        scalar_tol,
        matrix_tol,
    )


@dataclass(frozen=True, eq=False)
class NqVector:
    """Element of ``N^q``: ``L^q`` with norm ``||v||_q / q``.

    ``matrix`` is a Hermitian matrix, or a real vector in the commutative
    (counting measure) case.
    """

    q: float
    matrix: np.ndarray

    def __post_init__(self):
        dual_index(self.q)
        m = np.asarray(self.matrix)
        if m.ndim == 1:
            m = m.astype(float)
        else:
            m = check_hermitian(m)
        object.__setattr__(self, "matrix", m)

    @property
    def commutative(self) -> bool:
        return self.matrix.ndim == 1

    @property
    def dual_q(self) -> float:
        return dual_index(self.q)

    def spectrum(self) -> np.ndarray:
        return self.matrix if self.commutative else np.linalg.eigvalsh(self.matrix)


def nq_norm(v: NqVector) -> float:
    """``(Tr |v|^q)^(1/q) / q``."""
    return float(np.sum(np.abs(v.spectrum()) ** v.q) ** (1.0 / v.q) / v.q)


def amari_embedding(rho, q: float) -> NqVector:
    """``rho -> q rho^(1/q)`` for a density matrix or a simplex point."""
    arr = np.asarray(rho.matrix if hasattr(rho, "matrix") else rho)
    if arr.ndim == 1:
        return NqVector(q, q * check_simplex_point(arr) ** (1.0 / q))
    return NqVector(q, q * mat_fn(as_density(rho), lambda w: w ** (1.0 / q)))


def duality_map(v: NqVector, tol: float = 1e-9) -> NqVector:
    """Duality map on the Amari sphere: ``q rho^(1/q) -> q~ rho^(1/q~)``.

    Only positive definite unit vectors are accepted; the map is not
    defined here off the sphere.
    """
    w = v.spectrum()
    if np.any(w <= 0):
        raise ValidationError("duality map is only implemented on the positive cone")
    norm = nq_norm(v)
    if abs(norm - 1.0) > tol:
        raise ValidationError(f"duality map is only implemented on the unit sphere (norm = {norm:.12g})")
    power = lambda s: v.dual_q * (s / v.q) ** (v.q - 1.0)
    if v.commutative:
        return NqVector(v.dual_q, power(v.matrix))
    return NqVector(v.dual_q, mat_fn(v.matrix, power))


def duality_pairing(v: NqVector, w: NqVector) -> float:
    """``Tr((v / q)(w / q~))`` between ``N^q`` and its dual ``N^q~``."""
    if abs(w.q - v.dual_q) > 1e-12 * v.dual_q:
        raise ValidationError(f"N^{w.q:g} is not the dual of N^{v.q:g}")
    if v.commutative != w.commutative:
        raise ValidationError("cannot pair a commutative vector with a matrix")
    if v.commutative:
        return float(np.sum(v.matrix * w.matrix) / (v.q * w.q))
    return float(np.trace(v.matrix @ w.matrix).real / (v.q * w.q))


def amari_pullback_commutative(rho, A, B, q: float) -> float:
    """Dualised pull-back of the Amari embedding on the simplex,
    ``sum_i (rho^(1/q - 1) A)_i (rho^(1/q~ - 1) B)_i``."""
    rho = check_simplex_point(rho)
    A = check_simplex_tangent(A, rho.size)
    B = check_simplex_tangent(B, rho.size)
    qt = dual_index(q)
    return float(np.sum((rho ** (1.0 / q - 1.0) * A) * (rho ** (1.0 / qt - 1.0) * B)))


def amari_pullback(rho, A, B, q: float) -> float:
    """Noncommutative dualised pull-back ``Tr(D phi(A) . D(J o phi)(B))``
    for the Amari embedding ``phi = q rho^(1/q)``."""
    return paired_metric(amari_pair(q), rho, A, B)
