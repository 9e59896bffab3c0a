"""Hermitian linear algebra: eigendecomposition, functional calculus,
Hilbert-Schmidt geometry and the commuting/orthogonal tangent split.

Matrices are plain complex ``numpy`` arrays. :class:`DensityMatrix` wraps a
validated strictly positive state together with its cached spectrum so the
eigendecomposition is computed once per state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import DomainError, ValidationError

__all__ = [
    "HERMITIAN_TOL",
    "TRACE_TOL",
    "EPS_FLOOR",
    "DEGEN_RTOL",
    "DD_RTOL",
    "DensityMatrix",
    "TangentSplit",
    "check_hermitian",
    "check_tangent",
    "as_density",
    "eigh",
    "mat_fn",
    "hs_inner",
    "commutator",
    "divided_difference",
    "divided_differences",
    "degenerate_mask",
    "decompose_tangent",
    "random_hermitian",
    "random_density",
    "random_tangent",
    "random_unitary",
]

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
EPS_FLOOR = 1e-12
# eigenvalues closer than DEGEN_RTOL * ||rho|| are one cluster
DEGEN_RTOL = 1e-8
# divided differences switch to the midpoint derivative below this relative gap
DD_RTOL = 1e-5


def check_hermitian(H, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``H`` as a read-only complex Hermitian array.

    The tolerance is applied relative to ``max(1, max|H_ij|)``. Accepted
    input is symmetrised exactly so downstream code sees ``H == H^*``.
    """
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1] or H.shape[0] == 0:
        raise ValidationError(f"expected a non-empty square matrix, got shape {H.shape}")
    H = H.astype(complex)
    if not np.all(np.isfinite(H)):
        raise ValidationError("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(H))))
    err = float(np.max(np.abs(H - H.conj().T)))
    if err > tol * scale:
        raise ValidationError(f"matrix is not Hermitian (max |H - H^*| = {err:.3e})")
    H = 0.5 * (H + H.conj().T)
    H.setflags(write=False)
    return H


def check_tangent(A, tol: float = TRACE_TOL) -> np.ndarray:
    """Validate a tangent vector: traceless Hermitian."""
    A = check_hermitian(A)
    tr = float(np.trace(A).real)
    if abs(tr) > tol * max(1.0, float(np.max(np.abs(A)))):
        raise ValidationError(f"tangent vector must be traceless (Tr = {tr:.3e})")
    return A


def _fix_phases(V: np.ndarray) -> np.ndarray:
    # first component of maximal modulus made real positive
    mags = np.abs(V)
    idx = np.argmax(mags >= mags.max(axis=0) - 1e-12, axis=0)
    pivot = V[idx, np.arange(V.shape[1])]
    return V * (pivot.conj() / np.abs(pivot))


def _sorted_eigh(H: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, V = np.linalg.eigh(H)
    w, V = w[::-1].copy(), _fix_phases(V[:, ::-1])
    # order exactly degenerate eigenvalues lexicographically by eigenvector
    n = len(w)
    tie_tol = 1e-12 * max(1.0, float(np.max(np.abs(w))))
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and w[start] - w[stop] <= tie_tol:
            stop += 1
        if stop - start > 1:
            block = V[:, start:stop]
            keys = np.vstack([block.imag[::-1], block.real[::-1]])
            order = np.lexsort(-keys)
            V[:, start:stop] = block[:, order]
        start = stop
    return w, V


def eigh(H) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Returns
    -------
    eigenvalues : ndarray of float, shape (n,)
    eigenvectors : ndarray of complex, shape (n, n)
        Unitary, columns are eigenvectors with a deterministic phase.
    """
    return _sorted_eigh(check_hermitian(H))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Strictly positive Hermitian matrix with its cached spectrum.

    Parameters
    ----------
    matrix : array_like
        Hermitian matrix with all eigenvalues >= ``EPS_FLOOR``.
    unit_trace : bool
        If true (default), require ``Tr = 1``; false admits any element
        of the strictly positive cone.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __init__(self, matrix, unit_trace: bool = True):
        H = check_hermitian(matrix)
        w, V = _sorted_eigh(H)
        if w[-1] < EPS_FLOOR:
            raise ValidationError(
                f"density matrix must be strictly positive (min eigenvalue {w[-1]:.3e})"
            )
        if unit_trace and abs(w.sum() - 1.0) > TRACE_TOL:
            raise ValidationError(f"density matrix must have unit trace (Tr = {w.sum():.12g})")
        w.setflags(write=False)
        V.setflags(write=False)
        object.__setattr__(self, "matrix", H)
        object.__setattr__(self, "eigenvalues", w)
        object.__setattr__(self, "eigenvectors", V)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def to_eigenbasis(self, X: np.ndarray) -> np.ndarray:
        V = self.eigenvectors
        return V.conj().T @ X @ V

    def from_eigenbasis(self, X: np.ndarray) -> np.ndarray:
        V = self.eigenvectors
        return V @ X @ V.conj().T

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim}, eigenvalues={np.round(self.eigenvalues, 6)})"


def as_density(rho, unit_trace: bool = True) -> DensityMatrix:
    if isinstance(rho, DensityMatrix):
        return rho
    return DensityMatrix(rho, unit_trace=unit_trace)


def _apply_scalar(f: Callable, w: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        fw = np.asarray(f(w))
    fw = fw.astype(complex if np.iscomplexobj(fw) else float)
    if fw.shape != w.shape:
        fw = np.broadcast_to(fw, w.shape)
    if not np.all(np.isfinite(fw)):
        bad = w[~np.isfinite(fw)]
        raise DomainError(f"function undefined at eigenvalue(s) {bad}")
    return fw


def mat_fn(H, f: Callable) -> np.ndarray:
    """Functional calculus ``V diag(f(lambda)) V^*``.

    ``f`` must accept a numpy array. ``H`` may be a :class:`DensityMatrix`,
    in which case its cached eigendecomposition is reused.
    """
    if isinstance(H, DensityMatrix):
        w, V = H.eigenvalues, H.eigenvectors
    else:
        w, V = eigh(H)
    fw = _apply_scalar(f, w)
    out = (V * fw) @ V.conj().T
    if np.isrealobj(fw):
        out = 0.5 * (out + out.conj().T)
    return out


def hs_inner(A, B) -> float:
    """Hilbert-Schmidt product ``Tr(A^* B)`` of two Hermitian matrices."""
    A = check_hermitian(A)
    B = check_hermitian(B)
    if A.shape != B.shape:
        raise ValidationError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return float(np.vdot(A, B).real)


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A


def divided_difference(func: Callable, deriv: Callable, x, y, rtol: float = DD_RTOL):
    """Elementwise ``(f(x) - f(y)) / (x - y)`` over broadcast ``x, y``.

    Pairs closer than ``rtol * max(|x|, |y|)`` use ``f'`` at the midpoint.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    diff = x - y
    close = np.abs(diff) <= rtol * np.maximum(np.abs(x), np.abs(y))
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.asarray((_apply_scalar(func, x) - _apply_scalar(func, y)) / diff)
    if np.any(close):
        out = out.copy()
        out[close] = _apply_scalar(deriv, 0.5 * (x[close] + y[close]))
    return out


def divided_differences(func: Callable, deriv: Callable, x, y=None, rtol: float = DD_RTOL):
    """Matrix ``L_ij = (f(x_i) - f(y_j)) / (x_i - y_j)`` (``y`` defaults to ``x``).

    With ``y`` omitted this is the Loewner matrix of ``f`` on the points
    ``x``, with ``f'(x_i)`` on the diagonal.
    """
    x = np.asarray(x, dtype=float)
    y = x if y is None else np.asarray(y, dtype=float)
    return divided_difference(func, deriv, x[:, None], y[None, :], rtol)


@dataclass(frozen=True, eq=False)
class TangentSplit:
    """``A = commuting + orthogonal`` with ``orthogonal = i[rho, generator]``."""

    commuting: np.ndarray
    orthogonal: np.ndarray
    generator: np.ndarray


def degenerate_mask(rho: DensityMatrix) -> np.ndarray:
    """Boolean matrix marking eigenvalue pairs inside one cluster."""
    w = rho.eigenvalues
    tau = DEGEN_RTOL * float(np.max(np.abs(w)))
    return np.abs(w[:, None] - w[None, :]) <= tau


def decompose_tangent(rho, A) -> TangentSplit:
    """Split ``A`` into the part commuting with ``rho`` and its HS complement.

    In the eigenbasis of ``rho`` the commuting part keeps the entries inside
    eigenvalue clusters; the rest is written as ``i[rho, U]`` with
    ``U_ij = A_ij / (i (lambda_i - lambda_j))``.
    """
    rho = as_density(rho, unit_trace=False)
    A = check_hermitian(A)
    if A.shape != rho.matrix.shape:
        raise ValidationError(f"dimension mismatch: {A.shape} vs {rho.matrix.shape}")
    w = rho.eigenvalues
    At = rho.to_eigenbasis(A)
    mask = degenerate_mask(rho)
    gaps = w[:, None] - w[None, :]
    Ut = np.zeros_like(At)
    Ut[~mask] = At[~mask] / (1j * gaps[~mask])
    Ac = rho.from_eigenbasis(np.where(mask, At, 0.0))
    Ao = rho.from_eigenbasis(np.where(mask, 0.0, At))
    U = rho.from_eigenbasis(Ut)
    herm = lambda M: 0.5 * (M + M.conj().T)
    return TangentSplit(commuting=herm(Ac), orthogonal=herm(Ao), generator=herm(U))


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_hermitian(dim: int, seed=None) -> np.ndarray:
    """``(G + G^*)/2`` with standard complex Gaussian ``G``."""
    G = _ginibre(_rng(seed), dim, dim)
    return check_hermitian(0.5 * (G + G.conj().T))


def random_density(dim: int, seed=None, max_tries: int = 100) -> DensityMatrix:
    """``W W^* / Tr(W W^*)`` with complex Gaussian ``W``, resampled if below the floor."""
    rng = _rng(seed)
    for _ in range(max_tries):
        W = _ginibre(rng, dim, dim)
        R = W @ W.conj().T
        R = R / np.trace(R).real
        try:
            return DensityMatrix(R)
        except ValidationError:
            continue
    raise RuntimeError(f"could not sample a strictly positive density in {max_tries} tries")


def random_tangent(dim: int, seed=None) -> np.ndarray:
    H = np.array(random_hermitian(dim, seed))
    H -= (np.trace(H).real / dim) * np.eye(dim)
    return check_tangent(H)


def random_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar unitary via QR of a Ginibre matrix with the R-diagonal phases removed."""
    Q, R = np.linalg.qr(_ginibre(_rng(seed), dim, dim))
    d = np.diag(R)
    return Q * (d / np.abs(d))
