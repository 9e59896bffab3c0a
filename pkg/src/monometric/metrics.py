"""Monotone metrics through the Petz formula, Wigner-Yanase-Dyson
information and the classical Fisher information.

Every quantum quantity is evaluated in the eigenbasis of ``rho`` as an
entrywise kernel product, so the ``n^2 x n^2`` superoperator is never
formed.
"""

from __future__ import annotations

import numpy as np

from .cm_kernel import MonotoneFunction, cm_eval
from .exceptions import ValidationError
from .spectra import DensityMatrix, as_density, check_hermitian, check_tangent

__all__ = [
    "kernel_matrix",
    "apply_cm_superoperator",
    "metric_eval",
    "wyd_info",
    "check_simplex_point",
    "check_simplex_tangent",
    "fisher_info",
]

SIMPLEX_TOL = 1e-12


def kernel_matrix(f: MonotoneFunction, rho: DensityMatrix) -> np.ndarray:
    """``K_ij = c_f(lambda_i, lambda_j)`` on the spectrum of ``rho``."""
    w = rho.eigenvalues
    return cm_eval(f, w[:, None], w[None, :])


def _same_dim(rho: DensityMatrix, *mats):
    for M in mats:
        if M.shape != rho.matrix.shape:
            raise ValidationError(f"dimension mismatch: {M.shape} vs {rho.matrix.shape}")


def apply_cm_superoperator(f: MonotoneFunction, rho, B) -> np.ndarray:
    """``c_f(L_rho, R_rho)(B)``: multiply ``B`` entrywise by the kernel in
    the eigenbasis of ``rho`` and rotate back."""
    rho = as_density(rho)
    B = check_hermitian(B)
    _same_dim(rho, B)
    out = rho.from_eigenbasis(kernel_matrix(f, rho) * rho.to_eigenbasis(B))
    return 0.5 * (out + out.conj().T)


def metric_eval(f: MonotoneFunction, rho, A, B=None) -> float:
    """Monotone metric ``g_rho^f(A, B) = Tr(A c_f(L_rho, R_rho)(B))``.

    Parameters
    ----------
    f : MonotoneFunction
    rho : DensityMatrix or array_like
        Strictly positive state with unit trace.
    A, B : array_like
        Tangent vectors (traceless Hermitian). ``B`` defaults to ``A``.

    Returns
    -------
    float
    """
    rho = as_density(rho)
    A = check_tangent(A)
    B = A if B is None else check_tangent(B)
    _same_dim(rho, A, B)
    At = rho.to_eigenbasis(A)
    Bt = At if B is A else rho.to_eigenbasis(B)
    K = kernel_matrix(f, rho)
    return float(np.sum(K * At.conj() * Bt).real)


def wyd_info(p: float, rho, A) -> float:
    """Wigner-Yanase-Dyson information ``-Tr([rho^p, A][rho^(1-p), A])``.

    ``A`` only needs to be self-adjoint. For ``p`` equal to 0 or 1 the BKM
    form ``-Tr([rho, A][log rho, A])`` is returned, which is the limit of
    ``I_p / (p (1 - p))`` rather than of ``I_p`` itself.
    """
    rho = as_density(rho, unit_trace=False)
    A = check_hermitian(A)
    _same_dim(rho, A)
    w = rho.eigenvalues
    At = rho.to_eigenbasis(A)
    if p in (0.0, 1.0):
        weights = (w[:, None] - w[None, :]) * (np.log(w)[:, None] - np.log(w)[None, :])
    else:
        wp, wq = w**p, w ** (1.0 - p)
        weights = (wp[:, None] - wp[None, :]) * (wq[:, None] - wq[None, :])
    return float(np.sum(weights * np.abs(At) ** 2))


def check_simplex_point(rho, tol: float = SIMPLEX_TOL) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    if rho.ndim != 1 or rho.size == 0:
        raise ValidationError(f"simplex point must be a non-empty vector, got shape {rho.shape}")
    if np.any(rho <= 0):
        raise ValidationError("simplex point must have strictly positive entries")
    if abs(rho.sum() - 1.0) > tol:
        raise ValidationError(f"simplex point must sum to 1 (sum = {rho.sum():.15g})")
    return rho


def check_simplex_tangent(A, dim: int | None = None, tol: float = SIMPLEX_TOL) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 1:
        raise ValidationError(f"simplex tangent must be a vector, got shape {A.shape}")
    if dim is not None and A.size != dim:
        raise ValidationError(f"dimension mismatch: {A.size} vs {dim}")
    if abs(A.sum()) > tol * max(1.0, float(np.max(np.abs(A), initial=0.0))):
        raise ValidationError(f"simplex tangent must sum to 0 (sum = {A.sum():.3e})")
    return A


def fisher_info(rho, A, B=None) -> float:
    """Fisher information ``sum_i A_i B_i / rho_i`` on the open simplex."""
    rho = check_simplex_point(rho)
    A = check_simplex_tangent(A, rho.size)
    B = A if B is None else check_simplex_tangent(B, rho.size)
    return float(np.sum(A * B / rho))
