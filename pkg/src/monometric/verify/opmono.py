"""Randomised checks of operator monotonicity.

Two independent routes: Loewner matrices of divided differences, which are
positive semidefinite on every point set exactly for operator monotone
functions, and direct search for pairs ``0 <= A <= B`` with
``f(B) - f(A)`` not positive semidefinite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..cm_kernel import MonotoneFunction, f_power
from ..exceptions import ValidationError
from ..spectra import divided_differences, mat_fn, random_unitary
from ._verdict import (
    TAU_PSD,
    WITNESS_THRESHOLD,
    MonotonicityVerdict,
    classify,
    run_trials,
)

__all__ = [
    "loewner_matrix",
    "loewner_test",
    "reverify_loewner",
    "opmono_matrix_search",
    "reverify_matrix_pair",
    "PowerScanRow",
    "power_family_scan",
]


def loewner_matrix(f: MonotoneFunction, points) -> np.ndarray:
    L = divided_differences(f, f.derivative, points)
    return 0.5 * (L + L.T)


def _loewner_stats(f: MonotoneFunction, points):
    L = loewner_matrix(f, points)
    w, V = np.linalg.eigh(L)
    return L, float(w[0]), V[:, 0], float(np.max(np.abs(w)))


def loewner_test(f: MonotoneFunction, n_points: int = 8, n_sets: int = 200, seed=0,
                 lo: float = 1e-3, hi: float = 1e3, tau_psd: float = TAU_PSD,
                 threshold: float = WITNESS_THRESHOLD, jobs: int = 1) -> MonotonicityVerdict:
    """Sample ``n_sets`` sets of ``n_points`` log-uniform points in
    ``[lo, hi]`` and test each Loewner matrix for positive semidefiniteness.

    A set violates when its smallest eigenvalue is below
    ``-tau_psd * ||L||``. The verdict fails only if the worst violation
    exceeds ``threshold`` in absolute value; smaller ones are inconclusive.
    """
    if n_points < 2:
        raise ValidationError("loewner_test needs at least 2 points per set")

    def one(rng):
        pts = np.sort(np.exp(rng.uniform(np.log(lo), np.log(hi), n_points)))
        _, lam, vec, norm = _loewner_stats(f, pts)
        return pts, lam, vec, norm

    results = run_trials(one, seed, n_sets, jobs)
    mins = [r[1] for r in results]
    violations = [-lam if lam < -tau_psd * norm else np.nan for _, lam, _, norm in results]
    status, idx = classify(violations, threshold)
    witness = None
    if idx is not None:
        pts, lam, vec, norm = results[idx]
        witness = {
            "points": pts,
            "min_eigenvalue": lam,
            "eigenvector": vec,
            "loewner_norm": norm,
            "violation": -lam,
        }
    return MonotonicityVerdict(
        test="loewner",
        status=status,
        trials=n_sets,
        tolerance=tau_psd,
        worst=float(min(mins)),
        witness=witness,
        info={"function": f.name, "n_points": n_points, "range": [lo, hi]},
    )


def reverify_loewner(f: MonotoneFunction, witness: dict) -> float:
    """Recompute the violation (minus the smallest eigenvalue) of a witness."""
    _, lam, _, _ = _loewner_stats(f, np.asarray(witness["points"], dtype=float))
    return -lam


def _random_pair(rng, n: int, lo: float, hi: float):
    U = random_unitary(n, rng)
    a = np.exp(rng.uniform(np.log(lo), np.log(hi), n))
    A = (U * a) @ U.conj().T
    rank = int(rng.integers(1, n + 1))
    W = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    P = W @ W.conj().T
    P *= np.exp(rng.uniform(np.log(lo), np.log(hi))) / np.linalg.norm(P, 2)
    A = 0.5 * (A + A.conj().T)
    B = A + 0.5 * (P + P.conj().T)
    return A, B


def _gap(f: MonotoneFunction, A, B):
    FA, FB = mat_fn(A, f), mat_fn(B, f)
    D = FB - FA
    w = np.linalg.eigvalsh(0.5 * (D + D.conj().T))
    scale = max(1.0, float(np.linalg.norm(FA, 2)), float(np.linalg.norm(FB, 2)))
    return float(w[0]), scale


def opmono_matrix_search(f: MonotoneFunction, dims=(2, 3, 4), trials: int = 1000, seed=0,
                         lo: float = 1e-3, hi: float = 1e3, tau_psd: float = TAU_PSD,
                         threshold: float = WITNESS_THRESHOLD, jobs: int = 1) -> MonotonicityVerdict:
    """Search for ``0 < A <= B = A + P`` with ``f(B) - f(A)`` not PSD.

    ``A`` has log-uniform spectrum in ``[lo, hi]`` and a Haar eigenbasis;
    ``P`` is a random PSD matrix of random rank and log-uniform norm.
    """
    dims = list(dims)

    def one(rng):
        n = dims[int(rng.integers(len(dims)))]
        A, B = _random_pair(rng, n, lo, hi)
        lam, scale = _gap(f, A, B)
        return A, B, lam, scale

    results = run_trials(one, seed, trials, jobs)
    violations = [-lam if lam < -tau_psd * scale else np.nan for _, _, lam, scale in results]
    status, idx = classify(violations, threshold)
    witness = None
    if idx is not None:
        A, B, lam, _ = results[idx]
        witness = {"A": A, "B": B, "min_eigenvalue": lam, "violation": -lam}
    return MonotonicityVerdict(
        test="matrix_search",
        status=status,
        trials=trials,
        tolerance=tau_psd,
        worst=float(min(r[2] for r in results)),
        witness=witness,
        info={"function": f.name, "dims": dims, "range": [lo, hi]},
    )


def reverify_matrix_pair(f: MonotoneFunction, witness: dict) -> float:
    """Recompute ``-lambda_min(f(B) - f(A))`` for a stored witness; also
    confirms ``B - A`` is PSD."""
    A = np.asarray(witness["A"], dtype=complex)
    B = np.asarray(witness["B"], dtype=complex)
    if np.linalg.eigvalsh(B - A)[0] < -1e-9 * np.linalg.norm(B, 2):
        raise ValidationError("witness does not satisfy A <= B")
    lam, _ = _gap(f, A, B)
    return -lam


@dataclass
class PowerScanRow:
    nu: float
    loewner: MonotonicityVerdict
    matrix: MonotonicityVerdict

    @property
    def passed(self) -> bool:
        return self.loewner.passed and self.matrix.passed

    def as_dict(self) -> dict:
        return {"nu": self.nu, "pass": self.passed,
                "loewner": self.loewner.as_dict(), "matrix": self.matrix.as_dict()}


def power_family_scan(nu_grid=(1.0, 1.25, 1.5, 1.75, 2.0), n_points: int = 8, n_sets: int = 200,
                      dims=(2, 3, 4), trials: int = 1000, seed=0, jobs: int = 1) -> list[PowerScanRow]:
    """Loewner test and matrix search for each ``((1 + x^(1/nu)) / 2)^nu``."""
    rows = []
    for nu in nu_grid:
        f = f_power(nu)
        rows.append(PowerScanRow(
            float(nu),
            loewner_test(f, n_points, n_sets, seed, jobs=jobs),
            opmono_matrix_search(f, dims, trials, seed, jobs=jobs),
        ))
    return rows
