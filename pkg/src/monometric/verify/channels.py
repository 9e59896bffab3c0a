"""CPTP channels, stochastic maps and metric contraction tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..cm_kernel import MonotoneFunction
from ..exceptions import ValidationError
from ..metrics import check_simplex_point, check_simplex_tangent, fisher_info, metric_eval
from ..spectra import DensityMatrix, random_density, random_tangent
from ._verdict import WITNESS_THRESHOLD, MonotonicityVerdict, classify, run_trials

__all__ = [
    "QuantumChannel",
    "StochasticMap",
    "random_cptp",
    "unitary_channel",
    "dephasing_channel",
    "apply_channel",
    "random_stochastic",
    "merge_map",
    "contraction_test",
    "reverify_contraction",
    "classical_contraction_test",
]

TP_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """Kraus representation ``X -> sum_r K_r X K_r^*`` (trace preserving)."""

    kraus: tuple

    def __post_init__(self):
        ks = tuple(np.asarray(K, dtype=complex) for K in self.kraus)
        if not ks:
            raise ValidationError("channel needs at least one Kraus operator")
        shape = ks[0].shape
        if any(K.ndim != 2 or K.shape != shape for K in ks):
            raise ValidationError("Kraus operators must be matrices of one shape")
        S = sum(K.conj().T @ K for K in ks)
        err = float(np.max(np.abs(S - np.eye(shape[1]))))
        if err > TP_TOL:
            raise ValidationError(f"channel is not trace preserving (max |sum K*K - I| = {err:.3e})")
        object.__setattr__(self, "kraus", ks)

    @property
    def dim_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus[0].shape[0]

    def __call__(self, X):
        return apply_channel(self, X)


def apply_channel(T: QuantumChannel, X) -> np.ndarray:
    X = np.asarray(X.matrix if isinstance(X, DensityMatrix) else X, dtype=complex)
    if X.shape != (T.dim_in, T.dim_in):
        raise ValidationError(f"channel expects {T.dim_in}x{T.dim_in} input, got {X.shape}")
    out = sum(K @ X @ K.conj().T for K in T.kraus)
    return 0.5 * (out + out.conj().T)


def random_cptp(dim_in: int, dim_out: int, kraus_rank: int | None = None, seed=None) -> QuantumChannel:
    """Kraus operators from the row blocks of a Haar random isometry.

    The isometry ``V`` (``kraus_rank * dim_out x dim_in``) comes from the QR
    decomposition of a complex Gaussian matrix, so ``sum K_r^* K_r = V^* V = I``.
    """
    rank = dim_in if kraus_rank is None else int(kraus_rank)
    if rank < 1:
        raise ValidationError("kraus_rank must be >= 1")
    if rank * dim_out < dim_in:
        raise ValidationError("kraus_rank * dim_out must be >= dim_in for an isometry")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    G = rng.standard_normal((rank * dim_out, dim_in)) + 1j * rng.standard_normal((rank * dim_out, dim_in))
    Q, R = np.linalg.qr(G)
    d = np.diag(R)
    V = Q * (d / np.abs(d))
    return QuantumChannel(tuple(V[r * dim_out:(r + 1) * dim_out] for r in range(rank)))


def unitary_channel(U) -> QuantumChannel:
    return QuantumChannel((np.asarray(U, dtype=complex),))


def dephasing_channel(n: int) -> QuantumChannel:
    """Complete dephasing in the computational basis."""
    ks = []
    for i in range(n):
        K = np.zeros((n, n), dtype=complex)
        K[i, i] = 1.0
        ks.append(K)
    return QuantumChannel(tuple(ks))


@dataclass(frozen=True, eq=False)
class StochasticMap:
    """Column-stochastic ``m x n`` matrix acting on probability vectors."""

    matrix: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=float)
        if M.ndim != 2:
            raise ValidationError("stochastic map must be a matrix")
        if np.any(M < 0):
            raise ValidationError("stochastic map has negative entries")
        if np.max(np.abs(M.sum(axis=0) - 1.0)) > 1e-12:
            raise ValidationError("stochastic map columns must sum to 1")
        object.__setattr__(self, "matrix", M)

    def __call__(self, v):
        return self.matrix @ np.asarray(v, dtype=float)


def random_stochastic(n: int, m: int, seed=None) -> StochasticMap:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    M = rng.dirichlet(np.ones(m), size=n).T
    M /= M.sum(axis=0)
    return StochasticMap(M)


def merge_map(n: int, i: int, j: int) -> StochasticMap:
    """Coarse graining that merges outcomes ``i`` and ``j`` into one."""
    if i == j:
        raise ValidationError("merge needs two distinct outcomes")
    keep = [k for k in range(n) if k != j]
    M = np.zeros((n - 1, n))
    for row, k in enumerate(keep):
        M[row, k] = 1.0
    M[keep.index(i), j] = 1.0
    return StochasticMap(M)


def _contraction_trial(f, dims, kraus_rank, max_resample):
    def one(rng):
        resampled = 0
        for _ in range(max_resample):
            n = dims[int(rng.integers(len(dims)))]
            m = dims[int(rng.integers(len(dims)))]
            rank = kraus_rank or n
            if rank * m < n:
                rank = -(-n // m)
            T = random_cptp(n, m, rank, rng)
            rho = random_density(n, rng)
            X = random_tangent(n, rng)
            try:
                Trho = DensityMatrix(apply_channel(T, rho))
            except ValidationError:
                resampled += 1
                continue
            before = metric_eval(f, rho, X)
            after = metric_eval(f, Trho, apply_channel(T, X))
            return T, rho, X, before, after, resampled
        raise RuntimeError(f"no strictly positive channel output in {max_resample} draws")

    return one


def contraction_test(f: MonotoneFunction, trials: int = 1000, dims=(2, 3, 4), seed=0,
                     kraus_rank: int | None = None, tau_rel: float = 1e-9, tau_abs: float = 1e-12,
                     threshold: float = WITNESS_THRESHOLD, max_resample: int = 20,
                     jobs: int = 1) -> MonotonicityVerdict:
    """Check ``g_{T(rho)}(TX, TX) <= g_rho(X, X)`` on random CPTP maps.

    Input and output dimensions are drawn independently from ``dims``. A
    trial violates when ``after > before (1 + tau_rel) + tau_abs``; the
    reported violation is the relative excess ``(after - before) / before``.
    """
    dims = list(dims)
    results = run_trials(_contraction_trial(f, dims, kraus_rank, max_resample), seed, trials, jobs)
    excess = []
    for *_, before, after, _ in results:
        over = after > before * (1 + tau_rel) + tau_abs
        excess.append((after - before) / before if over else np.nan)
    status, idx = classify(excess, threshold)
    witness = None
    if idx is not None:
        T, rho, X, before, after, _ = results[idx]
        witness = {
            "kraus": list(T.kraus),
            "rho": rho.matrix,
            "X": X,
            "before": before,
            "after": after,
            "violation": (after - before) / before,
        }
    ratios = [after / before for *_, before, after, _ in results]
    return MonotonicityVerdict(
        test="contraction",
        status=status,
        trials=trials,
        tolerance=tau_rel,
        worst=float(max(ratios)),
        witness=witness,
        info={
            "function": f.name,
            "dims": dims,
            "resampled": int(sum(r[-1] for r in results)),
            "max_ratio_after_before": float(max(ratios)),
        },
    )


def reverify_contraction(f: MonotoneFunction, witness: dict) -> float:
    """Recompute the relative excess of a contraction witness."""
    T = QuantumChannel(tuple(witness["kraus"]))
    rho = DensityMatrix(witness["rho"])
    X = np.asarray(witness["X"])
    before = metric_eval(f, rho, X)
    after = metric_eval(f, DensityMatrix(apply_channel(T, rho)), apply_channel(T, X))
    return (after - before) / before


def classical_contraction_test(trials: int = 1000, dims=(2, 3, 4, 5, 6), seed=0,
                               tau_rel: float = 1e-12) -> MonotonicityVerdict:
    """Fisher information under random stochastic maps (Chentsov's setting)."""
    dims = list(dims)

    def one(rng):
        n = dims[int(rng.integers(len(dims)))]
        m = dims[int(rng.integers(len(dims)))]
        T = random_stochastic(n, m, rng)
        rho = rng.dirichlet(np.ones(n))
        A = rng.standard_normal(n)
        A -= A.mean()
        before = fisher_info(rho, A)
        Trho = T(rho)
        TA = T(A)
        TA -= TA.sum() / m
        after = fisher_info(Trho / Trho.sum(), TA)
        return T, rho, A, before, after

    results = run_trials(one, seed, trials)
    excess = [(a - b) / b if a > b * (1 + tau_rel) else np.nan for *_, b, a in results]
    status, idx = classify(excess)
    witness = None
    if idx is not None:
        T, rho, A, b, a = results[idx]
        witness = {"T": T.matrix, "rho": rho, "A": A, "before": b, "after": a}
    return MonotonicityVerdict(
        test="classical_contraction",
        status=status,
        trials=trials,
        tolerance=tau_rel,
        worst=float(max(a / b for *_, b, a in results)),
        witness=witness,
        info={"dims": dims},
    )


def merge_identity(rho, A, i: int = 0, j: int = 1) -> tuple[float, float]:
    """Fisher information before and after merging outcomes ``i`` and ``j``."""
    rho = check_simplex_point(rho)
    A = check_simplex_tangent(A, rho.size)
    T = merge_map(rho.size, i, j)
    return fisher_info(rho, A), fisher_info(T(rho), T(A))
