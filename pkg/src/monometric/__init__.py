"""Monotone metrics, paired embeddings and Wigner-Yanase-Dyson information."""

__version__ = "0.1.0"

from .cm_kernel import (
    MonotoneFunction,
    ando_transform,
    catalog,
    check_normalized_symmetric,
    cm_eval,
    f_bures,
    f_power,
    f_wyd,
    lookup,
)
from .exceptions import DomainError, ValidationError
from .metrics import apply_cm_superoperator, fisher_info, metric_eval, wyd_info
from .pullback import (
    EmbeddingPair,
    NqVector,
    amari_pullback,
    amari_pullback_commutative,
    d_embed,
    duality_map,
    nq_norm,
    paired_metric,
    pairing_residual,
    wyd_pair,
)
from .spectra import (
    DensityMatrix,
    decompose_tangent,
    eigh,
    hs_inner,
    mat_fn,
    random_density,
    random_hermitian,
    random_tangent,
)


__all__ = [
    "__version__",
    "MonotoneFunction",
    "ando_transform",
    "catalog",
    "check_normalized_symmetric",
    "cm_eval",
    "f_bures",
    "f_power",
    "f_wyd",
    "lookup",
    "DomainError",
    "ValidationError",
    "apply_cm_superoperator",
    "fisher_info",
    "metric_eval",
    "wyd_info",
    "EmbeddingPair",
    "NqVector",
    "amari_pullback",
    "amari_pullback_commutative",
    "d_embed",
    "duality_map",
    "nq_norm",
    "paired_metric",
    "pairing_residual",
    "wyd_pair",
    "DensityMatrix",
    "decompose_tangent",
    "eigh",
    "hs_inner",
    "mat_fn",
    "random_density",
    "random_hermitian",
    "random_tangent",
]
