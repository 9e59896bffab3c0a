"""Numerical certification and falsification harness."""

from ._verdict import FAIL, INCONCLUSIVE, PASS, TAU_PSD, WITNESS_THRESHOLD, MonotonicityVerdict
from .channels import (
    QuantumChannel,
    StochasticMap,
    apply_channel,
    classical_contraction_test,
    contraction_test,
    dephasing_channel,
    merge_identity,
    merge_map,
    random_cptp,
    random_stochastic,
    reverify_contraction,
    unitary_channel,
)
from .characterize import CheckResult, PairCharacterization, characterize_pair, normalize_pair
from .corpus import perturbation_corpus, power_pairs, resolve_pair, slope_matched_sqrt_pair
from .opmono import (
    PowerScanRow,
    loewner_matrix,
    loewner_test,
    opmono_matrix_search,
    power_family_scan,
    reverify_loewner,
    reverify_matrix_pair,
)
from .regvar import RVEstimate, lookup_h, rv_index

__all__ = [
    "PASS", "FAIL", "INCONCLUSIVE", "TAU_PSD", "WITNESS_THRESHOLD",
    "MonotonicityVerdict", "QuantumChannel", "StochasticMap", "apply_channel",
    "classical_contraction_test", "contraction_test", "dephasing_channel", "merge_identity",
    "merge_map", "random_cptp", "random_stochastic", "reverify_contraction", "unitary_channel",
    "CheckResult", "PairCharacterization", "characterize_pair", "normalize_pair",
    "perturbation_corpus", "power_pairs", "resolve_pair", "slope_matched_sqrt_pair",
    "PowerScanRow", "loewner_matrix", "loewner_test", "opmono_matrix_search",
    "power_family_scan", "reverify_loewner", "reverify_matrix_pair",
    "RVEstimate", "lookup_h", "rv_index",
]
