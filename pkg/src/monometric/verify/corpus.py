"""Regression corpus of embedding pairs for the characterisation harness.

``power_pairs`` lists WYD pairs inside and outside the admissible range.
``perturbation_corpus`` lists epsilon-perturbations of admissible pairs,
none of which should induce a paired monotone metric.
"""

from __future__ import annotations

import numpy as np

from ..exceptions import ValidationError
from ..pullback import EmbeddingPair, log_pair, lookup_pair, wyd_pair

__all__ = ["power_pairs", "perturbation_corpus", "slope_matched_sqrt_pair", "resolve_pair"]

EPSILONS = (1e-2, 1e-1)


def power_pairs() -> list[tuple[EmbeddingPair, bool]]:
    """``(pair, expected_to_pass)`` for the WYD family and the log pair."""
    admissible = [wyd_pair(p) for p in np.round(np.arange(-1.0, 2.0001, 0.25), 10)]
    outside = [wyd_pair(p) for p in (-2.0, -1.5, 2.5, 3.0)]
    return [(p, True) for p in admissible + [log_pair()]] + [(p, False) for p in outside]


def _add(base: EmbeddingPair, which: str, g, dg, label: str) -> EmbeddingPair:
    if which == "phi":
        return EmbeddingPair(f"{base.name}|phi+{label}", lambda x: base.phi(x) + g(x),
                             lambda x: base.dphi(x) + dg(x), base.chi, base.dchi)
    return EmbeddingPair(f"{base.name}|chi+{label}", base.phi, base.dphi,
                         lambda x: base.chi(x) + g(x), lambda x: base.dchi(x) + dg(x))


def _add_square(base, which, eps):
    return _add(base, which, lambda x: eps * np.asarray(x) ** 2, lambda x: 2 * eps * np.asarray(x),
                f"{eps:g}*x^2")


def _add_log1p(base, which, eps):
    return _add(base, which, lambda x: eps * np.log1p(x), lambda x: eps / (1.0 + np.asarray(x)),
                f"{eps:g}*log(1+x)")


def _add_sinlog(base, which, eps):
    return _add(base, which, lambda x: eps * np.sin(np.log(x)),
                lambda x: eps * np.cos(np.log(x)) / np.asarray(x), f"{eps:g}*sin(log x)")


def _scaled(base: EmbeddingPair, eps: float) -> EmbeddingPair:
    s = 1.0 + eps
    return EmbeddingPair(f"{base.name}|phi*{s:g}", lambda x: s * base.phi(x),
                         lambda x: s * base.dphi(x), base.chi, base.dchi)


def _shifted_exponent(p: float, eps: float) -> EmbeddingPair:
    base = wyd_pair(p)
    r = p + eps
    return EmbeddingPair(f"{base.name}|phi=x^{r:g}/{r:g}", lambda x: np.asarray(x, dtype=float) ** r / r,
                         lambda x: np.asarray(x, dtype=float) ** (r - 1.0), base.chi, base.dchi)


def _cube_root_antiderivative(z):
    # antiderivative of 1 / (1 + z^3)
    z = np.asarray(z, dtype=float)
    return (np.log((z + 1.0) ** 2 / (z * z - z + 1.0)) / 6.0
            + np.arctan((2.0 * z - 1.0) / np.sqrt(3.0)) / np.sqrt(3.0))


def slope_matched_sqrt_pair(eps: float) -> EmbeddingPair:
    """``phi = 2 sqrt(x) + eps x^2`` with ``chi`` solving ``phi' chi' = 1/x``.

    ``chi(x) = int_1^x ds / (sqrt(s) + 2 eps s^2)``; with ``s = r^2`` this is
    ``2 int dr / (1 + 2 eps r^3)``, integrated in closed form.
    """
    if eps <= 0:
        raise ValidationError("slope-matched pair needs eps > 0")
    b = (2.0 * eps) ** (1.0 / 3.0)

    def phi(x):
        x = np.asarray(x, dtype=float)
        return 2.0 * np.sqrt(x) + eps * x**2

    def dphi(x):
        x = np.asarray(x, dtype=float)
        return 1.0 / np.sqrt(x) + 2.0 * eps * x

    def chi(x):
        x = np.asarray(x, dtype=float)
        return 2.0 / b * (_cube_root_antiderivative(b * np.sqrt(x)) - _cube_root_antiderivative(b))

    def dchi(x):
        return 1.0 / (np.asarray(x, dtype=float) * dphi(x))

    return EmbeddingPair(f"slope-matched:2sqrt(x)+{eps:g}x^2", phi, dphi, chi, dchi)


def perturbation_corpus() -> list[EmbeddingPair]:
    """Sixteen perturbed pairs, two epsilons per construction."""
    out = []
    for eps in EPSILONS:
        out += [
            _add_square(wyd_pair(0.5), "phi", eps),
            _add_square(log_pair(), "phi", eps),
            _add_log1p(wyd_pair(-0.5), "chi", eps),
            _add_sinlog(wyd_pair(1.5), "phi", eps),
            _add_square(wyd_pair(0.25), "chi", eps),
            _scaled(wyd_pair(1.5), eps),
            _shifted_exponent(0.5, eps),
            slope_matched_sqrt_pair(eps),
        ]
    return out


def resolve_pair(spec: str) -> EmbeddingPair:
    """:func:`monometric.pullback.lookup_pair` plus ``corpus:<index>`` and
    ``slope-matched:eps=<value>``."""
    s = spec.strip()
    if s.startswith("corpus:"):
        corpus = perturbation_corpus()
        try:
            return corpus[int(s.split(":", 1)[1])]
        except (ValueError, IndexError):
            raise ValidationError(f"corpus index must be 0..{len(corpus) - 1}, got {s!r}") from None
    if s.startswith("slope-matched:"):
        from .._grammar import parse_spec

        _, params = parse_spec(s)
        if set(params) != {"eps"}:
            raise ValidationError("slope-matched spec needs eps=<value>")
        return slope_matched_sqrt_pair(params["eps"])
    return lookup_pair(s)
