"""Operator monotone functions and their Chentsov-Morotzova kernels.

A :class:`MonotoneFunction` bundles a vectorised evaluator ``f`` on
``(0, inf)`` with its derivative. The associated kernel is
``c_f(x, y) = 1 / (y f(x / y))``; :func:`cm_eval` evaluates it with the
diagonal limit ``c_f(x, x) = 1 / x`` for normalised ``f``.

``claimed_opmono`` records the expected status only. Whether a function is
actually operator monotone is decided by :mod:`monometric.verify`.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import exprel

from ._grammar import format_param, parse_spec
from .exceptions import DomainError, ValidationError

__all__ = [
    "TAU_DIAG",
    "MonotoneFunction",
    "NormalizationReport",
    "f_wyd",
    "f_bures",
    "f_power",
    "monomial",
    "ando_transform",
    "from_callable",
    "tabulated",
    "numeric_derivative",
    "cm_eval",
    "catalog",
    "lookup",
    "check_normalized_symmetric",
    "default_grid",
]

TAU_DIAG = 1e-9

WYD_P_GRID = tuple(np.round(np.arange(-1.0, 2.0001, 0.25), 10)) + (-2.0, -1.5, 2.5, 3.0)
POWER_NU_GRID = (0.5, 1.0, 1.25, 1.5, 1.75, 2.0, 3.0)


@dataclass(frozen=True, eq=False)
class MonotoneFunction:
    """Scalar function on ``(0, inf)`` with derivative and catalog metadata."""

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    deriv: Callable[[np.ndarray], np.ndarray]
    params: dict = field(default_factory=dict)
    claimed_opmono: bool = False

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float))

    def derivative(self, x):
        return self.deriv(np.asarray(x, dtype=float))

    def kernel(self, x, y):
        return cm_eval(self, x, y)

    def __repr__(self):
        return f"MonotoneFunction({self.name!r}, claimed_opmono={self.claimed_opmono})"


def numeric_derivative(func: Callable, rel_step: float = 1e-3) -> Callable:
    """Five-point central difference with step ``rel_step * x``."""

    def deriv(x):
        x = np.asarray(x, dtype=float)
        h = rel_step * x
        return (-func(x + 2 * h) + 8 * func(x + h) - 8 * func(x - h) + func(x - 2 * h)) / (12 * h)

    return deriv


def from_callable(name: str, func: Callable, deriv: Callable | None = None,
                  claimed_opmono: bool = False, **params) -> MonotoneFunction:
    """Wrap a user function; the derivative defaults to finite differences."""
    return MonotoneFunction(name, func, deriv or numeric_derivative(func), params, claimed_opmono)


def _dlog_exprel(z):
    # d/dz log((e^z - 1) / z) = 1 / (1 - e^-z) - 1/z
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1e-3
    zs = np.where(small, 1.0, z)
    with np.errstate(over="ignore", divide="ignore"):
        big = 1.0 / (-np.expm1(-zs)) - 1.0 / zs
    series = 0.5 + z / 12.0 - z**3 / 720.0 + z**5 / 30240.0
    return np.where(small, series, big)


def f_wyd(p: float) -> MonotoneFunction:
    """Wigner-Yanase-Dyson function ``f_p``.

    ``f_p(x) = p(1-p) (x-1)^2 / ((x^p - 1)(x^(1-p) - 1))`` with the limits
    ``f_0 = f_1 = (x-1)/log x`` and ``f_p(1) = 1``. Writing ``u = log x``
    the function equals ``E(u)^2 / (E(pu) E((1-p)u))`` with
    ``E(z) = (e^z - 1)/z``, which is continuous in both ``x`` and ``p``.
    """
    p = float(p)
    q = 1.0 - p

    def func(x):
        x = np.asarray(x, dtype=float)
        if np.any(x <= 0):
            raise DomainError("f_p is defined on (0, inf)")
        u = np.log(x)
        return exprel(u) ** 2 / (exprel(p * u) * exprel(q * u))

    def deriv(x):
        u = np.log(np.asarray(x, dtype=float))
        slope = 2 * _dlog_exprel(u) - p * _dlog_exprel(p * u) - q * _dlog_exprel(q * u)
        return func(x) * slope / x

    return MonotoneFunction(
        name=f"wyd:p={format_param(p)}",
        func=func,
        deriv=deriv,
        params={"p": p},
        claimed_opmono=-1.0 <= p <= 2.0,
    )


def f_bures(name: str = "bures") -> MonotoneFunction:
    """``(1 + x)/2``, the SLD (Bures) function."""
    return MonotoneFunction(
        name,
        lambda x: 0.5 * (1.0 + x),
        lambda x: np.full_like(np.asarray(x, dtype=float), 0.5),
        {},
        True,
    )


def f_power(nu: float) -> MonotoneFunction:
    """``((1 + x^(1/nu)) / 2)^nu``.

    ``nu = 1`` is the Bures function and ``nu = 2`` is ``f_{1/2}``.
    """
    nu = float(nu)
    if nu <= 0:
        raise ValidationError("power family needs nu > 0")

    def func(x):
        return (0.5 * (1.0 + np.asarray(x, dtype=float) ** (1.0 / nu))) ** nu

    def deriv(x):
        x = np.asarray(x, dtype=float)
        r = x ** (1.0 / nu)
        return 0.5 * (0.5 * (1.0 + r)) ** (nu - 1.0) * r / x

    # every nu >= 1 is the Ando transform of the Bures function
    return MonotoneFunction(f"power:nu={format_param(nu)}", func, deriv, {"nu": nu}, nu >= 1.0)


def monomial(k: float) -> MonotoneFunction:
    """``x^k``; operator monotone exactly for ``0 <= k <= 1``."""
    k = float(k)
    return MonotoneFunction(
        f"monomial:k={format_param(k)}",
        lambda x: np.asarray(x, dtype=float) ** k,
        lambda x: k * np.asarray(x, dtype=float) ** (k - 1.0),
        {"k": k},
        0.0 <= k <= 1.0,
    )


def ando_transform(f: MonotoneFunction, nu: float) -> MonotoneFunction:
    """``x -> f(x^(1/nu))^nu`` for ``nu >= 1``."""
    nu = float(nu)
    if nu < 1.0:
        raise ValidationError(f"Ando transform needs nu >= 1, got {nu}")
    if nu == 1.0:
        return f

    def func(x):
        return f(np.asarray(x, dtype=float) ** (1.0 / nu)) ** nu

    def deriv(x):
        x = np.asarray(x, dtype=float)
        r = x ** (1.0 / nu)
        return f(r) ** (nu - 1.0) * f.derivative(r) * r / x

    return MonotoneFunction(
        f"ando({f.name},nu={format_param(nu)})",
        func,
        deriv,
        {"nu": nu, "base": f.name},
        f.claimed_opmono,
    )


def tabulated(xs, values, name: str = "table") -> MonotoneFunction:
    """Positive sampled function, interpolated by a cubic spline in log-log space.

    Evaluation outside ``[min(xs), max(xs)]`` raises :class:`DomainError`.
    """
    xs = np.asarray(xs, dtype=float)
    values = np.asarray(values, dtype=float)
    order = np.argsort(xs)
    xs, values = xs[order], values[order]
    if len(xs) < 4 or np.any(xs <= 0) or np.any(values <= 0):
        raise ValidationError("table needs >= 4 rows with positive x and positive values")
    spline = CubicSpline(np.log(xs), np.log(values))
    lo, hi = xs[0], xs[-1]

    def _check(x):
        x = np.asarray(x, dtype=float)
        if np.any((x < lo * (1 - 1e-12)) | (x > hi * (1 + 1e-12))):
            raise DomainError(f"table {name!r} only covers [{lo:g}, {hi:g}]")
        return x

    def func(x):
        return np.exp(spline(np.log(_check(x))))

    def deriv(x):
        x = _check(x)
        return func(x) * spline(np.log(x), 1) / x

    return MonotoneFunction(name, func, deriv, {}, False)


def read_table(path: str, columns: int) -> np.ndarray:
    """Read a headed CSV of floats and return an ``(n, columns)`` array."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ValidationError(f"cannot read table {path!r}: {exc.strerror}") from None
    body = [r for r in rows[1:] if r]
    try:
        data = np.array([[float(v) for v in r] for r in body])
    except ValueError as exc:
        raise ValidationError(f"non-numeric entry in table {path!r}: {exc}") from None
    if data.ndim != 2 or data.shape[1] != columns:
        raise ValidationError(f"table {path!r} must have {columns} columns")
    return data


def cm_eval(f: MonotoneFunction, x, y, tau_diag: float = TAU_DIAG):
    """Chentsov-Morotzova kernel ``1 / (y f(x/y))``, vectorised over ``x, y``.

    Points with ``|x - y| <= tau_diag * max(x, y)`` return the diagonal
    limit ``1/x``.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("CM kernel is defined for x, y > 0")
    out = 1.0 / (y * f(x / y))
    diag = np.abs(x - y) <= tau_diag * np.maximum(x, y)
    out = np.where(diag, 1.0 / x, out)
    return out if out.ndim else float(out)


def catalog() -> list[MonotoneFunction]:
    """Normalised representatives of the families handled by the package."""
    named = [lookup(n) for n in ("bures", "bkm", "wy", "rld")]
    return named + [f_wyd(p) for p in WYD_P_GRID] + [f_power(nu) for nu in POWER_NU_GRID]


_ALIASES = {
    "bures": lambda: f_bures("bures"),
    "sld": lambda: f_bures("sld"),
    "bkm": lambda: replace(f_wyd(0.0), name="bkm"),
    "wy": lambda: replace(f_wyd(0.5), name="wy"),
    "rld": lambda: replace(f_wyd(-1.0), name="rld"),
    "identity": lambda: replace(monomial(1.0), name="identity"),
}


def _require(params: dict, key: str, spec: str) -> float:
    if set(params) != {key}:
        raise ValidationError(f"{spec!r} needs exactly one parameter {key}=<value>")
    return params[key]


def lookup(spec: str) -> MonotoneFunction:
    """Resolve ``"wyd:p=0.5"``, ``"power:nu=1.5"``, ``"bures"``, ``"bkm"``, ...

    Also accepts ``"monomial:k=2"`` (controls) and ``"table:<csv>"`` with
    columns ``x,f``.
    """
    name, params = parse_spec(spec)
    if name in _ALIASES:
        if params:
            raise ValidationError(f"{name!r} takes no parameters")
        return _ALIASES[name]()
    if name == "wyd":
        return f_wyd(_require(params, "p", spec))
    if name == "power":
        return f_power(_require(params, "nu", spec))
    if name == "monomial":
        return monomial(_require(params, "k", spec))
    if name == "table":
        data = read_table(params["path"], 2)
        return tabulated(data[:, 0], data[:, 1], name=spec)
    raise ValidationError(f"unknown function {spec!r}")


def default_grid(n: int = 200, lo: float = 1e-3, hi: float = 1e3) -> np.ndarray:
    return np.geomspace(lo, hi, n)


@dataclass(frozen=True)
class NormalizationReport:
    symmetry_residual: float
    normalization_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.symmetry_residual <= self.tol and self.normalization_residual <= self.tol


def check_normalized_symmetric(f: MonotoneFunction, grid=None, tol: float = 1e-9) -> NormalizationReport:
    """Max of ``|f(x) - x f(1/x)|`` over ``grid`` and ``|f(1) - 1|``."""
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float)
    sym = float(np.max(np.abs(f(grid) - grid * f(1.0 / grid))))
    norm = float(abs(f(np.array([1.0]))[0] - 1.0))
    return NormalizationReport(sym, norm, tol)
