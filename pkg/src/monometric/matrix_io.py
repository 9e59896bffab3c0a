"""JSON encoding of complex matrices.

Schema::

    {"dim": n, "rows": [[[re, im], ...], ...]}

A plain nested list of real numbers (or a flat list, for probability
vectors) is accepted on input as a convenience.
"""

import json
from pathlib import Path

import numpy as np

from .exceptions import ValidationError

__all__ = ["matrix_to_json", "matrix_from_json", "load_matrix", "load_vector", "dump_matrix"]


def matrix_to_json(M) -> dict:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {M.shape}")
    rows = [[[float(z.real), float(z.imag)] for z in row] for row in M]
    return {"dim": int(M.shape[0]), "rows": rows}


def matrix_from_json(obj) -> np.ndarray:
    if isinstance(obj, dict):
        try:
            dim, rows = int(obj["dim"]), obj["rows"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed matrix JSON: {exc}") from None
        try:
            M = np.array([[complex(re, im) for re, im in row] for row in rows])
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"malformed matrix entries: {exc}") from None
        if M.shape != (dim, dim):
            raise ValidationError(f"matrix JSON declares dim={dim} but rows have shape {M.shape}")
        return M
    try:
        M = np.array(obj, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"malformed matrix JSON: {exc}") from None
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {M.shape}")
    return M


def _read_json(source: str):
    text = source.strip()
    if not text.startswith(("{", "[")):
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise ValidationError(f"cannot read {source!r}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON in {source!r}: {exc.msg}") from None


def load_matrix(source: str) -> np.ndarray:
    """Read a matrix from a file path or an inline JSON string."""
    return matrix_from_json(_read_json(source))


def load_vector(source: str) -> np.ndarray:
    obj = _read_json(source)
    try:
        v = np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"malformed vector JSON: {exc}") from None
    if v.ndim != 1:
        raise ValidationError(f"expected a flat list of reals, got shape {v.shape}")
    return v


def dump_matrix(M, path) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(M)) + "\n")
