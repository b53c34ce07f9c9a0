"""Reading and writing state and basis files.

A state file is a JSON document::

    {"label": "psi", "dim": 3, "amplitudes": [[0.5773, 0.0], [0.5773, 0.0], [0.5773, 0.0]]}

Each amplitude is a ``[re, im]`` pair or a bare real number. A basis file
holds ``"kets"``, a list of amplitude lists, in place of ``"amplitudes"``.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np

from .linalg import Ket, OrthonormalBasis

log = logging.getLogger(__name__)

NORM_ACCEPT = 1e-6
NORM_RENORMALIZE = 1e-3
BASIS_TOL = 1e-6


class StateFileError(ValueError):
    """Malformed or unnormalizable state file."""


class InvalidBasisError(ValueError):
    """Kets that do not form an orthonormal basis within tolerance."""


def _parse_amplitudes(raw, where: str) -> np.ndarray:
    if not isinstance(raw, list) or not raw:
        raise StateFileError(f"{where}: amplitudes must be a non-empty list")
    out = np.empty(len(raw), dtype=complex)
    for i, entry in enumerate(raw):
        if isinstance(entry, (int, float)) and not isinstance(entry, bool):
            out[i] = float(entry)
        elif isinstance(entry, list) and len(entry) == 2 and all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry
        ):
            out[i] = complex(entry[0], entry[1])
        else:
            raise StateFileError(f"{where}: amplitude {i} must be [re, im] or a number, got {entry!r}")
    return out


def _checked_ket(vec: np.ndarray, label: str | None, where: str) -> Ket:
    dev = abs(np.linalg.norm(vec) - 1.0)
    if dev > NORM_RENORMALIZE:
        raise StateFileError(f"{where}: norm deviates from 1 by {dev:.3e} (limit {NORM_RENORMALIZE:g})")
    if dev > NORM_ACCEPT:
        log.warning("%s: norm deviates from 1 by %.3e; renormalizing", where, dev)
    return Ket.normalized(vec, label=label)


def _load_json(path) -> dict:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise StateFileError(f"{path}: {exc}") from None
    if not isinstance(doc, dict):
        raise StateFileError(f"{path}: expected a JSON object")
    return doc


def _check_dim(doc: dict, n: int, where: str) -> None:
    dim = doc.get("dim", n)
    if not isinstance(dim, int) or dim != n:
        raise StateFileError(f"{where}: dim={dim!r} but {n} amplitudes given")
    if n < 2:
        raise StateFileError(f"{where}: dimension must be >= 2")


def parse_state(doc: dict, where: str = "<state>") -> Ket:
    if "amplitudes" not in doc:
        raise StateFileError(f"{where}: missing 'amplitudes'")
    vec = _parse_amplitudes(doc["amplitudes"], where)
    _check_dim(doc, vec.size, where)
    label = doc.get("label")
    return _checked_ket(vec, None if label is None else str(label), where)


def parse_kets(doc: dict, where: str = "<basis>") -> list[Ket]:
    """Kets from either a state document or a basis document."""
    if "kets" not in doc:
        return [parse_state(doc, where)]
    rows = doc["kets"]
    if not isinstance(rows, list) or not rows:
        raise StateFileError(f"{where}: 'kets' must be a non-empty list")
    labels = doc.get("labels") or [None] * len(rows)
    kets = []
    for i, row in enumerate(rows):
        vec = _parse_amplitudes(row, f"{where}[{i}]")
        _check_dim(doc, vec.size, f"{where}[{i}]")
        kets.append(_checked_ket(vec, labels[i] if i < len(labels) else None, f"{where}[{i}]"))
    return kets


def load_state(path) -> Ket:
    return parse_state(_load_json(path), str(path))


def load_kets(paths) -> list[Ket]:
    kets: list[Ket] = []
    for path in paths:
        kets.extend(parse_kets(_load_json(path), str(path)))
    return kets


def basis_from_kets(kets: list[Ket], tol: float = BASIS_TOL) -> OrthonormalBasis:
    """Validate orthonormality within ``tol`` and polish to machine precision.

    The polish is a Loewdin (symmetric) orthonormalization, which moves each
    ket by at most O(tol).
    """
    dims = {k.dim for k in kets}
    if len(dims) != 1:
        raise InvalidBasisError(f"kets have mixed dimensions {sorted(dims)}")
    d = dims.pop()
    if len(kets) != d:
        raise InvalidBasisError(f"{len(kets)} kets cannot form a basis of dimension {d}")
    mat = np.column_stack([np.asarray(k.amplitudes) for k in kets])
    gram = mat.conj().T @ mat
    err = float(np.max(np.abs(gram - np.eye(d))))
    if err > tol:
        raise InvalidBasisError(f"kets are not orthonormal (max Gram deviation {err:.3e} > {tol:g})")
    vals, vecs = np.linalg.eigh(gram)
    inv_sqrt = (vecs / np.sqrt(vals)) @ vecs.conj().T
    return OrthonormalBasis(mat @ inv_sqrt)


def load_basis(paths) -> tuple[OrthonormalBasis, list[str | None]]:
    kets = load_kets(paths)
    return basis_from_kets(kets), [k.label for k in kets]


def _amplitude_list(vec) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(vec)]


def state_document(ket: Ket, label: str | None = None) -> dict:
    doc = {"dim": ket.dim, "amplitudes": _amplitude_list(ket.amplitudes)}
    label = label if label is not None else ket.label
    if label is not None:
        doc["label"] = label
    return doc


def basis_document(basis: OrthonormalBasis, labels=None) -> dict:
    doc = {"dim": basis.dim, "kets": [_amplitude_list(basis.matrix[:, i]) for i in range(basis.dim)]}
    if labels is not None:
        doc["labels"] = list(labels)
    return doc


def write_json(path, doc: dict) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
