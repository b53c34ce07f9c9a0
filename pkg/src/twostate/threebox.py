"""The three-box pre/post-selection scenario and its reference values."""

from __future__ import annotations

import math

import numpy as np

from .linalg import Ket, OrthonormalBasis

_R3 = math.sqrt(3.0)

PSI = Ket(np.array([1, 1, 1]) / _R3, label="psi")
PHI = Ket(np.array([1, 1, -1]) / _R3, label="phi")
PHI_PRIME = Ket(np.array([1 / _R3, (-3 - _R3) / 6, (-3 + _R3) / 6]), label="phi'")
PHI_DOUBLE_PRIME = Ket(np.array([1 / _R3, (3 - _R3) / 6, (3 + _R3) / 6]), label="phi''")

POSTSELECTION_BASIS = OrthonormalBasis.from_kets([PHI, PHI_PRIME, PHI_DOUBLE_PRIME])
BOXES = OrthonormalBasis.computational(3)
BOX_LABELS = ("A", "B", "C")

# Published figures, rounded to two decimals where the source rounds.
REFERENCE_WEAK_VALUES = (1.0, 1.0, -1.0)
REFERENCE_PROBABILITIES = (0.11, 0.06, 0.83)
REFERENCE_INVERSE_OVERLAPS = (3.0, 4.10, 1.10)  # S_c = -log_3 of these
REFERENCE_TOTAL_BASE3 = -0.26


def box_projector(index: int) -> np.ndarray:
    proj = np.zeros((3, 3), dtype=complex)
    proj[index, index] = 1.0
    return proj
