"""Two-state density operators and weak values of pre/post-selected ensembles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dirac import OVERLAP_TOL, OrthogonalityError, conditional_dirac
from .linalg import (
    DimensionError,
    Ket,
    OrthonormalBasis,
    as_ket,
    as_operator,
    inner_product,
    outer_product,
)


@dataclass(frozen=True)
class TwoStateDensity:
    """The operator ``|psi><phi| / <phi|psi>``.

    Trace one and rank one, but not Hermitian unless ``phi`` is ``psi`` up to
    a phase.
    """

    psi: Ket
    phi: Ket
    matrix: np.ndarray
    overlap: complex

    @property
    def dim(self) -> int:
        return self.psi.dim


def _overlap_or_raise(psi: Ket, phi: Ket, overlap_tol: float) -> complex:
    overlap = inner_product(phi, psi)
    if abs(overlap) <= overlap_tol:
        raise OrthogonalityError(
            f"pre- and post-selection are orthogonal: |<phi|psi>| = {abs(overlap):.3e} "
            f"<= overlap_tol={overlap_tol:g}"
        )
    return overlap


def two_state_density(psi, phi, overlap_tol: float = OVERLAP_TOL) -> TwoStateDensity:
    psi = as_ket(psi)
    phi = as_ket(phi)
    overlap = _overlap_or_raise(psi, phi, overlap_tol)
    matrix = outer_product(psi, phi) / overlap
    matrix.setflags(write=False)
    return TwoStateDensity(psi, phi, matrix, overlap)


def two_state_from_decomposition(
    psi, phi, basis_h: OrthonormalBasis, overlap_tol: float = OVERLAP_TOL
) -> TwoStateDensity:
    """Build the two-state operator as ``sum_h Pr(h|phi) |h><phi| / <phi|h>``.

    Independent of :func:`two_state_density`; the two agree identically, which
    the test suite checks rather than assumes.
    """
    psi = as_ket(psi)
    phi = as_ket(phi)
    overlap = _overlap_or_raise(psi, phi, overlap_tol)
    h = basis_h.matrix
    phi_vec = np.asarray(phi.amplitudes)
    phi_h = phi_vec.conj() @ h
    worst = np.min(np.abs(phi_h))
    if worst <= overlap_tol:
        raise OrthogonalityError(
            f"basis ket orthogonal to phi: min |<phi|h>| = {worst:.3e} <= overlap_tol={overlap_tol:g}"
        )
    weights = conditional_dirac(psi, phi, basis_h, overlap_tol) / phi_h
    matrix = np.zeros((psi.dim, psi.dim), dtype=complex)
    for k in range(basis_h.dim):
        matrix += weights[k] * np.outer(h[:, k], phi_vec.conj())
    matrix.setflags(write=False)
    return TwoStateDensity(psi, phi, matrix, overlap)


def weak_value(tsd: TwoStateDensity, pi) -> complex:
    """Weak value ``<phi|pi|psi> / <phi|psi>`` of an operator."""
    op = as_operator(pi, tsd.dim)
    psi = np.asarray(tsd.psi.amplitudes)
    phi = np.asarray(tsd.phi.amplitudes)
    return complex(phi.conj() @ op @ psi / tsd.overlap)


def weak_value_trace(tsd: TwoStateDensity, pi) -> complex:
    """Weak value as ``Tr[rho_{psi|phi} pi]``; cross-check for :func:`weak_value`."""
    op = as_operator(pi, tsd.dim)
    return complex(np.trace(tsd.matrix @ op))


def postselection_probability(psi, phi) -> float:
    """Born probability ``|<phi|psi>|^2`` of passing the post-selection."""
    return abs(inner_product(phi, psi)) ** 2


def mixture_reconstruct(psi, basis_phi: OrthonormalBasis, overlap_tol: float = OVERLAP_TOL) -> np.ndarray:
    """Return ``sum_phi Pr(phi) rho_{psi|phi}``, which equals ``|psi><psi|``.

    Terms with ``|<phi|psi>| <= overlap_tol`` are skipped: their weighted
    contribution ``<psi|phi> |psi><phi|`` vanishes in the limit.
    """
    psi = as_ket(psi)
    if basis_phi.dim != psi.dim:
        raise DimensionError(f"basis dim {basis_phi.dim} vs ket dim {psi.dim}")
    total = np.zeros((psi.dim, psi.dim), dtype=complex)
    for phi in basis_phi:
        if abs(inner_product(phi, psi)) <= overlap_tol:
            continue
        tsd = two_state_density(psi, phi, overlap_tol)
        total += postselection_probability(psi, phi) * tsd.matrix
    return total
