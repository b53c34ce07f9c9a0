"""Dirac (Kirkwood-Dirac) quasi-probability distributions over two bases."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    EPS_NORM,
    DimensionError,
    OrthonormalBasis,
    as_ket,
    check_density,
    inner_product,
)

OVERLAP_TOL = 1e-6


class OrthogonalityError(ValueError):
    """Raised when an overlap required to be nonzero falls below threshold."""


@dataclass(frozen=True)
class DiracDistribution:
    """Quasi-probability table ``table[m, n] = Tr[rho P_a^m P_b^n]``.

    Rows index ``basis_a``, columns index ``basis_b``. Entries are complex in
    general; rows and columns sum to the real Born probabilities.
    """

    basis_a: OrthonormalBasis
    basis_b: OrthonormalBasis
    table: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis_a.dim

    def total(self) -> complex:
        return complex(self.table.sum())


def dirac_distribution(rho, basis_a: OrthonormalBasis, basis_b: OrthonormalBasis) -> DiracDistribution:
    rho = check_density(rho)
    d = rho.shape[0]
    if basis_a.dim != d or basis_b.dim != d:
        raise DimensionError(f"bases of dims {basis_a.dim}, {basis_b.dim} vs rho of dim {d}")
    a = basis_a.matrix
    b = basis_b.matrix
    # <b_n|rho|a_m> arranged as [m, n], times <a_m|b_n>
    b_rho_a = (b.conj().T @ rho @ a).T
    a_b = a.conj().T @ b
    table = b_rho_a * a_b
    table.setflags(write=False)
    return DiracDistribution(basis_a, basis_b, table)


def _real_marginal(sums: np.ndarray) -> np.ndarray:
    residue = np.max(np.abs(sums.imag))
    if residue > EPS_NORM:
        raise ValueError(f"marginal has imaginary residue {residue:.3e}")
    return sums.real.copy()


def marginal_a(dist: DiracDistribution) -> np.ndarray:
    """Born probabilities over ``basis_a`` (row sums)."""
    return _real_marginal(dist.table.sum(axis=1))


def marginal_b(dist: DiracDistribution) -> np.ndarray:
    """Born probabilities over ``basis_b`` (column sums)."""
    return _real_marginal(dist.table.sum(axis=0))


def reconstruct(dist: DiracDistribution, overlap_tol: float = OVERLAP_TOL) -> np.ndarray:
    """Recover the density operator from its Dirac table.

    With the table oriented as ``Tr[rho P_a P_b] = <b|rho|a><a|b>``, the exact
    inverse is ``sum_mn table[m, n] |b_n><a_m| / <a_m|b_n>``. All cross-basis
    overlaps must exceed ``overlap_tol``.
    """
    a = dist.basis_a.matrix
    b = dist.basis_b.matrix
    a_b = a.conj().T @ b
    smallest = np.min(np.abs(a_b))
    if smallest <= overlap_tol:
        raise OrthogonalityError(
            f"basis overlap {smallest:.3e} is below overlap_tol={overlap_tol:g}; "
            "reconstruction is singular"
        )
    coeff = dist.table / a_b  # coeff[m, n] = <b_n|rho|a_m>
    return b @ coeff.T @ a.conj().T


def conditional_dirac(psi, phi, basis_h: OrthonormalBasis, overlap_tol: float = OVERLAP_TOL) -> np.ndarray:
    """Conditional quasi-probabilities ``Pr(h|phi) = <phi|h><h|psi> / <phi|psi>``.

    Entry ``h`` is the weak value of the projector onto ``basis_h[h]``.
    """
    psi = as_ket(psi)
    phi = as_ket(phi)
    if basis_h.dim != psi.dim:
        raise DimensionError(f"basis dim {basis_h.dim} vs ket dim {psi.dim}")
    overlap = inner_product(phi, psi)
    if abs(overlap) <= overlap_tol:
        raise OrthogonalityError(
            f"|<phi|psi>| = {abs(overlap):.3e} is below overlap_tol={overlap_tol:g}"
        )
    h = basis_h.matrix
    phi_h = np.asarray(phi.amplitudes).conj() @ h
    h_psi = h.conj().T @ np.asarray(psi.amplitudes)
    return phi_h * h_psi / overlap
