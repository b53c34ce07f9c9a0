"""Entropies conditioned on post-selection, bounds, and a numerical bound scan.

All functions take a ``base`` argument: ``"e"``/``None`` for natural logs or a
real number greater than one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .dirac import OVERLAP_TOL, OrthogonalityError
from .linalg import (
    RANK_TOL,
    DimensionError,
    Ket,
    OrthonormalBasis,
    as_ket,
    check_density,
    hermitian_eig,
    inner_product,
    log_on_support,
    partial_trace,
    random_unitaries,
)
from .postselect import two_state_density

PROB_FLOOR = 1e-15
IMAG_TOL = 1e-9


class ResidueError(ArithmeticError):
    """A quantity that must be real came out with a significant imaginary part."""


@dataclass(frozen=True)
class LogBase:
    """Logarithm base; ``base=None`` means natural."""

    base: float | None = None

    def __post_init__(self):
        if self.base is not None and not self.base > 1:
            raise ValueError(f"log base must exceed 1, got {self.base!r}")

    @property
    def ln_base(self) -> float:
        return 1.0 if self.base is None else math.log(self.base)

    def log(self, x):
        return np.log(x) / self.ln_base

    def __str__(self) -> str:
        return "e" if self.base is None else f"{self.base:g}"


def as_log_base(base) -> LogBase:
    if isinstance(base, LogBase):
        return base
    if base is None or (isinstance(base, str) and base.lower() in ("e", "natural", "ln")):
        return LogBase()
    return LogBase(float(base))


def conditional_entropy_selected(psi, phi, base="e", overlap_tol: float = OVERLAP_TOL) -> float:
    """``S_c = -1/2 Tr[rho log(rho rho^H)]`` for ``rho = |psi><phi|/<phi|psi>``.

    Evaluated the long way round (matrix product, log on the support, trace)
    and checked to be real.
    """
    lb = as_log_base(base)
    rho = two_state_density(psi, phi, overlap_tol).matrix
    log_gram = log_on_support(rho @ rho.conj().T, RANK_TOL)
    value = -0.5 * np.trace(rho @ log_gram)
    if abs(value.imag) > IMAG_TOL:
        raise ResidueError(f"S_c trace has imaginary residue {value.imag:.3e}")
    return float(value.real) / lb.ln_base


def conditional_entropy_selected_closed(psi, phi, base="e", overlap_tol: float = OVERLAP_TOL) -> float:
    """Closed form ``log |<phi|psi>|``."""
    overlap = abs(inner_product(as_ket(phi), as_ket(psi)))
    if overlap <= overlap_tol:
        raise OrthogonalityError(
            f"|<phi|psi>| = {overlap:.3e} <= overlap_tol={overlap_tol:g}"
        )
    return float(as_log_base(base).log(overlap))


def _entropy_from_probs(p: np.ndarray, lb: LogBase) -> np.ndarray:
    # sum_i p_i log sqrt(p_i) along the last axis, 0 log 0 = 0
    safe = np.where(p < PROB_FLOOR, 1.0, p)
    terms = np.where(p < PROB_FLOOR, 0.0, 0.5 * p * np.log(safe))
    return terms.sum(axis=-1) / lb.ln_base


def conditional_entropy(psi, basis_phi: OrthonormalBasis, base="e") -> float:
    """Average ``S_C = sum_phi |<phi|psi>|^2 log |<phi|psi>|`` over a basis."""
    psi = as_ket(psi)
    if basis_phi.dim != psi.dim:
        raise DimensionError(f"basis dim {basis_phi.dim} vs ket dim {psi.dim}")
    p = np.abs(basis_phi.matrix.conj().T @ np.asarray(psi.amplitudes)) ** 2
    return float(_entropy_from_probs(p, as_log_base(base)))


def von_neumann_entropy(rho, base="e") -> float:
    lb = as_log_base(base)
    vals, _ = hermitian_eig(check_density(rho))
    vals = vals[vals >= PROB_FLOOR]
    value = -float(np.sum(vals * np.log(vals))) / lb.ln_base
    return max(value, 0.0)


def cerf_adami_conditional(rho_ab, dim_a: int, dim_b: int, base="e") -> float:
    """``S(A|B) = S(AB) - S(B)``, with A the slow tensor index."""
    rho_ab = check_density(rho_ab)
    if rho_ab.shape[0] != dim_a * dim_b:
        raise DimensionError(f"rho dimension {rho_ab.shape[0]} != {dim_a} * {dim_b}")
    rho_b = partial_trace(rho_ab, dim_a, dim_b, keep="b")
    return von_neumann_entropy(rho_ab, base) - von_neumann_entropy(rho_b, base)


def entropy_bounds(dim: int, base="e") -> tuple[float, float]:
    """Return ``(stated_bound, derived_bound)`` on ``S_C`` in dimension ``dim``.

    ``stated_bound`` is ``(1/d) log(1/sqrt(d))``. ``derived_bound`` is
    ``-(1/2) log d``, the value at equal overlaps ``|<phi|psi>|^2 = 1/d``,
    which is the true minimum. The stated bound lies strictly above it and is
    violated by the equal-overlap configuration.
    """
    if dim < 2:
        raise DimensionError(f"dimension must be >= 2, got {dim}")
    lb = as_log_base(base)
    log_d = math.log(dim) / lb.ln_base
    return -log_d / (2 * dim), -0.5 * log_d


@dataclass(frozen=True)
class BoundReport:
    dim: int
    paper_bound: float
    derived_bound: float
    min_found: float
    argmin_basis: OrthonormalBasis
    trials: int
    seed: int
    refined: bool = False
    sampled_min: float = float("nan")
    optimizer_iterations: int = 0

    @property
    def below_paper_bound(self) -> bool:
        return self.min_found < self.paper_bound


def givens_unitary(params: np.ndarray, dim: int) -> np.ndarray:
    """Unitary from ``dim*(dim-1)`` reals: one (angle, phase) per index pair."""
    u = np.eye(dim, dtype=complex)
    k = 0
    for i in range(dim - 1):
        for j in range(i + 1, dim):
            theta, phase = params[k], params[k + 1]
            k += 2
            c, s = math.cos(theta), math.sin(theta)
            e = complex(math.cos(phase), math.sin(phase))
            col_i = u[:, i].copy()
            col_j = u[:, j]
            u[:, i] = c * col_i + e * s * col_j
            u[:, j] = -s * np.conj(e) * col_i + c * col_j
    return u


def scan_min_entropy(
    psi,
    trials: int,
    seed: int,
    base="e",
    refine: bool = True,
    max_iter: int = 500,
    tol: float = 1e-10,
    max_restarts: int = 20,
    simplex_step: float = 0.1,
) -> BoundReport:
    """Search for the minimum of ``S_C(psi | basis)`` over orthonormal bases.

    Samples ``trials`` Haar bases (trial ``i`` seeded by ``(seed, i)``), then
    optionally polishes the best one with Nelder-Mead over Givens rotations.
    Each polish run is capped at ``max_iter`` iterations; the simplex is
    recentred on the incumbent and rerun while it still improves by more than
    ``tol``, at most ``max_restarts`` times.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    psi = as_ket(psi)
    lb = as_log_base(base)
    dim = psi.dim
    vec = np.asarray(psi.amplitudes)

    unitaries = random_unitaries(dim, trials, seed)
    overlaps = np.einsum("tij,i->tj", unitaries.conj(), vec)
    values = _entropy_from_probs(np.abs(overlaps) ** 2, lb)
    best = int(np.argmin(values))
    best_u = unitaries[best]
    best_val = float(values[best])
    sampled_min = best_val
    iterations = 0

    if refine:
        def objective(x, start):
            u = start @ givens_unitary(x, dim)
            return float(_entropy_from_probs(np.abs(u.conj().T @ vec) ** 2, lb))

        n_params = dim * (dim - 1)
        x0 = np.zeros(n_params)
        # scipy's default simplex around x0 = 0 is ~2.5e-4 wide, too small to travel
        simplex = np.vstack([x0, simplex_step * np.eye(n_params)])
        for _ in range(max_restarts):
            res = minimize(
                objective, x0, args=(best_u,), method="Nelder-Mead",
                options={"maxiter": max_iter, "xatol": tol, "fatol": tol,
                         "initial_simplex": simplex},
            )
            iterations += int(res.nit)
            if res.fun >= best_val - tol:
                if res.fun < best_val:
                    best_u = best_u @ givens_unitary(res.x, dim)
                    best_val = float(res.fun)
                break
            best_u = best_u @ givens_unitary(res.x, dim)
            best_val = float(res.fun)

    stated, derived = entropy_bounds(dim, lb)
    if refine:
        # strip rounding accumulated by chained rotations
        q, r = np.linalg.qr(best_u)
        best_u = q * (np.diag(r) / np.abs(np.diag(r)))
    basis = OrthonormalBasis(best_u)
    min_found = conditional_entropy(psi, basis, lb)
    return BoundReport(
        dim=dim,
        paper_bound=stated,
        derived_bound=derived,
        min_found=min_found,
        argmin_basis=basis,
        trials=trials,
        seed=seed,
        refined=refine,
        sampled_min=sampled_min,
        optimizer_iterations=iterations,
    )


def equal_overlap_basis(psi: Ket) -> OrthonormalBasis:
    """A basis with every ``|<phi|psi>|^2 = 1/d`` (Fourier basis rotated onto psi)."""
    psi = as_ket(psi)
    d = psi.dim
    k = np.arange(d)
    fourier = np.exp(2j * np.pi * np.outer(k, k) / d) / np.sqrt(d)
    vec = np.asarray(psi.amplitudes)
    # rows 1.. of vh span the orthogonal complement of psi (conjugated)
    _, _, vh = np.linalg.svd(vec.conj()[None, :])
    q = np.column_stack([vec, vh[1:].conj().T])
    return OrthonormalBasis(q @ fourier)
