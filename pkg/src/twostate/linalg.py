"""Small dense complex linear algebra: kets, bases, and matrix functions.

Operators are plain ``(d, d)`` complex numpy arrays. Kets and orthonormal
bases are thin immutable wrappers that validate normalization once, at
construction, so downstream code can trust them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

EPS_NORM = 1e-9
RANK_TOL = 1e-12


class DimensionError(ValueError):
    """Raised when operands have incompatible dimensions."""


class NotHermitianError(ValueError):
    """Raised when an operator expected to be Hermitian is not."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Ket:
    """Normalized complex state vector of dimension ``dim >= 2``."""

    amplitudes: np.ndarray
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        vec = np.asarray(self.amplitudes, dtype=complex)
        if vec.ndim != 1:
            raise DimensionError(f"ket must be one-dimensional, got shape {vec.shape}")
        if vec.size < 2:
            raise DimensionError(f"ket dimension must be >= 2, got {vec.size}")
        norm = np.linalg.norm(vec)
        if abs(norm - 1.0) > EPS_NORM:
            raise ValueError(f"ket is not normalized (norm = {norm!r})")
        object.__setattr__(self, "amplitudes", _frozen(vec))

    @classmethod
    def normalized(cls, amplitudes: Iterable[complex], label: str | None = None) -> "Ket":
        vec = np.asarray(np.asarray(amplitudes), dtype=complex)
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(vec / norm, label=label)

    @classmethod
    def basis_state(cls, dim: int, index: int) -> "Ket":
        vec = np.zeros(dim, dtype=complex)
        vec[index] = 1.0
        return cls(vec)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)

    def __len__(self) -> int:
        return self.dim


def as_ket(obj) -> Ket:
    """Coerce a Ket or array-like of amplitudes to a Ket (no renormalization)."""
    if isinstance(obj, Ket):
        return obj
    return Ket(np.asarray(obj, dtype=complex))


@dataclass(frozen=True)
class OrthonormalBasis:
    """Ordered orthonormal basis; ``matrix`` holds the kets as columns."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionError(f"basis matrix must be square, got shape {mat.shape}")
        if mat.shape[0] < 2:
            raise DimensionError("basis dimension must be >= 2")
        gram = mat.conj().T @ mat
        err = np.max(np.abs(gram - np.eye(mat.shape[0])))
        if err > EPS_NORM:
            raise ValueError(f"kets are not orthonormal (max Gram deviation {err:.3e})")
        object.__setattr__(self, "matrix", _frozen(mat))

    @classmethod
    def from_kets(cls, kets: Sequence) -> "OrthonormalBasis":
        vecs = [np.asarray(as_ket(k).amplitudes) for k in kets]
        dims = {v.size for v in vecs}
        if len(dims) != 1:
            raise DimensionError(f"kets have mixed dimensions {sorted(dims)}")
        if len(vecs) != vecs[0].size:
            raise DimensionError(f"need {vecs[0].size} kets for a complete basis, got {len(vecs)}")
        return cls(np.column_stack(vecs))

    @classmethod
    def computational(cls, dim: int) -> "OrthonormalBasis":
        return cls(np.eye(dim, dtype=complex))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def kets(self) -> tuple[Ket, ...]:
        return tuple(Ket(self.matrix[:, i]) for i in range(self.dim))

    def __getitem__(self, index: int) -> Ket:
        return Ket(self.matrix[:, index])

    def __len__(self) -> int:
        return self.dim

    def __iter__(self):
        return iter(self.kets)


def _check_dims(*dims: int) -> None:
    if len(set(dims)) != 1:
        raise DimensionError(f"dimension mismatch: {dims}")


def inner_product(bra, ket) -> complex:
    """Return <bra|ket>, conjugate-linear in the first argument."""
    b = np.asarray(as_ket(bra).amplitudes)
    k = np.asarray(as_ket(ket).amplitudes)
    _check_dims(b.size, k.size)
    return complex(np.vdot(b, k))


def outer_product(ket, bra) -> np.ndarray:
    """Return the operator |ket><bra|."""
    k = np.asarray(as_ket(ket).amplitudes)
    b = np.asarray(as_ket(bra).amplitudes)
    _check_dims(k.size, b.size)
    return np.outer(k, b.conj())


def projector(ket) -> np.ndarray:
    return outer_product(ket, ket)


def adjoint(op: np.ndarray) -> np.ndarray:
    return np.asarray(op).conj().T


def trace(op: np.ndarray) -> complex:
    return complex(np.trace(op))


def as_operator(op, dim: int | None = None) -> np.ndarray:
    mat = np.asarray(op, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionError(f"operator must be square, got shape {mat.shape}")
    if dim is not None and mat.shape[0] != dim:
        raise DimensionError(f"operator dimension {mat.shape[0]} does not match {dim}")
    return mat


def hermitian_eig(op, tol: float = EPS_NORM) -> tuple[np.ndarray, OrthonormalBasis]:
    """Eigendecomposition of a Hermitian operator.

    Returns
    -------
    eigenvalues : ndarray of float, ascending
    eigenvectors : OrthonormalBasis whose i-th ket pairs with ``eigenvalues[i]``
    """
    mat = as_operator(op)
    asym = np.max(np.abs(mat - mat.conj().T))
    # relative to the operator scale: rho rho^H grows like 1/|<phi|psi>|^2
    if asym > tol * max(1.0, np.max(np.abs(mat))):
        raise NotHermitianError(f"operator is not Hermitian (max |A - A^H| = {asym:.3e})")
    vals, vecs = np.linalg.eigh((mat + mat.conj().T) / 2)
    return vals, OrthonormalBasis(vecs)


def log_on_support(psd, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Matrix logarithm of a PSD operator restricted to its support.

    Eigenvalues at or below ``rank_tol`` are treated as the kernel, where the
    result is zero.
    """
    vals, basis = hermitian_eig(psd, tol=max(rank_tol, EPS_NORM))
    if vals[0] < -rank_tol:
        raise ValueError(f"operator is not positive semi-definite (eigenvalue {vals[0]:.3e})")
    vecs = basis.matrix
    support = vals > rank_tol
    logs = np.zeros_like(vals)
    logs[support] = np.log(vals[support])
    return (vecs * logs) @ vecs.conj().T


def singular_values(op) -> np.ndarray:
    """Singular values in descending order."""
    return np.linalg.svd(as_operator(op), compute_uv=False)


def _haar_from_gaussian(z: np.ndarray) -> np.ndarray:
    # Phase fixing on diag(R) makes QR output Haar-distributed and unique.
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phases = diag / np.abs(diag)
    return q * phases[..., None, :]


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    if dim < 2:
        raise DimensionError(f"dimension must be >= 2, got {dim}")
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    return _haar_from_gaussian(z)


def random_orthonormal_basis(dim: int, seed: int) -> OrthonormalBasis:
    """Haar-random orthonormal basis, reproducible for a given seed."""
    return OrthonormalBasis(haar_unitary(dim, np.random.default_rng(seed)))


def random_unitaries(dim: int, count: int, seed: int) -> np.ndarray:
    """Stack of ``count`` Haar unitaries; entry ``i`` depends only on ``(seed, i)``.

    Each slice equals ``haar_unitary(dim, np.random.default_rng((seed, i)))``,
    so results do not depend on how a caller chunks the index range.
    """
    if dim < 2:
        raise DimensionError(f"dimension must be >= 2, got {dim}")
    z = np.empty((count, dim, dim), dtype=complex)
    for i in range(count):
        rng = np.random.default_rng((seed, i))
        z[i] = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return _haar_from_gaussian(z / np.sqrt(2))


def random_ket(dim: int, rng: np.random.Generator) -> Ket:
    return Ket(haar_unitary(dim, rng)[:, 0])


class InvalidDensityError(ValueError):
    """Raised when an operator is not a valid density operator."""


def check_density(rho, tol: float = EPS_NORM) -> np.ndarray:
    """Validate Hermitian, positive semi-definite, unit-trace; return the matrix."""
    mat = as_operator(rho)
    try:
        vals, _ = hermitian_eig(mat, tol=tol)
    except NotHermitianError as exc:
        raise InvalidDensityError(str(exc)) from None
    if vals[0] < -tol:
        raise InvalidDensityError(f"density operator has negative eigenvalue {vals[0]:.3e}")
    tr = np.trace(mat)
    if abs(tr - 1.0) > tol:
        raise InvalidDensityError(f"density operator trace is {tr!r}, expected 1")
    return mat


def partial_trace(rho, dim_a: int, dim_b: int, keep: str = "b") -> np.ndarray:
    """Reduce an operator on A (x) B, with A the slow index, to one factor."""
    mat = as_operator(rho)
    if mat.shape[0] != dim_a * dim_b:
        raise DimensionError(f"operator dimension {mat.shape[0]} != {dim_a} * {dim_b}")
    t = mat.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "b":
        return np.einsum("ijik->jk", t)
    if keep == "a":
        return np.einsum("ijkj->ik", t)
    raise ValueError(f"keep must be 'a' or 'b', got {keep!r}")
