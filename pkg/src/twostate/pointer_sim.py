"""Gaussian-pointer simulation of a weak measurement with post-selection.

Model: a pointer with wavefunction ``G(q) = (2 pi sigma^2)^(-1/4) exp(-q^2 / (4 sigma^2))``
couples impulsively to a projector ``P`` through ``exp(-i g P p)``, which
shifts the pointer by ``g`` on the ``P = 1`` branch. After post-selecting the
system on ``phi`` the (unnormalized) pointer state is

    xi(q) = alpha G(q) + beta G(q - g),   alpha = <phi|(1-P)|psi>,  beta = <phi|P|psi>.

With ``eps = exp(-g^2 / (8 sigma^2))`` (the overlap of the two Gaussians) the
exact moments are

    N       = |alpha|^2 + |beta|^2 + 2 Re(alpha* beta) eps
    <q> N   = g (|beta|^2 + Re(alpha* beta) eps)
    <p> N   = g eps Im(alpha* beta) / (2 sigma^2)

so ``<q>/g -> Re(w)`` and ``<p> 2 sigma^2 / g -> Im(w)`` as ``g/sigma -> 0``,
where ``w = beta / (alpha + beta)`` is the weak value. Units have hbar = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dirac import OVERLAP_TOL, OrthogonalityError
from .linalg import EPS_NORM, as_ket, as_operator, inner_product

WEAK_RATIO = 0.1
MIN_SAMPLES = 100
_CHUNK = 1 << 18
_MAX_ROUNDS = 10_000


@dataclass(frozen=True)
class PointerModel:
    sigma: float
    g: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma!r}")

    @property
    def weak_ratio(self) -> float:
        return abs(self.g) / self.sigma

    @property
    def is_weak(self) -> bool:
        return self.weak_ratio <= WEAK_RATIO


@dataclass(frozen=True)
class PostSelectedPointer:
    alpha: complex
    beta: complex
    model: PointerModel

    @property
    def overlap(self) -> complex:
        return self.alpha + self.beta

    @property
    def weak_value(self) -> complex:
        return self.beta / self.overlap

    @property
    def gaussian_overlap(self) -> float:
        g, sigma = self.model.g, self.model.sigma
        return math.exp(-g * g / (8 * sigma * sigma))

    @property
    def norm(self) -> float:
        a, b = self.alpha, self.beta
        cross = (a.conjugate() * b).real
        return abs(a) ** 2 + abs(b) ** 2 + 2 * cross * self.gaussian_overlap


@dataclass(frozen=True)
class WeakMeasurementResult:
    re_estimate: float
    im_estimate: float
    re_stderr: float
    im_stderr: float
    samples: int
    g: float
    sigma: float
    exact_weak_value: complex
    seed: int


def _check_projector(pi: np.ndarray) -> None:
    herm = np.max(np.abs(pi - pi.conj().T))
    idem = np.max(np.abs(pi @ pi - pi))
    if herm > EPS_NORM or idem > EPS_NORM:
        raise ValueError(
            f"operator is not an orthogonal projector (|P - P^H| = {herm:.2e}, |P^2 - P| = {idem:.2e})"
        )


def postselected_pointer(psi, phi, pi, model: PointerModel, overlap_tol: float = OVERLAP_TOL) -> PostSelectedPointer:
    psi = as_ket(psi)
    phi = as_ket(phi)
    op = as_operator(pi, psi.dim)
    _check_projector(op)
    overlap = inner_product(phi, psi)
    if abs(overlap) <= overlap_tol:
        raise OrthogonalityError(
            f"|<phi|psi>| = {abs(overlap):.3e} <= overlap_tol={overlap_tol:g}"
        )
    beta = complex(np.asarray(phi.amplitudes).conj() @ op @ np.asarray(psi.amplitudes))
    return PostSelectedPointer(alpha=overlap - beta, beta=beta, model=model)


def analytic_moments(pp: PostSelectedPointer) -> tuple[float, float, float]:
    """Exact ``(<q>, <p>, postselection probability)`` of the pointer."""
    norm = pp.norm
    if norm <= 1e-300:
        raise ZeroDivisionError("post-selected pointer state has zero norm")
    g, sigma = pp.model.g, pp.model.sigma
    eps = pp.gaussian_overlap
    cross = pp.alpha.conjugate() * pp.beta
    mean_q = g * (abs(pp.beta) ** 2 + cross.real * eps) / norm
    mean_p = g * eps * cross.imag / (2 * sigma * sigma) / norm
    return mean_q, mean_p, norm


def _gauss_amp(x: np.ndarray, sigma: float) -> np.ndarray:
    return (2 * np.pi * sigma * sigma) ** -0.25 * np.exp(-x * x / (4 * sigma * sigma))


def _rejection(rng: np.random.Generator, n: int, propose, accept_prob) -> np.ndarray:
    out = np.empty(n)
    filled = 0
    for _ in range(_MAX_ROUNDS):
        x = propose(rng, _CHUNK)
        keep = x[rng.random(_CHUNK) < accept_prob(x)]
        take = min(keep.size, n - filled)
        out[filled:filled + take] = keep[:take]
        filled += take
        if filled == n:
            return out
    raise RuntimeError("rejection sampler acceptance rate too low")


def sample_positions(pp: PostSelectedPointer, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw pointer positions from ``|xi(q)|^2 / N``.

    Proposal: the mixture ``(|a| G(q)^2 + |b| G(q-g)^2) / (|a| + |b|)``; by
    Cauchy-Schwarz the target is below ``(|a|+|b|)^2 / N`` times it.
    """
    a, b = pp.alpha, pp.beta
    g, sigma = pp.model.g, pp.model.sigma
    wa, wb = abs(a), abs(b)
    p_shift = wb / (wa + wb)

    def propose(rng, size):
        shifted = rng.random(size) < p_shift
        return rng.normal(0.0, sigma, size) + g * shifted

    def accept_prob(q):
        g0 = _gauss_amp(q, sigma)
        g1 = _gauss_amp(q - g, sigma)
        target = np.abs(a * g0 + b * g1) ** 2
        envelope = (wa + wb) * (wa * g0 * g0 + wb * g1 * g1)
        return target / envelope

    return _rejection(rng, n, propose, accept_prob)


def sample_momenta(pp: PostSelectedPointer, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw pointer momenta from ``|G~(p)|^2 |a + b e^{-i p g}|^2 / N``."""
    a, b = pp.alpha, pp.beta
    g, sigma = pp.model.g, pp.model.sigma
    bound = (abs(a) + abs(b)) ** 2

    def propose(rng, size):
        return rng.normal(0.0, 1.0 / (2 * sigma), size)

    def accept_prob(p):
        return np.abs(a + b * np.exp(-1j * p * g)) ** 2 / bound

    return _rejection(rng, n, propose, accept_prob)


def simulate_weak_measurement(
    psi, phi, pi, model: PointerModel, n_samples: int, seed: int,
    overlap_tol: float = OVERLAP_TOL,
) -> WeakMeasurementResult:
    """Estimate a weak value from simulated pointer readings.

    Position and momentum are drawn in two independent runs (streams spawned
    from ``seed``), as they would be read out in separate experiments.
    """
    if n_samples < MIN_SAMPLES:
        raise ValueError(f"n_samples must be >= {MIN_SAMPLES}, got {n_samples}")
    if model.g == 0:
        raise ValueError("coupling g must be nonzero to estimate a weak value")
    pp = postselected_pointer(psi, phi, pi, model, overlap_tol)
    q_rng, p_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(2))
    q = sample_positions(pp, n_samples, q_rng)
    p = sample_momenta(pp, n_samples, p_rng)
    g, sigma = model.g, model.sigma
    p_scale = 2 * sigma * sigma / g
    root_n = math.sqrt(n_samples)
    return WeakMeasurementResult(
        re_estimate=float(q.mean() / g),
        im_estimate=float(p.mean() * p_scale),
        re_stderr=float(q.std(ddof=1) / root_n / abs(g)),
        im_stderr=float(p.std(ddof=1) / root_n * abs(p_scale)),
        samples=n_samples,
        g=g,
        sigma=sigma,
        exact_weak_value=pp.weak_value,
        seed=seed,
    )
