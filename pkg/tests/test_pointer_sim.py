import math

import numpy as np
import pytest
from scipy.integrate import quad

from twostate import threebox
from twostate.dirac import OrthogonalityError
from twostate.linalg import projector
from twostate.pointer_sim import (
    PointerModel,
    PostSelectedPointer,
    analytic_moments,
    postselected_pointer,
    sample_momenta,
    sample_positions,
    simulate_weak_measurement,
)
from twostate.postselect import two_state_density, weak_value

from conftest import ONE, ZERO, random_basis, random_ket

PI_C = threebox.box_projector(2)


def quadrature_moments(pp):
    """Independent oracle: integrate |xi(q)|^2 and its Fourier transform numerically."""
    a, b, g, s = pp.alpha, pp.beta, pp.model.g, pp.model.sigma

    def amp(x):
        return (2 * math.pi * s * s) ** -0.25 * math.exp(-x * x / (4 * s * s))

    def dens_q(q):
        return abs(a * amp(q) + b * amp(q - g)) ** 2

    def dens_p(p):
        gt = (2 * s * s / math.pi) ** 0.25 * math.exp(-s * s * p * p)
        return abs(gt * (a + b * complex(math.cos(p * g), -math.sin(p * g)))) ** 2

    lim_q = 12 * s + abs(g)
    lim_p = 12 / s
    norm = quad(dens_q, -lim_q, lim_q, epsabs=1e-14)[0]
    norm_p = quad(dens_p, -lim_p, lim_p, epsabs=1e-14)[0]
    mean_q = quad(lambda q: q * dens_q(q), -lim_q, lim_q, epsabs=1e-14)[0] / norm
    mean_p = quad(lambda p: p * dens_p(p), -lim_p, lim_p, epsabs=1e-14)[0] / norm_p
    return mean_q, mean_p, norm, norm_p


def random_instance(rng, d=None):
    d = int(rng.integers(2, 5)) if d is None else d
    psi, phi = random_ket(d, rng), random_ket(d, rng)
    basis = random_basis(d, rng)
    k = int(rng.integers(0, d))
    return psi, phi, projector(basis[k])


class TestPostselectedPointer:
    def test_identity(self, rng):
        psi, phi = random_ket(3, rng), random_ket(3, rng)
        pp = postselected_pointer(psi, phi, np.eye(3), PointerModel(1.0, 0.1))
        assert pp.alpha == pytest.approx(0, abs=1e-15)
        assert pp.beta == pytest.approx(np.vdot(phi.amplitudes, psi.amplitudes), abs=1e-15)

    def test_zero(self, rng):
        pp = postselected_pointer(random_ket(3, rng), random_ket(3, rng), np.zeros((3, 3)), PointerModel(1.0, 0.1))
        assert pp.beta == 0

    def test_three_box(self):
        pp = postselected_pointer(threebox.PSI, threebox.PHI, PI_C, PointerModel(1.0, 0.05))
        assert pp.beta / (pp.alpha + pp.beta) == pytest.approx(-1, abs=1e-12)

    def test_alpha_plus_beta(self, rng):
        for _ in range(50):
            psi, phi, pi = random_instance(rng)
            pp = postselected_pointer(psi, phi, pi, PointerModel(1.0, 0.1))
            assert abs(pp.alpha + pp.beta - np.vdot(phi.amplitudes, psi.amplitudes)) <= 1e-12
            assert pp.weak_value == pytest.approx(weak_value(two_state_density(psi, phi), pi), abs=1e-12)

    def test_errors(self):
        with pytest.raises(ValueError):
            postselected_pointer(ZERO, ZERO, np.array([[1, 1], [0, 0]]), PointerModel(1.0, 0.1))
        with pytest.raises(OrthogonalityError):
            postselected_pointer(ZERO, ONE, np.eye(2), PointerModel(1.0, 0.1))
        with pytest.raises(ValueError):
            PointerModel(0.0, 0.1)

    def test_weak_flag(self):
        assert PointerModel(1.0, 0.1).is_weak
        assert not PointerModel(1.0, 0.2).is_weak
        assert PointerModel(2.0, 0.1).weak_ratio == pytest.approx(0.05)


class TestAnalyticMoments:
    def test_identity_is_rigid_shift(self, rng):
        psi, phi = random_ket(3, rng), random_ket(3, rng)
        pp = postselected_pointer(psi, phi, np.eye(3), PointerModel(1.3, 0.4))
        mean_q, mean_p, prob = analytic_moments(pp)
        assert mean_q == pytest.approx(0.4, abs=1e-14)
        assert mean_p == pytest.approx(0, abs=1e-14)
        assert prob == pytest.approx(abs(np.vdot(phi.amplitudes, psi.amplitudes)) ** 2, abs=1e-14)

    def test_three_box_weak_limit(self):
        pp = postselected_pointer(threebox.PSI, threebox.PHI, PI_C, PointerModel(1.0, 1e-3))
        mean_q, mean_p, _ = analytic_moments(pp)
        assert mean_q / 1e-3 == pytest.approx(-1, abs=1e-2)
        assert mean_p == 0

    @pytest.mark.parametrize("seed", range(8))
    def test_against_quadrature(self, seed):
        rng = np.random.default_rng(seed)
        a = complex(*rng.standard_normal(2))
        b = complex(*rng.standard_normal(2))
        model = PointerModel(float(rng.uniform(0.5, 2)), float(rng.uniform(-1.5, 1.5)))
        pp = PostSelectedPointer(a, b, model)
        mean_q, mean_p, norm = analytic_moments(pp)
        q_quad, p_quad, n_quad, n_p_quad = quadrature_moments(pp)
        assert norm == pytest.approx(n_quad, rel=1e-9)
        assert n_p_quad == pytest.approx(n_quad, rel=1e-9)
        assert mean_q == pytest.approx(q_quad, abs=1e-9)
        assert mean_p == pytest.approx(p_quad, abs=1e-9)

    def test_weak_limit_recovers_weak_value(self, rng):
        for _ in range(20):
            psi, phi, pi = random_instance(rng)
            w = weak_value(two_state_density(psi, phi), pi)
            g, sigma = 1e-4, 1.0
            pp = postselected_pointer(psi, phi, pi, PointerModel(sigma, g))
            mean_q, mean_p, prob = analytic_moments(pp)
            scale = max(1.0, abs(w)) ** 3
            assert mean_q / g == pytest.approx(w.real, abs=1e-6 * scale)
            assert mean_p * 2 * sigma**2 / g == pytest.approx(w.imag, abs=1e-6 * scale)
            assert 0 <= prob <= 1 + 1e-12
            assert prob == pytest.approx(abs(np.vdot(phi.amplitudes, psi.amplitudes)) ** 2, abs=1e-8)

    def test_destructive_interference(self):
        pp = PostSelectedPointer(1.0, -1.0, PointerModel(1.0, 0.0))
        with pytest.raises(ZeroDivisionError):
            analytic_moments(pp)


class TestSampling:
    def test_samplers_match_quadrature_variance(self):
        pp = PostSelectedPointer(0.3 + 0.4j, -0.2 + 0.1j, PointerModel(1.3, 0.7))
        rng = np.random.default_rng(0)
        q = sample_positions(pp, 200_000, rng)
        p = sample_momenta(pp, 200_000, rng)
        mean_q, mean_p, _, _ = quadrature_moments(pp)
        assert abs(q.mean() - mean_q) <= 4 * q.std() / math.sqrt(q.size)
        assert abs(p.mean() - mean_p) <= 4 * p.std() / math.sqrt(p.size)

    def test_deterministic(self):
        args = (threebox.PSI, threebox.PHI, PI_C, PointerModel(1.0, 0.05), 1000, 42)
        assert simulate_weak_measurement(*args) == simulate_weak_measurement(*args)
        other = simulate_weak_measurement(*args[:-1], 43)
        assert other.re_estimate != simulate_weak_measurement(*args).re_estimate

    def test_identity_projector(self, rng):
        psi, phi = random_ket(3, rng), random_ket(3, rng)
        res = simulate_weak_measurement(psi, phi, np.eye(3), PointerModel(1.0, 0.1), 100_000, 5)
        assert abs(res.re_estimate - 1) <= 3 * res.re_stderr
        assert abs(res.im_estimate) <= 3 * res.im_stderr
        assert res.re_stderr > 0 and res.im_stderr > 0

    def test_rejects_few_samples(self):
        with pytest.raises(ValueError):
            simulate_weak_measurement(threebox.PSI, threebox.PHI, PI_C, PointerModel(1.0, 0.05), 99, 0)
        with pytest.raises(ValueError):
            simulate_weak_measurement(threebox.PSI, threebox.PHI, PI_C, PointerModel(1.0, 0.0), 1000, 0)
