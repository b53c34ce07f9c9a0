import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twostate import threebox
from twostate.dirac import OrthogonalityError
from twostate.entropy import (
    LogBase,
    as_log_base,
    cerf_adami_conditional,
    conditional_entropy,
    conditional_entropy_selected,
    conditional_entropy_selected_closed,
    entropy_bounds,
    equal_overlap_basis,
    givens_unitary,
    scan_min_entropy,
    von_neumann_entropy,
)
from twostate.linalg import DimensionError, Ket, OrthonormalBasis, haar_unitary, projector

from conftest import HADAMARD_2, ONE, PLUS, ZERO, random_basis, random_density, random_ket


def test_log_base():
    assert as_log_base("e") == LogBase()
    assert as_log_base(2).log(8) == pytest.approx(3)
    with pytest.raises(ValueError):
        LogBase(1.0)


class TestSelected:
    def test_identical(self, rng):
        psi = random_ket(3, rng)
        assert conditional_entropy_selected(psi, psi) == pytest.approx(0, abs=1e-12)
        assert conditional_entropy_selected_closed(psi, psi) == pytest.approx(0, abs=1e-12)

    def test_three_box_phi(self):
        assert conditional_entropy_selected(threebox.PSI, threebox.PHI, 3) == pytest.approx(-1, abs=1e-12)
        assert conditional_entropy_selected(threebox.PSI, threebox.PHI) == pytest.approx(-math.log(3), abs=1e-12)

    def test_zero_plus_base2(self):
        assert conditional_entropy_selected(ZERO, PLUS, 2) == pytest.approx(-0.5, abs=1e-12)

    def test_three_box_closed(self):
        s1 = conditional_entropy_selected_closed(threebox.PSI, threebox.PHI_PRIME, 3)
        s2 = conditional_entropy_selected_closed(threebox.PSI, threebox.PHI_DOUBLE_PRIME, 3)
        # rounded published figures: -log_3 4.10 and -log_3 1.10
        assert s1 == pytest.approx(-math.log(4.10, 3), abs=0.01)
        assert s2 == pytest.approx(-math.log(1.10, 3), abs=0.01)
        assert s1 == pytest.approx(-1.284, abs=5e-4)
        assert s2 == pytest.approx(-0.085, abs=5e-4)

    def test_orthogonal(self):
        with pytest.raises(OrthogonalityError):
            conditional_entropy_selected(ZERO, ONE)
        with pytest.raises(OrthogonalityError):
            conditional_entropy_selected_closed(ZERO, ONE)

    def test_route_agreement(self, rng):
        count = 0
        while count < 200:
            d = 2 + count % 7
            psi, phi = random_ket(d, rng), random_ket(d, rng)
            if abs(np.vdot(phi.amplitudes, psi.amplitudes)) <= 1e-3:
                continue
            a = conditional_entropy_selected(psi, phi)
            b = conditional_entropy_selected_closed(psi, phi)
            assert abs(a - b) <= 1e-9
            count += 1


class TestAverage:
    def test_three_box(self):
        s = conditional_entropy(threebox.PSI, threebox.POSTSELECTION_BASIS, 3)
        assert s == pytest.approx(-0.26, abs=0.005)
        # weighted sum of the per-post-selection closed forms
        manual = sum(
            abs(np.vdot(phi.amplitudes, threebox.PSI.amplitudes)) ** 2
            * conditional_entropy_selected_closed(threebox.PSI, phi, 3)
            for phi in threebox.POSTSELECTION_BASIS
        )
        assert s == pytest.approx(manual, abs=1e-14)

    def test_uniform_two_level(self):
        assert conditional_entropy(ZERO, HADAMARD_2, 2) == pytest.approx(-0.5, abs=1e-14)

    def test_basis_containing_psi(self):
        assert conditional_entropy(ZERO, OrthonormalBasis.computational(2)) == 0.0

    @settings(max_examples=200, deadline=None)
    @given(st.integers(2, 8), st.integers(0, 2**32 - 1))
    def test_bounds_and_base_covariance(self, d, seed):
        rng = np.random.default_rng(seed)
        psi, basis = random_ket(d, rng), random_basis(d, rng)
        natural = conditional_entropy(psi, basis)
        assert natural <= 0
        assert natural >= -0.5 * math.log(d) - 1e-9
        for b in (2, 3, 10):
            assert conditional_entropy(psi, basis, b) == pytest.approx(natural / math.log(b), abs=1e-12)

    def test_equal_overlap_attains_derived_bound(self, rng):
        for d in range(2, 9):
            psi = random_ket(d, rng)
            basis = equal_overlap_basis(psi)
            p = np.abs(basis.matrix.conj().T @ psi.amplitudes) ** 2
            np.testing.assert_allclose(p, 1 / d, atol=1e-12)
            assert conditional_entropy(psi, basis, d) == pytest.approx(-0.5, abs=1e-9)


class TestVonNeumann:
    def test_pure(self, rng):
        assert von_neumann_entropy(projector(random_ket(4, rng))) == pytest.approx(0, abs=1e-9)

    def test_maximally_mixed(self):
        for d in (2, 3, 5):
            assert von_neumann_entropy(np.eye(d) / d, 3) == pytest.approx(math.log(d, 3), abs=1e-12)

    def test_diag(self):
        expected = -(0.75 * math.log2(0.75) + 0.25 * math.log2(0.25))
        assert von_neumann_entropy(np.diag([0.75, 0.25]), 2) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(0.8113, abs=1e-4)

    def test_unitary_invariance(self, rng):
        for _ in range(20):
            rho = random_density(5, rng)
            u = haar_unitary(5, rng)
            assert von_neumann_entropy(u @ rho @ u.conj().T) == pytest.approx(von_neumann_entropy(rho), abs=1e-9)

    def test_rejects_non_density(self):
        with pytest.raises(ValueError):
            von_neumann_entropy(np.diag([2.0, -1.0]))


class TestCerfAdami:
    def test_bell(self):
        bell = Ket(np.array([1, 0, 0, 1]) / math.sqrt(2))
        assert cerf_adami_conditional(projector(bell), 2, 2, 2) == pytest.approx(-1, abs=1e-12)

    def test_product(self, rng):
        a, b = random_ket(2, rng), random_ket(3, rng)
        joint = Ket(np.kron(a.amplitudes, b.amplitudes))
        assert cerf_adami_conditional(projector(joint), 2, 3) == pytest.approx(0, abs=1e-9)

    def test_classical_mixture(self):
        rho = np.diag([0.5, 0, 0, 0.5])
        assert cerf_adami_conditional(rho, 2, 2, 2) == pytest.approx(0, abs=1e-12)

    def test_pure_equals_minus_marginal(self, rng):
        from twostate.linalg import partial_trace
        for da, db in [(2, 2), (2, 3), (3, 2), (3, 3)]:
            rho = projector(random_ket(da * db, rng))
            s_b = von_neumann_entropy(partial_trace(rho, da, db, keep="b"))
            assert cerf_adami_conditional(rho, da, db) == pytest.approx(-s_b, abs=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            cerf_adami_conditional(np.eye(4) / 4, 3, 2)


class TestBounds:
    def test_values(self):
        assert entropy_bounds(3, 3) == pytest.approx((-1 / 6, -1 / 2))
        assert entropy_bounds(2, 2) == pytest.approx((-1 / 4, -1 / 2))
        for d in range(2, 10):
            stated, derived = entropy_bounds(d)
            assert derived < stated < 0
        with pytest.raises(DimensionError):
            entropy_bounds(1)

    def test_published_example_violates_stated_bound(self):
        stated, _ = entropy_bounds(3, 3)
        assert conditional_entropy(threebox.PSI, threebox.POSTSELECTION_BASIS, 3) < stated

    def test_simplex_oracle(self):
        # brute-force grid over the probability simplex for d = 3
        grid = np.linspace(0, 1, 301)
        best = (np.inf, None)
        for p1, p2 in itertools.product(grid, grid):
            p3 = 1 - p1 - p2
            if p3 < -1e-12:
                continue
            p = np.clip([p1, p2, p3], 0, None)
            nz = p[p > 0]
            val = float(np.sum(nz * np.log(np.sqrt(nz))) / math.log(3))
            if val < best[0]:
                best = (val, p)
        assert best[0] == pytest.approx(entropy_bounds(3, 3)[1], abs=1e-12)
        np.testing.assert_allclose(best[1], 1 / 3, atol=1e-2)


def test_givens_unitary_is_unitary(rng):
    for d in range(2, 7):
        u = givens_unitary(rng.standard_normal(d * (d - 1)), d)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(d), atol=1e-12)


class TestScan:
    def test_two_level(self):
        report = scan_min_entropy(ZERO, trials=10_000, seed=3, base=2, refine=True)
        assert report.min_found == pytest.approx(-0.5, abs=1e-6)
        assert report.below_paper_bound

    def test_three_level(self):
        psi = Ket.basis_state(3, 0)
        report = scan_min_entropy(psi, trials=2_000, seed=4, base=3, refine=True)
        assert report.min_found == pytest.approx(-0.5, abs=1e-4)
        p = np.abs(report.argmin_basis.matrix.conj().T @ psi.amplitudes) ** 2
        np.testing.assert_allclose(p, 1 / 3, atol=1e-2)

    def test_invariants_without_refine(self):
        report = scan_min_entropy(PLUS, trials=50, seed=0, base=2, refine=False)
        assert report.derived_bound - 1e-9 <= report.min_found <= 0
        assert report.min_found == report.sampled_min

    def test_deterministic(self):
        a = scan_min_entropy(Ket.basis_state(3, 0), trials=20, seed=11, refine=True)
        b = scan_min_entropy(Ket.basis_state(3, 0), trials=20, seed=11, refine=True)
        assert a.min_found == b.min_found
        assert np.array_equal(a.argmin_basis.matrix, b.argmin_basis.matrix)

    def test_rejects_zero_trials(self):
        with pytest.raises(ValueError):
            scan_min_entropy(ZERO, trials=0, seed=0)
