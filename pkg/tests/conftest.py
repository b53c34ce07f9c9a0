import numpy as np
import pytest

from twostate.linalg import Ket, OrthonormalBasis, haar_unitary

SQRT2 = np.sqrt(2.0)


def ket(*amps):
    return Ket(np.array(amps, dtype=complex))


ZERO = ket(1, 0)
ONE = ket(0, 1)
PLUS = ket(1 / SQRT2, 1 / SQRT2)
MINUS = ket(1 / SQRT2, -1 / SQRT2)
RIGHT = ket(1 / SQRT2, 1j / SQRT2)
LEFT = ket(1 / SQRT2, -1j / SQRT2)

COMPUTATIONAL_2 = OrthonormalBasis.computational(2)
HADAMARD_2 = OrthonormalBasis.from_kets([PLUS, MINUS])
CIRCULAR_2 = OrthonormalBasis.from_kets([RIGHT, LEFT])


def random_ket(dim, rng):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return Ket(v / np.linalg.norm(v))


def random_basis(dim, rng):
    return OrthonormalBasis(haar_unitary(dim, rng))


def random_density(dim, rng, rank=None):
    rank = dim if rank is None else rank
    z = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = z @ z.conj().T
    return rho / np.trace(rho).real


def random_hermitian(dim, rng):
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (z + z.conj().T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
