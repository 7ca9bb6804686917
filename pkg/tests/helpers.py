import numpy as np

from ebit_unlock import make_ensemble
from ebit_unlock.ensembles import PureState

R = 1 / np.sqrt(2)

PHI_PLUS = np.array([R, 0, 0, R], dtype=complex)
PHI_MINUS = np.array([R, 0, 0, -R], dtype=complex)
KET00 = np.array([1, 0, 0, 0], dtype=complex)
KET11 = np.array([0, 0, 0, 1], dtype=complex)
# sqrt(0.9)|00> + sqrt(0.1)|11>
SKEWED = np.array([np.sqrt(0.9), 0, 0, np.sqrt(0.1)], dtype=complex)

H_09 = 0.468995593589281221  # binary entropy of 0.9, from mpmath at 30 digits


def state(amps, dims=(2, 2)):
    return PureState(np.asarray(amps, dtype=complex), *dims)


def bell_mixture():
    return make_ensemble((2, 2), [0.5, 0.5], [PHI_PLUS, PHI_MINUS])


def classical_mixture():
    return make_ensemble((2, 2), [0.5, 0.5], [KET00, KET11])


def fixed_a_products(p=0.5):
    """{(p, |0>|0>), (1-p, |0>|1>)}: same A factor, orthogonal B factors."""
    return make_ensemble((2, 2), [p, 1 - p], [[1, 0, 0, 0], [0, 1, 0, 0]])


def random_unitary(n, rng):
    """Haar unitary by QR of a Ginibre matrix with the phase correction."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_density(n, rng, rank=None):
    rank = n if rank is None else rank
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
