""" Random inputs shared by the test modules """
import numpy as np
from scipy.stats import unitary_group

from twinterf.amplitudes import ModeVector

N_CASES = 1000


def random_column(rng, n):
    values = rng.normal(size=n) + 1j * rng.normal(size=n)
    return ModeVector(values / np.linalg.norm(values))


def random_pair(rng, n):
    """ Two independent normalized columns, generally not orthogonal """
    return random_column(rng, n), random_column(rng, n)


def orthonormal_pair(rng, n):
    U = unitary_group.rvs(n, random_state=rng)
    return ModeVector(U[:, 0]), ModeVector(U[:, 1])
