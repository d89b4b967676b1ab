"""
This module contains the two-boson state algebra: single-particle output
columns, their symmetrized product over ``n`` detector modes, and the
coincidence distribution obtained by projecting that state onto detector
events.

Indices here are 0-based detector modes.
"""
import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DomainError, InvariantViolation

logger = logging.getLogger(__name__)

# Input columns are accepted when their norm deviates from 1 by at most this.
NORM_TOL = 1e-9
# Tolerances used when checking a constructed state or distribution.
STATE_NORM_TOL = 1e-10
SYMMETRY_TOL = 1e-14
PROBABILITY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ModeVector:
    """
    Output amplitudes of one particle over ``n`` channels.

    :param amplitudes: ``n`` complex amplitudes, one per detector
    """
    amplitudes: np.ndarray

    def __post_init__(self):
        values = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if values.shape[0] < 2:
            raise DomainError(
                "A mode vector needs at least 2 channels, got {:d}".format(
                    values.shape[0]))
        norm = np.sum(np.abs(values) ** 2)
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(
                "Mode vector is not normalized (squared norm {:.17g})".format(
                    norm))
        values.setflags(write=False)
        object.__setattr__(self, 'amplitudes', values)

    @property
    def dim(self):
        return self.amplitudes.shape[0]

    def __len__(self):
        return self.dim

    def inner(self, other):
        """ Returns ``<self|other>`` """
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True, eq=False)
class TwoBosonState:
    """
    Symmetrized two-particle amplitude. ``pair_amplitudes[j, k]`` is the
    amplitude for particle 1 at detector ``j`` and particle 2 at ``k``.
    """
    pair_amplitudes: np.ndarray

    def __post_init__(self):
        A = np.array(self.pair_amplitudes, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] < 2:
            raise DomainError(
                "Pair amplitudes must be a square matrix with n >= 2, "
                "got shape {}".format(A.shape))
        asymmetry = np.max(np.abs(A - A.T))
        if asymmetry > SYMMETRY_TOL:
            raise InvariantViolation(
                "Two-boson state is not exchange symmetric "
                "(max |A - A^T| = {:.3e})".format(asymmetry))
        norm = np.sum(np.abs(A) ** 2)
        if abs(norm - 1.0) > STATE_NORM_TOL:
            raise InvariantViolation(
                "Two-boson state is not normalized (sum |A|^2 = {:.17g})".format(
                    norm))
        A.setflags(write=False)
        object.__setattr__(self, 'pair_amplitudes', A)

    @property
    def dim(self):
        return self.pair_amplitudes.shape[0]


@dataclass(frozen=True, eq=False)
class CoincidenceDistribution:
    """
    Probabilities of the physical detection events of two bosons over ``n``
    detectors.

    :param bunched: ``P(j, j)``, both particles at detector ``j``
    :param cross: symmetric matrix with ``P{j, k}`` off the diagonal and zeros
      on it; each unordered pair is one event
    """
    bunched: np.ndarray
    cross: np.ndarray

    def __post_init__(self):
        bunched = np.array(self.bunched, dtype=float).reshape(-1)
        cross = np.array(self.cross, dtype=float)
        n = bunched.shape[0]
        if cross.shape != (n, n):
            raise DomainError(
                "Cross-pair matrix shape {} does not match {:d} detectors".format(
                    cross.shape, n))
        if np.any(np.diag(cross) != 0.0):
            raise DomainError("Cross-pair matrix must have a zero diagonal")
        values = np.concatenate([bunched, cross[np.triu_indices(n, 1)]])
        if np.any(values < -PROBABILITY_TOL) or np.any(values > 1 + PROBABILITY_TOL):
            raise InvariantViolation("Event probability outside [0, 1]")
        total = values.sum()
        if abs(total - 1.0) > PROBABILITY_TOL:
            raise InvariantViolation(
                "Coincidence distribution sums to {:.17g}".format(total))
        bunched.setflags(write=False)
        cross.setflags(write=False)
        object.__setattr__(self, 'bunched', bunched)
        object.__setattr__(self, 'cross', cross)

    @property
    def dim(self):
        return self.bunched.shape[0]

    @cached_property
    def pairs(self):
        """ Mapping ``(j, k) -> P{j, k}`` for ``j < k`` """
        j_idx, k_idx = np.triu_indices(self.dim, 1)
        return {
            (int(j), int(k)): float(self.cross[j, k])
            for j, k in zip(j_idx, k_idx)
        }

    def probability(self, j, k):
        """ Probability of the event {j, k}; ``j == k`` is the bunched event """
        if j == k:
            return float(self.bunched[j])
        return float(self.cross[j, k])

    def row(self, d):
        """
        Coincidences of detector ``d`` with every detector. Entry ``d`` holds
        the bunched probability ``P(d, d)``.
        """
        row = np.array(self.cross[d])
        row[d] = self.bunched[d]
        return row

    def as_matrix(self):
        """ Symmetric matrix with ``P(j, j)`` on the diagonal """
        return self.cross + np.diag(self.bunched)

    def total(self):
        return float(self.bunched.sum() + np.triu(self.cross, 1).sum())

    def relabel(self, permutation):
        """
        Renames detectors. ``permutation[k]`` is the new label of detector
        ``k``.
        """
        perm = np.asarray(permutation, dtype=int)
        if sorted(perm.tolist()) != list(range(self.dim)):
            raise DomainError(
                "{} is not a permutation of {:d} detectors".format(
                    perm.tolist(), self.dim))
        bunched = np.empty_like(self.bunched)
        bunched[perm] = self.bunched
        cross = np.empty_like(self.cross)
        cross[np.ix_(perm, perm)] = self.cross
        return CoincidenceDistribution(bunched, cross)


def symmetrize(col_a, col_b):
    """
    Builds the post-splitter two-boson state from the output columns of
    sources A and B:

        A[j, k] = (u_j v_k + u_k v_j) / sqrt(2 (1 + |<u|v>|^2))

    The normalization is exact for any pair of normalized columns and reduces
    to the usual ``1/sqrt(2)`` convention when they are orthogonal.

    :param col_a: :class:`ModeVector` of source A
    :param col_b: :class:`ModeVector` of source B
    :return: :class:`TwoBosonState`
    """
    if col_a.dim != col_b.dim:
        raise DomainError(
            "Column dimensions differ: {:d} != {:d}".format(col_a.dim, col_b.dim))
    overlap = col_a.inner(col_b)
    logger.debug("Symmetrizing n=%d columns, |<a|b>| = %.3e", col_a.dim, abs(overlap))
    product = np.outer(col_a.amplitudes, col_b.amplitudes)
    # product + product.T is symmetric bit for bit
    A = (product + product.T) / np.sqrt(2.0 * (1.0 + abs(overlap) ** 2))
    return TwoBosonState(A)


def coincidences(state):
    """
    Coincidence distribution of a two-boson state. ``P(j, j) = |A[j, j]|^2``
    and ``P{j, k} = |A[j, k]|^2 + |A[k, j]|^2`` since both particle labelings
    end in the same detection event.
    """
    P = np.abs(state.pair_amplitudes) ** 2
    bunched = np.diag(P).copy()
    cross = 2.0 * P
    np.fill_diagonal(cross, 0.0)
    return CoincidenceDistribution(bunched, cross)


def ordered_amplitude(state, j, k):
    """ Amplitude for particle 1 at detector ``j`` and particle 2 at ``k`` """
    n = state.dim
    if not (0 <= j < n and 0 <= k < n):
        raise IndexError(
            "Detector pair ({}, {}) out of range for n = {:d}".format(j, k, n))
    return complex(state.pair_amplitudes[j, k])
