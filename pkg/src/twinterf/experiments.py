"""
Canned discrete experiments (HOM, extended HOM, alternating n-port) and the
fringe analysis of their coincidence patterns.

Detector labels in :class:`DiscretePattern` and :class:`FringeReport` are
1-based, matching D_1 ... D_n.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import amplitudes
from .errors import DomainError
from .splitters import (FOUR_SPLITTER_NETWORK, THREE_SPLITTER_NETWORK,
                        alternating_profile, compile_network)

logger = logging.getLogger(__name__)

TOPOLOGIES = ('eq6', 'fig5', 'fig6')

# New detector label of each network output, mapping onto the labeling in
# which source B reads 1/2 (1, -1, 1, -1).
TOPOLOGY_RELABELING = {
    'eq6': (0, 1, 2, 3),
    'fig5': (0, 2, 1, 3),
    'fig6': (0, 2, 1, 3),
}

_TOPOLOGY_NETWORKS = {
    'fig5': THREE_SPLITTER_NETWORK,
    'fig6': FOUR_SPLITTER_NETWORK,
}


@dataclass(frozen=True, eq=False)
class DiscretePattern:
    """
    Coincidences of the reference detector with every detector.

    :param n: channel count
    :param reference: 1-based reference detector ``d``
    :param counts: ``counts[k - 1] = P(d, k)``; the ``k = d`` entry is ``P(d, d)``
    """
    n: int
    reference: int
    counts: np.ndarray

    def __post_init__(self):
        counts = np.array(self.counts, dtype=float).reshape(-1)
        if counts.shape[0] != self.n:
            raise DomainError("Pattern has {:d} entries for n = {:d}".format(
                counts.shape[0], self.n))
        if not 1 <= self.reference <= self.n:
            raise DomainError("Reference detector {} outside 1..{}".format(
                self.reference, self.n))
        if np.any(counts < 0):
            raise DomainError("Coincidence probabilities must be non-negative")
        counts.setflags(write=False)
        object.__setattr__(self, 'counts', counts)

    @property
    def detectors(self):
        return np.arange(1, self.n + 1)

    def cross_entries(self):
        """ ``(detectors, probabilities)`` excluding the bunched entry """
        mask = self.detectors != self.reference
        return self.detectors[mask], self.counts[mask]

    def in_paper_units(self):
        """ Counts rescaled by n^2 / 2 """
        return self.counts * (self.n ** 2 / 2.0)

    @classmethod
    def from_distribution(cls, distribution, reference):
        if not 1 <= reference <= distribution.dim:
            raise DomainError("Reference detector {} outside 1..{}".format(
                reference, distribution.dim))
        return cls(distribution.dim, reference, distribution.row(reference - 1))


@dataclass(frozen=True)
class FringeReport:
    dark_indices: Tuple[int, ...]
    bright_value: Optional[float]
    visibility: Optional[float]


def run_splitter(spec, allow_nonphysical=False):
    """ Coincidence distribution behind an arbitrary splitter spec """
    if not spec.unitary_embeddable:
        if not allow_nonphysical:
            raise DomainError(
                "Splitter columns overlap (|<a|b>| = {:.3e}); pass "
                "allow_nonphysical to run it anyway".format(spec.overlap))
        logger.warning("Running a non-embeddable splitter, |<a|b>| = %.3e", spec.overlap)
    state = amplitudes.symmetrize(spec.col_a, spec.col_b)
    return amplitudes.coincidences(state)


def run_network(net, allow_nonphysical=False):
    return run_splitter(compile_network(net).spec, allow_nonphysical)


def run_hom():
    """ Balanced two-port: both particles always leave together """
    return run_splitter(alternating_profile(2))


def extended_hom_spec(topology='eq6'):
    if topology == 'eq6':
        return alternating_profile(4)
    try:
        net = _TOPOLOGY_NETWORKS[topology]
    except KeyError:
        raise DomainError("Unknown topology {!r}, expected one of {}".format(
            topology, TOPOLOGIES)) from None
    return compile_network(net).spec


def run_extended_hom(topology='eq6', relabel=False):
    """
    Four-port two-particle interference. ``eq6`` uses the alternating
    columns directly; ``fig5`` and ``fig6`` compile the three- and
    four-splitter networks. With ``relabel`` the network outputs are renamed
    through :data:`TOPOLOGY_RELABELING`.
    """
    distribution = run_splitter(extended_hom_spec(topology))
    if relabel:
        distribution = distribution.relabel(TOPOLOGY_RELABELING[topology])
    return distribution


def nport_distribution(n):
    return run_splitter(alternating_profile(n))


def run_nport(n, reference=1):
    """
    Coincidences of detector ``reference`` with all detectors for the
    alternating ``n``-port: ``4/n^2`` for the same parity, 0 for opposite
    parity and ``2/n^2`` for the bunched entry.
    """
    return DiscretePattern.from_distribution(nport_distribution(n), reference)


def analyze_fringes(pattern, zero_tol=1e-12):
    """
    Dark detectors and fringe visibility ``(max - min) / (max + min)`` over
    the cross-pair entries. The bunched entry is not part of the fringe.
    Visibility is left undefined for fewer than two cross entries.
    """
    if zero_tol <= 0:
        raise DomainError("zero_tol must be positive, got {}".format(zero_tol))
    detectors, values = pattern.cross_entries()
    dark = tuple(int(d) for d in detectors[values < zero_tol])
    if pattern.n < 3:
        return FringeReport(dark, None, None)

    high = float(values.max())
    low = float(values.min())
    visibility = 0.0 if high + low == 0 else (high - low) / (high + low)
    return FringeReport(dark, high, visibility)
