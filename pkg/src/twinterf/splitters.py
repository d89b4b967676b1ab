"""
This module contains functions for constructing path-splitters: uniform
modulus phase profiles, the alternating profile, and beam-splitter networks
compiled to ``n x n`` transforms.

Channel indices are 0-based. The parity rule of the alternating profile is
stated for 1-based detector numbers, so 0-based mode ``j`` is "odd" when
``j % 2 == 0``.
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, NamedTuple, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .amplitudes import ModeVector
from .errors import DomainError, InvariantViolation

logger = logging.getLogger(__name__)

EMBEDDABLE_TOL = 1e-9
UNITARITY_TOL = 1e-10
UNIFORM_MODULUS_TOL = 1e-9

CONVENTIONS = ('real', 'symmetric')


@dataclass(frozen=True, eq=False)
class SplitterSpec:
    """
    A path-splitter restricted to the two source modes.

    :param col_a: output amplitudes of a particle from source A
    :param col_b: output amplitudes of a particle from source B
    :param phase_factors: optional exact unit-modulus factors
      ``(e^{i theta_j}, e^{i phi_j})`` of a uniform modulus splitter
    """
    col_a: ModeVector
    col_b: ModeVector
    phase_factors: Optional[Tuple[np.ndarray, np.ndarray]] = None
    overlap: float = field(init=False)

    def __post_init__(self):
        if self.col_a.dim != self.col_b.dim:
            raise DomainError(
                "Splitter columns differ in length: {:d} != {:d}".format(
                    self.col_a.dim, self.col_b.dim))
        object.__setattr__(self, 'overlap', abs(self.col_a.inner(self.col_b)))

    @property
    def dim(self):
        return self.col_a.dim

    @property
    def unitary_embeddable(self):
        """ True when the two columns can belong to one ``n x n`` unitary """
        return self.overlap <= EMBEDDABLE_TOL


def _from_phase_factors(factors_a, factors_b):
    n = factors_a.shape[0]
    scale = 1 / np.sqrt(n)
    factors_a.setflags(write=False)
    factors_b.setflags(write=False)
    return SplitterSpec(
        ModeVector(factors_a * scale),
        ModeVector(factors_b * scale),
        phase_factors=(factors_a, factors_b),
    )


def uniform_phase_splitter(n, thetas, phis):
    """
    Splitter sending each source into an equal superposition of ``n``
    channels, picking up phase ``thetas[j]`` (source A) or ``phis[j]``
    (source B) on the way to channel ``j``.

    :param n: number of channels, at least 2
    :param thetas: ``n`` phases in radians for source A
    :param phis: ``n`` phases in radians for source B
    """
    if n < 2:
        raise DomainError("A path-splitter needs n >= 2 channels, got {}".format(n))
    thetas = np.asarray(thetas, dtype=float)
    phis = np.asarray(phis, dtype=float)
    if thetas.shape != (n,) or phis.shape != (n,):
        raise DomainError(
            "Expected {:d} phases per source, got {:d} and {:d}".format(
                n, thetas.size, phis.size))
    spec = _from_phase_factors(np.exp(1j * thetas), np.exp(1j * phis))
    if not spec.unitary_embeddable:
        logger.debug("Uniform splitter with |<a|b>| = %.3e is not unitary-embeddable",
                     spec.overlap)
    return spec


def alternating_profile(n):
    """
    All source-A phases zero; source-B phase 0 on odd (1-based) channels and
    pi on even ones. Phase factors are stored as exact +/-1 so that the
    columns are exactly orthogonal.
    """
    if n < 2 or n % 2:
        raise DomainError(
            "The alternating profile needs an even n >= 2, got {}".format(n))
    factors_a = np.ones(n, dtype=complex)
    factors_b = np.where(np.arange(n) % 2 == 0, 1.0, -1.0).astype(complex)
    return _from_phase_factors(factors_a, factors_b)


def cross_phase_factor(spec, j, k):
    """
    ``e^{i(theta_j + phi_k)} + e^{i(theta_k + phi_j)}`` for a uniform modulus
    splitter. For the alternating profile its modulus is 2 when ``j`` and
    ``k`` share parity and 0 otherwise; the value itself is -2 on a pair of
    even (1-based) channels, where both source-B phases are pi.
    """
    if j == k:
        raise DomainError("Cross terms need two distinct channels, got j = k = {}".format(j))
    n = spec.dim
    if not (0 <= j < n and 0 <= k < n):
        raise IndexError("Channels ({}, {}) out of range for n = {:d}".format(j, k, n))
    if spec.phase_factors is not None:
        factors_a, factors_b = spec.phase_factors
    else:
        factors_a = spec.col_a.amplitudes * np.sqrt(n)
        factors_b = spec.col_b.amplitudes * np.sqrt(n)
        worst = max(np.max(np.abs(np.abs(factors_a) - 1)),
                    np.max(np.abs(np.abs(factors_b) - 1)))
        if worst > UNIFORM_MODULUS_TOL:
            raise DomainError("Splitter columns are not of uniform modulus 1/sqrt(n)")
    return complex(factors_a[j] * factors_b[k] + factors_a[k] * factors_b[j])


def splitter_element(reflectivity=0.5, convention='real'):
    """
    2x2 lossless beam-splitter with intensity reflectivity ``reflectivity``.

    ``real``:      [[sqrt(r), sqrt(1-r)], [sqrt(1-r), -sqrt(r)]]
    ``symmetric``: [[sqrt(r), i sqrt(1-r)], [i sqrt(1-r), sqrt(r)]]
    """
    if not 0.0 <= reflectivity <= 1.0:
        raise DomainError("Reflectivity must lie in [0, 1], got {}".format(reflectivity))
    rho = np.sqrt(reflectivity)
    tau = np.sqrt(1.0 - reflectivity)
    if convention == 'real':
        return np.array([[rho, tau], [tau, -rho]], dtype=complex)
    elif convention == 'symmetric':
        return np.array([[rho, 1j * tau], [1j * tau, rho]], dtype=complex)
    else:
        raise DomainError(
            "Unknown splitter convention {!r}, expected one of {}".format(
                convention, CONVENTIONS))


def balanced_splitter_element(convention='real'):
    """ 50/50 beam-splitter; the default real convention puts the pi on port 2 """
    return splitter_element(0.5, convention)


class SplitterElement(BaseModel):
    """ One beam-splitter acting on modes ``i`` and ``j`` """
    model_config = ConfigDict(extra='forbid', frozen=True)

    i: int = Field(ge=0)
    j: int = Field(ge=0)
    r: float = Field(0.5, ge=0.0, le=1.0)
    convention: Literal['real', 'symmetric'] = 'real'

    @model_validator(mode='after')
    def _distinct_modes(self):
        if self.i == self.j:
            raise ValueError("element acts on mode {} twice".format(self.i))
        return self


class NetworkDescription(BaseModel):
    """
    Beam-splitter network over ``dim`` modes. Elements are listed in the
    order a particle meets them; sources A and B enter on ``input_a`` and
    ``input_b``.
    """
    model_config = ConfigDict(extra='forbid', frozen=True)

    dim: int = Field(ge=2)
    elements: Tuple[SplitterElement, ...]
    input_a: int = Field(ge=0)
    input_b: int = Field(ge=0)

    @model_validator(mode='after')
    def _modes_in_range(self):
        for mode in (self.input_a, self.input_b):
            if mode >= self.dim:
                raise ValueError("input mode {} outside [0, {})".format(mode, self.dim))
        for index, element in enumerate(self.elements):
            if element.i >= self.dim or element.j >= self.dim:
                raise ValueError(
                    "element {} acts on ({}, {}) outside [0, {})".format(
                        index, element.i, element.j, self.dim))
        return self

    @classmethod
    def from_json(cls, text):
        try:
            return cls.model_validate_json(text)
        except ValidationError as error:
            raise DomainError("Invalid network description: {}".format(error)) from error

    def to_json(self):
        return json.dumps(self.model_dump(mode='json'), indent=2)

    @classmethod
    def load(cls, path):
        return cls.from_json(Path(path).read_text(encoding='utf-8'))

    def dump(self, path):
        Path(path).write_text(self.to_json() + '\n', encoding='utf-8')


class CompiledNetwork(NamedTuple):
    transform: np.ndarray
    spec: SplitterSpec


def _unreached_modes(net):
    reached = {net.input_a, net.input_b}
    for element in net.elements:
        if element.i in reached or element.j in reached:
            reached.update((element.i, element.j))
    return sorted(set(range(net.dim)) - reached)


def embed_element(element, dim):
    """ ``dim x dim`` identity with the element's 2x2 block on its two modes """
    E = np.eye(dim, dtype=complex)
    E[np.ix_([element.i, element.j], [element.i, element.j])] = splitter_element(
        element.r, element.convention)
    return E


def compile_network(net):
    """
    Multiplies the embedded elements in order into the network transform
    ``U`` and extracts the columns addressed by the two inputs.

    :return: :class:`CompiledNetwork` ``(transform, spec)``
    """
    unreached = _unreached_modes(net)
    if unreached:
        raise DomainError(
            "Invalid topology: detectors {} are never reached from the inputs".format(
                unreached))

    U = np.eye(net.dim, dtype=complex)
    for element in net.elements:
        U = embed_element(element, net.dim) @ U

    residual = np.max(np.abs(U.conj().T @ U - np.eye(net.dim)))
    logger.debug("Compiled %d elements on %d modes, unitarity residual %.3e",
                 len(net.elements), net.dim, residual)
    if residual > UNITARITY_TOL:
        raise InvariantViolation(
            "Compiled network is not unitary (max |U^H U - I| = {:.3e})".format(residual))

    U.setflags(write=False)
    spec = SplitterSpec(ModeVector(U[:, net.input_a]), ModeVector(U[:, net.input_b]))
    return CompiledNetwork(U, spec)


# Three 50/50 splitters: A and B meet on the first, each output is split again.
# Detectors 1, 2 sit behind the second splitter and 3, 4 behind the third.
THREE_SPLITTER_NETWORK = NetworkDescription(
    dim=4,
    elements=(
        SplitterElement(i=0, j=2),
        SplitterElement(i=0, j=1),
        SplitterElement(i=2, j=3),
    ),
    input_a=0,
    input_b=2,
)

# Four 50/50 splitters: A and B are each split first, then the halves are
# cross-mixed, so no single splitter yields a bright/dark channel pair.
FOUR_SPLITTER_NETWORK = NetworkDescription(
    dim=4,
    elements=(
        SplitterElement(i=0, j=1),
        SplitterElement(i=2, j=3),
        SplitterElement(i=0, j=2),
        SplitterElement(i=1, j=3),
    ),
    input_a=0,
    input_b=2,
)
