"""
Brute-force coincidence oracle. Every event probability is computed from its
own closed form in plain complex arithmetic; the two-particle state matrix is
never formed.

With u, v the source columns and N = 1 + |<u|v>|^2:

    P(j, j) = 2 |u_j v_j|^2 / N
    P{j, k} = |u_j v_k + u_k v_j|^2 / N
"""
import math
from dataclasses import dataclass
from typing import Dict, Tuple

from .errors import DomainError

NORM_TOL = 1e-9


@dataclass(frozen=True)
class OracleResult:
    dim: int
    bunched: Tuple[float, ...]
    pairs: Dict[Tuple[int, int], float]

    def total(self):
        return math.fsum(self.bunched) + math.fsum(self.pairs.values())


def _column(col):
    values = getattr(col, 'amplitudes', col)
    return [complex(x) for x in values]


def _check(u, v):
    if len(u) != len(v):
        raise DomainError("Column dimensions differ: {:d} != {:d}".format(len(u), len(v)))
    for name, col in (('col_a', u), ('col_b', v)):
        norm = math.fsum(abs(x) ** 2 for x in col)
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError("{} is not normalized (squared norm {:.17g})".format(name, norm))


def _overlap(u, v):
    real = math.fsum((a.conjugate() * b).real for a, b in zip(u, v))
    imag = math.fsum((a.conjugate() * b).imag for a, b in zip(u, v))
    return complex(real, imag)


def unnormalized_sum(col_a, col_b):
    """
    ``sum_j 2|u_j v_j|^2 + sum_{j<k} |u_j v_k + u_k v_j|^2``, which equals
    ``1 + |<u|v>|^2`` for normalized columns.
    """
    u, v = _column(col_a), _column(col_b)
    n = len(u)
    terms = [2 * abs(u[j] * v[j]) ** 2 for j in range(n)]
    terms += [abs(u[j] * v[k] + u[k] * v[j]) ** 2
              for j in range(n) for k in range(j + 1, n)]
    return math.fsum(terms)


def oracle_coincidences(col_a, col_b):
    """
    :param col_a: source A column (a ``ModeVector`` or a sequence of complex)
    :param col_b: source B column
    :return: :class:`OracleResult`
    """
    u, v = _column(col_a), _column(col_b)
    _check(u, v)
    n = len(u)
    norm = 1.0 + abs(_overlap(u, v)) ** 2

    bunched = tuple(2 * abs(u[j] * v[j]) ** 2 / norm for j in range(n))
    pairs = {
        (j, k): abs(u[j] * v[k] + u[k] * v[j]) ** 2 / norm
        for j in range(n) for k in range(j + 1, n)
    }
    return OracleResult(n, bunched, pairs)


def max_deviation(distribution, result):
    """
    Largest absolute difference between a coincidence distribution and an
    oracle result over every event.
    """
    if distribution.dim != result.dim:
        raise DomainError("Cannot compare n = {:d} with n = {:d}".format(
            distribution.dim, result.dim))
    worst = max(abs(float(p) - q) for p, q in zip(distribution.bunched, result.bunched))
    for (j, k), q in result.pairs.items():
        worst = max(worst, abs(distribution.probability(j, k) - q))
    return worst
