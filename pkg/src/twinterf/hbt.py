"""
This module contains the continuous (n -> infinity) limit of the n-port
engine: two sources at x = +/-x0, paraxial phases after a distance L, and the
coincidence probability density P(x1, x2) on a detection line.

Both sources share one envelope psi(x). The density is the ordered-pair
density |A(x1, x2)|^2, which integrates to 1 over the plane:

    P(x1, x2) = |psi(x1) psi(x2)|^2 [1 + cos(4 pi x0 (x1 - x2) / lambda L)] / (1 + |s|^2)

with s = int |psi(x)|^2 exp(i (phi_x - theta_x)) dx the column overlap.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.integrate
import scipy.signal
import scipy.special
from tqdm import tqdm

from . import amplitudes
from .errors import DomainError, InvariantViolation

logger = logging.getLogger(__name__)

PARAXIAL_WARN_RATIO = 0.1
MIN_SAMPLES_PER_FRINGE = 16
MIN_SPAN_SIGMAS = 5
ENVELOPE_NORM_TOL = 1e-8
# Grid minima below this fraction of the peak count as dark fringes.
DARK_FRACTION = 1e-3
# Quadrature limits for the envelope, in sigmas around its centre.
QUAD_SIGMAS = 12


@dataclass(frozen=True)
class HbtGeometry:
    """
    :param x0: half source separation
    :param wavelength: real or de Broglie wavelength
    :param distance: propagation distance L to the detection line
    """
    x0: float
    wavelength: float
    distance: float

    def __post_init__(self):
        for name in ('x0', 'wavelength', 'distance'):
            if not getattr(self, name) > 0:
                raise DomainError("{} must be strictly positive, got {}".format(
                    name, getattr(self, name)))
        if self.paraxial_ratio > PARAXIAL_WARN_RATIO:
            logger.warning("Paraxial phases are questionable: 2 x0 / L = %.3g > %g",
                           self.paraxial_ratio, PARAXIAL_WARN_RATIO)

    @property
    def paraxial_ratio(self):
        return 2 * self.x0 / self.distance

    @property
    def fringe_spacing(self):
        """ Distance between consecutive dark fringes, lambda L / 2 x0 """
        return self.wavelength * self.distance / (2 * self.x0)

    @property
    def wavenumber(self):
        """ Spatial frequency of the coincidence fringes, 4 pi x0 / lambda L """
        return 4 * np.pi * self.x0 / (self.wavelength * self.distance)


@dataclass(frozen=True)
class Envelope:
    """ Gaussian envelope whose probability density has standard deviation ``sigma`` """
    sigma: float
    center: float = 0.0
    kind: str = 'gaussian'

    def __post_init__(self):
        if self.kind != 'gaussian':
            raise DomainError("Unsupported envelope kind {!r}".format(self.kind))
        if not self.sigma > 0:
            raise DomainError("sigma must be strictly positive, got {}".format(self.sigma))
        lo, hi = self.support()
        norm, _ = scipy.integrate.quad(
            self.probability_density, lo, hi, points=[self.center], limit=200)
        if abs(norm - 1.0) > ENVELOPE_NORM_TOL:
            raise InvariantViolation("Envelope integrates to {:.17g}".format(norm))

    def support(self):
        return (self.center - QUAD_SIGMAS * self.sigma,
                self.center + QUAD_SIGMAS * self.sigma)

    def amplitude(self, x):
        """ psi(x), real and positive """
        x = np.asarray(x, dtype=float)
        return ((2 * np.pi * self.sigma ** 2) ** -0.25
                * np.exp(-(x - self.center) ** 2 / (4 * self.sigma ** 2)))

    def probability_density(self, x):
        return self.amplitude(x) ** 2

    def cell_probabilities(self, lower, upper):
        """ Probability mass of |psi|^2 on each interval [lower, upper] """
        a = (np.asarray(lower, dtype=float) - self.center) / self.sigma
        b = (np.asarray(upper, dtype=float) - self.center) / self.sigma
        # Use the lower tail on whichever side keeps the difference accurate.
        right = a > 0
        return np.where(right,
                        scipy.special.ndtr(-a) - scipy.special.ndtr(-b),
                        scipy.special.ndtr(b) - scipy.special.ndtr(a))


@dataclass(frozen=True)
class GridSpec:
    min: float
    max: float
    points: int

    def __post_init__(self):
        if self.points < 2:
            raise DomainError("A grid needs at least 2 points, got {}".format(self.points))
        if not self.max > self.min:
            raise DomainError("Grid max {} must exceed min {}".format(self.max, self.min))

    @classmethod
    def parse(cls, text):
        """ Parses ``"min:max:points"`` """
        try:
            lo, hi, points = text.split(':')
            return cls(float(lo), float(hi), int(points))
        except ValueError as error:
            if isinstance(error, DomainError):
                raise
            raise DomainError(
                "Grid must read min:max:points, got {!r}".format(text)) from None

    @property
    def span(self):
        return self.max - self.min

    @property
    def step(self):
        return self.span / (self.points - 1)

    def positions(self):
        return np.linspace(self.min, self.max, self.points)


@dataclass(frozen=True, eq=False)
class ContinuousPattern:
    """
    Sampled coincidence density.

    :param grid: positions; x2 for a slice, both axes otherwise
    :param density: ``P(x1, x2)`` matrix, or the 1-D cut at ``slice_x1``
    :param slice_x1: fixed x1 of a slice, None for the full 2-D pattern
    :param overlap: |s|, the column overlap used in the normalization
    """
    grid: np.ndarray
    density: np.ndarray
    slice_x1: Optional[float] = None
    overlap: float = 0.0
    symmetry_tol: float = field(default=1e-12, repr=False)

    def __post_init__(self):
        if np.any(self.density < 0):
            raise InvariantViolation("Coincidence density went negative")
        if self.slice_x1 is None:
            scale = max(float(np.max(self.density)), np.finfo(float).tiny)
            asymmetry = float(np.max(np.abs(self.density - self.density.T))) / scale
            if asymmetry > self.symmetry_tol:
                raise InvariantViolation(
                    "Coincidence density is not exchange symmetric ({:.3e})".format(asymmetry))
        self.grid.setflags(write=False)
        self.density.setflags(write=False)

    @property
    def is_slice(self):
        return self.slice_x1 is not None

    def total_probability(self):
        """ Trapezoidal double quadrature of a full 2-D pattern """
        if self.is_slice:
            raise DomainError("Total probability needs the full 2-D pattern")
        inner = scipy.integrate.trapezoid(self.density, self.grid, axis=1)
        return float(scipy.integrate.trapezoid(inner, self.grid))


def phase_profiles(geom, x):
    """
    Phases acquired at detection position ``x`` from sources A and B:
    theta_x = 2 pi x0 x / lambda L and phi_x = -theta_x.
    """
    theta = 2 * np.pi * geom.x0 * np.asarray(x, dtype=float) / (geom.wavelength * geom.distance)
    return theta, -theta


def column_overlap(geom, env):
    """
    s = int |psi(x)|^2 exp(i (phi_x - theta_x)) dx by oscillatory quadrature.
    """
    lo, hi = env.support()
    k = geom.wavenumber
    real, _ = scipy.integrate.quad(env.probability_density, lo, hi,
                                   weight='cos', wvar=k, limit=200,
                                   epsabs=1e-14, epsrel=1e-12)
    imag, _ = scipy.integrate.quad(env.probability_density, lo, hi,
                                   weight='sin', wvar=k, limit=200,
                                   epsabs=1e-14, epsrel=1e-12)
    return complex(real, -imag)


def coincidence_density(geom, env, x1, x2, overlap=None):
    """
    Closed-form coincidence density at detector positions ``x1``, ``x2``
    (scalars or broadcastable arrays).

    :param overlap: precomputed :func:`column_overlap`, computed when omitted
    """
    if overlap is None:
        overlap = column_overlap(geom, env)
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    envelope = env.probability_density(x1) * env.probability_density(x2)
    # abs() keeps P(x1, x2) and P(x2, x1) bit-identical
    fringe = 1 + np.cos(geom.wavenumber * np.abs(x1 - x2))
    return envelope * fringe / (1 + abs(overlap) ** 2)


def check_grid(geom, env, grid):
    """ Rejects grids too coarse for the fringes or too narrow for the envelope """
    per_fringe = geom.fringe_spacing / grid.step
    logger.debug("Grid step %.3e, %.1f samples per fringe", grid.step, per_fringe)
    if per_fringe < MIN_SAMPLES_PER_FRINGE:
        raise DomainError(
            "Under-resolved grid: {:.1f} samples per fringe of width {:.3e}, "
            "need at least {:d}".format(per_fringe, geom.fringe_spacing,
                                        MIN_SAMPLES_PER_FRINGE))
    if grid.span < MIN_SPAN_SIGMAS * env.sigma:
        raise DomainError(
            "Grid span {:.3e} covers less than {:d} sigma ({:.3e})".format(
                grid.span, MIN_SPAN_SIGMAS, MIN_SPAN_SIGMAS * env.sigma))


def scan(geom, env, grid, slice_x1=None):
    """
    Samples the closed-form density on ``grid``. With ``slice_x1`` the result
    is the 1-D cut at fixed x1 as a function of x2.
    """
    check_grid(geom, env, grid)
    x = grid.positions()
    s = column_overlap(geom, env)
    if slice_x1 is None:
        density = coincidence_density(geom, env, x[:, None], x[None, :], s)
    else:
        density = coincidence_density(geom, env, float(slice_x1), x, s)
    return ContinuousPattern(x, density, None if slice_x1 is None else float(slice_x1), abs(s))


def dark_fringes(pattern):
    """
    Positions of the dark fringes of a 1-D slice: grid minima below
    ``DARK_FRACTION`` of the peak, refined by a parabola through the minimum
    and its two neighbours.
    """
    if not pattern.is_slice:
        raise DomainError("Dark fringes are located on a 1-D slice")
    y = pattern.density
    x = pattern.grid
    step = x[1] - x[0]
    minima, _ = scipy.signal.find_peaks(-y, height=-DARK_FRACTION * y.max())
    positions = []
    for i in minima:
        y0, y1, y2 = y[i - 1], y[i], y[i + 1]
        curvature = y0 - 2 * y1 + y2
        offset = 0.5 * (y0 - y2) / curvature if curvature > 0 else 0.0
        positions.append(x[i] + offset * step)
    return np.array(positions)


def fringe_spacing(pattern):
    """ Mean distance between consecutive dark fringes of a 1-D slice """
    positions = dark_fringes(pattern)
    if positions.shape[0] < 2:
        raise DomainError(
            "Found {:d} dark fringe(s); spacing needs at least 2".format(positions.shape[0]))
    return float(np.mean(np.diff(positions)))


def continuous_visibility(pattern, env, floor=1e-12):
    """
    Contrast (max - min) / (max + min) of a slice after dividing out the
    envelope, over points where the envelope exceeds ``floor`` of its peak.
    """
    if not pattern.is_slice:
        raise DomainError("Visibility is computed on a 1-D slice")
    envelope = env.probability_density(pattern.slice_x1) * env.probability_density(pattern.grid)
    mask = envelope > floor * envelope.max()
    fringe = pattern.density[mask] / envelope[mask]
    high, low = fringe.max(), fringe.min()
    return float((high - low) / (high + low))


def _channel_magnitudes(env, x, step, sampling):
    if sampling == 'cell':
        return np.sqrt(env.cell_probabilities(x - step / 2, x + step / 2))
    elif sampling == 'point':
        return env.amplitude(x) * np.sqrt(step)
    else:
        raise DomainError("Unknown sampling {!r}, expected 'cell' or 'point'".format(sampling))


def hbt_from_nport(geom, env, grid, slice_x1=None, sampling='cell'):
    """
    The same pattern built through the discrete engine: every grid point is a
    detector channel, the two columns carry the envelope weight and the
    paraxial phases, and the pair probabilities are turned back into
    densities.

    ``sampling='cell'`` weights channel j with the exact probability of its
    bin [x_j - dx/2, x_j + dx/2]; ``'point'`` uses psi(x_j) sqrt(dx). Both
    columns are renormalized.
    """
    check_grid(geom, env, grid)
    x = grid.positions()
    step = grid.step
    theta, phi = phase_profiles(geom, x)
    magnitude = _channel_magnitudes(env, x, step, sampling)

    col_a = magnitude * np.exp(1j * theta)
    col_b = magnitude * np.exp(1j * phi)
    col_a = amplitudes.ModeVector(col_a / np.linalg.norm(col_a))
    col_b = amplitudes.ModeVector(col_b / np.linalg.norm(col_b))
    overlap = abs(col_a.inner(col_b))

    distribution = amplitudes.coincidences(amplitudes.symmetrize(col_a, col_b))
    # Ordered-pair density: a cross event splits evenly over its two labelings.
    ordered = distribution.cross / 2 + np.diag(distribution.bunched)
    density = ordered / step ** 2
    logger.debug("n-port route with %d channels, |<a|b>| = %.3e", grid.points, overlap)

    if slice_x1 is None:
        return ContinuousPattern(x, density, None, overlap)
    index = int(np.argmin(np.abs(x - slice_x1)))
    return ContinuousPattern(x, np.array(density[index]), float(x[index]), overlap)


def convergence_study(geom, env, lower, upper, bins, slice_x1=0.0, sampling='cell',
                      progress=False):
    """
    Maximum relative deviation of :func:`hbt_from_nport` from the closed form
    at bright fringes (closed form at least half its peak) for each bin count.

    :return: list of ``(bins, deviation)``
    """
    results = []
    for n in tqdm(bins, desc='bins', disable=not progress):
        grid = GridSpec(lower, upper, int(n))
        discrete = hbt_from_nport(geom, env, grid, slice_x1, sampling)
        closed = coincidence_density(geom, env, discrete.slice_x1, discrete.grid)
        bright = closed >= 0.5 * closed.max()
        deviation = np.max(np.abs(discrete.density[bright] - closed[bright]) / closed[bright])
        logger.info("bins=%d max relative deviation %.3e", n, deviation)
        results.append((int(n), float(deviation)))
    return results
