import numpy as np
import pytest
from absl.testing import parameterized

from twinterf import hbt
from twinterf.errors import DomainError
from twinterf.hbt import ContinuousPattern, Envelope, GridSpec, HbtGeometry

# 1 mm half separation, 800 nm, 1 m: dark fringes every 0.4 mm
GEOM = HbtGeometry(1e-3, 8e-7, 1.0)
NARROW = Envelope(2.5e-4)


class GeometryTest(parameterized.TestCase):

    def test_fringe_spacing(self):
        self.assertAlmostEqual(GEOM.fringe_spacing, 4e-4, delta=1e-18)
        self.assertAlmostEqual(HbtGeometry(1e-3, 8e-7, 2.0).fringe_spacing, 8e-4, delta=1e-18)

    @parameterized.parameters((0, 8e-7, 1), (1e-3, -1, 1), (1e-3, 8e-7, 0))
    def test_positive(self, x0, wavelength, distance):
        with self.assertRaises(DomainError):
            HbtGeometry(x0, wavelength, distance)

    def test_paraxial_warning(self):
        with self.assertLogs('twinterf.hbt', level='WARNING'):
            geom = HbtGeometry(0.1, 8e-7, 1.0)
        self.assertAlmostEqual(geom.paraxial_ratio, 0.2)

    def test_phase_profiles(self):
        theta, phi = hbt.phase_profiles(GEOM, 0.0)
        self.assertEqual(theta, 0.0)
        self.assertEqual(phi, 0.0)
        theta, phi = hbt.phase_profiles(GEOM, GEOM.fringe_spacing)
        self.assertAlmostEqual(theta, np.pi, delta=1e-12)
        self.assertAlmostEqual(phi, -np.pi, delta=1e-12)
        x = np.linspace(-1e-2, 1e-2, 101)
        theta, phi = hbt.phase_profiles(GEOM, x)
        np.testing.assert_array_equal(theta + phi, 0.0)


class EnvelopeTest(parameterized.TestCase):

    def test_bad_envelopes(self):
        with self.assertRaises(DomainError):
            Envelope(0.0)
        with self.assertRaises(DomainError):
            Envelope(1e-3, kind='lorentzian')

    @parameterized.parameters(1e-4, 2e-3, 1.0)
    def test_cells_sum_to_one(self, sigma):
        env = Envelope(sigma, center=sigma / 3)
        edges = np.linspace(env.center - 12 * sigma, env.center + 12 * sigma, 1001)
        cells = env.cell_probabilities(edges[:-1], edges[1:])
        self.assertAlmostEqual(cells.sum(), 1.0, delta=1e-12)
        self.assertTrue(np.all(cells >= 0))

    def test_cell_matches_density(self):
        env = Envelope(1e-3)
        width = 1e-7
        x = np.linspace(-3e-3, 3e-3, 7)
        cells = env.cell_probabilities(x - width / 2, x + width / 2)
        np.testing.assert_allclose(cells / width, env.probability_density(x), rtol=1e-6)

    def test_column_overlap_matches_gaussian_transform(self):
        env = Envelope(2.5e-4, center=1e-4)
        s = hbt.column_overlap(GEOM, env)
        k = GEOM.wavenumber
        expected = np.exp(-1j * k * env.center) * np.exp(-(k * env.sigma) ** 2 / 2)
        self.assertAlmostEqual(abs(s - expected), 0.0, delta=1e-9)

    def test_wide_envelope_has_tiny_overlap(self):
        self.assertLess(abs(hbt.column_overlap(GEOM, Envelope(2e-3))), 1e-9)


class GridTest(parameterized.TestCase):

    def test_parse(self):
        grid = GridSpec.parse('-0.005:0.005:2048')
        self.assertEqual((grid.min, grid.max, grid.points), (-0.005, 0.005, 2048))
        self.assertAlmostEqual(grid.step, 0.01 / 2047)

    @parameterized.parameters('1:2', 'a:b:c', '0:1:1', '1:0:10', '0:1:2.5')
    def test_bad_grid(self, text):
        with self.assertRaises(DomainError):
            GridSpec.parse(text)

    def test_under_resolved(self):
        with self.assertRaisesRegex(DomainError, 'Under-resolved'):
            hbt.scan(GEOM, NARROW, GridSpec(-1.5e-3, 1.5e-3, 100))

    def test_too_narrow(self):
        with self.assertRaisesRegex(DomainError, 'sigma'):
            hbt.scan(GEOM, Envelope(2e-3), GridSpec(-1e-3, 1e-3, 1000))


class DensityTest(parameterized.TestCase):

    def test_zero_separation_is_bright(self):
        s = hbt.column_overlap(GEOM, NARROW)
        value = hbt.coincidence_density(GEOM, NARROW, 0.0, 0.0)
        expected = 2 * NARROW.amplitude(0.0) ** 4 / (1 + abs(s) ** 2)
        self.assertAlmostEqual(value / expected, 1.0, delta=1e-12)

    def test_dark_and_bright_separations(self):
        x1 = 1e-4
        dark = hbt.coincidence_density(GEOM, NARROW, x1, x1 - GEOM.fringe_spacing / 2)
        bright = hbt.coincidence_density(GEOM, NARROW, x1, x1 - GEOM.fringe_spacing)
        envelope = NARROW.probability_density(x1) * NARROW.probability_density(
            x1 - GEOM.fringe_spacing)
        self.assertLess(dark, 1e-12 * bright)
        self.assertAlmostEqual(bright / envelope, 2 / (1 + abs(hbt.column_overlap(GEOM, NARROW)) ** 2),
                               delta=1e-12)

    def test_depends_on_separation_and_envelope(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            x1, a = rng.uniform(-5e-4, 5e-4, size=2)
            delta = rng.uniform(-6e-4, 6e-4)
            x2, b = x1 - delta, a - delta
            left = hbt.coincidence_density(GEOM, NARROW, x1, x2, 0.0) \
                * NARROW.probability_density(a) * NARROW.probability_density(b)
            right = hbt.coincidence_density(GEOM, NARROW, a, b, 0.0) \
                * NARROW.probability_density(x1) * NARROW.probability_density(x2)
            scale = 2 * NARROW.probability_density(np.array([x1, x2, a, b])).prod()
            self.assertLessEqual(abs(left - right), 1e-12 * scale)

    def test_full_scan_symmetric_and_normalized(self):
        pattern = hbt.scan(GEOM, NARROW, GridSpec(-1.5e-3, 1.5e-3, 256))
        np.testing.assert_array_equal(pattern.density, pattern.density.T)
        self.assertAlmostEqual(pattern.total_probability(), 1.0, delta=1e-3)
        self.assertFalse(pattern.is_slice)

    def test_asymmetric_pattern_rejected(self):
        density = np.array([[1.0, 2.0], [0.0, 1.0]])
        with self.assertRaises(ArithmeticError):
            ContinuousPattern(np.array([0.0, 1.0]), density)


class FringeSpacingTest(parameterized.TestCase):

    def test_slice_dark_fringes(self):
        env = Envelope(2e-3)
        grid = GridSpec(-5e-3, 5e-3, 2048)
        pattern = hbt.scan(GEOM, env, grid, slice_x1=0.0)
        self.assertTrue(pattern.is_slice)
        self.assertAlmostEqual(hbt.fringe_spacing(pattern), 4e-4, delta=grid.step)

        dark = hbt.dark_fringes(pattern)
        expected = GEOM.fringe_spacing * (np.arange(-12, 12) + 0.5)
        np.testing.assert_allclose(dark, expected, atol=grid.step)
        exact = hbt.coincidence_density(GEOM, env, 0.0, expected)
        self.assertLessEqual(exact.max(), 1e-6 * pattern.density.max())

    def test_doubling_x0_halves_spacing(self):
        env = Envelope(2e-3)
        grid = GridSpec(-5e-3, 5e-3, 2048)
        wide = hbt.fringe_spacing(hbt.scan(GEOM, env, grid, 0.0))
        narrow = hbt.fringe_spacing(hbt.scan(HbtGeometry(2e-3, 8e-7, 1.0), env, grid, 0.0))
        self.assertAlmostEqual(narrow / wide, 0.5, delta=2 * grid.step / wide)

    def test_doubling_distance_doubles_spacing(self):
        env = Envelope(2e-3)
        grid = GridSpec(-5e-3, 5e-3, 2048)
        spacing = hbt.fringe_spacing(hbt.scan(HbtGeometry(1e-3, 8e-7, 2.0), env, grid, 0.0))
        self.assertAlmostEqual(spacing, 8e-4, delta=grid.step)

    def test_fringe_wider_than_window(self):
        geom = HbtGeometry(1e-6, 8e-7, 1.0)
        pattern = hbt.scan(geom, NARROW, GridSpec(-1.5e-3, 1.5e-3, 101), slice_x1=0.0)
        envelope = NARROW.probability_density(pattern.grid)
        ratio = pattern.density / envelope
        self.assertLess(np.ptp(ratio) / ratio.max(), 1e-3)
        self.assertEqual(hbt.dark_fringes(pattern).shape, (0,))
        with self.assertRaises(DomainError):
            hbt.fringe_spacing(pattern)

    def test_needs_slice(self):
        pattern = hbt.scan(GEOM, NARROW, GridSpec(-1.5e-3, 1.5e-3, 128))
        with self.assertRaises(DomainError):
            hbt.fringe_spacing(pattern)

    def test_visibility(self):
        pattern = hbt.scan(GEOM, Envelope(2e-3), GridSpec(-5e-3, 5e-3, 2048), 0.0)
        self.assertGreater(hbt.continuous_visibility(pattern, Envelope(2e-3)), 0.999)


class NportLimitTest(parameterized.TestCase):

    def test_full_pattern_matches_closed_form(self):
        grid = GridSpec(-1.5e-3, 1.5e-3, 256)
        discrete = hbt.hbt_from_nport(GEOM, NARROW, grid)
        closed = hbt.scan(GEOM, NARROW, grid)
        bright = closed.density >= 0.5 * closed.density.max()
        deviation = np.abs(discrete.density - closed.density)[bright] / closed.density[bright]
        self.assertLess(deviation.max(), 1e-2)
        self.assertAlmostEqual(discrete.total_probability(), 1.0, delta=1e-3)

    def test_four_sigma_window(self):
        # 512 bins over +/-4 sigma
        grid = GridSpec(-1e-3, 1e-3, 512)
        discrete = hbt.hbt_from_nport(GEOM, NARROW, grid, slice_x1=0.0)
        closed = hbt.coincidence_density(GEOM, NARROW, discrete.slice_x1, discrete.grid)
        bright = closed >= 0.5 * closed.max()
        self.assertLess(np.max(np.abs(discrete.density[bright] / closed[bright] - 1)), 1e-2)

    def test_convergence_is_monotone(self):
        results = hbt.convergence_study(GEOM, NARROW, -1.5e-3, 1.5e-3, (128, 256, 512, 1024))
        deviations = [deviation for _, deviation in results]
        self.assertEqual([bins for bins, _ in results], [128, 256, 512, 1024])
        self.assertLess(deviations[2], 1e-2)
        for coarse, fine in zip(deviations, deviations[1:]):
            self.assertLess(fine, coarse)
        # second order in the bin width
        self.assertLess(deviations[3], 0.5 * deviations[2])

    def test_dark_fringes_on_grid(self):
        # 10 um bins put the dark fringes at +/-0.2 mm, +/-0.6 mm on grid points
        grid = GridSpec(-1.5e-3, 1.5e-3, 301)
        discrete = hbt.hbt_from_nport(GEOM, NARROW, grid, slice_x1=0.0)
        self.assertAlmostEqual(discrete.slice_x1, 0.0, delta=1e-12)
        for x2 in (-6e-4, -2e-4, 2e-4, 6e-4):
            index = int(np.argmin(np.abs(discrete.grid - x2)))
            self.assertLessEqual(discrete.density[index], 1e-6 * discrete.density.max())
        closed = hbt.scan(GEOM, NARROW, grid, slice_x1=0.0)
        np.testing.assert_allclose(hbt.dark_fringes(discrete), hbt.dark_fringes(closed),
                                   atol=grid.step)

    def test_point_sampling(self):
        grid = GridSpec(-1.5e-3, 1.5e-3, 512)
        discrete = hbt.hbt_from_nport(GEOM, NARROW, grid, slice_x1=0.0, sampling='point')
        closed = hbt.coincidence_density(GEOM, NARROW, discrete.slice_x1, discrete.grid)
        bright = closed >= 0.5 * closed.max()
        self.assertLess(np.max(np.abs(discrete.density[bright] / closed[bright] - 1)), 1e-6)

    def test_unknown_sampling(self):
        with self.assertRaises(DomainError):
            hbt.hbt_from_nport(GEOM, NARROW, GridSpec(-1.5e-3, 1.5e-3, 256), sampling='spline')

    def test_coarse_grid_rejected(self):
        with self.assertRaises(DomainError):
            hbt.hbt_from_nport(GEOM, NARROW, GridSpec(-1.5e-3, 1.5e-3, 64))


@pytest.mark.parametrize('center', [0.0, 3e-4])
def test_slice_is_row_of_full_pattern(center):
    env = Envelope(2.5e-4, center=center)
    grid = GridSpec(-1.5e-3 + center, 1.5e-3 + center, 201)
    full = hbt.scan(GEOM, env, grid)
    x1 = grid.positions()[57]
    row = hbt.scan(GEOM, env, grid, slice_x1=x1)
    np.testing.assert_allclose(row.density, full.density[57], rtol=1e-12)
