import unittest

import numpy as np

from anisoqed.constitutive import ConstitutiveTensors
from anisoqed.dispersion import (
    NORMALIZATION,
    PlaneWaveMode,
    WaveVector,
    dispersion_residual,
    lambda_matrix,
    maxwell_residual,
    phase_speed,
    plane_wave_modes,
    ray_spectrum,
    solve_branches,
    transverse_branches,
)
from anisoqed.errors import EigenproblemError, InvalidInputError, UndefinedSpeedError
from anisoqed.misc import testmedia
from anisoqed.misc.sphere import random_rotation, spherical_to_cartesian


class TestBranches(unittest.TestCase):
    def test_vacuum(self):
        vac = ConstitutiveTensors.vacuum()
        branches = solve_branches([0.0, 0.0, 1.0], vac)
        self.assertEqual(len(branches), 2)
        self.assertTrue(branches[0].is_longitudinal_zero_mode)
        self.assertEqual(branches[0].omega, 0.0)
        b = branches[1]
        self.assertEqual(b.lambda_count, 2)
        self.assertAlmostEqual(b.omega / vac.constants.c, 1.0, places=12)
        np.testing.assert_allclose(b.X @ vac.eps1 @ b.X.T, np.eye(2), atol=1e-12)

    def test_degenerate_basis_is_canonical(self):
        medium = testmedia.isotropic(2.25)
        b = transverse_branches([0.0, 0.0, 1.0], medium)[0]
        unit = b.X / np.linalg.norm(b.X, axis=1)[:, None]
        np.testing.assert_allclose(unit, [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0]], atol=1e-12)

    def test_uniaxial_extraordinary_index(self):
        n_o, n_e = 1.5, 1.7
        medium = testmedia.uniaxial(n_o, n_e)
        c = medium.constants.c
        for theta in np.linspace(0.05, np.pi / 2, 20):
            qhat = [np.sin(theta), 0.0, np.cos(theta)]
            indices = sorted(c / phase_speed(b) for b in transverse_branches(qhat, medium))
            n_ext = 1.0 / np.sqrt(np.cos(theta) ** 2 / n_o**2 + np.sin(theta) ** 2 / n_e**2)
            np.testing.assert_allclose(indices, sorted([n_o, n_ext]), rtol=1e-10)

    def test_homogeneity(self):
        rng = np.random.default_rng(5)
        medium = testmedia.random_medium(rng, magnetic=True)
        qhat = spherical_to_cartesian(0.7, 1.9)
        w1 = [b.omega for b in solve_branches(qhat, medium, 1.0)]
        w3 = [b.omega for b in solve_branches(WaveVector(qhat, 3.0), medium)]
        np.testing.assert_allclose(w3, 3.0 * np.array(w1), rtol=1e-12)

    def test_residuals(self):
        rng = np.random.default_rng(6)
        medium = testmedia.random_medium(rng)
        for qhat in rng.standard_normal((20, 3)):
            qhat /= np.linalg.norm(qhat)
            for b in transverse_branches(qhat, medium, 1e7):
                self.assertLess(dispersion_residual(b, medium), 1e-12)

    def test_zero_mode_has_no_speed(self):
        b = solve_branches([1.0, 0.0, 0.0], ConstitutiveTensors.vacuum())[0]
        with self.assertRaises(UndefinedSpeedError):
            phase_speed(b)

    def test_errors(self):
        with self.assertRaises(EigenproblemError):
            solve_branches([0, 0, 1], ConstitutiveTensors(np.diag([1.0, 1.0, -1.0]), np.eye(3)))
        A = np.arange(9.0).reshape(3, 3)
        me = ConstitutiveTensors(np.eye(3), np.eye(3), eps2=A, mu1=-A.T)
        with self.assertRaises(EigenproblemError):
            solve_branches([0, 0, 1], me)
        with self.assertRaises(InvalidInputError):
            WaveVector([1.0, 1.0, 0.0])

    def test_ray_spectrum_orthonormal(self):
        rng = np.random.default_rng(7)
        medium = testmedia.random_medium(rng, spread=10.0, magnetic=True)
        s, X = ray_spectrum(spherical_to_cartesian(1.1, 0.3), medium)
        self.assertEqual(s[0], 0.0)
        self.assertTrue(np.all(s[1:] > 0.0))
        np.testing.assert_allclose(X.T @ medium.eps1 @ X, np.eye(3), atol=1e-12)


class TestLambda(unittest.TestCase):
    def test_vacuum(self):
        vac = ConstitutiveTensors.vacuum()
        k = 3.0
        L = lambda_matrix([k, 0.0, 0.0], vac.mu2)
        expected = np.diag([0.0, 1.0, 1.0]) * k**2 / vac.constants.mu0
        np.testing.assert_allclose(L, expected, rtol=1e-14, atol=1e-14 * expected.max())

    def test_zero_wavevector(self):
        rng = np.random.default_rng(20)
        L = lambda_matrix(np.zeros(3), testmedia.random_spd(rng))
        np.testing.assert_array_equal(L, np.zeros((3, 3)))

    def test_longitudinal_null_vector(self):
        rng = np.random.default_rng(21)
        for _ in range(100):
            mu2 = testmedia.random_spd(rng)
            q = rng.standard_normal(3)
            L = lambda_matrix(q, mu2)
            scale = np.linalg.norm(mu2) * np.linalg.norm(q) ** 3
            self.assertLess(np.linalg.norm(L @ q), 1e-12 * scale)
            np.testing.assert_allclose(L, L.T, rtol=0.0, atol=1e-13 * scale)

    def test_stacked(self):
        rng = np.random.default_rng(22)
        mu2 = testmedia.random_spd(rng)
        qs = rng.standard_normal((4, 3))
        L = lambda_matrix(qs, mu2)
        self.assertEqual(L.shape, (4, 3, 3))
        np.testing.assert_allclose(L[2], lambda_matrix(qs[2], mu2), rtol=1e-14)

    def test_gauge_condition(self):
        # transverse polarizations satisfy q . (eps1 X) = 0
        rng = np.random.default_rng(23)
        for _ in range(20):
            medium = testmedia.random_medium(rng, spread=10.0, magnetic=True)
            qhat = random_rotation(rng)[:, 0]
            for b in transverse_branches(qhat, medium):
                for X in b.X:
                    bound = 1e-12 * np.linalg.norm(medium.eps1) * np.linalg.norm(X)
                    self.assertLess(abs(qhat @ medium.eps1 @ X), bound)


class TestModes(unittest.TestCase):
    def test_maxwell_residual_random_media(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            medium = testmedia.random_medium(rng, spread=10.0, magnetic=True)
            medium = medium.rotated(random_rotation(rng))
            qhat = rng.standard_normal(3)
            qhat /= np.linalg.norm(qhat)
            for mode in plane_wave_modes(qhat, 1.0e7, medium):
                res = maxwell_residual(mode, medium)
                self.assertLessEqual(max(res.values()), 1e-10, res)

    def test_wrong_frequency_is_detected(self):
        medium = testmedia.uniaxial(1.5, 1.7)
        mode = plane_wave_modes(spherical_to_cartesian(0.8, 0.2), 1.0e7, medium)[0]
        res = maxwell_residual(mode, medium, omega=1.1 * mode.omega)
        self.assertGreater(res["ampere"], 1e-3)

    def test_amplitude_normalization(self):
        medium = testmedia.uniaxial(1.5, 1.7)
        for mode in plane_wave_modes(spherical_to_cartesian(0.4, 2.0), 2.0, medium):
            a = mode.amplitude
            norm = NORMALIZATION**2 * np.real(np.conj(a) @ medium.eps1 @ a)
            self.assertAlmostEqual(norm, 1.0, places=12)
            np.testing.assert_allclose(mode.field(np.zeros(3)), a)
            r = np.array([1e-7, 0.0, 2e-7])
            np.testing.assert_allclose(
                mode.field(r), a * np.exp(1j * mode.q.vector @ r), rtol=1e-14
            )

    def test_zero_mode_is_not_quantized(self):
        b = solve_branches([0, 1, 0], ConstitutiveTensors.vacuum())[0]
        with self.assertRaises(InvalidInputError):
            PlaneWaveMode(b, 1.0, tensors=ConstitutiveTensors.vacuum())


if __name__ == "__main__":
    unittest.main()
