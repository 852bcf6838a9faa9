import contextlib
import io
import unittest
from unittest import mock

import numpy as np

from anisoqed.constitutive import ConstitutiveTensors
from anisoqed.dispersion import transverse_branches
from anisoqed import emission
from anisoqed.emission import (
    TwoLevelAtom,
    decay_rate,
    dipole_angle_sweep,
    free_space_rate,
    isofrequency_radius,
)
from anisoqed.errors import InvalidInputError
from anisoqed.localfield import CavityConfig, QuadratureSpec
from anisoqed.misc import diagnosis, testmedia
from anisoqed.misc.sphere import random_rotation

OMEGA0 = 3.0e15
DIPOLE = 1.0e-29
C = 299792458.0
R_SMALL = 1e-3 * C / OMEGA0
MEDIUM_QUAD = QuadratureSpec(n_theta=16, n_phi=32)


class TestAtom(unittest.TestCase):
    def test_validation(self):
        with self.assertRaises(InvalidInputError):
            TwoLevelAtom(-1.0, [0.0, 0.0, DIPOLE])
        with self.assertRaises(InvalidInputError):
            TwoLevelAtom(OMEGA0, [0.0, DIPOLE])

    def test_isofrequency_radius(self):
        vac = ConstitutiveTensors.vacuum()
        b = transverse_branches([1.0, 0.0, 0.0], vac)[0]
        self.assertAlmostEqual(isofrequency_radius(b.qhat, b, OMEGA0) * vac.constants.c / OMEGA0, 1.0, places=12)


class TestDecayRate(unittest.TestCase):
    def test_vacuum_oracle(self):
        vac = ConstitutiveTensors.vacuum()
        atom = TwoLevelAtom(OMEGA0, [0.3 * DIPOLE, -0.4 * DIPOLE, 0.5 * DIPOLE])
        result = decay_rate(atom, CavityConfig(R_SMALL, vac))
        gamma0 = free_space_rate(atom, vac.constants)
        self.assertLess(abs(result.gamma_over_free_space - 1.0), 0.005)
        self.assertTrue(result.converged)
        self.assertAlmostEqual(result.population_rate / result.gamma, 2.0)
        self.assertAlmostEqual(sum(result.branch_contributions) / result.gamma, 1.0, places=12)
        self.assertAlmostEqual(result.gamma_free_space / gamma0, 1.0, places=14)

    def test_zero_dipole(self):
        medium = testmedia.uniaxial(1.5, 1.7)
        result = decay_rate(TwoLevelAtom(OMEGA0, np.zeros(3)), CavityConfig(R_SMALL, medium), MEDIUM_QUAD)
        self.assertEqual(result.gamma, 0.0)
        self.assertTrue(result.converged)
        self.assertIsNone(result.gamma_over_free_space)
        self.assertIsNone(result.to_dict()["gamma_over_free_space"])
        with contextlib.redirect_stdout(io.StringIO()) as out:
            diagnosis.decay_summary(result)
        self.assertIn("None", out.getvalue())

    def test_isotropic_real_cavity(self):
        atom = TwoLevelAtom(OMEGA0, [0.0, 0.0, DIPOLE])
        quad = QuadratureSpec(n_theta=8, n_phi=16)
        for eps_r in (1.5, 2.25, 4.0):
            medium = testmedia.isotropic(eps_r)
            result = decay_rate(atom, CavityConfig(R_SMALL, medium), quad)
            n = np.sqrt(eps_r)
            expected = n * (3.0 * eps_r / (2.0 * eps_r + 1.0)) ** 2
            self.assertLess(abs(result.gamma_over_free_space / expected - 1.0), 0.02)

    def test_isotropic_orientation_independence(self):
        medium = testmedia.isotropic(2.25)
        cavity = CavityConfig(R_SMALL, medium)
        quad = QuadratureSpec(n_theta=8, n_phi=16)
        rng = np.random.default_rng(8)
        directions = list(np.eye(3)) + [v / np.linalg.norm(v) for v in rng.standard_normal((3, 3))]
        rates = [decay_rate(TwoLevelAtom(OMEGA0, DIPOLE * u), cavity, quad).gamma for u in directions]
        np.testing.assert_allclose(rates, rates[0], rtol=1e-8)

    def test_angular_refinement_converges(self):
        medium = testmedia.uniaxial(1.5, 1.8)
        atom = TwoLevelAtom(OMEGA0, DIPOLE * np.array([0.6, 0.0, 0.8]))
        cavity = CavityConfig(R_SMALL, medium)
        gammas = [
            decay_rate(atom, cavity, QuadratureSpec(n_theta=n, n_phi=2 * n), corrected=False, strict=False).gamma
            for n in (8, 16, 32)
        ]
        d1 = abs(gammas[1] - gammas[0])
        d2 = abs(gammas[2] - gammas[1])
        self.assertLessEqual(d2, max(d1, 1e-12 * gammas[2]))
        self.assertLess(d2, 1e-6 * gammas[2])

    def test_isotropic_uncorrected(self):
        atom = TwoLevelAtom(OMEGA0, [DIPOLE, 0.0, 0.0])
        medium = testmedia.isotropic(2.25)
        result = decay_rate(atom, CavityConfig(R_SMALL, medium), MEDIUM_QUAD, corrected=False)
        self.assertAlmostEqual(result.gamma_over_free_space / 1.5, 1.0, places=8)

    def test_rotational_covariance(self):
        rng = np.random.default_rng(20)
        medium = testmedia.uniaxial(1.5, 1.8)
        d = DIPOLE * np.array([0.2, 0.5, 0.8])
        Rm = random_rotation(rng)
        base = decay_rate(TwoLevelAtom(OMEGA0, d), CavityConfig(R_SMALL, medium), MEDIUM_QUAD)
        turned = decay_rate(
            TwoLevelAtom(OMEGA0, Rm @ d), CavityConfig(R_SMALL, medium.rotated(Rm)), MEDIUM_QUAD
        )
        self.assertLess(abs(turned.gamma / base.gamma - 1.0), 1e-6)

    def test_angle_sweep(self):
        medium = testmedia.uniaxial(1.5, 1.8)
        atom = TwoLevelAtom(OMEGA0, [0.0, 0.0, DIPOLE])
        theta, results = dipole_angle_sweep(
            atom, CavityConfig(R_SMALL, medium), MEDIUM_QUAD, n=5, corrected=False
        )
        self.assertEqual(len(results), 5)
        self.assertAlmostEqual(theta[-1], np.pi)
        self.assertAlmostEqual(results[0].gamma / results[-1].gamma, 1.0, places=10)
        # the ordinary wave only couples to dipoles across the optic axis
        self.assertGreater(results[2].gamma, results[0].gamma)

    def test_angle_sweep_shares_correction(self):
        cavity = CavityConfig(R_SMALL, testmedia.isotropic(2.25))
        atom = TwoLevelAtom(OMEGA0, [0.0, 0.0, DIPOLE])
        with mock.patch(
            "anisoqed.emission.correction_tensors", wraps=emission.correction_tensors
        ) as spy:
            _, results = dipole_angle_sweep(atom, cavity, QuadratureSpec(8, 16), n=3)
        self.assertEqual(spy.call_count, 1)
        self.assertEqual(len(results), 3)
        np.testing.assert_allclose(
            [r.gamma for r in results], results[0].gamma, rtol=1e-8
        )


if __name__ == "__main__":
    unittest.main()
