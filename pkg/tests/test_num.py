import os
import unittest
from unittest import mock

import numpy as np

import anisoqed.num as anp
from anisoqed.errors import ConfigurationError


class TestNum(unittest.TestCase):
    def test_levi_civita(self):
        e = anp.levi_civita
        self.assertEqual(e[0, 1, 2], 1.0)
        self.assertEqual(e[1, 0, 2], -1.0)
        self.assertEqual(np.count_nonzero(e), 6)
        with self.assertRaises(ValueError):
            e[0, 0, 0] = 1.0

    def test_cross_matrix(self):
        rng = np.random.default_rng(0)
        q, v = rng.standard_normal((2, 3))
        np.testing.assert_allclose(anp.cross_matrix(q) @ v, np.cross(q, v), atol=1e-14)

    def test_parallel_map_keeps_order(self):
        out = anp.parallel_map(lambda x: x * x, range(50), workers=4)
        self.assertEqual(out, [x * x for x in range(50)])

    def test_threads_from_environment(self):
        with mock.patch.dict(os.environ, {"ANISO_THREADS": "2"}):
            self.assertEqual(anp.max_workers(), 2)
        with mock.patch.dict(os.environ, {"ANISO_THREADS": "zero"}):
            with self.assertRaises(ConfigurationError):
                anp.max_workers()
        with mock.patch.dict(os.environ, {"ANISO_THREADS": "0"}):
            with self.assertRaises(ConfigurationError):
                anp.max_workers()

    def test_relerr(self):
        self.assertEqual(anp.relerr(np.ones(3), np.ones(3)), 0.0)
        self.assertAlmostEqual(anp.relerr(np.array([1.0, 2.2]), np.array([1.0, 2.0])), 0.1)


if __name__ == "__main__":
    unittest.main()
