# --------------------------------------------------------------
# Copyright (c) 2024, anisoqed developers
# License: GPLv3 (see LICENSE)
# --------------------------------------------------------------
"""Reference media and metrics with known optical properties.

The media are built from relative tensors (eps1 in units of eps0, mu2
in units of 1/mu0); metrics are dimensionless with coordinates scaled
by c.
"""
import numpy as np

import anisoqed.num as anp
from anisoqed.constitutive import ConstitutiveTensors, SpacetimeMetric
from anisoqed.misc.sphere import random_rotation


def vacuum(constants=None):
    return ConstitutiveTensors.vacuum(constants)


def isotropic(eps_r, mu_r=1.0, constants=None):
    """Isotropic dielectric of index sqrt(eps_r mu_r)."""
    return ConstitutiveTensors.from_relative(
        eps_r * np.eye(3), np.eye(3) / mu_r, constants=constants
    )


def uniaxial(n_o, n_e, axis=(0.0, 0.0, 1.0), constants=None):
    """Non-magnetic uniaxial crystal with optic axis `axis`.

    eps1 = eps0 [n_o^2 (I - a a^T) + n_e^2 a a^T].
    """
    a = np.asarray(axis, dtype=float)
    a = a / anp.norm(a)
    P = np.outer(a, a)
    eps_r = n_o**2 * (np.eye(3) - P) + n_e**2 * P
    return ConstitutiveTensors.from_relative(eps_r, np.eye(3), constants=constants)


def random_spd(rng, spread=10.0):
    """Random symmetric positive-definite matrix with eigenvalues in [1, spread]."""
    w = np.exp(rng.uniform(0.0, np.log(spread), size=3))
    Rm = random_rotation(rng)
    A = (Rm * w) @ Rm.T
    return 0.5 * (A + A.T)


def random_medium(rng, spread=10.0, magnetic=False, constants=None):
    """Random anisotropic medium, eps1 eigenvalue spread up to `spread`."""
    eps_r = random_spd(rng, spread)
    inv_mu_r = random_spd(rng, spread) if magnetic else np.eye(3)
    return ConstitutiveTensors.from_relative(eps_r, inv_mu_r, constants=constants)


def minkowski():
    return SpacetimeMetric.minkowski()


def schwarzschild_isotropic(mass, r):
    """Schwarzschild metric in isotropic coordinates at radius r > mass / 2.

    g00 = -((1 - a) / (1 + a))^2 and g_ij = (1 + a)^4 delta_ij,
    a = mass / (2 r).
    """
    a = mass / (2.0 * r)
    if not 0.0 <= a < 1.0:
        raise ValueError(f"r must exceed mass / 2, got mass = {mass!r}, r = {r!r}")
    g = np.diag([-(((1.0 - a) / (1.0 + a)) ** 2)] + 3 * [(1.0 + a) ** 4])
    return SpacetimeMetric(g)


def rotating_frame(Omega, x, y):
    """Flat spacetime seen from a frame rotating at Omega about z.

    Valid inside the light cylinder, Omega^2 (x^2 + y^2) < 1.
    """
    rho2 = x * x + y * y
    if Omega * Omega * rho2 >= 1.0:
        raise ValueError("point lies outside the light cylinder")
    g = np.eye(4)
    g[0, 0] = -(1.0 - Omega * Omega * rho2)
    g[0, 1] = g[1, 0] = -Omega * y
    g[0, 2] = g[2, 0] = Omega * x
    return SpacetimeMetric(g)


def random_metric(rng, shift=0.5):
    """Random static metric obeying the signature conditions.

    g00 in [-2, -0.5], a random SPD spatial block and a shift vector of
    norm at most `shift`.
    """
    g = np.zeros((4, 4))
    g[0, 0] = -rng.uniform(0.5, 2.0)
    g[1:, 1:] = random_spd(rng, 4.0)
    G = rng.standard_normal(3)
    G *= shift * rng.uniform() / anp.norm(G)
    g[0, 1:] = G
    g[1:, 0] = G
    return SpacetimeMetric(g)
