# --------------------------------------------------------------
# Copyright (c) 2024, anisoqed developers
# License: GPLv3 (see LICENSE)
# --------------------------------------------------------------
import numpy as np

import anisoqed.num as anp
from anisoqed.errors import InvalidInputError


def spherical_to_cartesian(theta, phi):
    """Unit vectors of polar angle theta and azimuth phi.

    Parameters
    ----------
    theta, phi : array_like
        Angles in radians, broadcast together.

    Returns
    -------
    numpy.ndarray
        Array of shape broadcast(theta, phi).shape + (3,).
    """
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    st = np.sin(theta)
    x = np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)
    return x / anp.norm(x, axis=-1, keepdims=True)


def gauss_legendre_sphere(n_theta, n_phi):
    """Product quadrature on the unit sphere.

    Gauss-Legendre nodes in cos(theta) times a uniform grid in phi.
    The rule integrates exactly every polynomial in the Cartesian
    coordinates of degree < min(2 n_theta, n_phi).

    Parameters
    ----------
    n_theta : int
        Number of Gauss-Legendre nodes in cos(theta).
    n_phi : int
        Number of azimuthal nodes.

    Returns
    -------
    directions : numpy.ndarray, shape (n_theta, n_phi, 3)
        Unit vectors, theta-major.
    weights : numpy.ndarray, shape (n_theta, n_phi)
        Positive weights summing to 4 pi.
    """
    if n_theta < 1 or n_phi < 1:
        raise InvalidInputError("node counts must be positive")
    mu, wmu = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * np.pi * (np.arange(n_phi) + 0.5) / n_phi
    theta = np.arccos(mu)
    directions = spherical_to_cartesian(theta[:, None], phi[None, :])
    weights = np.outer(wmu, np.full(n_phi, 2.0 * np.pi / n_phi))
    return directions, weights


def regulargrid_sphere(n_theta, n_phi):
    """Regular (theta, phi) grid for direction sweeps.

    theta is sampled on [0, pi] with n_theta points, phi on [0, 2 pi)
    with n_phi points.

    Returns
    -------
    theta, phi : numpy.ndarray, shape (n_theta * n_phi,)
    directions : numpy.ndarray, shape (n_theta * n_phi, 3)
    """
    theta = np.linspace(0.0, np.pi, n_theta)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    T, P = np.meshgrid(theta, phi, indexing="ij")
    T = T.reshape(-1)
    P = P.reshape(-1)
    return T, P, spherical_to_cartesian(T, P)


def rotation_matrix(axis, angle):
    """Rotation by `angle` about `axis` (Rodrigues formula)."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / anp.norm(axis)
    K = np.array(
        [[0.0, -axis[2], axis[1]], [axis[2], 0.0, -axis[0]], [-axis[1], axis[0], 0.0]]
    )
    return np.eye(3) + np.sin(angle) * K + (1.0 - np.cos(angle)) * K @ K


def random_rotation(rng):
    """Uniformly distributed proper rotation."""
    Qm, Rm = anp.qr(rng.standard_normal((3, 3)))
    Qm = Qm * np.sign(np.diag(Rm))
    if anp.det(Qm) < 0.0:
        Qm[:, 0] = -Qm[:, 0]
    return Qm
