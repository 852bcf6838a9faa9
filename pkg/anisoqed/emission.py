# --------------------------------------------------------------
# Copyright (c) 2024, anisoqed developers
# License: GPLv3 (see LICENSE)
# --------------------------------------------------------------
"""Spontaneous decay of a two-level atom at the center of a small hole.

The golden-rule amplitude decay constant

    gamma = (pi / 2 hbar) sum_{rho, lambda} int d^3q w_rho(q)
            delta(w_rho(q) - w0) |d . F(rho, lambda, q, 0)|^2

is reduced to the isofrequency surface with the homogeneity of the
dispersion roots, w_rho(q) = |q| v_rho(qhat):

    gamma = (pi / 2 hbar) sum int dOmega q0^2 / v_rho w0 |d . F|^2,
    q0 = w0 / v_rho(qhat).

The population of the excited state decays at 2 gamma.
"""
import time
from dataclasses import dataclass, field, asdict

import numpy as np

import anisoqed.num as anp
from anisoqed.dispersion import WaveVector, phase_speed, transverse_branches
from anisoqed.errors import ConvergenceError, InvalidInputError
from anisoqed.localfield import (
    QuadratureSpec,
    correction_tensors,
    mode_at_origin,
    uncorrected_amplitude,
)
from anisoqed.misc.sphere import gauss_legendre_sphere, rotation_matrix


@dataclass
class TwoLevelAtom:
    """Two-level atom at the origin.

    Attributes
    ----------
    omega0 : float
        Transition angular frequency (rad/s).
    d : ndarray, shape (3,)
        Transition dipole moment (C m), charge included. A zero dipole
        is accepted and decouples the atom.
    """

    omega0: float
    d: np.ndarray

    def __post_init__(self):
        self.omega0 = float(self.omega0)
        if not (np.isfinite(self.omega0) and self.omega0 > 0.0):
            raise InvalidInputError(f"omega0 must be positive, got {self.omega0!r}")
        self.d = np.array(self.d, dtype=float)
        if self.d.shape != (3,) or not anp.is_finite(self.d):
            raise InvalidInputError("dipole must be a finite 3-vector")

    @property
    def dipole_norm(self):
        return float(anp.norm(self.d))


@dataclass
class DecayResult:
    """Amplitude decay constant gamma and quadrature diagnostics.

    `branch_contributions` lists the contributions of the two
    transverse polarization slots, ordered by ascending frequency at
    fixed |q| in each direction.
    """

    gamma: float
    branch_contributions: list
    error_estimate: float
    converged: bool
    gamma_free_space: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def population_rate(self):
        return 2.0 * self.gamma

    @property
    def gamma_over_free_space(self):
        """gamma / gamma0, None for a decoupled atom (d = 0)."""
        if self.gamma_free_space == 0.0:
            return None
        return self.gamma / self.gamma_free_space

    def to_dict(self):
        out = asdict(self)
        out["convention"] = "amplitude decay constant; population decays at 2*gamma"
        out["population_rate"] = self.population_rate
        out["gamma_over_free_space"] = self.gamma_over_free_space
        return out


def free_space_rate(atom, constants):
    """gamma0 = w0^3 |d|^2 / (6 pi eps0 hbar c^3)."""
    return (
        atom.omega0**3
        * atom.dipole_norm**2
        / (6.0 * np.pi * constants.eps0 * constants.hbar * constants.c**3)
    )


def isofrequency_radius(qhat, branch, omega0):
    """|q| on the isofrequency surface w_rho(q) = omega0 along qhat."""
    return omega0 / phase_speed(branch, qhat)


def _slot_amplitudes(qhat, atom, cavity, system):
    # (q0^2 / v, |d.F|^2) for the two transverse slots along qhat
    out = []
    for b in transverse_branches(qhat, cavity.medium):
        v = phase_speed(b)
        q0 = atom.omega0 / v
        for lam in range(b.lambda_count):
            if system is None:
                F = uncorrected_amplitude(b.X[lam], cavity.medium.eps1)
            else:
                F = mode_at_origin(b, WaveVector(b.qhat, q0), cavity, system, lam)
            out.append((q0 * q0 / v, abs(atom.d @ F) ** 2))
    return out


def _surface_integral(atom, cavity, n_theta, n_phi, system):
    dirs, w = gauss_legendre_sphere(n_theta, n_phi)
    hbar = cavity.medium.constants.hbar
    prefactor = np.pi / (2.0 * hbar) * atom.omega0

    def row(i):
        vals = np.zeros((n_phi, 2))
        for j in range(n_phi):
            slots = _slot_amplitudes(dirs[i, j], atom, cavity, system)
            for m, (jac, d2) in enumerate(slots):
                vals[j, m] = w[i, j] * jac * d2
        return vals

    rows = anp.parallel_map(row, range(n_theta))
    contributions = prefactor * np.sum(np.stack(rows), axis=(0, 1))
    return contributions


def decay_rate(atom, cavity, quad=None, corrected=True, system=None, verbosity=0, strict=True):
    """Decay constant of an atom at the center of the cavity.

    Parameters
    ----------
    atom : TwoLevelAtom
    cavity : CavityConfig
    quad : QuadratureSpec, optional
        Angular grid of the isofrequency surface and of the
        correction integrals. Defaults to 32 x 64 nodes.
    corrected : bool, optional
        Apply the local-field correction (default). With False the
        bare mode amplitudes of the medium are used.
    system : LocalFieldSystem, optional
        Precomputed correction system at omega0.
    verbosity : int, optional
    strict : bool, optional
        Raise ConvergenceError when the angular error estimate exceeds
        quad.rtol * gamma.

    Returns
    -------
    DecayResult
    """
    quad = quad if quad is not None else QuadratureSpec()
    tic = time.time()
    constants = cavity.medium.constants
    gamma0 = free_space_rate(atom, constants)

    if corrected and system is None:
        system = correction_tensors(atom.omega0, cavity, quad, verbosity=verbosity)
    if not corrected:
        system = None

    if verbosity >= 1:
        print("Isofrequency surface integral...")
    contributions = _surface_integral(atom, cavity, quad.n_theta, quad.n_phi, system)
    coarse = quad.coarsened()
    coarse_contributions = _surface_integral(atom, cavity, coarse.n_theta, coarse.n_phi, system)
    gamma = float(np.sum(contributions))
    error = float(abs(gamma - np.sum(coarse_contributions)))
    converged = error <= quad.rtol * gamma or gamma == 0.0
    if verbosity >= 1:
        print("done.")

    diagnostics = {
        "n_theta": quad.n_theta,
        "n_phi": quad.n_phi,
        "corrected": bool(corrected),
        "time": time.time() - tic,
    }
    if system is not None:
        diagnostics["local_field"] = dict(system.diagnostics)
        diagnostics["Q"] = system.Q
    result = DecayResult(
        gamma=gamma,
        branch_contributions=[float(c) for c in contributions],
        error_estimate=error,
        converged=bool(converged),
        gamma_free_space=gamma0,
        diagnostics=diagnostics,
    )
    if strict and not converged:
        raise ConvergenceError(
            f"angular quadrature not converged: error {error:.3e} > {quad.rtol} * gamma",
            details={"gamma": gamma, "error": error},
        )
    if verbosity >= 2:
        from anisoqed.misc.diagnosis import pretty_print_dictionary

        pretty_print_dictionary(
            {"gamma": gamma, "gamma/gamma0": result.gamma_over_free_space, "error": error}
        )
    return result


def dipole_angle_sweep(atom, cavity, quad=None, n=19, corrected=True, verbosity=0):
    """Decay constant for the dipole rotated in the x-z plane.

    The dipole of norm |d| makes an angle theta in [0, pi] with z.

    Returns
    -------
    theta : ndarray, shape (n,)
    results : list of DecayResult
    """
    quad = quad if quad is not None else QuadratureSpec()
    # the correction depends on the dipole only through omega0, so one
    # system serves the whole sweep
    system = None
    if corrected:
        system = correction_tensors(atom.omega0, cavity, quad, verbosity=verbosity)
    theta = np.linspace(0.0, np.pi, n)
    ez = np.array([0.0, 0.0, 1.0])
    results = []
    for t in theta:
        d = atom.dipole_norm * (rotation_matrix([0.0, 1.0, 0.0], t) @ ez)
        results.append(
            decay_rate(
                TwoLevelAtom(atom.omega0, d),
                cavity,
                quad,
                corrected=corrected,
                system=system,
                verbosity=0,
            )
        )
    return theta, results
