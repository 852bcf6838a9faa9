# --------------------------------------------------------------
# Copyright (c) 2024, anisoqed developers
# License: GPLv3 (see LICENSE)
# --------------------------------------------------------------
"""Dispersion branches of homogeneous non-dispersive media.

For a plane wave F exp(i(q.r - w t)) the wave equation reduces to the
generalized symmetric-definite eigenproblem

    Lambda(q, mu2) X = w^2 eps1 X,
    Lambda_ij = -e_{iab} e_{rsj} mu2_br q_a q_s,

which is solved in the symmetric form C^-1 Lambda C^-1 with C the
principal square root of eps1. The roots are degree-1 homogeneous in
|q|, so branches are computed along unit directions.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

import anisoqed.num as anp
from anisoqed.constitutive import factor_epsilon
from anisoqed.errors import (
    EigenproblemError,
    FactorizationError,
    InvalidInputError,
    UndefinedSpeedError,
)

DEGENERACY_TOL = 1e-8
ZERO_ROOT_TOL = 1e-10
NORMALIZATION = (2.0 * np.pi) ** 1.5


class WaveVector:
    """Wavevector q = magnitude * qhat (rad/m)."""

    def __init__(self, qhat, magnitude=1.0):
        qhat = np.array(qhat, dtype=float)
        if qhat.shape != (3,) or not anp.is_finite(qhat):
            raise InvalidInputError("qhat must be a finite 3-vector")
        if abs(anp.norm(qhat) - 1.0) > 1e-14:
            raise InvalidInputError(f"qhat must have unit norm, got {anp.norm(qhat)!r}")
        if not magnitude >= 0.0:
            raise InvalidInputError(f"magnitude must be >= 0, got {magnitude!r}")
        qhat.flags.writeable = False
        self.qhat = qhat
        self.magnitude = float(magnitude)

    @classmethod
    def from_vector(cls, q):
        q = np.asarray(q, dtype=float)
        n = anp.norm(q)
        if n == 0.0:
            raise InvalidInputError("cannot build a direction from q = 0")
        return cls(q / n, n)

    @property
    def vector(self):
        return self.magnitude * self.qhat

    def __repr__(self):
        return f"WaveVector(qhat={self.qhat.tolist()}, magnitude={self.magnitude!r})"


@dataclass
class DispersionBranch:
    """One root of det[Lambda - w^2 eps1] = 0 along a direction.

    `omega` is the root at wavevector magnitude `magnitude` (1 by
    default); `X` has one row per independent polarization, each row
    eps1-normalized.
    """

    rho: int
    omega: float
    lambda_count: int
    X: np.ndarray
    is_longitudinal_zero_mode: bool
    qhat: np.ndarray = field(repr=False)
    magnitude: float = 1.0


def _pencil_root(tensors):
    # eps1^(-1/2) is reused for every direction of a given medium
    cache = tensors.__dict__.setdefault("_cache", {})
    if "inv_root" not in cache:
        try:
            C = factor_epsilon(tensors.eps1)
        except FactorizationError as exc:
            raise EigenproblemError(f"eps1 is not SPD: {exc}")
        if anp.eigvalsh(anp.sym(tensors.mu2))[0] <= 0.0:
            raise EigenproblemError("mu2 is not positive definite")
        Ci = anp.sym(anp.inv(C))
        cache["inv_root"] = Ci
    return cache["inv_root"]


def lambda_matrix(q, mu2):
    """Lambda(q, mu2) with Lambda_ij = -e_{iab} e_{rsj} mu2_br q_a q_s.

    Parameters
    ----------
    q : WaveVector or array_like, shape (3,) or (n, 3)
    mu2 : array_like, shape (3, 3)

    Returns
    -------
    ndarray, shape (3, 3) or (n, 3, 3)

    Notes
    -----
    Lambda = [q]x^T mu2 [q]x, so Lambda q = 0 and Lambda is symmetric
    when mu2 is.
    """
    if isinstance(q, WaveVector):
        q = q.vector
    q = np.asarray(q, dtype=float)
    K = anp.cross_matrix(q)
    return -np.einsum("...ib,br,...rj->...ij", K, np.asarray(mu2, dtype=float), K)


def ray_spectra(phats, tensors):
    """eps1-orthonormal generalized eigen-decompositions along many rays.

    Parameters
    ----------
    phats : array_like, shape (n, 3)
        Unit directions.
    tensors : ConstitutiveTensors

    Returns
    -------
    s : ndarray, shape (n, 3)
        Eigenvalues w^2 at unit magnitude, ascending; s[:, 0] is the
        longitudinal zero root, set to exactly 0.
    X : ndarray, shape (n, 3, 3)
        X[k, :, a] is the eigenvector of root a, with X^T eps1 X = I.

    Raises
    ------
    EigenproblemError
        If a non-longitudinal root is not positive.
    """
    phats = np.atleast_2d(np.asarray(phats, dtype=float))
    Ci = _pencil_root(tensors)
    L = lambda_matrix(phats, tensors.mu2)
    S = Ci @ L @ Ci
    S = 0.5 * (S + np.swapaxes(S, -1, -2))
    s, Y = anp.eigh(S)
    scale = np.max(np.abs(s), axis=1)
    if np.any(scale <= 0.0):
        raise EigenproblemError("vanishing dispersion matrix")
    if np.any(np.abs(s[:, 0]) > ZERO_ROOT_TOL * scale):
        raise EigenproblemError("no longitudinal zero root found")
    if np.any(s[:, 1] <= ZERO_ROOT_TOL * scale):
        raise EigenproblemError("nonzero dispersion roots must be positive")
    s = s.copy()
    s[:, 0] = 0.0
    X = Ci @ Y
    # exact longitudinal eigenvector p / sqrt(p^T eps1 p)
    Ep = phats @ tensors.eps1
    X[:, :, 0] = phats / np.sqrt(np.einsum("ki,ki->k", phats, Ep))[:, None]
    return s, X


def ray_spectrum(phat, tensors):
    """Single-ray version of `ray_spectra`."""
    s, X = ray_spectra(np.asarray(phat, dtype=float)[None, :], tensors)
    return s[0], X[0]


def _canonical_basis(V, eps1):
    # deterministic eps1-orthonormal basis of span(V): Cartesian seeds
    # z, y, x projected on the subspace and Gram-Schmidt orthonormalized
    k = V.shape[1]
    P = V @ V.T @ eps1
    seeds = [np.eye(3)[i] for i in (2, 1, 0)]
    basis = []
    for _ in range(k):
        residuals = []
        for e in seeds:
            v = P @ e
            for u in basis:
                v = v - u * (u @ eps1 @ v)
            residuals.append(v)
        norms = [np.sqrt(max(v @ eps1 @ v, 0.0)) for v in residuals]
        best = max(norms)
        j = next(i for i, n in enumerate(norms) if n >= 0.5 * best)
        basis.append(residuals[j] / norms[j])
        seeds.pop(j)
    return np.array(basis)


def _fix_sign(x):
    j = int(np.argmax(np.abs(x)))
    return -x if x[j] < 0.0 else x


def solve_branches(qhat, tensors, magnitude=1.0, degeneracy_tol=DEGENERACY_TOL):
    """All dispersion branches along a direction.

    Parameters
    ----------
    qhat : array_like or WaveVector
        Unit direction. When a WaveVector is given its magnitude is
        used.
    tensors : ConstitutiveTensors
        Medium with eps2 = mu1 = 0 and SPD eps1, mu2.
    magnitude : float, optional
        |q|. Roots scale linearly: w(s q) = s w(q).
    degeneracy_tol : float, optional
        Roots with |w_a^2 - w_b^2| <= degeneracy_tol * max(w^2) form a
        single degenerate branch.

    Returns
    -------
    list of DispersionBranch
        Sorted by ascending omega; index 0 is the longitudinal zero
        mode.

    Raises
    ------
    EigenproblemError
        Non-SPD tensors or magnetoelectric media.
    """
    if isinstance(qhat, WaveVector):
        qhat, magnitude = qhat.qhat, qhat.magnitude
    q = WaveVector(qhat, magnitude)
    if q.magnitude <= 0.0:
        raise InvalidInputError("solve_branches needs |q| > 0")
    if tensors.is_magnetoelectric:
        raise EigenproblemError(
            "mode solving is restricted to media with eps2 = mu1 = 0"
        )

    s, X = ray_spectrum(q.qhat, tensors)
    s = s * q.magnitude**2
    eps1 = tensors.eps1

    branches = [
        DispersionBranch(
            rho=0,
            omega=0.0,
            lambda_count=1,
            X=_fix_sign(X[:, 0])[None, :],
            is_longitudinal_zero_mode=True,
            qhat=q.qhat,
            magnitude=q.magnitude,
        )
    ]
    smax = s[2]
    if abs(s[2] - s[1]) <= degeneracy_tol * smax:
        V = _canonical_basis(X[:, 1:], eps1)
        branches.append(
            DispersionBranch(
                rho=1,
                omega=float(np.sqrt(0.5 * (s[1] + s[2]))),
                lambda_count=2,
                X=V,
                is_longitudinal_zero_mode=False,
                qhat=q.qhat,
                magnitude=q.magnitude,
            )
        )
    else:
        for a in (1, 2):
            branches.append(
                DispersionBranch(
                    rho=a,
                    omega=float(np.sqrt(s[a])),
                    lambda_count=1,
                    X=_fix_sign(X[:, a])[None, :],
                    is_longitudinal_zero_mode=False,
                    qhat=q.qhat,
                    magnitude=q.magnitude,
                )
            )
    return branches


def transverse_branches(qhat, tensors, magnitude=1.0):
    return [b for b in solve_branches(qhat, tensors, magnitude) if not b.is_longitudinal_zero_mode]


def phase_speed(branch, qhat=None):
    """Phase speed v = w(q) / |q| of a nonzero branch (m/s)."""
    if branch.is_longitudinal_zero_mode or branch.omega == 0.0:
        raise UndefinedSpeedError("the longitudinal zero mode has no phase speed")
    if qhat is not None and not np.allclose(qhat, branch.qhat, rtol=0.0, atol=1e-12):
        raise InvalidInputError("branch was computed for another direction")
    return branch.omega / branch.magnitude


def dispersion_residual(branch, tensors):
    """max_l |(Lambda - w^2 eps1) X_l| / (|Lambda| |X_l|)."""
    L = lambda_matrix(branch.magnitude * branch.qhat, tensors.mu2)
    M = L - branch.omega**2 * tensors.eps1
    nL = max(anp.norm(L, 2), np.finfo(float).tiny)
    return max(anp.norm(M @ x) / (nL * anp.norm(x)) for x in branch.X)


class PlaneWaveMode:
    """Delta-normalized plane-wave mode F(rho, lambda, q, r).

    The amplitude is X / ((2 pi)^(3/2) sqrt(X^T eps1 X)), so that the
    continuum orthonormality integral gives delta(q - q') exactly.
    """

    def __init__(self, branch, q, lam=0, tensors=None, eps1=None):
        if branch.is_longitudinal_zero_mode:
            raise InvalidInputError("the longitudinal zero mode is not quantized")
        if not 0 <= lam < branch.lambda_count:
            raise InvalidInputError(f"polarization index {lam} out of range")
        if isinstance(q, WaveVector):
            self.q = q
        else:
            self.q = WaveVector(branch.qhat, q)
        if eps1 is None:
            eps1 = tensors.eps1
        self.branch = branch
        self.lam = lam
        X = branch.X[lam]
        self.X = X
        self.amplitude = X.astype(complex) / (NORMALIZATION * np.sqrt(X @ eps1 @ X))

    @property
    def omega(self):
        return phase_speed(self.branch) * self.q.magnitude

    def field(self, r):
        """F(r) = amplitude exp(i q.r); `r` has shape (3,) or (n, 3)."""
        r = np.asarray(r, dtype=float)
        phase = np.exp(1j * (r @ self.q.vector))
        return np.multiply.outer(phase, self.amplitude)

    def __repr__(self):
        return f"PlaneWaveMode(rho={self.branch.rho}, lam={self.lam}, omega={self.omega!r})"


def plane_wave_modes(qhat, magnitude, tensors):
    """All quantized (transverse) modes at wavevector magnitude * qhat."""
    modes = []
    for b in transverse_branches(qhat, tensors):
        for lam in range(b.lambda_count):
            modes.append(PlaneWaveMode(b, WaveVector(b.qhat, magnitude), lam, tensors))
    return modes


def maxwell_residual(mode, tensors, omega=None):
    """Relative residuals of the four Maxwell equations for a plane wave.

    With E = i w F and B = i q x F, the Fourier-space equations are
    q.B = 0, q x E = w B, q.D = 0 and q x H = -w D, where
    D = eps1 E + eps2 B and H = mu1 E + mu2 B.

    Parameters
    ----------
    mode : PlaneWaveMode
    tensors : ConstitutiveTensors
    omega : float, optional
        Frequency to substitute; the mode's own frequency by default.

    Returns
    -------
    dict
        Keys 'divergence_B', 'faraday', 'divergence_D', 'ampere'.
    """
    w = mode.omega if omega is None else float(omega)
    q = mode.q.vector
    F = mode.amplitude
    E = 1j * w * F
    B = 1j * np.cross(q, F)
    D = tensors.eps1 @ E + tensors.eps2 @ B
    H = tensors.mu1 @ E + tensors.mu2 @ B
    nq = anp.norm(q)
    tiny = np.finfo(float).tiny

    def ratio(num, den):
        return float(num / den) if den > tiny else float(num)

    return {
        "divergence_B": ratio(abs(q @ B), nq * anp.norm(B)),
        "faraday": ratio(
            anp.norm(np.cross(q, E) - w * B),
            nq * anp.norm(E) + w * anp.norm(B),
        ),
        "divergence_D": ratio(abs(q @ D), nq * anp.norm(D)),
        "ampere": ratio(
            anp.norm(np.cross(q, H) + w * D),
            nq * anp.norm(H) + w * anp.norm(D),
        ),
    }
