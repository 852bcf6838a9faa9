# --------------------------------------------------------------
# Copyright (c) 2024, anisoqed developers
# License: GPLv3 (see LICENSE)
# --------------------------------------------------------------
"""eps1-weighted longitudinal/transverse decomposition in Fourier space.

In a homogeneous medium the projection kernels are diagonal in q:

    P_par_ij(q) = q_i (eps1 q)_j / (q^T eps1 q),   P_perp = I - P_par,

and the scalar Green function of div(eps1 grad G) = -delta is
G(q) = 1 / (q^T eps1 q). q = 0 is rejected.
"""
from dataclasses import dataclass

import numpy as np

import anisoqed.num as anp
from anisoqed.errors import (
    DecompositionError,
    InvalidInputError,
    SingularGreenError,
    SingularProjectorError,
)


@dataclass
class FourierField:
    """Fourier component F of a vector field at wavevector q."""

    q: np.ndarray
    F: np.ndarray

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)
        self.F = np.asarray(self.F, dtype=complex)
        if self.q.shape != (3,) or self.F.shape != (3,):
            raise InvalidInputError("q and F must be 3-vectors")
        if not (anp.is_finite(self.q) and anp.is_finite(self.F)):
            raise InvalidInputError("field has non-finite entries")


@dataclass
class ProjectorPair:
    P_par: np.ndarray
    P_perp: np.ndarray


def _quadratic_form(q, eps1, error=SingularGreenError):
    q = np.asarray(q, dtype=float)
    if not np.any(q != 0.0):
        raise error("q = 0: the projection is undefined")
    Eq = np.asarray(eps1, dtype=float) @ q
    return q, Eq, float(q @ Eq)


def green_scalar_fourier(q, eps1):
    """G(q) = 1 / (q^T eps1 q), a real even function of q."""
    _, _, qeq = _quadratic_form(q, eps1)
    return 1.0 / qeq


def _projectors(q, eps1, error):
    q, Eq, qeq = _quadratic_form(q, eps1, error)
    P_par = np.outer(q, Eq) / qeq
    return ProjectorPair(P_par=P_par, P_perp=np.eye(3) - P_par)


def projector_pair(q, eps1):
    """Longitudinal and transverse projectors at wavevector q.

    Parameters
    ----------
    q : array_like, shape (3,)
        Nonzero wavevector.
    eps1 : array_like, shape (3, 3)
        Symmetric positive-definite tensor.

    Returns
    -------
    ProjectorPair
        P_par q = q, P_perp q = 0 and (eps1 q)^T P_perp = 0.
    """
    return _projectors(q, eps1, SingularProjectorError)


def decompose(field, eps1):
    """Split F into F_par (parallel to q) and eps1-transverse F_perp."""
    P = _projectors(field.q, eps1, DecompositionError)
    F_par = P.P_par @ field.F
    return F_par, field.F - F_par


def transverse_of_covector(field, eps1):
    """Divergence-free part P_perp^T F (adjoint projector)."""
    P = _projectors(field.q, eps1, DecompositionError)
    return P.P_perp.T @ field.F


def mode_sum_projector(branches, eps1):
    """Sum of X (eps1 X)^* over transverse polarizations.

    Equals P_perp(q) when `branches` are the transverse branches of
    `solve_branches` along q.
    """
    S = np.zeros((3, 3), dtype=complex)
    for b in branches:
        if b.is_longitudinal_zero_mode:
            continue
        for X in b.X:
            S += np.outer(X, np.conj(eps1 @ X))
    return S
