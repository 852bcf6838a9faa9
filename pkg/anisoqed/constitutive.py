# --------------------------------------------------------------
# Copyright (c) 2024, anisoqed developers
# License: GPLv3 (see LICENSE)
# --------------------------------------------------------------
"""Material tensors of non-dispersive bi-anisotropic media.

The constitutive relations are

    D = eps1 E + eps2 B,      H = mu1 E + mu2 B,

with the Onsager constraints eps1 = eps1^T, mu2 = mu2^T and
eps2 = -mu1^T. A static spacetime metric is equivalent to such a
medium; `metric_to_constitutive` computes the equivalent tensors.
"""
from dataclasses import dataclass, field, asdict
from typing import List

import numpy as np
import scipy.constants

import anisoqed.num as anp
from anisoqed.errors import (
    InvalidInputError,
    SingularMetricError,
    FactorizationError,
)


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants used throughout the package (CODATA defaults)."""

    hbar: float = scipy.constants.hbar
    eps0: float = scipy.constants.epsilon_0
    mu0: float = scipy.constants.mu_0
    c: float = scipy.constants.c

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not (np.isfinite(value) and value > 0.0):
                raise InvalidInputError(
                    f"constant '{name}' must be a positive real, got {value!r}"
                )

    @property
    def impedance_ratio(self):
        """sqrt(eps0 / mu0), the SI scale of eps2 and mu1."""
        return np.sqrt(self.eps0 / self.mu0)

    def to_dict(self):
        return asdict(self)


def _as_tensor(name, a):
    a = np.array(a, dtype=float)
    if a.shape != (3, 3):
        raise InvalidInputError(f"'{name}' must be a 3x3 tensor, got shape {a.shape}")
    a.flags.writeable = False
    return a


class ConstitutiveTensors:
    """The four 3x3 material tensors and the physical constants.

    Attributes
    ----------
    eps1 : ndarray, shape (3, 3)
        Permittivity-like tensor relating E to D (F/m).
    eps2 : ndarray, shape (3, 3)
        Magnetoelectric tensor relating B to D.
    mu1 : ndarray, shape (3, 3)
        Magnetoelectric tensor relating E to H.
    mu2 : ndarray, shape (3, 3)
        Inverse permeability relating B to H (m/H).
    constants : PhysicalConstants

    Notes
    -----
    Instances are immutable: the arrays are read-only. Construction
    checks shapes only; physical admissibility is checked by
    `validate_onsager`.
    """

    def __init__(self, eps1, mu2, eps2=None, mu1=None, constants=None):
        self.constants = constants if constants is not None else PhysicalConstants()
        self.eps1 = _as_tensor("eps1", eps1)
        self.mu2 = _as_tensor("mu2", mu2)
        self.eps2 = _as_tensor("eps2", np.zeros((3, 3)) if eps2 is None else eps2)
        self.mu1 = _as_tensor("mu1", np.zeros((3, 3)) if mu1 is None else mu1)

    def __repr__(self):
        return (
            "ConstitutiveTensors(eps1/eps0={}, mu2*mu0={}, magnetoelectric={})".format(
                np.array2string(self.eps1 / self.constants.eps0, precision=4),
                np.array2string(self.mu2 * self.constants.mu0, precision=4),
                self.is_magnetoelectric,
            )
        )

    @classmethod
    def vacuum(cls, constants=None):
        constants = constants if constants is not None else PhysicalConstants()
        return cls(
            eps1=constants.eps0 * np.eye(3),
            mu2=np.eye(3) / constants.mu0,
            constants=constants,
        )

    @classmethod
    def from_relative(cls, eps_r, inv_mu_r=None, eps2_r=None, mu1_r=None, constants=None):
        """Build SI tensors from dimensionless relative tensors.

        Parameters
        ----------
        eps_r : array_like, shape (3, 3)
            eps1 in units of eps0.
        inv_mu_r : array_like, shape (3, 3), optional
            mu2 in units of 1/mu0 (the inverse relative permeability).
            Identity by default.
        eps2_r, mu1_r : array_like, shape (3, 3), optional
            eps2 and mu1 in units of sqrt(eps0/mu0).
        constants : PhysicalConstants, optional
        """
        constants = constants if constants is not None else PhysicalConstants()
        inv_mu_r = np.eye(3) if inv_mu_r is None else np.asarray(inv_mu_r, dtype=float)
        z = constants.impedance_ratio
        return cls(
            eps1=constants.eps0 * np.asarray(eps_r, dtype=float),
            mu2=inv_mu_r / constants.mu0,
            eps2=None if eps2_r is None else z * np.asarray(eps2_r, dtype=float),
            mu1=None if mu1_r is None else z * np.asarray(mu1_r, dtype=float),
            constants=constants,
        )

    def to_relative(self):
        """Dimensionless tensors, inverse of `from_relative`."""
        z = self.constants.impedance_ratio
        return {
            "eps1": self.eps1 / self.constants.eps0,
            "mu2": self.mu2 * self.constants.mu0,
            "eps2": self.eps2 / z,
            "mu1": self.mu1 / z,
        }

    @property
    def is_magnetoelectric(self):
        return bool(np.any(self.eps2 != 0.0) or np.any(self.mu1 != 0.0))

    def rotated(self, R):
        """Tensors of the same medium seen in a frame rotated by `R`."""
        R = np.asarray(R, dtype=float)
        rot = lambda T: R @ T @ R.T
        return ConstitutiveTensors(
            eps1=rot(self.eps1),
            mu2=rot(self.mu2),
            eps2=rot(self.eps2),
            mu1=rot(self.mu1),
            constants=self.constants,
        )

    def same_as(self, other):
        return all(
            np.array_equal(getattr(self, k), getattr(other, k))
            for k in ("eps1", "eps2", "mu1", "mu2")
        )


class SpacetimeMetric:
    """Static metric g (4x4, index 0 is time, coordinates scaled by c).

    The signature must be (-,+,+,+): g[0][0] < 0, a positive-definite
    spatial block g[1:, 1:] and det(g) < 0.
    The other signature is rejected, not converted.
    """

    def __init__(self, g, tol=1e-12):
        g = np.array(g, dtype=float)
        if g.shape != (4, 4):
            raise InvalidInputError(f"metric must be 4x4, got shape {g.shape}")
        if not anp.is_finite(g):
            raise InvalidInputError("metric has non-finite entries")
        scale = max(np.max(np.abs(g)), 1.0)
        if np.max(np.abs(g - g.T)) > tol * scale:
            raise InvalidInputError("metric is not symmetric")
        if not g[0, 0] < 0.0:
            raise InvalidInputError(
                f"metric signature must be (-,+,+,+) with g00 < 0, got g00 = {g[0, 0]!r}"
            )
        d = anp.det(g)
        if d == 0.0 or abs(d) < tol * scale**4:
            raise SingularMetricError(f"metric is singular (det = {d!r})")
        if not d < 0.0:
            raise InvalidInputError(f"metric must have det(g) < 0, got {d!r}")
        spatial = float(anp.eigvalsh(anp.sym(g[1:, 1:]))[0])
        if not spatial > 0.0:
            raise InvalidInputError(
                f"metric signature must be (-,+,+,+): spatial block has eigenvalue {spatial!r}"
            )
        g.flags.writeable = False
        self.g = g

    def __repr__(self):
        return f"SpacetimeMetric({np.array2string(self.g, precision=6)})"

    @classmethod
    def minkowski(cls):
        return cls(np.diag([-1.0, 1.0, 1.0, 1.0]))

    @property
    def det(self):
        return float(anp.det(self.g))


@dataclass
class Violation:
    constraint: str
    max_deviation: float
    detail: str = ""


@dataclass
class ValidationReport:
    """Outcome of `validate_onsager`; `ok` iff no violation."""

    tol: float
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self):
        return len(self.violations) == 0

    @property
    def constraints(self):
        return [v.constraint for v in self.violations]

    def to_dict(self):
        return {
            "ok": self.ok,
            "tol": self.tol,
            "violations": [asdict(v) for v in self.violations],
        }


ONSAGER_CONSTRAINTS = (
    "eps1_symmetric",
    "mu2_symmetric",
    "eps2_equals_minus_mu1_transpose",
    "eps1_positive_definite",
    "mu2_positive_definite",
)


def validate_onsager(t, tol=1e-12):
    """Check the Onsager relations and positive definiteness.

    Parameters
    ----------
    t : ConstitutiveTensors
    tol : float, optional
        Relative tolerance; deviations are compared with tol times the
        largest entry of the tensors involved.

    Returns
    -------
    ValidationReport
        One `Violation` per failing constraint, with its absolute
        deviation.

    Raises
    ------
    InvalidInputError
        If an entry is not finite.
    """
    for name in ("eps1", "eps2", "mu1", "mu2"):
        if not anp.is_finite(getattr(t, name)):
            raise InvalidInputError(f"tensor '{name}' has non-finite entries")

    report = ValidationReport(tol=tol)

    for name in ("eps1", "mu2"):
        A = getattr(t, name)
        scale = np.max(np.abs(A))
        dev = float(np.max(np.abs(A - A.T)))
        if dev > tol * scale:
            report.violations.append(
                Violation(f"{name}_symmetric", dev, f"max |{name} - {name}^T|")
            )

    scale = max(np.max(np.abs(t.eps2)), np.max(np.abs(t.mu1)))
    dev = float(np.max(np.abs(t.eps2 + t.mu1.T)))
    if dev > tol * scale:
        report.violations.append(
            Violation("eps2_equals_minus_mu1_transpose", dev, "max |eps2 + mu1^T|")
        )

    for name in ("eps1", "mu2"):
        A = getattr(t, name)
        scale = np.max(np.abs(A))
        wmin = float(anp.eigvalsh(anp.sym(A))[0])
        if scale == 0.0 or wmin <= tol * scale:
            report.violations.append(
                Violation(
                    f"{name}_positive_definite",
                    -wmin,
                    f"smallest eigenvalue of sym({name}) is {wmin!r}",
                )
            )
    return report


def factor_epsilon(eps1, tol=1e-12):
    """Principal square root C of a symmetric positive-definite eps1.

    Parameters
    ----------
    eps1 : array_like, shape (3, 3)

    Returns
    -------
    C : ndarray, shape (3, 3)
        Symmetric positive-definite matrix with C @ C == eps1.

    Raises
    ------
    FactorizationError
        If eps1 is not symmetric positive definite.

    Examples
    --------
    >>> factor_epsilon(np.diag([4.0, 9.0, 1.0]))
    array([[2., 0., 0.],
           [0., 3., 0.],
           [0., 0., 1.]])
    """
    A = np.asarray(eps1, dtype=float)
    if A.shape != (3, 3) or not anp.is_finite(A):
        raise FactorizationError("eps1 must be a finite 3x3 matrix")
    scale = np.max(np.abs(A))
    if scale == 0.0 or np.max(np.abs(A - A.T)) > tol * scale:
        raise FactorizationError("eps1 is not symmetric")
    w, V = anp.eigh(anp.sym(A))
    if w[0] <= 0.0:
        raise FactorizationError(
            f"eps1 is not positive definite (smallest eigenvalue {w[0]!r})"
        )
    C = (V * np.sqrt(w)) @ V.T
    return anp.sym(C)


def metric_to_constitutive(m, constants=None):
    """Bi-anisotropic medium equivalent to a static metric.

    With s = sqrt(-g), G_i = g_{0i} and g_ij the spatial block,

        eps1_ij = -s g^{ij} / g00 - e_{iab} e_{mnj} G_a G_n g_bm / (g00 s)
        eps2_ij = -e_{imn} g_nj G_m / s
        mu1_ij  = -e_{mnj} G_n g_im / s
        mu2_ij  = -(g00 / s) g_ij

    The dimensionless result is scaled by eps0 (eps1), 1/mu0 (mu2) and
    sqrt(eps0/mu0) (eps2, mu1), so that flat spacetime gives vacuum.

    Parameters
    ----------
    m : SpacetimeMetric
    constants : PhysicalConstants, optional

    Returns
    -------
    ConstitutiveTensors
    """
    constants = constants if constants is not None else PhysicalConstants()
    g = m.g
    e = anp.levi_civita
    detg = anp.det(g)
    if not detg < 0.0:
        raise SingularMetricError(f"det(g) must be negative, got {detg!r}")
    try:
        ginv = anp.inv(g)
    except anp.LinAlgError:
        raise SingularMetricError("metric is not invertible")

    s = np.sqrt(-detg)
    g00 = g[0, 0]
    G = g[0, 1:]
    gs = g[1:, 1:]

    eps1 = -s * ginv[1:, 1:] / g00 - np.einsum(
        "iab,mnj,a,n,bm->ij", e, e, G, G, gs
    ) / (g00 * s)
    eps2 = -np.einsum("imn,nj,m->ij", e, gs, G) / s
    mu1 = -np.einsum("mnj,n,im->ij", e, G, gs) / s
    mu2 = -(g00 / s) * gs

    z = constants.impedance_ratio
    return ConstitutiveTensors(
        eps1=constants.eps0 * anp.sym(eps1),
        mu2=anp.sym(mu2) / constants.mu0,
        eps2=z * eps2,
        mu1=z * mu1,
        constants=constants,
    )


def refractive_index_schwarzschild(mass, r):
    """Isotropic index of the Schwarzschild metric in isotropic coordinates.

    n(r) = (1 + a)^3 / (1 - a) with a = mass / (2 r) (geometrized units).
    """
    a = mass / (2.0 * r)
    return (1.0 + a) ** 3 / (1.0 - a)
