# --------------------------------------------------------------
# Copyright (c) 2024, anisoqed developers
# License: GPLv3 (see LICENSE)
# --------------------------------------------------------------
"""Local-field correction for an atom at the center of a small spherical hole.

The medium (r > R) and the hole (r < R) are homogeneous. Expanding the
mode at the origin to second order and integrating the material
contrast over the hole gives the linear system

    Gamma1 F(0) = x + Delta1 F''(0)
    Delta2 F''(0) = -x q q + Gamma2 F(0)

with x the uncorrected amplitude. Writing A0 and A2 for

    A0       = (1/2pi^2) int d^3p sin(pR)/p^3 G(p)
    A2[d, g] = (1/2pi^2) int d^3p p_d p_g sin(pR)/p^3 G(p)

where G = lim [Lambda(p) - w^2 eps - i eta]^-1 is the resolvent of the
medium, the coefficient tensors are

    Gamma1 = I + w^2 A0 (eps - eps_h)
    Delta1 = A0 C,                 C_janS = e_jab e_mns (mu - mu_h)_bm
    Gamma2 = w^2 A2 (eps - eps_h)
    Delta2 = 1 + A2 C

and Q = Gamma1 - Delta1 Delta2^-1 Gamma2.

Along each ray p = |p| phat the resolvent is a sum over the
eps-orthonormal eigenvectors X_a of the ray with roots s_a,

    G(p) = sum_a X_a X_a^T / (s_a |p|^2 - w^2 - i0),

so the radial integrals reduce to scalar principal values plus i pi
times the on-shell residues at |p| = w / sqrt(s_a).
"""
import time
import warnings
from dataclasses import dataclass, replace, asdict

import numpy as np
from scipy import integrate, special

import anisoqed.num as anp
from anisoqed.constitutive import ConstitutiveTensors, validate_onsager
from anisoqed.dispersion import ray_spectra, lambda_matrix, NORMALIZATION
from anisoqed.errors import (
    EigenproblemError,
    IllConditionedError,
    InvalidInputError,
    OnsagerError,
    PoleLocationError,
    SingularQError,
)
from anisoqed.misc.sphere import gauss_legendre_sphere

RADIAL_SCHEMES = ("analytic", "quadrature", "eta")
VALIDITY_LIMIT = 0.1


@dataclass(frozen=True)
class QuadratureSpec:
    """Node counts and radial scheme of the correction integrals.

    Attributes
    ----------
    n_theta, n_phi : int
        Gauss-Legendre nodes in cos(theta) and uniform nodes in phi.
    radial : str
        'analytic' (closed-form principal value and residue per pole),
        'quadrature' (adaptive Cauchy-weight quadrature per pole) or
        'eta' (finite-eta brute force, cross-check only).
    eta : float
        Shift used by the 'eta' scheme, in units of w^2 eps0.
    rtol : float
        Relative tolerance of the angular self-convergence check.
    cond_max : float
        Largest accepted condition number of Delta2.
    """

    n_theta: int = 32
    n_phi: int = 64
    radial: str = "analytic"
    eta: float = 1e-4
    rtol: float = 5e-3
    cond_max: float = 1e12

    def __post_init__(self):
        if self.n_theta < 2 or self.n_phi < 2:
            raise InvalidInputError("quadrature needs at least 2 nodes per angle")
        if self.radial not in RADIAL_SCHEMES:
            raise InvalidInputError(
                f"radial scheme must be one of {RADIAL_SCHEMES}, got {self.radial!r}"
            )
        if not self.eta > 0.0:
            raise InvalidInputError("eta must be positive")

    def refined(self, factor=2):
        return replace(self, n_theta=self.n_theta * factor, n_phi=self.n_phi * factor)

    def coarsened(self):
        return replace(
            self, n_theta=max(2, self.n_theta // 2), n_phi=max(2, self.n_phi // 2)
        )

    def to_dict(self):
        return asdict(self)


class CavityConfig:
    """Spherical hole of radius R (m) carved in a homogeneous medium.

    The hole defaults to vacuum with the medium's constants.
    """

    def __init__(self, R, medium, hole=None, tol=1e-12):
        if not (np.isfinite(R) and R > 0.0):
            raise InvalidInputError(f"hole radius must be positive, got {R!r}")
        if hole is None:
            hole = ConstitutiveTensors.vacuum(medium.constants)
        for name, t in (("medium", medium), ("hole", hole)):
            report = validate_onsager(t, tol)
            if not report.ok:
                raise OnsagerError(
                    f"{name} tensors violate {', '.join(report.constraints)}", report
                )
        self.R = float(R)
        self.medium = medium
        self.hole = hole

    @property
    def eps_contrast(self):
        return self.medium.eps1 - self.hole.eps1

    @property
    def mu_contrast(self):
        return self.medium.mu2 - self.hole.mu2

    @property
    def has_contrast(self):
        return bool(np.any(self.eps_contrast != 0.0) or np.any(self.mu_contrast != 0.0))

    def __repr__(self):
        return f"CavityConfig(R={self.R!r}, medium={self.medium!r}, hole={self.hole!r})"


class LocalFieldSystem:
    """Correction tensors at frequency omega and the transfer matrix Q.

    Attributes
    ----------
    omega : float
    Gamma1 : ndarray, shape (3, 3)
    Delta1 : ndarray, shape (3, 3, 3, 3), indices (i, s, a, n)
    Gamma2 : ndarray, shape (3, 3, 3, 3), indices (i, d, g, m)
    Delta2 : ndarray, shape (27, 27), rows (i, d, g), columns (s, a, n)
    Q : ndarray, shape (3, 3)
    diagnostics : dict
    """

    def __init__(self, omega, Gamma1, Delta1, Gamma2, Delta2, cond_max=1e12, diagnostics=None):
        self.omega = float(omega)
        self.Gamma1 = np.asarray(Gamma1, dtype=complex)
        self.Delta1 = np.asarray(Delta1, dtype=complex)
        self.Gamma2 = np.asarray(Gamma2, dtype=complex)
        self.Delta2 = np.asarray(Delta2, dtype=complex)
        for name in ("Gamma1", "Delta1", "Gamma2", "Delta2"):
            if not anp.is_finite(getattr(self, name)):
                raise PoleLocationError(f"{name} has non-finite entries")

        self.cond_Delta2 = float(anp.cond(self.Delta2))
        if not self.cond_Delta2 < cond_max:
            raise IllConditionedError(
                f"Delta2 condition number {self.cond_Delta2:.3e} exceeds {cond_max:.1e}",
                details={"cond_Delta2": self.cond_Delta2},
            )
        self._lu = anp.lu_factor(self.Delta2)
        self.Q = self.Gamma1 - self.D1 @ self.delta2_solve(self.G2)
        self.cond_Q = float(anp.cond(self.Q))
        self.diagnostics = dict(diagnostics or {})
        self.diagnostics.update({"cond_Delta2": self.cond_Delta2, "cond_Q": self.cond_Q})

    @classmethod
    def trivial(cls, omega, diagnostics=None):
        return cls(
            omega,
            np.eye(3),
            np.zeros((3, 3, 3, 3)),
            np.zeros((3, 3, 3, 3)),
            np.eye(27),
            diagnostics=diagnostics,
        )

    @property
    def D1(self):
        return self.Delta1.reshape(3, 27)

    @property
    def G2(self):
        return self.Gamma2.reshape(27, 3)

    @property
    def Delta2_tensor(self):
        return self.Delta2.reshape(3, 3, 3, 3, 3, 3)

    def delta2_solve(self, rhs):
        return anp.lu_solve(self._lu, rhs)

    @property
    def is_trivial(self):
        return (
            np.array_equal(self.Gamma1, np.eye(3))
            and not np.any(self.Delta1)
            and not np.any(self.Gamma2)
            and np.array_equal(self.Delta2, np.eye(27))
        )

    def __repr__(self):
        return f"<LocalFieldSystem omega={self.omega!r} cond(Q)={self.cond_Q:.3e}>"


def resolvent(p, omega, medium, eta):
    """[Lambda(p, mu2) - w^2 eps1 - i eta I]^-1.

    Parameters
    ----------
    p : array_like, shape (3,)
    omega : float
    medium : ConstitutiveTensors
    eta : float
        Nonzero shift; the physical limit is eta -> 0+.

    Returns
    -------
    ndarray, shape (3, 3), complex
    """
    if eta == 0.0:
        raise InvalidInputError("eta must be nonzero")
    M = lambda_matrix(np.asarray(p, dtype=float), medium.mu2) - omega**2 * medium.eps1
    M = M - 1j * eta * np.eye(3)
    try:
        return anp.inv(M)
    except anp.LinAlgError:
        raise PoleLocationError("singular shifted dispersion matrix")


# radial integrals along a ray, scalar root s, for the kernels
#   n = -1:  int_0^inf sin(pR)/p / (s p^2 - w^2 - i0) dp
#   n = +1:  int_0^inf p sin(pR) / (s p^2 - w^2 - i0) dp
# With k = w / sqrt(s), u = p / k and kappa = k R they become
#   (1/w^2) int sin(kappa u) / (u (u^2 - 1))   and   (1/s) int u sin(kappa u) / (u^2 - 1),
# whose values are (pi/2)(exp(i kappa) - 1) and (pi/2) exp(i kappa).


def _radial_analytic(s, omega, R):
    kappa = omega * R / np.sqrt(s)
    phase = np.exp(1j * kappa)
    jm = (np.pi / (2.0 * omega**2)) * (phase - 1.0)
    jp = (np.pi / (2.0 * s)) * phase
    return jm, jp


def _cauchy_pv(g, tail, kappa, weight="sin"):
    # PV int_0^2 g(u)/(u-1) du + int_2^inf tail(u) w(kappa u) du
    finite, e1 = integrate.quad(
        g, 0.0, 2.0, weight="cauchy", wvar=1.0, limit=200, epsabs=1e-14, epsrel=1e-10
    )
    rest, e2 = integrate.quad(
        tail, 2.0, np.inf, weight=weight, wvar=kappa, limlst=100, epsabs=1e-14
    )
    return finite + rest, abs(e1) + abs(e2)


def _radial_quadrature(s, omega, R):
    if not (np.isfinite(s) and s > 0.0):
        raise PoleLocationError(f"no radial pole for root s = {s!r}")
    kappa = omega * R / np.sqrt(s)
    residue = 1j * np.pi * np.sin(kappa) / 2.0

    gm = lambda u: kappa * np.sinc(kappa * u / np.pi) / (u + 1.0)
    tm = lambda u: 1.0 / (u * (u * u - 1.0))
    vm, em = _cauchy_pv(gm, tm, kappa)

    gp = lambda u: u * np.sin(kappa * u) / (u + 1.0)
    tp = lambda u: u / (u * u - 1.0)
    vp, ep = _cauchy_pv(gp, tp, kappa)

    jm = (vm + residue) / omega**2
    jp = (vp + residue) / s
    return jm, jp, (em + ep) / max(abs(vm + residue), abs(vp + residue))


def _radial_integrals(scheme, s, omega, R):
    """J-1 and J+1 for every ray and root, with an error estimate."""
    n = s.shape[0]
    jm = np.empty((n, 3), dtype=complex)
    jp = np.empty((n, 3), dtype=complex)
    # longitudinal root: only the Dirichlet integral of sin(pR)/p survives
    jm[:, 0] = -np.pi / (2.0 * omega**2)
    jp[:, 0] = 0.0
    if scheme == "analytic":
        a, b = _radial_analytic(s[:, 1:], omega, R)
        jm[:, 1:] = a
        jp[:, 1:] = b
        return jm, jp, 0.0

    def one_ray(k):
        return [_radial_quadrature(s[k, a], omega, R) for a in (1, 2)]

    results = anp.parallel_map(one_ray, range(n))
    err = 0.0
    for k, res in enumerate(results):
        for a, (u, v, e) in zip((1, 2), res):
            jm[k, a] = u
            jp[k, a] = v
            err = max(err, e)
    return jm, jp, err


def _eta_ray(phat, omega, R, medium, eta, s_ray, X_ray):
    # brute-force radial integrals of the finite-eta resolvent along one ray
    Lhat = lambda_matrix(phat, medium.mu2)
    eps = medium.eps1
    pep = phat @ eps @ phat
    L_eta = -np.outer(phat, phat) / (omega**2 * pep + 1j * eta)
    ks = omega / np.sqrt(s_ray[1:])
    poles = [ks[0]] if abs(ks[1] - ks[0]) <= 1e-8 * ks[0] else sorted(ks.tolist())
    P = 200.0 * np.max(ks)

    def f(p):
        M = p * p * Lhat - omega**2 * eps - 1j * eta * np.eye(3)
        G = anp.inv(M) - L_eta
        a = R * np.sinc(p * R / np.pi) * G
        b = p * np.sin(p * R) * G
        return np.concatenate([a.real.ravel(), a.imag.ravel(), b.real.ravel(), b.imag.ravel()])

    val, err = integrate.quad_vec(
        f, 0.0, P, epsabs=0.0, epsrel=1e-8, points=poles, limit=20000
    )
    Rm = (val[0:9] + 1j * val[9:18]).reshape(3, 3)
    R2 = (val[18:27] + 1j * val[27:36]).reshape(3, 3)

    # tails beyond P: G - L ~ B / p^2
    B = sum(np.outer(X_ray[:, a], X_ray[:, a]) / s_ray[a] for a in (1, 2))
    x = P * R
    si, ci = special.sici(x)
    tail_m = R**2 * (np.sin(x) / (2 * x**2) + np.cos(x) / (2 * x) - 0.5 * (np.pi / 2 - si))
    tail_p = np.pi / 2 - si
    Rm = Rm + tail_m * B + (np.pi / 2.0) * L_eta
    R2 = R2 + tail_p * B
    scale = max(np.max(np.abs(Rm)), np.max(np.abs(R2)))
    return Rm, R2, float(np.max(np.abs(err)) / scale)


def _angular_tensors(omega, cavity, quad):
    """A0 (3x3) and A2 (3x3x3x3, indices d, g, i, j) with diagnostics."""
    dirs, w = gauss_legendre_sphere(quad.n_theta, quad.n_phi)
    dirs = dirs.reshape(-1, 3)
    w = w.reshape(-1)
    medium = cavity.medium
    try:
        s, X = ray_spectra(dirs, medium)
    except EigenproblemError as exc:
        raise PoleLocationError(f"dispersion roots along a ray: {exc}")

    c = 1.0 / (2.0 * np.pi**2)
    if quad.radial == "eta":
        eta = quad.eta * omega**2 * medium.constants.eps0

        def one_ray(k):
            return _eta_ray(dirs[k], omega, cavity.R, medium, eta, s[k], X[k])

        res = anp.parallel_map(one_ray, range(dirs.shape[0]))
        Rm = np.array([r[0] for r in res])
        R2 = np.array([r[1] for r in res])
        err = max(r[2] for r in res)
        A0 = c * np.einsum("k,kij->ij", w, Rm)
        A2 = c * np.einsum("k,kd,kg,kij->dgij", w, dirs, dirs, R2)
    else:
        jm, jp, err = _radial_integrals(quad.radial, s, omega, cavity.R)
        A0 = c * np.einsum("k,ka,kia,kja->ij", w, jm, X, X)
        A2 = c * np.einsum("k,kd,kg,ka,kia,kja->dgij", w, dirs, dirs, jp, X, X)

    kmax = omega / np.sqrt(np.min(s[:, 1]))
    distinct = np.where(np.abs(s[:, 2] - s[:, 1]) <= 1e-8 * s[:, 2], 1, 2)
    diagnostics = {
        "n_theta": quad.n_theta,
        "n_phi": quad.n_phi,
        "n_rays": int(dirs.shape[0]),
        "radial": quad.radial,
        "radial_error_estimate": float(err),
        "poles_per_ray": 2,
        "distinct_poles_min": int(np.min(distinct)),
        "distinct_poles_max": int(np.max(distinct)),
        "size_parameter": float(kmax * cavity.R),
    }
    return A0, A2, diagnostics


def _contrast_tensor(cavity):
    e = anp.levi_civita
    return np.einsum("jab,mns,bm->jans", e, e, cavity.mu_contrast)


def _assemble(omega, cavity, A0, A2):
    dE = cavity.eps_contrast
    C = _contrast_tensor(cavity)
    Gamma1 = np.eye(3) + omega**2 * A0 @ dE
    Delta1 = np.einsum("ij,jans->isan", A0, C)
    Gamma2 = omega**2 * np.einsum("dgij,jm->idgm", A2, dE)
    Delta2 = np.eye(27) + np.einsum("dgij,jans->idgsan", A2, C).reshape(27, 27)
    return Gamma1, Delta1, Gamma2, Delta2


def correction_tensors(omega, cavity, quad=None, verbosity=0, check_convergence=True):
    """Local-field system at frequency omega.

    Parameters
    ----------
    omega : float
        Angular frequency (rad/s).
    cavity : CavityConfig
    quad : QuadratureSpec, optional
    verbosity : int, optional
        0 silent, 1 stage messages, 2 diagnostics.
    check_convergence : bool, optional
        Estimate the angular error by recomputing Q on the coarsened
        grid.

    Returns
    -------
    LocalFieldSystem

    Raises
    ------
    PoleLocationError
        If a dispersion root along a ray is not positive.
    IllConditionedError
        If cond(Delta2) exceeds quad.cond_max.

    Warns
    -----
    RuntimeWarning
        When omega R / v_min > 0.1 (outside the long-wavelength regime).
    """
    quad = quad if quad is not None else QuadratureSpec()
    if not omega > 0.0:
        raise InvalidInputError(f"omega must be positive, got {omega!r}")
    tic = time.time()
    if verbosity >= 1:
        print("Local-field tensors...")

    if not cavity.has_contrast:
        system = LocalFieldSystem.trivial(
            omega, diagnostics={"n_theta": quad.n_theta, "n_phi": quad.n_phi, "trivial": True}
        )
        if verbosity >= 1:
            print("done (no contrast).")
        return system

    A0, A2, diagnostics = _angular_tensors(omega, cavity, quad)
    if diagnostics["size_parameter"] > VALIDITY_LIMIT:
        warnings.warn(
            "omega R / v_min = {:.3g} exceeds {}: outside the long-wavelength regime".format(
                diagnostics["size_parameter"], VALIDITY_LIMIT
            ),
            RuntimeWarning,
        )

    system = LocalFieldSystem(
        omega, *_assemble(omega, cavity, A0, A2), cond_max=quad.cond_max, diagnostics=diagnostics
    )

    if check_convergence:
        coarse = quad.coarsened()
        B0, B2, _ = _angular_tensors(omega, cavity, coarse)
        Qc = LocalFieldSystem(
            omega, *_assemble(omega, cavity, B0, B2), cond_max=np.inf
        ).Q
        system.diagnostics["angular_error_estimate"] = anp.relerr(Qc, system.Q)
    system.diagnostics["time"] = time.time() - tic

    if verbosity >= 1:
        print("done.")
    if verbosity >= 2:
        from anisoqed.misc.diagnosis import pretty_print_dictionary

        pretty_print_dictionary(system.diagnostics)
    return system


def uncorrected_amplitude(X, eps1):
    """X / ((2 pi)^(3/2) sqrt(X^T eps1 X))."""
    X = np.asarray(X)
    return X.astype(complex) / (NORMALIZATION * np.sqrt(np.real(np.conj(X) @ eps1 @ X)))


def _source(x, q):
    # vec over (i, d, g) of x_i q_d q_g
    return np.einsum("i,d,g->idg", x, q, q).reshape(27)


def mode_at_origin(branch, q, cavity, system, lam=0):
    """Cavity-corrected mode amplitude F(rho, lambda, q, 0).

    F(0) = Q^-1 [x - Delta1 Delta2^-1 (x q q)] with x the uncorrected
    amplitude X / ((2 pi)^(3/2) sqrt(X^T eps1 X)).

    Parameters
    ----------
    branch : DispersionBranch
        Nonzero branch; its omega times |q| should equal system.omega.
    q : WaveVector or array_like
        Physical wavevector (rad/m).
    cavity : CavityConfig
    system : LocalFieldSystem
    lam : int, optional
        Polarization index within the branch.

    Returns
    -------
    ndarray, shape (3,), complex
    """
    if branch.is_longitudinal_zero_mode:
        raise InvalidInputError("the longitudinal zero mode is not quantized")
    qv = q.vector if hasattr(q, "vector") else np.asarray(q, dtype=float)
    x = uncorrected_amplitude(branch.X[lam], cavity.medium.eps1)
    if system.is_trivial:
        return x
    return _corrected(system, x, qv)


def _corrected(system, x, q):
    rhs = x - system.D1 @ system.delta2_solve(_source(x, q))
    if not np.isfinite(system.cond_Q) or system.cond_Q > 1e14:
        raise SingularQError(
            f"Q is singular (cond = {system.cond_Q:.3e})", details={"cond_Q": system.cond_Q}
        )
    return anp.solve(system.Q, rhs)


def second_derivatives_at_origin(system, x, q, F0):
    """F_{s,an}(0) from Delta2 F'' = -x q q + Gamma2 F(0), shape (3, 3, 3)."""
    q = np.asarray(q, dtype=float)
    rhs = system.G2 @ F0 - _source(x, q)
    return system.delta2_solve(rhs).reshape(3, 3, 3)


def consistency_residual(system, x, q, F0):
    """Relative residual of Gamma1 F(0) = x + Delta1 F''(0)."""
    F2 = second_derivatives_at_origin(system, x, q, F0)
    r = system.Gamma1 @ F0 - x - system.D1 @ F2.reshape(27)
    return float(anp.norm(r) / anp.norm(x))


def pole_residue_adjugate(phat, omega, medium, root=1):
    """On-shell residue of the resolvent at a non-degenerate radial pole.

    Residue of M(p)^-1 = adj(M)/det(M) at the pole p_a, computed as
    adj(M(p_a)) / (d det M / dp)(p_a). It equals X_a X_a^T / (2 s_a p_a)
    for the eps-orthonormal eigenvector X_a of the ray.
    """
    s, X = ray_spectra(np.asarray(phat, dtype=float)[None, :], medium)
    s = s[0]
    if abs(s[2] - s[1]) <= 1e-8 * s[2]:
        raise PoleLocationError("degenerate pole: the adjugate residue is undefined")
    k = omega / np.sqrt(s[root])
    Lhat = lambda_matrix(phat, medium.mu2)
    M = k * k * Lhat - omega**2 * medium.eps1
    cof = np.array(
        [[(-1) ** (i + j) * anp.det(np.delete(np.delete(M, i, 0), j, 1)) for j in range(3)] for i in range(3)]
    )
    adj = cof.T
    # d/dp det M = tr(adj(M) dM/dp), dM/dp = 2 p Lhat
    ddet = np.trace(adj @ (2.0 * k * Lhat))
    return adj / ddet


def isotropic_local_field(eps_r, omega, R, constants=None):
    """Scalar reduction for an isotropic dielectric around a vacuum hole.

    For eps1 = eps_r eps0 I and mu2 = I/mu0 the resolvent splits into a
    transverse part mu0/(p^2 - k^2) and a longitudinal part
    -1/(w^2 eps), and Q = q I with

        q = 1 + w^2 a0 (eps - eps0),
        a0 = (2/pi) [ (2/3) T - pi / (6 w^2 eps) ],
        T = int_0^inf sin(pR)/p mu0 / (p^2 - k^2 - i0) dp.

    T is evaluated by one-dimensional quadrature, the principal value
    by subtraction of the pole value over the interval symmetric about
    the pole.

    Returns
    -------
    dict
        'Q' (complex scalar), 'factor' = 1/Q, 'k' (rad/m), 'T'.
    """
    from anisoqed.constitutive import PhysicalConstants

    constants = constants if constants is not None else PhysicalConstants()
    eps = eps_r * constants.eps0
    k = omega * np.sqrt(eps * constants.mu0)
    kappa = k * R

    # sin(kappa u) / (u (u + 1)), regular on [0, 2]
    g = lambda u: kappa * np.sinc(kappa * u / np.pi) / (u + 1.0)
    g1 = g(1.0)
    h = lambda u: (g(u) - g1) / (u - 1.0)
    left, _ = integrate.quad(h, 0.0, 1.0, epsabs=1e-14, epsrel=1e-10, limit=200)
    right, _ = integrate.quad(h, 1.0, 2.0, epsabs=1e-14, epsrel=1e-10, limit=200)
    tail, _ = integrate.quad(
        lambda u: 1.0 / (u * (u * u - 1.0)), 2.0, np.inf, weight="sin", wvar=kappa, limlst=100
    )
    T = constants.mu0 / k**2 * (left + right + tail + 0.5j * np.pi * np.sin(kappa))

    a0 = (2.0 / np.pi) * ((2.0 / 3.0) * T - np.pi / (6.0 * omega**2 * eps))
    Q = 1.0 + omega**2 * a0 * (eps - constants.eps0)
    return {"Q": complex(Q), "factor": complex(1.0 / Q), "k": float(k), "T": complex(T)}


def surface_term_magnitude(omega, cavity, F0, q, quad=None):
    """Relative size of the surface term dropped from the hole integral.

    Evaluates (i R^2 / 2 pi^2) int dOmega phat_a int p^2 dp j1(pR) G_ij
    C_jans F_{s,n}(0) with the plane-wave estimate F_{s,n} = i q_n F_s
    and returns its norm relative to |F(0)|. The longitudinal part of G
    does not contribute since e_jab p_j p_a = 0.
    """
    quad = quad if quad is not None else QuadratureSpec(n_theta=8, n_phi=16)
    C = _contrast_tensor(cavity)
    if not np.any(C):
        return 0.0
    dirs, w = gauss_legendre_sphere(quad.n_theta, quad.n_phi)
    dirs = dirs.reshape(-1, 3)
    w = w.reshape(-1)
    s, X = ray_spectra(dirs, cavity.medium)
    R = cavity.R
    j1 = lambda x: special.spherical_jn(1, x)

    def radial(sa):
        # (k/s) int u^2 j1(kappa u) / (u^2 - 1 - i0) du
        k = omega / np.sqrt(sa)
        kappa = k * R
        g = lambda u: u * u * j1(kappa * u) / (u + 1.0)
        finite, _ = integrate.quad(
            g, 0.0, 2.0, weight="cauchy", wvar=1.0, limit=200, epsabs=1e-14
        )
        ts, _ = integrate.quad(
            lambda u: 1.0 / (kappa**2 * (u * u - 1.0)), 2.0, np.inf,
            weight="sin", wvar=kappa, limlst=100,
        )
        tc, _ = integrate.quad(
            lambda u: -u / (kappa * (u * u - 1.0)), 2.0, np.inf,
            weight="cos", wvar=kappa, limlst=100,
        )
        return (k / sa) * (finite + ts + tc + 0.5j * np.pi * j1(kappa))

    I = np.array(anp.parallel_map(lambda kk: [radial(s[kk, a]) for a in (1, 2)], range(len(w))))
    G = np.einsum("k,ka,kia,kja->kij", w, I, X[:, :, 1:], X[:, :, 1:])
    S = (1j * R**2 / (2.0 * np.pi**2)) * np.einsum("kij,ka,jans->isn", G, dirs, C)
    dF = 1j * np.outer(np.asarray(F0), np.asarray(q, dtype=float))
    term = np.einsum("isn,sn->i", S, dF)
    return float(anp.norm(term) / anp.norm(F0))
