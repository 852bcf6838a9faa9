# --------------------------------------------------------------
# Copyright (c) 2024, anisoqed developers
# License: GPLv3 (see LICENSE)
# --------------------------------------------------------------
"""Time-domain spontaneous emission in the single-excitation sector.

The state c(t)|e,0> + sum_k M_k(t)|g,1_k> evolves in the frame
rotating at the transition frequency w0 under

    i dc/dt   = sum_k g_k M_k
    i dM_k/dt = (w_k - w0) M_k + g_k c,

with real couplings g_k. Modes sharing the same frequency only couple
to the atom through their bright combination of strength
sqrt(sum g_k^2), so the propagator is built on the reduced arrowhead
Hamiltonian and applied exactly through its eigendecomposition.
"""
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

import anisoqed.num as anp
from anisoqed.dispersion import phase_speed, transverse_branches
from anisoqed.errors import InvalidInputError, StabilityError, UnderflowError, WindowError
from anisoqed.localfield import uncorrected_amplitude
from anisoqed.misc.sphere import gauss_legendre_sphere

NORM_TOL = 1e-9
PHASE_STEP_MAX = 0.1
UNDERFLOW = 1e-12


@dataclass
class DiscreteModeSet:
    """Finite set of field modes coupled to the atom.

    Attributes
    ----------
    omega : ndarray, shape (n,)
        Mode frequencies (rad/s).
    g : ndarray, shape (n,)
        Real non-negative couplings (rad/s).
    omega0 : float
        Transition frequency the set was built for.
    d_omega : float or None
        Width of the frequency bins, None for hand-built sets.
    window : tuple or None
        (omega_min, omega_max) of the binned band.
    """

    omega: np.ndarray
    g: np.ndarray
    omega0: float
    d_omega: float = None
    window: tuple = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.omega = np.atleast_1d(np.asarray(self.omega, dtype=float))
        self.g = np.atleast_1d(np.asarray(self.g, dtype=float))
        if self.omega.shape != self.g.shape or self.omega.ndim != 1:
            raise InvalidInputError("omega and g must be 1-d arrays of equal length")
        if not (anp.is_finite(self.omega) and anp.is_finite(self.g)):
            raise InvalidInputError("mode set has non-finite entries")
        if np.any(self.g < 0.0):
            raise InvalidInputError("couplings must be non-negative")

    def __len__(self):
        return self.omega.size

    @property
    def bandwidth(self):
        if self.window is not None:
            return self.window[1] - self.window[0]
        if len(self) > 1:
            return float(np.ptp(self.omega))
        return None

    def coupling_density(self, omega=None):
        """sum of g_k^2 per unit frequency, binned; evaluated at `omega`.

        Defaults to the bin densities at the bin centers.
        """
        if self.d_omega is None:
            raise InvalidInputError("coupling density needs a binned mode set")
        centers = self.metadata["bin_centers"]
        idx = np.clip(np.round((self.omega - self.window[0]) / self.d_omega - 0.5), 0, centers.size - 1)
        rho = np.bincount(idx.astype(int), weights=self.g**2, minlength=centers.size) / self.d_omega
        if omega is None:
            return centers, rho
        return float(np.interp(omega, centers, rho))

    def golden_rule_rate(self):
        """gamma = pi rho(w0), continuum limit of the set."""
        return np.pi * self.coupling_density(self.omega0)


def single_mode_set(omega0, g, detuning=0.0):
    """One mode at w0 + detuning with coupling g (vacuum Rabi problem)."""
    return DiscreteModeSet(omega=[omega0 + detuning], g=[g], omega0=omega0)


def flat_continuum_set(omega0, gamma, width, n_omega):
    """Equally spaced modes of constant coupling sqrt(gamma dw / pi)."""
    if n_omega < 2:
        raise InvalidInputError("n_omega must be at least 2")
    window = (omega0 - width / 2.0, omega0 + width / 2.0)
    d_omega = width / n_omega
    omega = window[0] + (np.arange(n_omega) + 0.5) * d_omega
    g = np.full(n_omega, np.sqrt(gamma * d_omega / np.pi))
    return DiscreteModeSet(
        omega, g, omega0, d_omega, window, metadata={"bin_centers": omega.copy()}
    )


def discretize_modes(medium, atom, window, counts):
    """Discretize the mode continuum of a medium around w0.

    Frequencies are binned on `window` with n_omega bins; directions
    use a Gauss-Legendre sphere grid; each direction contributes its two
    transverse polarizations. The coupling of a mode is

        g_k^2 = w_dir d_omega w_j^2 / v^3 * w0^2 / (2 hbar w_j) |d . x|^2,

    x being the normalized mode amplitude of the medium.

    Parameters
    ----------
    medium : ConstitutiveTensors
    atom : TwoLevelAtom
    window : (float, float)
        omega_min < omega0 < omega_max.
    counts : (int, int, int)
        (n_omega, n_theta, n_phi), each at least 2.

    Returns
    -------
    DiscreteModeSet
    """
    wmin, wmax = (float(w) for w in window)
    if not (0.0 < wmin < atom.omega0 < wmax):
        raise WindowError(
            f"window ({wmin!r}, {wmax!r}) must contain omega0 = {atom.omega0!r}"
        )
    n_omega, n_theta, n_phi = (int(n) for n in counts)
    if min(n_omega, n_theta, n_phi) < 2:
        raise InvalidInputError(f"mode counts must be at least 2, got {tuple(counts)}")

    dirs, w = gauss_legendre_sphere(n_theta, n_phi)
    angular = []
    speeds = []
    for qhat, wd in zip(dirs.reshape(-1, 3), w.reshape(-1)):
        for b in transverse_branches(qhat, medium):
            v = phase_speed(b)
            for X in b.X:
                x = uncorrected_amplitude(X, medium.eps1)
                angular.append(wd * abs(atom.d @ x) ** 2 / v**3)
                speeds.append(v)
    angular = np.array(angular)

    d_omega = (wmax - wmin) / n_omega
    centers = wmin + (np.arange(n_omega) + 0.5) * d_omega
    g2 = (
        d_omega
        * centers[:, None]
        * atom.omega0**2
        / (2.0 * medium.constants.hbar)
        * angular[None, :]
    )
    omega = np.repeat(centers, angular.size)
    return DiscreteModeSet(
        omega=omega,
        g=np.sqrt(g2.reshape(-1)),
        omega0=atom.omega0,
        d_omega=d_omega,
        window=(wmin, wmax),
        metadata={
            "bin_centers": centers,
            "counts": (n_omega, n_theta, n_phi),
            "modes_per_bin": angular.size,
            "phase_speeds": np.array(speeds),
        },
    )


def short_time_coefficient(mode_set):
    """sum_k g_k^2, so that 1 - |c(t)|^2 ~ (sum g^2) t^2 at short times."""
    return float(np.sum(mode_set.g**2))


@dataclass
class EmissionTrajectory:
    """Amplitudes of a single-excitation evolution.

    `c` is sampled at every step and stored in the frame rotating at
    `frame_omega`. Field amplitudes and the norm are stored at
    `snapshot_times`.
    """

    times: np.ndarray
    c: np.ndarray
    omega0: float
    frame_omega: float
    snapshot_times: np.ndarray = None
    M: np.ndarray = None
    norm: np.ndarray = None
    bandwidth: float = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def excited_population(self):
        return np.abs(self.c) ** 2

    @property
    def norm_drift(self):
        if self.norm is None:
            return None
        return float(np.max(np.abs(self.norm - 1.0)))


def _bright_modes(mode_set):
    delta = mode_set.omega - mode_set.omega0
    levels, inverse = np.unique(delta, return_inverse=True)
    G = np.sqrt(np.bincount(inverse, weights=mode_set.g**2, minlength=levels.size))
    return levels, G, inverse


def evolve(mode_set, atom, t_final, dt, store_every=None, verbosity=0, chunk=1024):
    """Propagate c(t), M_k(t) from the excited atom and empty field.

    Parameters
    ----------
    mode_set : DiscreteModeSet
    atom : TwoLevelAtom
    t_final, dt : float
        Total time and sampling step (s).
    store_every : int, optional
        Steps between stored field snapshots. Defaults to about 200
        snapshots.
    verbosity : int, optional

    Returns
    -------
    EmissionTrajectory

    Raises
    ------
    StabilityError
        If dt * max|w_k - w0| >= 0.1 or the norm drifts by more than 1e-9.
    """
    if not (dt > 0.0 and t_final > 0.0):
        raise InvalidInputError("t_final and dt must be positive")
    if abs(mode_set.omega0 - atom.omega0) > 1e-12 * atom.omega0:
        warnings.warn("mode set was built for another transition frequency", RuntimeWarning)
    tic = time.time()
    n_steps = int(round(t_final / dt))
    times = np.arange(n_steps + 1) * dt
    store_every = store_every or max(1, n_steps // 200)
    snap_idx = np.arange(0, n_steps + 1, store_every)

    if len(mode_set) == 0:
        return EmissionTrajectory(
            times, np.ones(times.size, complex), atom.omega0, atom.omega0,
            times[snap_idx], np.zeros((snap_idx.size, 0), complex), np.ones(snap_idx.size),
        )

    max_detuning = float(np.max(np.abs(mode_set.omega - atom.omega0)))
    if dt * max_detuning >= PHASE_STEP_MAX:
        raise StabilityError(
            f"dt * max detuning = {dt * max_detuning:.3g} >= {PHASE_STEP_MAX}",
            details={"dt": dt, "max_detuning": max_detuning},
        )

    levels, G, inverse = _bright_modes(mode_set)
    nb = levels.size
    H = np.zeros((nb + 1, nb + 1))
    H[0, 1:] = G
    H[1:, 0] = G
    H[np.arange(1, nb + 1), np.arange(1, nb + 1)] = levels
    if verbosity >= 1:
        print(f"Diagonalizing the {nb + 1}-level reduced Hamiltonian...")
    lam, V = anp.eigh(H)
    a0 = V[0, :]
    weights0 = a0 * a0

    c = np.empty(times.size, dtype=complex)
    for start in range(0, times.size, chunk):
        t = times[start : start + chunk]
        c[start : start + chunk] = np.exp(-1j * np.outer(t, lam)) @ weights0

    psi = (np.exp(-1j * np.outer(times[snap_idx], lam)) * a0) @ V.T
    bright = psi[:, 1:]
    ratio = np.where(G[inverse] > 0.0, mode_set.g / np.where(G[inverse] > 0.0, G[inverse], 1.0), 0.0)
    M = bright[:, inverse] * ratio
    norm = np.abs(psi[:, 0]) ** 2 + np.sum(np.abs(bright) ** 2, axis=1)
    if verbosity >= 1:
        print("done.")

    traj = EmissionTrajectory(
        times=times,
        c=c,
        omega0=atom.omega0,
        frame_omega=atom.omega0,
        snapshot_times=times[snap_idx],
        M=M,
        norm=norm,
        bandwidth=mode_set.bandwidth,
        diagnostics={
            "n_modes": len(mode_set),
            "n_bright_modes": nb,
            "n_steps": n_steps,
            "phase_step": dt * max_detuning,
            "time": time.time() - tic,
        },
    )
    if traj.norm_drift > NORM_TOL:
        raise StabilityError(
            f"norm drift {traj.norm_drift:.3e} exceeds {NORM_TOL}",
            details={"norm_drift": traj.norm_drift},
        )
    return traj


@dataclass
class DecayFit:
    gamma_fit: float
    delta_omega_fit: float
    residual: float
    window: tuple


def fit_decay(traj, fit_window=None):
    """Exponential fit of |c(t)| and of the phase of c(t).

    ln|c| = a - gamma t and arg c = b - (w0 + delta_omega - frame) t.

    Parameters
    ----------
    traj : EmissionTrajectory
    fit_window : (float, float), optional
        Times used in the fit. Defaults to the middle 60 % of the run.

    Returns
    -------
    DecayFit
    """
    if fit_window is None:
        fit_window = (0.2 * traj.times[-1], 0.8 * traj.times[-1])
    t0, t1 = fit_window
    mask = (traj.times >= t0) & (traj.times <= t1)
    if np.count_nonzero(mask) < 3:
        raise InvalidInputError(f"fit window {fit_window} holds fewer than 3 samples")
    if traj.bandwidth and t0 < 10.0 / traj.bandwidth:
        warnings.warn(
            f"fit window starts at {t0:.3g} s, inside the non-Markovian transient "
            f"10 / bandwidth = {10.0 / traj.bandwidth:.3g} s",
            RuntimeWarning,
        )
    t = traj.times[mask]
    c = traj.c[mask]
    amplitude = np.abs(c)
    if np.min(amplitude) < UNDERFLOW:
        raise UnderflowError(
            f"|c| drops below {UNDERFLOW} in the fit window",
            details={"min_abs_c": float(np.min(amplitude))},
        )
    log_a = np.log(amplitude)
    slope, intercept = np.polyfit(t, log_a, 1)
    phase = np.unwrap(np.angle(c))
    phase_slope, _ = np.polyfit(t, phase, 1)
    residual = float(np.sqrt(np.mean((log_a - (slope * t + intercept)) ** 2)))
    return DecayFit(
        gamma_fit=float(-slope),
        delta_omega_fit=float(-phase_slope - (traj.omega0 - traj.frame_omega)),
        residual=residual,
        window=(float(t0), float(t1)),
    )
