"""Classical trajectory of the Paul-trap parametric oscillator.

The complex solution eps(t) of ``eps'' + omega^2(t) eps = 0`` with
``eps(0) = 1, eps'(0) = i`` and ``omega^2(t) = 1 + kappa^2 sin^2(Omega t)``
generates the time-dependent integral of motion and, through it, every
time-dependent state in this package.  Units are hbar = m = omega(0) = 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TrapConfig",
    "EpsilonTrajectory",
    "solve_epsilon",
    "epsilon_at",
    "wronskian",
    "default_step",
]

# |eps| beyond this on the stored grid is flagged as parametric growth.
GROWTH_WARN = 10.0


@dataclass(frozen=True)
class TrapConfig:
    kappa: float = 0.5
    omega_drive: float = 2.0

    def __post_init__(self):
        if not (math.isfinite(self.kappa) and math.isfinite(self.omega_drive)):
            raise ValueError("kappa and omega_drive must be finite")
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if self.omega_drive <= 0:
            raise ValueError(f"omega_drive must be > 0, got {self.omega_drive}")

    def omega_sq(self, t):
        """omega^2(t) = 1 + kappa^2 sin^2(Omega t)."""
        return 1.0 + self.kappa**2 * np.sin(self.omega_drive * t) ** 2

    def omega_sq_dot(self, t):
        return self.kappa**2 * self.omega_drive * np.sin(2.0 * self.omega_drive * t)


@dataclass(frozen=True, eq=False)
class EpsilonTrajectory:
    """Sampled eps(t), eps'(t) on a uniform grid starting at t = 0."""

    config: TrapConfig
    t_grid: np.ndarray
    eps: np.ndarray
    eps_dot: np.ndarray
    step: float
    max_abs: float = field(default=1.0)
    resonant: bool = field(default=False)

    def __post_init__(self):
        for arr in (self.t_grid, self.eps, self.eps_dot):
            arr.setflags(write=False)

    @property
    def t_max(self) -> float:
        return float(self.t_grid[-1])

    @property
    def max_abs_dot(self) -> float:
        return float(np.max(np.abs(self.eps_dot)))

    def scale(self) -> float:
        """max(1, max|eps|, max|eps'|): the widest Gaussian factor over the run."""
        return max(1.0, self.max_abs, self.max_abs_dot)

    def __call__(self, t):
        return epsilon_at(self, t)


def default_step(config: TrapConfig) -> float:
    """300 steps per period of the drive or of the fastest local oscillation.

    Keeps the Wronskian drift below 1e-8 up to t = 20 for kappa <= 1 and any
    drive frequency; the coarser ``2 pi / 200`` step misses that for slow drives.
    """
    w_max = math.sqrt(1.0 + config.kappa**2)
    return min(2.0 * math.pi / config.omega_drive, 2.0 * math.pi / w_max) / 300.0


def _rk4(config: TrapConfig, h: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    eps = np.empty(n + 1, dtype=complex)
    dot = np.empty(n + 1, dtype=complex)
    e, d = 1.0 + 0.0j, 0.0 + 1.0j
    eps[0], dot[0] = e, d
    w2 = config.omega_sq
    for i in range(n):
        t = i * h
        wa, wb, wc = w2(t), w2(t + 0.5 * h), w2(t + h)
        k1e, k1d = d, -wa * e
        k2e, k2d = d + 0.5 * h * k1d, -wb * (e + 0.5 * h * k1e)
        k3e, k3d = d + 0.5 * h * k2d, -wb * (e + 0.5 * h * k2e)
        k4e, k4d = d + h * k3d, -wc * (e + h * k3e)
        e = e + h / 6.0 * (k1e + 2 * k2e + 2 * k3e + k4e)
        d = d + h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d)
        eps[i + 1], dot[i + 1] = e, d
    return eps, dot


def solve_epsilon(config: TrapConfig, t_max: float, n_steps: int = 2) -> EpsilonTrajectory:
    """Integrate eps(t) on ``[0, t_max]`` with fixed-step classical RK4.

    ``n_steps`` is a lower bound on the number of grid intervals: the grid is
    refined until the step does not exceed :func:`default_step`.  For
    ``kappa == 0`` the exact solution ``exp(i t)`` is stored instead.
    """
    if not math.isfinite(t_max) or t_max <= 0:
        raise ValueError(f"t_max must be finite and > 0, got {t_max}")
    if n_steps < 2:
        raise ValueError(f"n_steps must be >= 2, got {n_steps}")
    n = max(int(n_steps), math.ceil(t_max / default_step(config) - 1e-9))
    t = np.linspace(0.0, t_max, n + 1)
    h = t_max / n
    if config.kappa == 0.0:
        eps = np.exp(1j * t)
        dot = 1j * eps
        eps[0], dot[0] = 1.0, 1j
    else:
        eps, dot = _rk4(config, h, n)
    max_abs = float(np.max(np.abs(eps)))
    resonant = max_abs > GROWTH_WARN
    if resonant:
        warnings.warn(
            f"parametric growth: max|eps| = {max_abs:.3g} over t <= {t_max}; "
            "widen quadrature cutoffs accordingly",
            RuntimeWarning,
            stacklevel=2,
        )
    return EpsilonTrajectory(config, t, eps, dot, h, max_abs, resonant)


def _hermite5(y0, d0, s0, y1, d1, s1, h, u):
    """Quintic Hermite interpolant on one interval, u in [0, 1]."""
    u2, u3 = u * u, u * u * u
    u4, u5 = u3 * u, u3 * u2
    h00 = 1 - 10 * u3 + 15 * u4 - 6 * u5
    h10 = u - 6 * u3 + 8 * u4 - 3 * u5
    h20 = 0.5 * (u2 - 3 * u3 + 3 * u4 - u5)
    h01 = 10 * u3 - 15 * u4 + 6 * u5
    h11 = -4 * u3 + 7 * u4 - 3 * u5
    h21 = 0.5 * (u3 - 2 * u4 + u5)
    return (
        h00 * y0 + h * h10 * d0 + h * h * h20 * s0
        + h01 * y1 + h * h11 * d1 + h * h * h21 * s1
    )


def epsilon_at(traj: EpsilonTrajectory, t):
    """Return ``(eps(t), eps'(t))``; exact on grid points.

    Between grid points both are quintic Hermite interpolants built from the
    ODE itself (eps'' = -omega^2 eps and its derivative), so the interpolation
    error stays below the RK4 global error.
    """
    t_arr = np.asarray(t, dtype=float)
    tol = 1e-12 * max(1.0, traj.t_max)
    if np.any(t_arr < -tol) or np.any(t_arr > traj.t_max + tol) or not np.all(np.isfinite(t_arr)):
        raise ValueError(f"t outside trajectory range [0, {traj.t_max}]")
    t_arr = np.clip(t_arr, 0.0, traj.t_max)
    cfg = traj.config
    if cfg.kappa == 0.0:
        e = np.exp(1j * t_arr)
        d = 1j * e
    else:
        h = traj.step
        i = np.minimum((t_arr / h).astype(int), len(traj.t_grid) - 2)
        u = (t_arr - traj.t_grid[i]) / h
        e0, e1 = traj.eps[i], traj.eps[i + 1]
        d0, d1 = traj.eps_dot[i], traj.eps_dot[i + 1]
        t0, t1 = traj.t_grid[i], traj.t_grid[i + 1]
        w0, w1 = cfg.omega_sq(t0), cfg.omega_sq(t1)
        s0, s1 = -w0 * e0, -w1 * e1
        j0 = -cfg.omega_sq_dot(t0) * e0 - w0 * d0
        j1 = -cfg.omega_sq_dot(t1) * e1 - w1 * d1
        e = _hermite5(e0, d0, s0, e1, d1, s1, h, u)
        d = _hermite5(d0, s0, j0, d1, s1, j1, h, u)
        exact = u == 0.0
        e = np.where(exact, e0, e)
        d = np.where(exact, d0, d)
    if np.ndim(e) == 0:
        return complex(e), complex(d)
    return e, d


def wronskian(traj: EpsilonTrajectory, t):
    """eps eps'^* - eps^* eps'; equals -2i for an exact solution."""
    e, d = epsilon_at(traj, t)
    return e * np.conj(d) - np.conj(e) * d


def sqrt_eps(traj: EpsilonTrajectory, t):
    """eps(t)^{1/2} on the branch continuous in t from sqrt(1) = 1."""
    e, _ = epsilon_at(traj, t)
    t_arr = np.asarray(t, dtype=float)
    if traj.config.kappa == 0.0:
        phase = t_arr
    else:
        ref = np.unwrap(np.angle(traj.eps))
        i = np.clip(np.rint(t_arr / traj.step).astype(int), 0, len(ref) - 1)
        ang = np.angle(e)
        phase = ang + 2 * np.pi * np.rint((ref[i] - ang) / (2 * np.pi))
    out = np.sqrt(np.abs(e)) * np.exp(0.5j * phase)
    return complex(out) if np.ndim(out) == 0 else out
