"""Closed-form forward maps: Wigner functions and symplectic tomograms.

Conventions
-----------
* The Wigner function is normalised as ``int W dq dp / (2 pi) = 1`` so the
  vacuum peaks at ``W(0, 0) = 2``.
* ``w(X, mu, nu)`` is the probability density of ``X = mu q + nu p`` and is
  homogeneous: ``w(lX, l mu, l nu) = w(X, mu, nu) / |l|``.
* Time enters only through the rotated parameters built from eps(t): a state
  with fixed invariant-basis coefficients has ``W_t(q, p) = W_0(q(t), p(t))``
  and ``w_t(X, mu, nu) = w_0(X, mu(t), nu(t))``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .dynamics import EpsilonTrajectory, epsilon_at
from .specfun import NumericalError, hermite_normalized, laguerre_table
from .states import StateSpec, moments

__all__ = [
    "RotatedParams",
    "Tomogram",
    "PhaseSpaceGrid",
    "rotated_params",
    "gaussian_tomogram",
    "fock_cross_tomogram",
    "f_tomogram",
    "wigner",
    "wigner_grid",
    "tomogram_function",
    "sample_tomogram",
]

CONVENTIONS = ("standard", "printed")
_NEGLIGIBLE = 1e-14


@dataclass(frozen=True)
class RotatedParams:
    """mu(t), nu(t) and the linear map (q, p) -> (q(t), p(t)).

    ``qp_map`` is ``[[a, b], [c, d]]`` with ``q(t) = a q + b p`` and
    ``p(t) = c q + d p``; its determinant is the Wronskian ``Im(eps^* eps') = 1``.
    """

    mu_t: np.ndarray | float
    nu_t: np.ndarray | float
    qp_map: np.ndarray

    def apply(self, q, p):
        (a, b), (c, d) = self.qp_map
        return a * q + b * p, c * q + d * p


def rotated_params(traj: EpsilonTrajectory, t: float, mu=1.0, nu=0.0) -> RotatedParams:
    e, d = epsilon_at(traj, t)
    mu = np.asarray(mu, dtype=float)
    nu = np.asarray(nu, dtype=float)
    mu_t = e.real * mu + d.real * nu
    nu_t = e.imag * mu + d.imag * nu
    qp_map = np.array([[d.imag, -e.imag], [-d.real, e.real]])
    if mu_t.ndim == 0:
        mu_t, nu_t = float(mu_t), float(nu_t)
    return RotatedParams(mu_t, nu_t, qp_map)


def _nondegenerate(mu, nu):
    s = np.hypot(mu, nu)
    if np.any(s == 0):
        raise ValueError("degenerate tomogram direction: mu = nu = 0 (distribution is a delta)")
    return s


def gaussian_tomogram(state: StateSpec, traj: EpsilonTrajectory, t: float, X, mu, nu):
    """Gaussian tomogram of a coherent (squeezed and correlated) state."""
    if state.kind != "coherent":
        raise ValueError(f"gaussian_tomogram needs a coherent state, got {state.kind}")
    X, mu, nu = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (X, mu, nu)))
    _nondegenerate(mu, nu)
    m = moments(state, traj, t)
    xbar = mu * m.mean_q + nu * m.mean_p
    var = mu**2 * m.sigma_qq + nu**2 * m.sigma_pp + 2 * mu * nu * m.sigma_pq
    out = np.exp(-((X - xbar) ** 2) / (2 * var)) / np.sqrt(2 * np.pi * var)
    return float(out) if out.ndim == 0 else out


def _amplitudes(nmax: int, X, mu_t, nu_t):
    """u_n with w_nm = u_n conj(u_m); shape ``(nmax + 1,) + X.shape``."""
    s = np.hypot(mu_t, nu_t)
    y = X / s
    h = hermite_normalized(nmax, y)
    env = (np.pi * s**2) ** -0.25 * np.exp(-0.5 * y**2)
    phase = (mu_t - 1j * nu_t) / s
    powers = phase[None, ...] ** np.arange(nmax + 1).reshape((-1,) + (1,) * np.ndim(y))
    return env * powers * h


def fock_cross_tomogram(n: int, m: int, traj: EpsilonTrajectory, t: float, X, mu, nu,
                        convention: str = "standard"):
    """Tomogram w_nm of the operator |n><m| in the invariant number basis.

    ``convention="standard"`` uses the phase ``((mu - i nu)/s)^n ((mu + i nu)/s)^m``,
    which gives ``conj(w_nm) = w_mn`` and reduces to the position density
    ``psi_n psi_m`` at (mu, nu) = (1, 0).  ``convention="printed"`` keeps the
    factor ``(nu + i mu)^n (nu - i mu)^n`` for comparison only.
    """
    if n < 0 or m < 0:
        raise ValueError("Fock indices must be >= 0")
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    X, mu, nu = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (X, mu, nu)))
    rp = rotated_params(traj, t, mu, nu)
    mu_t, nu_t = np.asarray(rp.mu_t), np.asarray(rp.nu_t)
    s = _nondegenerate(mu_t, nu_t)
    y = X / s
    h = hermite_normalized(max(n, m), y)
    base = np.exp(-(y**2)) / (np.sqrt(np.pi) * s) * h[n] * h[m]
    if convention == "standard":
        ph = ((mu_t - 1j * nu_t) / s) ** n * ((mu_t + 1j * nu_t) / s) ** m
    else:
        ph = ((nu_t + 1j * mu_t) / s) ** n * ((nu_t - 1j * mu_t) / s) ** n
    out = base * ph
    return complex(out) if out.ndim == 0 else out


def _effective_coeffs(c: np.ndarray) -> np.ndarray:
    mag = np.abs(c)
    keep = np.nonzero(mag > 1e-17 * mag.max())[0]
    return c[: keep[-1] + 1]


def f_tomogram(state: StateSpec, traj: EpsilonTrajectory, t: float, X, mu, nu,
               method: str = "amplitude", convention: str = "standard"):
    """Tomogram of a state given by its Fock coefficients (any kind).

    The double series ``sum c_n conj(c_m) w_nm`` is evaluated either as
    ``|sum c_n u_n|^2`` (``method="amplitude"``, the default, exact because
    w_nm factorises) or term by term along the diagonals m - n
    (``method="series"``).
    """
    X, mu, nu = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (X, mu, nu)))
    rp = rotated_params(traj, t, mu, nu)
    mu_t, nu_t = np.asarray(rp.mu_t), np.asarray(rp.nu_t)
    _nondegenerate(mu_t, nu_t)
    c = _effective_coeffs(state.coeffs)
    if method == "amplitude" and convention == "standard":
        u = _amplitudes(len(c) - 1, X, mu_t, nu_t)
        amp = np.tensordot(c, u, axes=(0, 0))
        out = np.abs(amp) ** 2
    elif method in ("amplitude", "series"):
        out = _series_tomogram(c, traj, t, X, mu, nu, convention)
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(out) if np.ndim(out) == 0 else out


def _series_tomogram(c, traj, t, X, mu, nu, convention):
    N = len(c) - 1
    mag = np.abs(c)
    total = np.zeros(np.shape(X), dtype=complex)
    for k in range(N + 1):
        if 2 * np.sum(mag[: N + 1 - k] * mag[k:]) < _NEGLIGIBLE:
            continue
        diag = np.zeros_like(total)
        for n in range(N + 1 - k):
            m = n + k
            coef = c[n] * np.conj(c[m])
            if coef == 0:
                continue
            diag += coef * fock_cross_tomogram(n, m, traj, t, X, mu, nu, convention)
            if k:
                diag += np.conj(coef) * fock_cross_tomogram(m, n, traj, t, X, mu, nu, convention)
        total += diag
    if convention == "standard":
        resid = np.max(np.abs(total.imag)) if total.size else 0.0
        if resid > 1e-10 * max(1.0, np.max(np.abs(total.real))):
            raise NumericalError(f"tomogram series not real: imaginary residue {resid:.2e}")
        return total.real
    return total


def wigner_fock(coeffs: np.ndarray, q, p):
    """Wigner function of ``sum c_n |n>`` at t = 0 (standard Fock basis).

    ``W = 2 exp(-r^2) sum c_n conj(c_m) (-1)^n sqrt(n!/m!) z^(m-n) L_n^(m-n)(2 r^2)``
    for m >= n with ``z = sqrt(2) (q + i p)``; the m < n half is the complex
    conjugate.
    """
    c = _effective_coeffs(np.asarray(coeffs, dtype=complex))
    q, p = np.broadcast_arrays(np.asarray(q, dtype=float), np.asarray(p, dtype=float))
    N = len(c) - 1
    r2 = q**2 + p**2
    x = 2 * r2
    z = np.sqrt(2) * (q + 1j * p)
    mag = np.abs(c)
    acc = np.zeros(q.shape, dtype=complex)
    for k in range(N + 1):
        if 2 * np.sum(mag[: N + 1 - k] * mag[k:]) < _NEGLIGIBLE:
            continue
        n = np.arange(N + 1 - k)
        lag = laguerre_table(N - k, k, x)
        weights = c[n] * np.conj(c[n + k]) * (-1.0) ** n * np.exp(0.5 * (gammaln(n + 1) - gammaln(n + k + 1)))
        diag = np.tensordot(weights, lag, axes=(0, 0)) * z**k
        acc += diag if k == 0 else 2 * diag.real
    return 2 * np.exp(-r2) * acc.real


def wigner(state: StateSpec, traj: EpsilonTrajectory, t: float, q, p):
    """Wigner function of ``state`` at time t (vacuum peak 2)."""
    rp = rotated_params(traj, t)
    qt, pt = rp.apply(np.asarray(q, dtype=float), np.asarray(p, dtype=float))
    out = wigner_fock(state.coeffs, qt, pt)
    return float(out) if np.ndim(out) == 0 else out


@dataclass
class PhaseSpaceGrid:
    q_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray  # shape (len(q_axis), len(p_axis))
    imag_residue: float = 0.0

    def normalization(self) -> float:
        """Trapezoid estimate of ``int W dq dp / (2 pi)``."""
        return float(np.trapezoid(np.trapezoid(self.values, self.p_axis, axis=1), self.q_axis)) / (2 * np.pi)

    def rows(self):
        Q, P = np.meshgrid(self.q_axis, self.p_axis, indexing="ij")
        return np.column_stack([Q.ravel(), P.ravel(), self.values.ravel()])


def wigner_grid(state, traj, t, q_axis, p_axis) -> PhaseSpaceGrid:
    q_axis = np.asarray(q_axis, dtype=float)
    p_axis = np.asarray(p_axis, dtype=float)
    Q, P = np.meshgrid(q_axis, p_axis, indexing="ij")
    return PhaseSpaceGrid(q_axis, p_axis, wigner(state, traj, t, Q, P))


def tomogram_function(state: StateSpec, traj: EpsilonTrajectory, t: float | None = None):
    """Vectorised ``w(X, mu, nu)`` at fixed t, or ``w(X, mu, nu, t)`` if t is None."""
    fwd = gaussian_tomogram if state.kind == "coherent" else f_tomogram
    if t is None:
        return lambda X, mu, nu, tt: fwd(state, traj, tt, X, mu, nu)
    return lambda X, mu, nu: fwd(state, traj, t, X, mu, nu)


@dataclass
class Tomogram:
    """Sampled tomogram: one X-line per (mu, nu) direction.

    ``X`` and ``values`` have shape ``(n_lines, n_x)``; each line's X samples
    are uniform.  When the lines form a product grid over ``mu_axis`` x
    ``nu_axis`` the object is callable and interpolates multilinearly, moving
    between neighbouring directions in the homogeneous variable X / |(mu, nu)|.
    Queries outside the grid return 0 and increment ``extrapolated``.
    """

    time: float
    mu: np.ndarray
    nu: np.ndarray
    X: np.ndarray
    values: np.ndarray
    provenance: str = "external"
    extrapolated: int = field(default=0, compare=False)

    def __post_init__(self):
        self.mu = np.asarray(self.mu, dtype=float)
        self.nu = np.asarray(self.nu, dtype=float)
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        if self.X.shape != self.values.shape or self.X.shape[0] != self.mu.size or self.mu.shape != self.nu.shape:
            raise ValueError("tomogram arrays have inconsistent shapes")
        if self.X.shape[1] < 2:
            raise ValueError("each tomogram line needs at least two X samples")
        self.values = np.where(self.values < 0, np.where(self.values < -1e-12, self.values, 0.0), self.values)
        dx = np.diff(self.X, axis=1)
        if np.any(dx <= 0) or not np.allclose(dx, dx[:, :1], rtol=1e-6, atol=0):
            raise ValueError("tomogram X samples must be strictly increasing and uniform per line")

    @property
    def n_lines(self) -> int:
        return self.mu.size

    def line_norms(self) -> np.ndarray:
        return np.trapezoid(self.values, self.X, axis=1)

    def characteristic(self) -> np.ndarray:
        """Per-line trapezoid estimate of ``int w exp(iX) dX``."""
        return np.trapezoid(self.values * np.exp(1j * self.X), self.X, axis=1)

    def product_axes(self):
        """``(mu_axis, nu_axis)`` if the lines form a mu-major product grid, else None."""
        mu_axis = np.unique(self.mu)
        nu_axis = np.unique(self.nu)
        if mu_axis.size * nu_axis.size != self.n_lines:
            return None
        M, V = np.meshgrid(mu_axis, nu_axis, indexing="ij")
        if np.array_equal(M.ravel(), self.mu) and np.array_equal(V.ravel(), self.nu):
            return mu_axis, nu_axis
        return None

    def __call__(self, X, mu, nu):
        axes = self.product_axes()
        X, mu, nu = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (X, mu, nu)))
        if axes is None:
            raise ValueError("interpolation needs lines on a product (mu, nu) grid")
        mu_axis, nu_axis = axes
        out = np.zeros(X.shape)
        s = np.hypot(mu, nu)
        corner_sets = []
        for val, axis in ((mu, mu_axis), (nu, nu_axis)):
            if axis.size == 1:
                inside = val == axis[0]
                i0 = np.zeros(val.shape, dtype=int)
                corner_sets.append((inside, [(i0, np.ones(val.shape))]))
                continue
            inside = (val >= axis[0]) & (val <= axis[-1])
            i = np.clip(np.searchsorted(axis, val, side="right") - 1, 0, axis.size - 2)
            frac = (val - axis[i]) / (axis[i + 1] - axis[i])
            corner_sets.append((inside, [(i, 1 - frac), (i + 1, frac)]))
        inside = corner_sets[0][0] & corner_sets[1][0] & (s > 0)
        self.extrapolated += int(np.count_nonzero(~inside))
        x0 = self.X[:, 0]
        dx = self.X[:, 1] - self.X[:, 0]
        nx = self.X.shape[1]
        for im, bm in corner_sets[0][1]:
            for iv, bv in corner_sets[1][1]:
                b = bm * bv
                line = im * nu_axis.size + iv
                sj = np.hypot(self.mu[line], self.nu[line])
                xs = np.where(inside, X * sj / np.where(s > 0, s, 1.0), 0.0)
                pos = (xs - x0[line]) / dx[line]
                k = np.clip(np.floor(pos).astype(int), 0, nx - 2)
                f = pos - k
                ok = (pos >= 0) & (pos <= nx - 1)
                v = (1 - f) * self.values[line, k] + f * self.values[line, k + 1]
                v = np.where(ok, v, 0.0) * sj / np.where(s > 0, s, 1.0)
                out += np.where(inside & (b > 0), b * v, 0.0)
        return float(out) if out.ndim == 0 else out


def sample_tomogram(fn, mu, nu, x, scaled: bool = False, time: float = 0.0,
                    provenance: str = "external", chunk: int = 256, workers: int = 1) -> Tomogram:
    """Sample a callable ``w(X, mu, nu)`` on lines through the given directions.

    ``x`` is a uniform 1-D grid; with ``scaled=True`` line j uses
    ``X = |(mu_j, nu_j)| * x`` so every line covers the same number of
    standard deviations.
    """
    mu = np.ravel(np.asarray(mu, dtype=float))
    nu = np.ravel(np.asarray(nu, dtype=float))
    x = np.asarray(x, dtype=float)
    s = np.hypot(mu, nu)
    if np.any(s == 0):
        raise ValueError("cannot sample the degenerate direction mu = nu = 0")
    X = s[:, None] * x[None, :] if scaled else np.broadcast_to(x, (mu.size, x.size)).copy()
    vals = np.empty_like(X)

    def fill(lo):
        sl = slice(lo, lo + chunk)
        vals[sl] = fn(X[sl], mu[sl, None], nu[sl, None])

    starts = range(0, mu.size, chunk)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, starts))
    else:
        for lo in starts:
            fill(lo)
    return Tomogram(time, mu, nu, X, vals, provenance)


def state_tomogram(state: StateSpec, traj: EpsilonTrajectory, t: float, mu, nu, x,
                   scaled: bool = False, workers: int = 1) -> Tomogram:
    prov = "gaussian_closed_form" if state.kind == "coherent" else "fock_series"
    return sample_tomogram(tomogram_function(state, traj, t), mu, nu, x, scaled, t, prov, workers=workers)
