"""Reconstruction from tomograms and the tomographic evolution check.

All three inversions share one first step: for every direction (mu, nu)
the X-integral ``chi(mu, nu) = int w(X, mu, nu) exp(iX) dX`` (the
characteristic function of the state).  Callables are sampled on lines
``X = |(mu, nu)| y`` over a fixed y-grid, so each line covers the same number
of standard deviations no matter how long the direction vector is.  The
remaining (mu, nu) integral is a 2-D tensor rule.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .dynamics import EpsilonTrajectory, TrapConfig
from .phase_space import PhaseSpaceGrid, Tomogram, rotated_params, sample_tomogram
from .specfun import NumericalError, QuadratureSpec, laguerre_table

__all__ = [
    "DensityMatrix",
    "PhotonDistribution",
    "inversion_quadrature",
    "characteristic_grid",
    "invert_to_wigner",
    "reconstruct_density_matrix",
    "photon_number_distribution",
    "evolution_residual",
]


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    @property
    def purity(self) -> float:
        return float(np.trace(self.entries @ self.entries).real)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def is_hermitian(self) -> bool:
        return bool(np.array_equal(self.entries, self.entries.conj().T))

    def report(self) -> dict:
        ev = self.eigenvalues()
        return {
            "dim": self.dim,
            "trace": self.trace,
            "purity": self.purity,
            "min_eigenvalue": float(ev.min()),
            "hermitian": self.is_hermitian(),
            "positive_within_1e-3": bool(ev.min() >= -1e-3),
        }


@dataclass(frozen=True, eq=False)
class PhotonDistribution:
    scan_amplitude: complex
    probs: np.ndarray

    @property
    def total(self) -> float:
        return float(np.sum(self.probs))


def inversion_quadrature(traj: EpsilonTrajectory | None = None, target: str = "density") -> QuadratureSpec:
    """Default rule for the inversions.

    Axis 0 is the scaled variable y = X / |(mu, nu)|; axes 1 and 2 are mu and
    nu.  ``target="density"`` covers the damped integrals (density matrix,
    photon statistics) with |mu|, |nu| <= 10; ``target="wigner"`` widens the
    box with the trajectory's largest |eps|, |eps'| since nothing damps it.
    """
    scale = traj.scale() if traj is not None else 1.0
    y_cut = 10.0 * scale
    n_y = 2 * math.ceil(y_cut / 0.08 / 2) + 1
    cut = 10.0 if target == "density" else 10.0 * scale
    n = 2 * math.ceil(cut / 0.2)
    return QuadratureSpec("trapezoid", (n_y, n, n), (y_cut, cut, cut))


def _grid_weights(axis: np.ndarray) -> np.ndarray:
    if axis.size == 1:
        return np.ones(1)
    d = np.diff(axis)
    if not np.allclose(d, d[0], rtol=1e-9, atol=0):
        raise ValueError("tomogram (mu, nu) grid must be uniform")
    w = np.full(axis.size, d[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


@dataclass(frozen=True, eq=False)
class _CharGrid:
    mu: np.ndarray  # (n_mu,) when separable
    nu: np.ndarray
    chi: np.ndarray  # (n_mu, n_nu)
    weights: np.ndarray  # (n_mu, n_nu)

    def nodes(self):
        return np.meshgrid(self.mu, self.nu, indexing="ij")


def characteristic_grid(tomogram, quad: QuadratureSpec | None = None, workers: int = 1) -> _CharGrid:
    """Characteristic function on the (mu, nu) nodes.

    ``tomogram`` is either a :class:`Tomogram` whose lines form a uniform
    product grid, or a vectorised callable ``w(X, mu, nu)`` sampled with
    ``quad``.  The direction mu = nu = 0 gets chi = 1 (normalisation).
    """
    if isinstance(tomogram, Tomogram):
        axes = tomogram.product_axes()
        if axes is None:
            raise ValueError("reconstruction needs tomogram lines on a product (mu, nu) grid")
        mu_axis, nu_axis = axes
        weights = np.outer(_grid_weights(mu_axis), _grid_weights(nu_axis))
        tomo, live = tomogram, np.hypot(tomogram.mu, tomogram.nu) > 0
    else:
        quad = quad or inversion_quadrature()
        if quad.scheme != "trapezoid":
            raise ValueError("sampled inversion uses trapezoid lines in X")
        y, _ = quad.rule(0)
        mu_axis, wm = quad.rule(1)
        nu_axis, wn = quad.rule(2)
        weights = np.outer(wm, wn)
        M, V = np.meshgrid(mu_axis, nu_axis, indexing="ij")
        live = np.hypot(M, V).ravel() > 0
        tomo = sample_tomogram(tomogram, M.ravel()[live], V.ravel()[live], y, scaled=True, workers=workers)
    if not np.all(np.isfinite(tomo.values)):
        raise NumericalError("non-finite tomogram samples")
    if not np.any(tomo.values):
        raise ValueError("tomogram is identically zero; nothing to reconstruct")
    chi = np.ones(mu_axis.size * nu_axis.size, dtype=complex)
    lines = tomo.characteristic()
    chi[live] = lines[live] if lines.size == live.size else lines
    return _CharGrid(mu_axis, nu_axis, chi.reshape(mu_axis.size, nu_axis.size), weights)


def _frame_nodes(cg: _CharGrid, frame):
    M, V = cg.nodes()
    if frame is None:
        return M, V
    traj, t = frame
    rp = rotated_params(traj, t, M, V)
    return np.asarray(rp.mu_t), np.asarray(rp.nu_t)


def invert_to_wigner(tomogram, q_axis, p_axis, quad: QuadratureSpec | None = None,
                     workers: int = 1) -> PhaseSpaceGrid:
    """``W(q, p) = (1/2pi) int w exp(-i(mu q + nu p - X)) dmu dnu dX`` on a grid."""
    cg = characteristic_grid(tomogram, quad, workers)
    q_axis = np.asarray(q_axis, dtype=float)
    p_axis = np.asarray(p_axis, dtype=float)
    Eq = np.exp(-1j * np.outer(q_axis, cg.mu))
    Ep = np.exp(-1j * np.outer(cg.nu, p_axis))
    W = Eq @ (cg.weights * cg.chi) @ Ep / (2 * np.pi)
    peak = np.max(np.abs(W.real))
    resid = float(np.max(np.abs(W.imag)) / max(peak, 1e-300))
    if resid > 1e-3:
        raise NumericalError(f"Wigner inversion imaginary residue {resid:.2e}; widen the quadrature box")
    return PhaseSpaceGrid(q_axis, p_axis, W.real, resid)


def reconstruct_density_matrix(tomogram, N: int, quad: QuadratureSpec | None = None,
                               frame: tuple[EpsilonTrajectory, float] | None = None,
                               workers: int = 1) -> DensityMatrix:
    """Fock-basis density matrix <m|rho|n>, m, n <= N, from a tomogram.

    Entries with m >= n come from the Laguerre convolution; the rest are
    filled by Hermitian conjugation.  By default the basis is the static
    number basis.  ``frame=(traj, t)`` instead returns the matrix in the
    invariant basis Psi_m(x, t) of that time, where a pure state with
    coefficients c gives c_m conj(c_n) at every t.
    """
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    cg = characteristic_grid(tomogram, quad, workers)
    M, V = _frame_nodes(cg, frame)
    s2 = M**2 + V**2
    damp = cg.weights * cg.chi * np.exp(-s2 / 4) / (2 * np.pi)
    z = V - 1j * M
    rho = np.zeros((N + 1, N + 1), dtype=complex)
    for k in range(N + 1):
        lag = laguerre_table(N - k, k, s2 / 2)
        base = damp * z**k
        for n in range(N + 1 - k):
            m = n + k
            pref = math.exp(0.5 * (gammaln(n + 1) - gammaln(m + 1))) * 2.0 ** (-k / 2)
            rho[m, n] = pref * np.sum(base * lag[n])
    rho = np.tril(rho) + np.tril(rho, -1).conj().T
    rho[np.diag_indices(N + 1)] = rho.diagonal().real
    if not np.all(np.isfinite(rho)):
        raise NumericalError("density-matrix quadrature produced non-finite entries")
    dm = DensityMatrix(rho)
    if abs(dm.trace - 1) > 1e-2:
        warnings.warn(f"reconstructed trace {dm.trace:.4f} deviates from 1 by more than 1e-2", RuntimeWarning,
                      stacklevel=2)
    return dm


def photon_number_distribution(tomogram, n_max: int, scan_amplitude: complex = 0.0,
                               quad: QuadratureSpec | None = None, workers: int = 1) -> PhotonDistribution:
    """Number statistics w(n, a) with the local-oscillator amplitude a scanned.

    Equivalent to the occupation of |n> after the state is displaced by a.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    a = complex(scan_amplitude)
    cg = characteristic_grid(tomogram, quad, workers)
    M, V = cg.nodes()
    s2 = M**2 + V**2
    shift = (a * (V + 1j * M) - np.conj(a) * (V - 1j * M)) / math.sqrt(2)
    base = cg.weights * cg.chi * np.exp(-s2 / 4 + shift) / (2 * np.pi)
    lag = laguerre_table(n_max, 0, s2 / 2)
    probs = np.tensordot(lag, base, axes=([1, 2], [0, 1]))
    if not np.all(np.isfinite(probs)):
        raise NumericalError("photon-number quadrature produced non-finite values")
    probs = probs.real
    probs = np.where((probs < 0) & (probs >= -1e-4), 0.0, probs)
    return PhotonDistribution(a, probs)


def evolution_residual(tomogram_fn, point, steps, config: TrapConfig) -> float:
    """Central-difference value of ``dw/dt - mu dw/dnu + omega^2(t) nu dw/dmu``.

    ``tomogram_fn(X, mu, nu, t)``; ``point = (X, mu, nu, t)``;
    ``steps = (h_t, h_mu, h_nu)``.
    """
    X, mu, nu, t = point
    ht, hm, hn = steps
    if min(ht, hm, hn) <= 0:
        raise ValueError("finite-difference steps must be > 0")
    dt = (tomogram_fn(X, mu, nu, t + ht) - tomogram_fn(X, mu, nu, t - ht)) / (2 * ht)
    dnu = (tomogram_fn(X, mu, nu + hn, t) - tomogram_fn(X, mu, nu - hn, t)) / (2 * hn)
    dmu = (tomogram_fn(X, mu + hm, nu, t) - tomogram_fn(X, mu - hm, nu, t)) / (2 * hm)
    return float(dt - mu * dnu + config.omega_sq(t) * nu * dmu)
