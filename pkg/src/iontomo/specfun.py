"""Special functions and quadrature kernels.

Hermite and associated Laguerre polynomials are evaluated by their
three-term recurrences (never by the factorial series), vectorised over the
argument.  The quadrature helpers are deliberately plain tensor-product rules:
every integrand handed to them in this package is Gaussian-damped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy.special import gammaln

__all__ = [
    "NumericalError",
    "QuadratureSpec",
    "QuadratureResult",
    "hermite",
    "hermite_normalized",
    "laguerre",
    "laguerre_table",
    "integrate_1d",
    "integrate_3d",
]

SCHEMES = ("trapezoid", "gauss_hermite", "simpson")


class NumericalError(ArithmeticError):
    """Raised when a computation produces non-finite or unusable values."""


def hermite(n: int, x):
    """Physicists' Hermite polynomial H_n(x).

    Uses ``H_{k+1} = 2x H_k - 2k H_{k-1}``.  Works elementwise on arrays.
    """
    if n < 0:
        raise ValueError(f"hermite degree must be >= 0, got {n}")
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = 2.0 * x
    for k in range(1, n):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    return h if h.ndim else float(h)


def hermite_normalized(nmax: int, y) -> np.ndarray:
    """Table of ``H_n(y) / sqrt(2^n n!)`` for n = 0..nmax.

    The normalised recurrence never overflows for the degrees used here
    (a few hundred).  Returns an array of shape ``(nmax + 1,) + y.shape``.
    """
    y = np.asarray(y, dtype=float)
    out = np.empty((nmax + 1,) + y.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = np.sqrt(2.0) * y
    for k in range(1, nmax):
        out[k + 1] = np.sqrt(2.0 / (k + 1)) * y * out[k] - np.sqrt(k / (k + 1)) * out[k - 1]
    return out


def _laguerre_nonneg(n: int, k: int, x):
    x = np.asarray(x, dtype=float)
    l_prev = np.ones_like(x)
    if n == 0:
        return l_prev
    l = 1.0 + k - x
    for j in range(1, n):
        l_prev, l = l, ((2 * j + 1 + k - x) * l - (j + k) * l_prev) / (j + 1)
    return l


def laguerre(n: int, k: int, x):
    """Associated Laguerre polynomial L_n^k(x) for integer k.

    For ``k < 0`` the reflection ``L_n^{-j}(x) = (-x)^j (n-j)!/n! L_{n-j}^j(x)``
    is used, which requires ``j <= n``.
    """
    if n < 0:
        raise ValueError(f"laguerre degree must be >= 0, got {n}")
    if k < 0:
        j = -k
        if j > n:
            raise ValueError(f"L_n^k undefined branch: n={n}, k={k} (need n + k >= 0)")
        x = np.asarray(x, dtype=float)
        ratio = np.exp(gammaln(n - j + 1) - gammaln(n + 1))
        out = (-x) ** j * ratio * _laguerre_nonneg(n - j, j, x)
    else:
        out = _laguerre_nonneg(n, k, x)
    return out if np.ndim(out) else float(out)


def laguerre_table(nmax: int, k: int, x) -> np.ndarray:
    """All L_n^k(x) for n = 0..nmax at once, shape ``(nmax + 1,) + x.shape``; k >= 0."""
    if k < 0:
        raise ValueError("laguerre_table needs k >= 0")
    x = np.asarray(x, dtype=float)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = 1.0 + k - x
    for j in range(1, nmax):
        out[j + 1] = ((2 * j + 1 + k - x) * out[j] - (j + k) * out[j - 1]) / (j + 1)
    return out


@dataclass(frozen=True)
class QuadratureSpec:
    """A tensor-product quadrature rule on a symmetric box.

    ``n_points`` and ``domain`` may be scalars (shared by every axis) or one
    entry per axis.  For ``gauss_hermite`` the cutoff only sets the length
    scale: nodes are ``(cutoff / 8) * xi`` for the Gauss-Hermite abscissae xi.
    """

    scheme: str = "trapezoid"
    n_points: int | tuple[int, ...] = 201
    domain: float | tuple[float, ...] = 8.0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}; choose from {SCHEMES}")
        for n in np.atleast_1d(self.n_points):
            if int(n) < 8:
                raise ValueError(f"n_points must be >= 8, got {n}")
        for c in np.atleast_1d(self.domain):
            if not (np.isfinite(c) and c > 0):
                raise ValueError(f"quadrature cutoffs must be finite and positive, got {c}")

    def _axis_value(self, value, axis: int):
        if np.ndim(value) == 0:
            return value
        return value[axis]

    def rule(self, axis: int = 0, n: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights along one axis."""
        n = int(self._axis_value(self.n_points, axis) if n is None else n)
        cut = float(self._axis_value(self.domain, axis))
        return _rule(self.scheme, n, cut)


def _rule(scheme: str, n: int, cut: float) -> tuple[np.ndarray, np.ndarray]:
    if scheme == "trapezoid":
        x = np.linspace(-cut, cut, n)
        w = np.full(n, x[1] - x[0])
        w[0] *= 0.5
        w[-1] *= 0.5
    elif scheme == "simpson":
        if n % 2 == 0:
            n += 1
        x = np.linspace(-cut, cut, n)
        h = x[1] - x[0]
        w = np.full(n, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        w *= h / 3.0
    else:
        xi, wi = hermgauss(n)
        scale = cut / 8.0
        x = scale * xi
        w = scale * wi * np.exp(xi**2)
    return x, w


_ORDER = {"trapezoid": 2, "simpson": 4, "gauss_hermite": 0}


class QuadratureResult(NamedTuple):
    value: float | complex
    error: float


def _check_finite(values, where):
    if not np.all(np.isfinite(values)):
        raise NumericalError(f"non-finite integrand samples encountered in {where}")


def integrate_1d(f: Callable, spec: QuadratureSpec | None = None) -> QuadratureResult:
    """Integrate ``f`` over ``[-cutoff, cutoff]`` along axis 0 of ``spec``.

    The error estimate compares the rule against the same rule with half as
    many points, Richardson-scaled by the scheme's order.
    """
    spec = spec or QuadratureSpec()
    n = int(spec._axis_value(spec.n_points, 0))

    def _apply(m):
        x, w = spec.rule(0, m)
        fx = np.asarray(f(x))
        _check_finite(fx, "integrate_1d")
        return np.sum(w * fx)

    fine = _apply(n)
    coarse = _apply(max(8, (n + 1) // 2))
    p = _ORDER[spec.scheme]
    err = abs(fine - coarse) / (2**p - 1) if p else abs(fine - coarse)
    return QuadratureResult(fine.item() if hasattr(fine, "item") else fine, float(err))


def integrate_3d(f: Callable, spec: QuadratureSpec | None = None) -> complex:
    """Tensor-product integral of ``f(X, mu, nu)`` over the box of ``spec``.

    ``f`` is called once with broadcastable open grids of shapes
    ``(nX, 1, 1)``, ``(1, nmu, 1)`` and ``(1, 1, nnu)``.
    """
    spec = spec or QuadratureSpec(n_points=128)
    (x, wx), (m, wm), (v, wv) = (spec.rule(a) for a in range(3))
    vals = np.asarray(f(x[:, None, None], m[None, :, None], v[None, None, :]))
    _check_finite(vals, "integrate_3d")
    return complex(np.einsum("i,j,k,ijk->", wx, wm, wv, vals))

