"""Motional states in the Fock basis of the invariant number operator A^dagger A.

Coherent, number and nonlinear (f-)coherent states are stored as truncated
coefficient vectors ``c_n`` with an explicit bound on the discarded tail.
Wavefunctions are built from the squeezed and correlated number states
``Psi_m(x, t)`` generated by the trajectory eps(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import EpsilonTrajectory, epsilon_at, sqrt_eps
from .specfun import NumericalError, hermite_normalized, laguerre

__all__ = [
    "DeformationSpec",
    "StateSpec",
    "QuadratureMoments",
    "f_value",
    "f_values",
    "make_state",
    "psi_number",
    "psi_state",
    "moments",
    "ladder_matrices",
    "verify_eigenstate",
]

VARIANTS = ("identity", "paper_lamb_dicke", "vogel_lamb_dicke", "custom_table")
KINDS = ("coherent", "number", "f_coherent")
TAIL_TOL = 1e-8


@dataclass(frozen=True)
class DeformationSpec:
    """Choice of the deformation function f(n) of the number operator.

    ``paper_lamb_dicke`` is ``L^1_{n+1}(eta^2) / (n L^0_{n+1}(eta^2))``;
    ``vogel_lamb_dicke`` is ``L^1_n(eta^2) / ((n + 1) L^0_n(eta^2))`` which
    tends to 1 as eta -> 0.  f(0) = 1 for every variant.
    """

    variant: str = "identity"
    eta: float = 0.0
    table: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown deformation variant {self.variant!r}; choose from {VARIANTS}")
        if not math.isfinite(self.eta) or self.eta < 0:
            raise ValueError(f"eta must be finite and >= 0, got {self.eta}")
        if self.variant == "custom_table":
            if not self.table:
                raise ValueError("custom_table deformation needs a table of f(n) values")
            object.__setattr__(self, "table", tuple(float(v) for v in self.table))


def f_value(spec: DeformationSpec, n: int) -> float:
    """The deformation function f(n)."""
    if n < 0:
        raise ValueError(f"f(n) needs n >= 0, got {n}")
    if n == 0 or spec.variant == "identity":
        return 1.0
    x = spec.eta**2
    if spec.variant == "custom_table":
        if n >= len(spec.table):
            raise ValueError(f"custom f table has {len(spec.table)} entries, f({n}) requested")
        val = spec.table[n]
    else:
        if spec.variant == "paper_lamb_dicke":
            num, den = laguerre(n + 1, 1, x), n * laguerre(n + 1, 0, x)
        else:
            num, den = laguerre(n, 1, x), (n + 1) * laguerre(n, 0, x)
        if abs(den) < 1e-14 * max(1.0, abs(num)):
            raise NumericalError(
                f"deformation denominator vanishes at n={n} for eta={spec.eta}; "
                "change eta or the truncation"
            )
        val = num / den
    if not math.isfinite(val) or val == 0.0:
        raise NumericalError(f"f({n}) = {val} is not finite and nonzero (eta={spec.eta})")
    return float(val)


def f_values(spec: DeformationSpec, nmax: int) -> np.ndarray:
    return np.array([f_value(spec, n) for n in range(nmax + 1)])


@dataclass(frozen=True, eq=False)
class StateSpec:
    kind: str
    coeffs: np.ndarray
    truncation: int
    amplitude: complex = 0.0
    level: int = 0
    deformation: DeformationSpec = field(default_factory=DeformationSpec)
    tail_bound: float = 0.0

    def __post_init__(self):
        self.coeffs.setflags(write=False)

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))


@dataclass(frozen=True)
class QuadratureMoments:
    mean_q: float
    mean_p: float
    sigma_qq: float
    sigma_pp: float
    sigma_pq: float
    correlation_r: float


def _series(amplitude: complex, fvals: np.ndarray) -> np.ndarray:
    """Unnormalised beta^n / (sqrt(n!) [f(n)]!) by the recurrence c_n = c_{n-1} beta / (sqrt(n) f(n))."""
    c = np.empty(len(fvals), dtype=complex)
    c[0] = 1.0
    for n in range(1, len(fvals)):
        c[n] = c[n - 1] * amplitude / (math.sqrt(n) * fvals[n])
    return c


def make_state(
    kind: str = "coherent",
    amplitude: complex = 0.0,
    level: int = 0,
    deformation: DeformationSpec | None = None,
    truncation: int = 40,
) -> StateSpec:
    """Build a coherent, number or f-coherent state truncated at ``truncation``.

    The normalisation sum runs over an extended range beyond the truncation;
    the weight left outside ``0..truncation`` is stored as ``tail_bound`` and
    must stay below 1e-8.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown state kind {kind!r}; choose from {KINDS}")
    if truncation < 1:
        raise ValueError(f"truncation must be >= 1, got {truncation}")
    amplitude = complex(amplitude)
    if not (math.isfinite(amplitude.real) and math.isfinite(amplitude.imag)):
        raise ValueError("amplitude must be finite")
    deformation = deformation or DeformationSpec()
    N = truncation

    if kind == "number":
        if not 0 <= level <= N:
            raise ValueError(f"number level {level} outside 0..{N}")
        c = np.zeros(N + 1, dtype=complex)
        c[level] = 1.0
        return StateSpec(kind, c, N, 0.0, level, deformation, 0.0)

    if kind == "coherent":
        deformation = DeformationSpec()
    n_ext = max(2 * N, N + 100)
    if deformation.variant == "custom_table":
        n_ext = min(n_ext, len(deformation.table) - 1)
        if n_ext < N:
            raise ValueError(f"custom f table too short for truncation {N}")
    fv = f_values(deformation, n_ext)
    raw = _series(amplitude, fv)
    weights = np.abs(raw) ** 2
    if not np.all(np.isfinite(weights)):
        raise NumericalError("coefficient series overflowed; reduce amplitude")
    total = math.fsum(weights)
    tail = math.fsum(weights[N + 1:])
    # geometric bound for whatever lies beyond the extended range
    if n_ext > N and weights[-2] > 0:
        ratio = weights[-1] / weights[-2]
        tail += weights[-1] * ratio / (1 - ratio) if ratio < 0.5 else weights[-1] * n_ext
    tail_bound = tail / total
    if tail_bound > TAIL_TOL:
        raise ValueError(
            f"truncation {N} too small for amplitude {amplitude}: tail weight {tail_bound:.2e} > {TAIL_TOL}"
        )
    c = raw[: N + 1] / math.sqrt(total)
    return StateSpec(kind, c, N, amplitude, 0, deformation, tail_bound)


def _psi0_parts(x, traj, t):
    e, d = epsilon_at(traj, t)
    x = np.asarray(x, dtype=float)
    psi0 = np.pi**-0.25 / sqrt_eps(traj, t) * np.exp(1j * d * x**2 / (2 * e))
    return e, d, x, psi0


def psi_number(m: int, x, traj: EpsilonTrajectory, t: float):
    """Squeezed and correlated number state Psi_m(x, t).

    ``(eps^*/(2 eps))^{m/2} / sqrt(m!) H_m(x/|eps|)`` is evaluated as
    ``(|eps|/eps)^m`` times the normalised Hermite polynomial, which avoids
    the branch of the square root altogether.
    """
    if m < 0:
        raise ValueError(f"level must be >= 0, got {m}")
    e, _, x, psi0 = _psi0_parts(x, traj, t)
    h = hermite_normalized(m, x / abs(e))[m]
    return (abs(e) / e) ** m * psi0 * h


def _psi_series(coeffs, x, traj, t):
    e, _, x, psi0 = _psi0_parts(x, traj, t)
    N = len(coeffs) - 1
    h = hermite_normalized(N, x / abs(e))
    phase = (abs(e) / e) ** np.arange(N + 1)
    amp = np.tensordot(coeffs * phase, h, axes=(0, 0))
    return psi0 * amp


def psi_state(state: StateSpec, x, traj: EpsilonTrajectory, t: float, closed_form: bool = True):
    """Wavefunction of ``state`` at time t.

    Coherent states use the Gaussian closed form unless ``closed_form`` is
    False; everything else is summed over the number states.
    """
    if state.kind == "coherent" and closed_form:
        a = state.amplitude
        e, _, x, psi0 = _psi0_parts(x, traj, t)
        expo = -abs(a) ** 2 / 2 - a**2 * np.conj(e) / (2 * e) + math.sqrt(2) * a * x / e
        return psi0 * np.exp(expo)
    return _psi_series(state.coeffs, x, traj, t)


def _fd5(f, x, h):
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def moments(state: StateSpec, traj: EpsilonTrajectory, t: float, method: str = "auto") -> QuadratureMoments:
    """Means, variances and covariance of position and momentum at time t.

    Coherent states use closed forms (sigma_pq = Re(eps' eps^*)/2).  Other
    states, or ``method="quadrature"``, integrate the wavefunction on a
    trapezoid grid with a five-point derivative stencil for momentum.
    """
    e, d = epsilon_at(traj, t)
    if state.kind == "coherent" and method == "auto":
        a = state.amplitude
        mq = math.sqrt(2) * (a * np.conj(e)).real
        mp = math.sqrt(2) * (a * np.conj(d)).real
        sqq, spp = abs(e) ** 2 / 2, abs(d) ** 2 / 2
        spq = (d * np.conj(e)).real / 2
    else:
        n_eff = state.truncation
        half = abs(e) * (12.0 + 2.0 * math.sqrt(2 * n_eff + 1))
        x = np.linspace(-half, half, 8001)
        dx = x[1] - x[0]

        def psi(xx):
            return psi_state(state, xx, traj, t, closed_form=(method == "auto"))

        p = psi(x)
        dp = _fd5(psi, x, 1e-4)
        dens = np.abs(p) ** 2
        norm = np.sum(dens) * dx
        if not np.isfinite(norm) or norm <= 0:
            raise NumericalError("wavefunction quadrature failed")
        mq = np.sum(x * dens) * dx / norm
        mp = (np.sum(np.conj(p) * (-1j) * dp) * dx).real / norm
        sqq = np.sum((x - mq) ** 2 * dens) * dx / norm
        spp = (np.sum(np.abs(dp) ** 2) * dx / norm) - mp**2
        spq = (np.sum(np.conj(p) * x * (-1j) * dp) * dx).real / norm - mq * mp
    r = spq / math.sqrt(sqq * spp)
    return QuadratureMoments(float(mq), float(mp), float(sqq), float(spp), float(spq), float(r))


def ladder_matrices(deformation: DeformationSpec, N: int):
    """Truncated (N+1)x(N+1) matrices of A, B = A f(A^dagger A) and F.

    F is the exact diagonal ``(n+1) f^2(n+1) - n f^2(n)``; it matches the
    truncated commutator ``B B^dagger - B^dagger B`` except on the last row.
    """
    if N < 2:
        raise ValueError(f"truncation must be >= 2, got {N}")
    fv = f_values(deformation, N + 1)
    n = np.arange(N + 1)
    A = np.diag(np.sqrt(n[1:].astype(float)), k=1)
    B = A @ np.diag(fv[: N + 1])
    F = np.diag((n + 1) * fv[1:] ** 2 - n * fv[: N + 1] ** 2)
    return A, B, F


def verify_eigenstate(state: StateSpec) -> float:
    """Norm of ``B c - beta c`` over rows below the truncation edge."""
    if state.kind not in ("coherent", "f_coherent"):
        raise ValueError(f"eigenstate check needs a coherent or f_coherent state, got {state.kind}")
    _, B, _ = ladder_matrices(state.deformation, max(state.truncation, 2))
    c = np.zeros(B.shape[0], dtype=complex)
    c[: len(state.coeffs)] = state.coeffs
    res = B @ c - state.amplitude * c
    return float(np.linalg.norm(res[: state.truncation]))
