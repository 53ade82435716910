"""Acceptance battery: one function per criterion, each returning a CheckResult.

Shared by ``iontomo check`` and ``tests/test_acceptance.py``.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import poisson

from .dynamics import TrapConfig, solve_epsilon, wronskian
from .phase_space import (
    fock_cross_tomogram,
    f_tomogram,
    gaussian_tomogram,
    tomogram_function,
    wigner_grid,
)
from .specfun import QuadratureSpec, integrate_1d
from .states import DeformationSpec, ladder_matrices, make_state, moments, psi_number, verify_eigenstate
from .tomography import (
    evolution_residual,
    inversion_quadrature,
    invert_to_wigner,
    photon_number_distribution,
    reconstruct_density_matrix,
)

SEED = 20240611
VOGEL_03 = DeformationSpec("vogel_lamb_dicke", 0.3)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float
    time_limit: float

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name}: {self.detail} ({self.seconds:.2f}s / {self.time_limit:.0f}s)"

    def as_dict(self) -> dict:
        return asdict(self)


def _timed(name, limit, fn):
    t0 = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t0
    return CheckResult(name, bool(ok) and dt < limit, detail, dt, limit)


def check_wronskian():
    def run():
        traj = solve_epsilon(TrapConfig(0.9, 2.0), 20.0)
        err = np.max(np.abs(wronskian(traj, traj.t_grid) + 2j))
        return err <= 1e-8, f"max|W+2i| = {err:.2e} <= 1e-8"
    return _timed("1 wronskian conservation", 1.0, run)


def check_uncertainty():
    def run():
        traj = solve_epsilon(TrapConfig(0.5, 2.0), 10.0)
        st = make_state("coherent", 0.7 + 0.3j)
        worst = 0.0
        for t in np.linspace(0.0, 10.0, 200):
            m = moments(st, traj, t)
            worst = max(worst, abs(m.sigma_qq * m.sigma_pp - m.sigma_pq**2 - 0.25))
        return worst <= 1e-9, f"max|det - 1/4| = {worst:.2e} <= 1e-9"
    return _timed("2 uncertainty minimisation", 1.0, run)


def check_linear_limit():
    def run():
        rng = np.random.default_rng(SEED)
        traj = solve_epsilon(TrapConfig(0.5, 2.0), 10.0)
        a = 0.8 + 0.2j
        coh = make_state("coherent", a)
        fco = make_state("f_coherent", a, deformation=DeformationSpec("identity"))
        worst = 0.0
        for _ in range(30):
            X, mu, nu = rng.uniform(-3, 3), rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)
            t = rng.uniform(0, 10)
            worst = max(worst, abs(f_tomogram(fco, traj, t, X, mu, nu) - gaussian_tomogram(coh, traj, t, X, mu, nu)))
        return worst <= 1e-8, f"max|f - gaussian| = {worst:.2e} <= 1e-8"
    return _timed("3 linear-limit reduction", 5.0, run)


def _x_integral(fn, s, scale):
    cut = s * (10.0 * scale + 4.0)
    return integrate_1d(fn, QuadratureSpec("trapezoid", 4001, cut)).value


def check_normalization():
    def run():
        rng = np.random.default_rng(SEED + 1)
        traj = solve_epsilon(TrapConfig(0.5, 2.0), 10.0)
        coh = make_state("coherent", 0.7 + 0.3j)
        fco = make_state("f_coherent", 0.6, deformation=VOGEL_03)
        worst = 0.0
        for _ in range(10):
            mu, nu, t = rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0, 10)
            s = np.hypot(mu, nu)
            forms = (
                lambda X: gaussian_tomogram(coh, traj, t, X, mu, nu),
                lambda X: f_tomogram(fco, traj, t, X, mu, nu),
                lambda X: fock_cross_tomogram(3, 3, traj, t, X, mu, nu).real,
            )
            for fn in forms:
                worst = max(worst, abs(_x_integral(fn, s, traj.scale()) - 1))
        return worst <= 1e-6, f"max|int w dX - 1| = {worst:.2e} <= 1e-6"
    return _timed("4 tomogram normalisation", 10.0, run)


EVOLUTION_POINTS = ((0.3, 0.8, 0.5, 1.1), (-0.5, 0.4, -0.9, 2.37), (1.0, -0.6, 0.7, 3.3))
EVOLUTION_STEPS = (4e-3, 2e-3, 1e-3)


def evolution_slopes(state, config=TrapConfig(0.5, 2.0), points=EVOLUTION_POINTS, steps=EVOLUTION_STEPS):
    traj = solve_epsilon(config, 5.0)
    fn = tomogram_function(state, traj)
    rows = []
    for pt in points:
        res = [abs(evolution_residual(fn, pt, (h, h, h), config)) for h in steps]
        slope = np.polyfit(np.log(steps), np.log(res), 1)[0]
        rows.append((pt, res, slope))
    return rows


def check_evolution():
    def run():
        slopes = []
        for st in (make_state("coherent", 0.8 + 0.2j), make_state("f_coherent", 0.6, deformation=VOGEL_03)):
            slopes += [row[2] for row in evolution_slopes(st)]
        ok = all(abs(s - 2) <= 0.2 for s in slopes)
        return ok, f"slopes in [{min(slopes):.3f}, {max(slopes):.3f}], need 2 +- 0.2"
    return _timed("5 evolution equation O(h^2)", 30.0, run)


def check_deformed_algebra():
    def run():
        N = 40
        _, B, F = ladder_matrices(VOGEL_03, N)
        comm = B @ B.conj().T - B.conj().T @ B
        err = np.max(np.abs((comm - F)[:N, :N]))
        st = make_state("f_coherent", 0.7, deformation=VOGEL_03, truncation=N)
        res = verify_eigenstate(st)
        return err <= 1e-10 and res <= 1e-8, f"commutator err {err:.2e} <= 1e-10, |Bc - beta c| = {res:.2e} <= 1e-8"
    return _timed("6 deformed algebra", 1.0, run)


def check_density_round_trip():
    def run():
        traj = solve_epsilon(TrapConfig(0.5, 2.0), 2.0)
        st = make_state("f_coherent", 0.6, deformation=VOGEL_03)
        c = st.coeffs[:9]
        dm0 = reconstruct_density_matrix(tomogram_function(st, traj, 0.0), 8)
        err0 = np.max(np.abs(dm0.entries - np.outer(c, c.conj())))
        dm1 = reconstruct_density_matrix(tomogram_function(st, traj, 1.2), 8)
        rep = dm1.report()
        ok = (
            err0 <= 1e-3
            and dm0.is_hermitian()
            and rep["hermitian"]
            and abs(rep["trace"] - 1) <= 1e-3
            and rep["min_eigenvalue"] >= -1e-3
            and rep["purity"] >= 0.995
        )
        return ok, (
            f"t=0 max|rho - cc*| = {err0:.2e} <= 1e-3; t=1.2 trace {rep['trace']:.6f}, "
            f"min eig {rep['min_eigenvalue']:.1e}, purity {rep['purity']:.6f}"
        )
    return _timed("7 density-matrix round trip", 60.0, run)


def check_wigner_round_trip():
    def run():
        traj = solve_epsilon(TrapConfig(0.5, 2.0), 2.0)
        quad = inversion_quadrature(traj, "wigner")
        st = make_state("coherent", 0.7 + 0.3j)
        axis = np.linspace(-5, 5, 41)
        rec = invert_to_wigner(tomogram_function(st, traj, 1.2), axis, axis, quad)
        direct = wigner_grid(st, traj, 1.2, axis, axis).values
        rel = np.max(np.abs(rec.values - direct)) / np.max(np.abs(direct))
        vac = make_state("coherent", 0.0)
        peak = invert_to_wigner(tomogram_function(vac, traj, 0.0), [0.0], [0.0], quad).values[0, 0]
        ok = rel <= 5e-3 and abs(peak - 2) <= 2e-2
        return ok, f"max rel err {rel:.2e} <= 5e-3; vacuum W(0,0) = {peak:.6f} (2 +- 2e-2)"
    return _timed("8 Wigner inversion round trip", 120.0, run)


def check_photon_numbers():
    def run():
        traj = solve_epsilon(TrapConfig(0.5, 2.0), 1.0)
        st = make_state("coherent", 0.8)
        pd = photon_number_distribution(tomogram_function(st, traj, 0.0), 10, 0.0)
        err = np.max(np.abs(pd.probs - poisson.pmf(np.arange(11), 0.64)))
        total = pd.total
        ok = err <= 1e-3 and abs(total - 1) <= 1e-3
        return ok, f"max|w(n) - Poisson| = {err:.2e} <= 1e-3; sum = {total:.6f}"
    return _timed("9 photon-number consistency", 60.0, run)


def check_position_density():
    def run():
        rng = np.random.default_rng(SEED + 2)
        traj = solve_epsilon(TrapConfig(0.5, 2.0), 10.0)
        st = make_state("f_coherent", 0.8, deformation=DeformationSpec("vogel_lamb_dicke", 0.4))
        worst = 0.0
        for _ in range(20):
            X, t = rng.uniform(-3, 3), rng.uniform(0, 10)
            psi = sum(c * psi_number(m, X, traj, t) for m, c in enumerate(st.coeffs))
            worst = max(worst, abs(f_tomogram(st, traj, t, X, 1.0, 0.0) - abs(psi) ** 2))
        return worst <= 1e-6, f"max|w(X,1,0) - |psi|^2| = {worst:.2e} <= 1e-6"
    return _timed("10 position-density oracle", 10.0, run)


CRITERIA = (
    check_wronskian,
    check_uncertainty,
    check_linear_limit,
    check_normalization,
    check_evolution,
    check_deformed_algebra,
    check_density_round_trip,
    check_wigner_round_trip,
    check_photon_numbers,
    check_position_density,
)


def run_all() -> list[CheckResult]:
    return [crit() for crit in CRITERIA]
