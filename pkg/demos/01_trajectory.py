"""The classical trajectory eps(t) behind every state in the trap.

Integrates eps'' + (1 + kappa^2 sin^2(Omega t)) eps = 0, checks the Wronskian
and compares a stable drive with one close to parametric resonance.
"""
import warnings

import numpy as np

from iontomo import TrapConfig, epsilon_at, solve_epsilon, wronskian

cfg = TrapConfig(kappa=0.5, omega_drive=2.0)
traj = solve_epsilon(cfg, t_max=20.0)
print(f"{traj.t_grid.size} grid points, step {traj.step:.5f}")

# eps(t) between grid points comes from quintic Hermite interpolation
for t in (0.0, 1.0, 5.5, 20.0):
    e, d = epsilon_at(traj, t)
    print(f"t = {t:5.2f}   eps = {e: .6f}   eps' = {d: .6f}")

# the Wronskian must stay at -2i; this is what keeps [A, A^dagger] = 1
drift = np.max(np.abs(wronskian(traj, traj.t_grid) + 2j))
print(f"max |W + 2i| on the grid: {drift:.2e}")

# |eps| bounded here, but near Omega ~ 1.2 the amplitude grows
print(f"stable drive: max|eps| = {traj.max_abs:.3f}")
with warnings.catch_warnings(record=True) as caught:
    warnings.simplefilter("always")
    hot = solve_epsilon(TrapConfig(1.0, 1.2), 60.0)
print(f"near resonance: max|eps| = {hot.max_abs:.1f}, flagged = {hot.resonant}")
for w in caught:
    print("  warning:", w.message)
