"""Every tomogram here solves dw/dt - mu dw/dnu + omega^2(t) nu dw/dmu = 0.

The residual of centred differences should shrink four-fold per halving.
"""
import numpy as np

from iontomo import DeformationSpec, TrapConfig, evolution_residual, make_state, solve_epsilon, tomogram_function

cfg = TrapConfig(0.5, 2.0)
traj = solve_epsilon(cfg, 5.0)
states = {
    "coherent": make_state("coherent", 0.8 + 0.2j),
    "f-coherent": make_state("f_coherent", 0.6, deformation=DeformationSpec("vogel_lamb_dicke", 0.3)),
    "number |3>": make_state("number", level=3, truncation=5),
}
point = (0.3, 0.8, 0.5, 1.1)
hs = np.array([4e-3, 2e-3, 1e-3])

for name, st in states.items():
    w = tomogram_function(st, traj)
    res = np.array([abs(evolution_residual(w, point, (h, h, h), cfg)) for h in hs])
    slope = np.polyfit(np.log(hs), np.log(res), 1)[0]
    print(f"{name:11s} residuals {res}  slope {slope:.3f}")

# the same tomogram with the wrong trap frequency is not a solution
w = tomogram_function(states["coherent"], traj)
print("\nwrong omega(t):", abs(evolution_residual(w, point, (1e-3,) * 3, TrapConfig(0.0, 2.0))))
