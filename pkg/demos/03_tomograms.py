"""Wigner functions and symplectic tomograms computed in closed form.

The tomogram w(X, mu, nu) is the distribution of X = mu q + nu p.  Homodyne
(optical) tomography is the circle mu = cos phi, nu = sin phi.
"""
import numpy as np

from iontomo import (
    DeformationSpec,
    TrapConfig,
    f_tomogram,
    gaussian_tomogram,
    make_state,
    solve_epsilon,
    wigner,
    wigner_grid,
)

traj = solve_epsilon(TrapConfig(0.5, 2.0), 5.0)
X = np.linspace(-8, 8, 3201)

coh = make_state("coherent", 0.8 + 0.2j)
fco = make_state("f_coherent", 0.8 + 0.2j, deformation=DeformationSpec("vogel_lamb_dicke", 0.4))

print(" phi   norm(coherent)  norm(f-coherent)  <X> coherent")
for phi in np.linspace(0, np.pi, 5):
    wc = gaussian_tomogram(coh, traj, 2.0, X, np.cos(phi), np.sin(phi))
    wf = f_tomogram(fco, traj, 2.0, X, np.cos(phi), np.sin(phi))
    print(f"{phi:4.2f}  {np.trapezoid(wc, X):.10f}    {np.trapezoid(wf, X):.10f}    {np.trapezoid(X * wc, X): .4f}")

# with the identity deformation the series collapses to the Gaussian
lin = make_state("f_coherent", 0.8 + 0.2j, deformation=DeformationSpec())
gap = np.max(np.abs(f_tomogram(lin, traj, 2.0, X, 0.6, 0.8) - gaussian_tomogram(coh, traj, 2.0, X, 0.6, 0.8)))
print(f"\nidentity deformation vs Gaussian: {gap:.1e}")

# Wigner function: vacuum peak is 2, a number state goes negative
print("\nW_vacuum(0,0) =", wigner(make_state("coherent", 0.0), traj, 0.0, 0.0, 0.0))
print("W_|1>(0,0)    =", wigner(make_state("number", level=1, truncation=2), traj, 0.0, 0.0, 0.0))

axis = np.linspace(-6, 6, 121)
grid = wigner_grid(fco, traj, 2.0, axis, axis)
i, j = np.unravel_index(np.argmax(grid.values), grid.values.shape)
print(f"f-coherent W at t=2 peaks at q={axis[i]:.1f}, p={axis[j]:.1f}; "
      f"integral/2pi = {grid.normalization():.6f}")
