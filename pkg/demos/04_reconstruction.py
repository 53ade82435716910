"""Recover the state from its tomogram.

Three linear inversions: the Wigner function, the Fock density matrix and the
photon-number distribution with a scanned local-oscillator amplitude.
"""
import numpy as np
from scipy.stats import poisson

from iontomo import (
    DeformationSpec,
    TrapConfig,
    inversion_quadrature,
    invert_to_wigner,
    make_state,
    photon_number_distribution,
    reconstruct_density_matrix,
    solve_epsilon,
    state_tomogram,
    tomogram_function,
    wigner_grid,
)

traj = solve_epsilon(TrapConfig(0.5, 2.0), 2.0)
state = make_state("f_coherent", 0.6, deformation=DeformationSpec("vogel_lamb_dicke", 0.3))
t = 1.2
w = tomogram_function(state, traj, t)

# density matrix in the lab (t = 0) number basis and in the moving basis of time t
rho = reconstruct_density_matrix(w, 6)
rho_inv = reconstruct_density_matrix(w, 6, frame=(traj, t))
c = state.coeffs[:7]
print("lab basis diagonal:   ", np.round(rho.entries.diagonal().real, 4))
print("moving basis diagonal:", np.round(rho_inv.entries.diagonal().real, 4))
print("|c_n|^2:              ", np.round(np.abs(c) ** 2, 4))
print("report:", rho.report())

# Wigner function back from the tomogram
axis = np.linspace(-4, 4, 17)
rec = invert_to_wigner(w, axis, axis, inversion_quadrature(traj, "wigner"))
ref = wigner_grid(state, traj, t, axis, axis).values
print(f"\nWigner round trip: max error {np.max(np.abs(rec.values - ref)):.1e}")

# photon statistics with a scanned amplitude a: occupation after displacing by a
coh = tomogram_function(make_state("coherent", 0.5), traj, 0.0)
for a in (0.0, 0.3, -0.5):
    pd = photon_number_distribution(coh, 5, a)
    print(f"a = {a:+.1f}: w(n) = {np.round(pd.probs, 4)}   Poisson(|0.5+a|^2) = "
          f"{np.round(poisson.pmf(np.arange(6), abs(0.5 + a) ** 2), 4)}")

# measured data arrive as sampled lines; here a synthetic grid stands in
mu = np.linspace(-8, 8, 40)
M, V = np.meshgrid(mu, mu, indexing="ij")
sampled = state_tomogram(state, traj, t, M.ravel(), V.ravel(), np.linspace(-10, 10, 161), scaled=True)
rho_s = reconstruct_density_matrix(sampled, 6)
print(f"\nfrom sampled lines: max |rho_s - rho| = {np.max(np.abs(rho_s.entries - rho.entries)):.1e}")
