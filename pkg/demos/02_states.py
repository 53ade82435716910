"""Coherent, number and nonlinear coherent states of the invariant A.

Shows the Fock coefficients, the squeezing carried by eps(t), and the
deformed ladder operator B = A f(A^dagger A) acting on an f-coherent state.
"""
import numpy as np

from iontomo import (
    DeformationSpec,
    TrapConfig,
    ladder_matrices,
    make_state,
    moments,
    solve_epsilon,
    verify_eigenstate,
)

traj = solve_epsilon(TrapConfig(0.5, 2.0), 10.0)

coh = make_state("coherent", 0.7 + 0.3j)
print("coherent |c_n|^2 for n <= 5:", np.round(np.abs(coh.coeffs[:6]) ** 2, 5))

# variances breathe with the trap, the uncertainty product stays minimal
print("\n    t    s_qq     s_pp     s_pq      det")
for t in np.linspace(0, 10, 6):
    m = moments(coh, traj, t)
    det = m.sigma_qq * m.sigma_pp - m.sigma_pq**2
    print(f"{t:5.1f} {m.sigma_qq:8.4f} {m.sigma_pp:8.4f} {m.sigma_pq:8.4f} {det:8.5f}")

# Lamb-Dicke deformation; eta -> 0 gives back the ordinary coherent state
lamb = DeformationSpec("vogel_lamb_dicke", eta=0.3)
fco = make_state("f_coherent", 0.7, deformation=lamb)
print("\nf-coherent |c_n|^2:", np.round(np.abs(fco.coeffs[:6]) ** 2, 5))
print(f"tail weight beyond n = {fco.truncation}: {fco.tail_bound:.1e}")
print(f"|B c - beta c| = {verify_eigenstate(fco):.1e}")

_, B, F = ladder_matrices(lamb, 12)
comm = B @ B.T - B.T @ B
print("diag [B, B^dagger]:", np.round(np.diag(comm)[:5], 5))
print("diag F:            ", np.round(np.diag(F)[:5], 5))

m = moments(fco, traj, 3.0)
print(f"\nf-coherent at t=3: <q>={m.mean_q:.4f} <p>={m.mean_p:.4f} r={m.correlation_r:.4f}")
