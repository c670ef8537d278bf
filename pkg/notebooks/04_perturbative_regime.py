"""
Weak coupling
=============

For small Gamma the rescaled form factor dips below the plateau as
1 - Gamma^2 tau exp(-(Gamma tau)^2), with its minimum at tau = 1/(Gamma sqrt 2).
"""

# %%
import numpy as np

from rmtesff import PhaseDistribution, make_config, perturbative_sff, run_experiment
from rmtesff.theory import epsilon_for_gamma

Gamma = 0.5
tau = np.linspace(0.05, 6, 8)
print(np.round(perturbative_sff(Gamma, tau), 4))
print("minimum at", 1 / (Gamma * np.sqrt(2)), "value", 1 - Gamma / np.sqrt(2 * np.e))

# %%
eps = epsilon_for_gamma(Gamma, 8, 2, PhaseDistribution.uniform_pi())
b = run_experiment(make_config(model="rmte", N=8, L=2, epsilon=eps, realizations=2000,
                               tmax=4 * 64, seed=7))
for j in range(16, 256, 32):
    pert = b.theory_perturbative[j]
    print(f"tau={b.kappa.tau[j]:.3f}  kappa={b.kappa.kappa[1][j]:.4f}  perturbative={pert:.4f}")
