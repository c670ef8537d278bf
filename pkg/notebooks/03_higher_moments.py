"""
Higher moments of the form factor
=================================

Past the Thouless time |tr U^t|^2 is exponentially distributed, so the
moment ratios K_2/K_1^2 and K_3/K_1^3 approach 2 and 6.
"""

# %%
from rmtesff import PhaseDistribution, make_config, run_experiment
from rmtesff.theory import epsilon_for_gamma

eps = epsilon_for_gamma(5.0, 8, 2, PhaseDistribution.uniform_pi())
b = run_experiment(make_config(model="rmte", N=8, L=2, epsilon=eps, moments="1,2,3",
                               realizations=2000, seed=6))
k = b.smoothed.mean
for t in (5, 20, 40, 64, 120):
    j = t - 1
    print(f"t={t:3d}  K2/K1^2={k[2][j] / k[1][j] ** 2:.3f}  K3/K1^3={k[3][j] / k[1][j] ** 3:.3f}")

# %%
# second moment against the closed form (rescaled units)
for j in range(8, 64, 8):
    print(f"tau={b.kappa.tau[j]:.3f}  kappa_2={b.kappa.kappa[2][j]:.4f}  "
          f"theory={b.theory_exact[2][j]:.4f}")
