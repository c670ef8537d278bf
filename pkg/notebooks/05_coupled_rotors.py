"""
Coupled kicked rotors
=====================

Two torus-quantized kicked rotors with random Bloch phases, coupled through
their positions. Their form factor follows the random matrix prediction
with chi = |J0(eps)|, eps = gamma N / (2 pi).
"""

# %%
import math

import numpy as np

from rmtesff import (RngStream, RotorParams, build_coupled_rotors, eigenphases, make_config,
                     run_experiment)
from rmtesff.rotor import rotor_effective_theory
from rmtesff.theory import ehrenfest_time

N = 8
p = RotorParams(N, gamma=0.4)
u = build_coupled_rotors(p, RngStream(8, 0))
print("dimension", u.shape, "unitarity error", np.abs(u.conj().T @ u - np.eye(N * N)).max())
print("eps, chi, Gamma:", rotor_effective_theory(p))
print("Ehrenfest time:", ehrenfest_time(N, p.k1, p.k2))

# %%
# Gamma = 5 at N = 8
eps = 5 * math.sqrt(2) / N
b = run_experiment(make_config(model="rotors", N=N, gamma=2 * math.pi * eps / N,
                               realizations=500, seed=8))
for j in range(4, 64, 8):
    print(f"tau={b.kappa.tau[j]:.3f}  kappa={b.kappa.kappa[1][j]:.4f}  rmte={b.theory_exact[1][j]:.4f}")

# %%
phi = eigenphases(u)
print("eigenphase histogram, one realization:", np.histogram(phi, bins=8, range=(-np.pi, np.pi))[0])
