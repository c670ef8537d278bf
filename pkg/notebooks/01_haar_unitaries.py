"""
Haar-random unitaries and the CUE form factor
=============================================

Sample CUE matrices from seeded streams and check that the spectral form
factor ramps linearly up to the Heisenberg time and then stays flat.
"""

# %%
import numpy as np

from rmtesff import RngStream, eigenphases, sample_cue, trace_powers

N = 32
u = sample_cue(N, RngStream(1, 0))
print("unitarity error:", np.abs(u.conj().T @ u - np.eye(N)).max())

# %%
# Every realization gets its own stream, so the average does not depend on
# the order (or the process) in which realizations run.
n = 500
sff = np.zeros(3 * N)
for i in range(n):
    phases = eigenphases(sample_cue(N, RngStream(1, i)))
    sff += np.abs(trace_powers(phases, 3 * N)) ** 2
sff /= n

t = np.arange(1, 3 * N + 1)
for tt in (1, 8, 16, 32, 64, 96):
    print(f"t={tt:3d}  K={sff[tt - 1]:6.2f}  min(t,N)={min(tt, N)}")
