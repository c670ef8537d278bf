"""Two coupled quantum kicked rotors on the torus.

With ``1/h = N`` each rotor lives on an N-dimensional Hilbert space with
position grid ``q_n = (n + theta_q)/N`` and momentum grid
``p_m = (m + theta_p)/N``. The Bloch phases ``theta_q, theta_p`` break
time-reversal invariance for generic values and are averaged over as the
ensemble of realizations. The Floquet operator has the RMTE form

    U = U_c (U_1 kron U_2),
    U_i = exp(-i pi N p_i^2) exp(-i k_i N/(2 pi) cos(2 pi q_i)),
    U_c = exp(-i gamma N/(2 pi) cos(2 pi (q_1 + q_2))),

so the effective coupling is ``eps = gamma N / (2 pi)`` and the matching RMTE
uses ``xi = cos(eta)`` phases with ``chi(eps) = J0(eps)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError, DimensionError
from .rand_unitary import _as_generator

__all__ = [
    "RotorParams",
    "bessel_j0",
    "build_rotor_subsystem",
    "build_rotor_coupling",
    "rotor_effective_theory",
    "sample_boundary_phases",
    "build_coupled_rotors",
]

SIGMA_COS = 1.0 / math.sqrt(2.0)


def _j0_series(x):
    # sum_k (-1)^k (x^2/4)^k / (k!)^2, fine for |x| <= 8 (largest term ~ 1e2)
    y = -0.25 * x * x
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        term *= y / (k * k)
        total += term
        if abs(term) < 1e-17 * max(1.0, abs(total)):
            return total


def _j0_miller(x):
    # backward recurrence J_{k-1} = (2k/x) J_k - J_{k+1}, normalized by
    # J_0 + 2 (J_2 + J_4 + ...) = 1
    start = 2 * ((int(x) + 40) // 2)
    jp1, j = 0.0, 1e-30
    norm = 0.0
    for k in range(start, 0, -1):
        jm1 = (2.0 * k / x) * j - jp1
        jp1, j = j, jm1
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * j
        if abs(j) > 1e250:
            jp1 *= 1e-250
            j *= 1e-250
            norm *= 1e-250
    norm += j
    return j / norm


def _j0_asymptotic(x):
    # Hankel expansion; the smallest term is ~exp(-2x), negligible for x > 50
    p, q = 0.0, 0.0
    a = 1.0
    for k in range(0, 40):
        if k > 0:
            a *= (2 * k - 1) ** 2 / (k * 8.0 * x)
        if a < 1e-17:
            break
        if k % 2 == 0:
            p += a if (k // 2) % 2 == 0 else -a
        else:
            q += -a if ((k - 1) // 2) % 2 == 0 else a
    c, s = math.cos(x), math.sin(x)
    cos_chi = (c + s) / math.sqrt(2.0)
    sin_chi = (s - c) / math.sqrt(2.0)
    return math.sqrt(2.0 / (math.pi * x)) * (p * cos_chi - q * sin_chi)


def _j0_scalar(x):
    x = abs(float(x))
    if x <= 8.0:
        return _j0_series(x)
    if x <= 50.0:
        return _j0_miller(x)
    return _j0_asymptotic(x)


def bessel_j0(x):
    """Bessel function of the first kind of order zero.

    Power series for ``|x| <= 8``, Miller backward recurrence up to 50 and
    the Hankel asymptotic expansion beyond. Absolute accuracy is about
    1e-14 everywhere. Accepts scalars or arrays.
    """
    if np.ndim(x) == 0:
        return _j0_scalar(x)
    arr = np.asarray(x, dtype=float)
    return np.vectorize(_j0_scalar, otypes=[float])(arr)


@dataclass(frozen=True)
class RotorParams:
    """Parameters of a pair of coupled kicked rotors.

    ``N`` is the per-rotor Hilbert-space dimension (``1/h``). Boundary phases
    are in [0, 1). The effective RMTE coupling is derived, see
    :attr:`epsilon`.
    """

    N: int
    k1: float = 9.7
    k2: float = 10.5
    gamma: float = 0.0
    theta_q1: float = 0.0
    theta_p1: float = 0.0
    theta_q2: float = 0.0
    theta_p2: float = 0.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise DimensionError(f"rotor dimension N must be an integer >= 2, got {self.N!r}")
        if not self.gamma >= 0:
            raise ConfigurationError(f"gamma must be >= 0, got {self.gamma!r}")

    @property
    def epsilon(self) -> float:
        return self.gamma * self.N / (2 * math.pi)


def _grid(N, theta):
    return (np.arange(N) + theta) / N


def build_rotor_subsystem(N: int, k: float, theta_q: float = 0.0, theta_p: float = 0.0) -> np.ndarray:
    """Floquet operator ``U_kin U_kick`` of a single kicked rotor, position basis."""
    if int(N) != N or N < 2:
        raise DimensionError(f"rotor dimension N must be an integer >= 2, got {N!r}")
    N = int(N)
    q = _grid(N, theta_q)
    p = _grid(N, theta_p)
    n = np.arange(N) + theta_q
    m = np.arange(N) + theta_p
    # <q_n|p_m> with the boundary phases included
    fourier = np.exp(2j * np.pi * np.outer(n, m) / N) / np.sqrt(N)
    kin = np.exp(-1j * np.pi * N * p**2)
    kick = np.exp(-1j * k * N / (2 * np.pi) * np.cos(2 * np.pi * q))
    u_kin = (fourier * kin) @ fourier.conj().T
    return u_kin * kick[None, :]


def _coupling_diagonal(N, gamma, theta_q1, theta_q2):
    q1 = _grid(N, theta_q1)
    q2 = _grid(N, theta_q2)
    arg = np.cos(2 * np.pi * (q1[:, None] + q2[None, :])).ravel()
    return np.exp(-1j * gamma * N / (2 * np.pi) * arg)


def build_rotor_coupling(N: int, gamma: float, theta_q1: float = 0.0, theta_q2: float = 0.0) -> np.ndarray:
    """Diagonal coupling unitary on the N^2 product position grid (rotor 1 slowest)."""
    if int(N) != N or N < 2:
        raise DimensionError(f"rotor dimension N must be an integer >= 2, got {N!r}")
    return np.diag(_coupling_diagonal(int(N), gamma, theta_q1, theta_q2))


def rotor_effective_theory(params: RotorParams):
    """Return ``(epsilon, chi_abs, gamma_scaling)`` of the matching RMTE.

    ``chi_abs = |J0(epsilon)|`` and ``gamma_scaling = epsilon N / sqrt(2)``
    (``sigma = 1/sqrt(2)``, ``L = 2``).
    """
    eps = params.epsilon
    return eps, abs(bessel_j0(eps)), SIGMA_COS * eps * params.N


def sample_boundary_phases(params: RotorParams, rng) -> RotorParams:
    """Copy of ``params`` with all four Bloch phases drawn uniformly from [0, 1)."""
    gen = _as_generator(rng)
    tq1, tp1, tq2, tp2 = gen.random(4)
    return replace(params, theta_q1=tq1, theta_p1=tp1, theta_q2=tq2, theta_p2=tp2)


def build_coupled_rotors(params: RotorParams, rng=None) -> np.ndarray:
    """N^2-dimensional Floquet operator of the coupled rotors.

    With ``rng`` given, a realization draws fresh boundary phases first;
    otherwise the phases stored in ``params`` are used.
    """
    if rng is not None:
        params = sample_boundary_phases(params, rng)
    u1 = build_rotor_subsystem(params.N, params.k1, params.theta_q1, params.theta_p1)
    u2 = build_rotor_subsystem(params.N, params.k2, params.theta_q2, params.theta_p2)
    u = np.kron(u1, u2)
    if params.gamma != 0.0:
        u *= _coupling_diagonal(params.N, params.gamma, params.theta_q1, params.theta_q2)[:, None]
    return u
