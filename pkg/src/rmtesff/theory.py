"""Closed-form predictions for the SFF of the extended RMTE.

Conventions: ``t`` is the integer time, ``d = N**L`` the total dimension,
``tau = t/d`` the rescaled time, ``tau_SH = N**(1-L)`` the rescaled subsystem
Heisenberg time and ``tau_H = 1``. Functions accept scalar or array times.
All predictions extended past ``t = N`` include the CUE plateaus; that
extension is approximate around the Heisenberg time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConfigurationError, RegimeError
from .rand_unitary import PhaseDistribution
from .rotor import bessel_j0

__all__ = [
    "chi_abs",
    "cue_sff_moment",
    "sff_prediction",
    "scaling_gamma",
    "epsilon_for_gamma",
    "scaled_sff_prediction",
    "ThoulessTime",
    "thouless_time",
    "moment2_prediction",
    "perturbative_sff",
    "ehrenfest_time",
    "rescale_moment",
    "TheoryCurve",
    "theory_curve",
]


def chi_abs(dist: PhaseDistribution, epsilon: float) -> float:
    """Modulus of the characteristic function ``|<exp(i eps xi)>|``."""
    if not epsilon >= 0:
        raise ConfigurationError(f"epsilon must be >= 0, got {epsilon!r}")
    if dist.kind == "uniform_pi":
        if epsilon == 0:
            return 1.0
        # reduce first so integer eps gives an exact zero
        r = math.fmod(epsilon, 1.0)
        return abs(math.sin(math.pi * r)) / (math.pi * epsilon)
    if dist.kind == "cosine_of_uniform":
        return abs(bessel_j0(epsilon))
    if dist.kind == "gaussian":
        return math.exp(-0.5 * (dist.sigma * epsilon) ** 2)
    raise ConfigurationError(f"unknown phase distribution kind {dist.kind!r}")


def cue_sff_moment(M: int, m: int, t):
    """``m! min(t, M)^m``, the m-th SFF moment of CUE(M)."""
    return math.factorial(m) * np.minimum(t, M) ** m * 1.0


def _decay(chi, t):
    # |chi|^(2t)
    return np.power(float(chi), 2.0 * np.asarray(t, dtype=float))


def sff_prediction(N: int, L: int, epsilon: float, dist: PhaseDistribution, t):
    """Convex combination ``chi^2t K_N(t)^L + (1 - chi^2t) K_{N^L}(t)``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 1):
        raise ConfigurationError("times must be >= 1")
    p = _decay(chi_abs(dist, epsilon), t)
    out = p * np.minimum(t, N) ** L + (1.0 - p) * np.minimum(t, float(N) ** L)
    return out[()] if out.ndim == 0 else out


def scaling_gamma(N: int, L: int, epsilon: float, dist: PhaseDistribution) -> float:
    """Scaling parameter ``Gamma = sigma eps N^(L/2)``."""
    return dist.sigma * epsilon * N ** (L / 2)


def epsilon_for_gamma(Gamma: float, N: int, L: int, dist: PhaseDistribution) -> float:
    """Coupling ``eps`` that produces the scaling parameter ``Gamma``."""
    return Gamma / (dist.sigma * N ** (L / 2))


def scaled_sff_prediction(Gamma: float, L: int, N: int, tau):
    """Universal form ``exp(-Gamma^2 tau) min(tau/tau_SH, 1)^L + (1 - exp(-Gamma^2 tau)) min(tau, 1)``."""
    tau = np.asarray(tau, dtype=float)
    tau_sh = float(N) ** (1 - L)
    w = np.exp(-Gamma**2 * tau)
    out = w * np.minimum(tau / tau_sh, 1.0) ** L + (1.0 - w) * np.minimum(tau, 1.0)
    return out[()] if out.ndim == 0 else out


class ThoulessTime(NamedTuple):
    t: float
    tau: float


def thouless_time(N: int, L: int, epsilon: float, dist: PhaseDistribution) -> ThoulessTime:
    """``t_Th = L ln N / (2 |ln chi|)`` and ``tau_Th = t_Th / N^L``.

    Raises :class:`RegimeError` when ``chi`` is 0 (instantaneous) or 1 (never).
    """
    chi = chi_abs(dist, epsilon)
    if not 0.0 < chi < 1.0:
        raise RegimeError(f"Thouless time undefined for |chi| = {chi!r}")
    t = L * math.log(N) / (2.0 * abs(math.log(chi)))
    return ThoulessTime(t, t / float(N) ** L)


def moment2_prediction(N: int, epsilon: float, dist: PhaseDistribution, t, literal: bool = False):
    """Second SFF moment of the bipartite (L=2) RMTE.

    ``K_2 = K_{N^2,2} (1-p)^2 + K_{N,2}^2 p^2 + 4 K_{N^2} K_N^2 p (1-p)``
    with ``p = chi^(2t)``. With ``literal=True`` the first weight is
    ``(1 - chi)^2`` instead of ``(1 - chi^(2t))^2``; kept only to compare
    the two readings against Monte Carlo data.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 1):
        raise ConfigurationError("times must be >= 1")
    chi = chi_abs(dist, epsilon)
    p = _decay(chi, t)
    kn = np.minimum(t, N)
    kd = np.minimum(t, float(N) ** 2)
    first = (1.0 - chi) ** 2 if literal else (1.0 - p) ** 2
    out = first * 2.0 * kd**2 + p**2 * (2.0 * kn**2) ** 2 + 4.0 * p * (1.0 - p) * kd * kn**2
    return out[()] if out.ndim == 0 else out


def perturbative_sff(Gamma: float, tau):
    """Small-coupling result ``1 - Gamma^2 tau exp(-(Gamma tau)^2)`` for ``tau > tau_SH``."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau <= 0):
        raise ConfigurationError("tau must be > 0")
    out = 1.0 - Gamma**2 * tau * np.exp(-((Gamma * tau) ** 2))
    return out[()] if out.ndim == 0 else out


def ehrenfest_time(N: int, k1: float, k2: float) -> float:
    """Ehrenfest time estimate ``ln N / (2 ln(k1 k2 / 4))`` of the coupled rotors."""
    if not k1 * k2 > 4:
        raise RegimeError("Ehrenfest estimate needs k1*k2 > 4")
    return math.log(N) / (2.0 * math.log(k1 * k2 / 4.0))


def rescale_moment(K, m: int, dim: int):
    """``(K/m!)^(1/m) / dim``."""
    return (np.asarray(K, dtype=float) / math.factorial(m)) ** (1.0 / m) / dim


@dataclass
class TheoryCurve:
    """Sampled prediction ``kappa_m(tau)`` with its time scales."""

    tau: np.ndarray
    kappa: np.ndarray
    m: int
    gamma: float
    tau_sh: float
    tau_th: float | None
    regime: str
    tau_h: float = 1.0
    notes: dict = field(default_factory=dict)


def theory_curve(N: int, L: int, epsilon: float, dist: PhaseDistribution, t,
                 m: int = 1, regime: str = "exact-extended") -> TheoryCurve:
    """Evaluate a prediction on integer times ``t`` in rescaled units.

    ``regime="exact-extended"`` uses the convex combination (``m=1``) or the
    L=2 second-moment formula (``m=2``); ``"perturbative"`` is only defined
    for ``m=1`` and ``tau > tau_SH``, NaN elsewhere.
    """
    t = np.asarray(t, dtype=float)
    d = float(N) ** L
    tau = t / d
    gamma = scaling_gamma(N, L, epsilon, dist)
    tau_sh = float(N) ** (1 - L)
    try:
        tau_th = thouless_time(N, L, epsilon, dist).tau
    except RegimeError:
        tau_th = None
    if regime == "exact-extended":
        if m == 1:
            kappa = sff_prediction(N, L, epsilon, dist, t) / d
        elif m == 2 and L == 2:
            kappa = rescale_moment(moment2_prediction(N, epsilon, dist, t), 2, d)
        else:
            raise ConfigurationError(f"no closed form for m={m}, L={L}")
    elif regime == "perturbative":
        if m != 1:
            raise ConfigurationError("the perturbative result covers m=1 only")
        kappa = np.where(tau > tau_sh, perturbative_sff(gamma, tau), np.nan)
    else:
        raise ConfigurationError(f"unknown regime {regime!r}")
    notes = {"plateau_extension": "approximate near tau_H"} if regime == "exact-extended" else {}
    return TheoryCurve(tau, np.asarray(kappa, dtype=float), m, gamma, tau_sh, tau_th, regime,
                       notes=notes)
