"""Monte Carlo estimation of SFF moments ``K_m(t) = <|tr U^t|^(2m)>``.

Each value ``|tr U^t|^(2m)`` is truncated to a multiple of ``2**-64`` and
then accumulated exactly, together with its exact square, in multi-limb
integer arrays. Integer addition is
associative, so merging accumulators from any partition of the realizations
reproduces single-pass accumulation bit for bit, and results do not depend
on the number of workers. Means and standard errors are computed from the
exact integer sums with a single final rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "MomentAccumulator",
    "SffCurve",
    "RescaledCurve",
    "finalize",
    "rescale",
    "smooth",
    "auto_window",
]

_LIMB_BITS = 32
_LIMB_MASK = (1 << _LIMB_BITS) - 1
_FRAC_BITS = 64
# values are stored as integers V = floor(v * 2**64); squares as V**2 exactly
_MAX_EXP = 447
# one spare limb each so shifted pieces of the largest values stay in range
_N_LIMBS = 17
_N_LIMBS_SQ = 34
# each accumulate adds < 2**35 per limb; carries are propagated well before int64 overflow
_NORMALIZE_EVERY = 1 << 20


def _fixed_point(values: np.ndarray):
    """Split ``floor(v * 2**64)`` into ``(M, E)`` with ``V = M * 2**E``, ``M < 2**53``."""
    v = np.asarray(values, dtype=float).ravel()
    if not np.all(np.isfinite(v)) or np.any(v < 0):
        raise ValueError("power sums need finite non-negative values")
    if v.size and v.max() >= 2.0**_MAX_EXP:
        raise OverflowError("value exceeds the fixed-point accumulator range")
    big = np.floor(np.ldexp(v, _FRAC_BITS))
    frac, e = np.frexp(big)
    shift = np.maximum(e - 53, 0)
    mant = np.ldexp(big, -shift).astype(np.int64)
    return mant, shift


def _add_shifted(limbs, x, shift):
    # limbs[i] += x[i] * 2**shift[i] for 0 <= x < 2**54, split into limb-aligned pieces
    nl = limbs.shape[1]
    flat = limbs.reshape(-1)
    base = np.arange(x.size) * nl
    for chunk, s in ((x & _LIMB_MASK, shift), (x >> _LIMB_BITS, shift + _LIMB_BITS)):
        k, r = np.divmod(s, _LIMB_BITS)
        y = chunk << r
        idx = base + k
        flat[idx] += y & _LIMB_MASK
        flat[idx + 1] += y >> _LIMB_BITS


def _normalize(limbs: np.ndarray) -> None:
    for k in range(limbs.shape[-1] - 1):
        carry = limbs[..., k] >> _LIMB_BITS
        limbs[..., k] &= _LIMB_MASK
        limbs[..., k + 1] += carry


def _limbs_to_int(limbs) -> int:
    total = 0
    for k in range(len(limbs) - 1, -1, -1):
        total = (total << _LIMB_BITS) + int(limbs[k])
    return total


def _accumulate_into(sums, sumsq, values):
    """Add exact fixed-point values and their exact squares to flat limb arrays."""
    mant, shift = _fixed_point(values)
    _add_shifted(sums, mant, shift)
    # V^2 = (a 2^26 + b)^2 2^(2E) with a < 2^27, b < 2^26; each product < 2^54
    a = mant >> 26
    b = mant & ((1 << 26) - 1)
    _add_shifted(sumsq, a * a, 2 * shift + 52)
    _add_shifted(sumsq, a * b, 2 * shift + 27)
    _add_shifted(sumsq, b * b, 2 * shift)


@dataclass
class MomentAccumulator:
    """Running exact sums of ``|tr U^t|^(2m)`` and their squares.

    Parameters
    ----------
    tmax : int
        Times ``t = 1..tmax`` are tracked. ``t = 0`` never enters, which
        realizes the subtraction of the disconnected ``t = 0`` term.
    orders : tuple of int
        Moment orders ``m >= 1``.
    """

    tmax: int
    orders: tuple = (1,)
    n_realizations: int = 0
    _sum: np.ndarray = field(default=None, repr=False)
    _sumsq: np.ndarray = field(default=None, repr=False)
    _pending: int = field(default=0, repr=False, compare=False)

    def __post_init__(self):
        if int(self.tmax) != self.tmax or self.tmax < 1:
            raise ConfigurationError(f"tmax must be a positive integer, got {self.tmax!r}")
        orders = tuple(sorted(set(int(m) for m in self.orders)))
        if not orders or orders[0] < 1:
            raise ConfigurationError(f"moment orders must be a non-empty set of m >= 1, got {self.orders!r}")
        self.orders = orders
        if self._sum is None:
            self._sum = np.zeros((len(orders), int(self.tmax), _N_LIMBS), dtype=np.int64)
            self._sumsq = np.zeros((len(orders), int(self.tmax), _N_LIMBS_SQ), dtype=np.int64)

    def accumulate(self, traces: np.ndarray) -> "MomentAccumulator":
        """Add one realization given its traces ``tr U^t`` for ``t = 1..T``, ``T >= tmax``."""
        traces = np.asarray(traces)
        if traces.ndim != 1 or traces.size < self.tmax:
            raise ValueError(
                f"trace sequence of length {traces.size} is shorter than tmax={self.tmax}"
            )
        k = np.abs(traces[: self.tmax]) ** 2
        powers = np.stack([k**m for m in self.orders])
        flat_sum = self._sum.reshape(-1, _N_LIMBS)
        flat_sq = self._sumsq.reshape(-1, _N_LIMBS_SQ)
        _accumulate_into(flat_sum, flat_sq, powers)
        self.n_realizations += 1
        self._pending += 1
        if self._pending >= _NORMALIZE_EVERY:
            self._normalize()
        return self

    def _normalize(self):
        _normalize(self._sum)
        _normalize(self._sumsq)
        self._pending = 0

    def merge(self, other: "MomentAccumulator") -> "MomentAccumulator":
        """Return a new accumulator holding the realizations of both."""
        if other.tmax != self.tmax or other.orders != self.orders:
            raise ValueError("cannot merge accumulators with different tmax or orders")
        self._normalize()
        other._normalize()
        s = self._sum + other._sum
        sq = self._sumsq + other._sumsq
        _normalize(s)
        _normalize(sq)
        return MomentAccumulator(self.tmax, self.orders, self.n_realizations + other.n_realizations, s, sq)

    def exact_sums(self, order: int):
        """Exact ``(sum, sum of squares)`` for one order as integers in units of ``2**-64`` and ``2**-128``."""
        self._normalize()
        i = self.orders.index(order)
        return ([_limbs_to_int(x) for x in self._sum[i]],
                [_limbs_to_int(x) for x in self._sumsq[i]])

    def __eq__(self, other):
        if not isinstance(other, MomentAccumulator):
            return NotImplemented
        self._normalize()
        other._normalize()
        return (self.tmax == other.tmax and self.orders == other.orders
                and self.n_realizations == other.n_realizations
                and np.array_equal(self._sum, other._sum)
                and np.array_equal(self._sumsq, other._sumsq))


@dataclass
class SffCurve:
    """Averaged moments ``K_m(t)`` with standard errors of the mean.

    ``mean[order]`` and ``stderr[order]`` are arrays over ``t = 1..tmax``.
    """

    t: np.ndarray
    mean: dict
    stderr: dict
    n_realizations: int
    metadata: dict = field(default_factory=dict)

    @property
    def orders(self):
        return tuple(sorted(self.mean))


def finalize(acc: MomentAccumulator, metadata: dict | None = None) -> SffCurve:
    """Mean and standard error of the mean per ``(t, m)``; needs two or more realizations."""
    n = acc.n_realizations
    if n < 2:
        raise ValueError(f"standard errors need at least 2 realizations, got {n}")
    scale = 1 << _FRAC_BITS
    mean, stderr = {}, {}
    for m in acc.orders:
        s1, s2 = acc.exact_sums(m)
        mu = np.empty(acc.tmax)
        se = np.empty(acc.tmax)
        for j, (a, b) in enumerate(zip(s1, s2)):
            mu[j] = a / (n * scale)
            # var of mean = (n S2 - S1^2) / (n^2 (n-1)) in exact integers
            num = n * b - a * a
            se[j] = math.sqrt(num / (n * n * (n - 1) * scale * scale))
        mean[m] = mu
        stderr[m] = se
    return SffCurve(np.arange(1, acc.tmax + 1), mean, stderr, n, dict(metadata or {}))


@dataclass
class RescaledCurve:
    """Rescaled moments ``kappa_m(tau)`` with ``tau = t / N**L``."""

    t: np.ndarray
    tau: np.ndarray
    kappa: dict
    stderr: dict
    dim: int
    n_realizations: int
    metadata: dict = field(default_factory=dict)


def rescale(curve: SffCurve, N: int, L: int) -> RescaledCurve:
    """``kappa_m = (K_m/m!)^(1/m) / N^L`` with first-order error propagation."""
    d = int(N) ** int(L)
    kappa, stderr = {}, {}
    for m in curve.orders:
        base = curve.mean[m] / math.factorial(m)
        k = base ** (1.0 / m)
        kappa[m] = k / d
        with np.errstate(divide="ignore", invalid="ignore"):
            deriv = np.where(base > 0, base ** ((1.0 - m) / m) / (m * math.factorial(m)), np.inf)
        se = np.where(curve.stderr[m] > 0, curve.stderr[m] * deriv, 0.0)
        stderr[m] = se / d
    return RescaledCurve(curve.t.copy(), curve.t / d, kappa, stderr, d,
                         curve.n_realizations, dict(curve.metadata))


def auto_window(t) -> np.ndarray:
    """Time-dependent default window ``min(2 floor(t/10) + 1, 101)``."""
    t = np.asarray(t)
    return np.minimum(2 * (t // 10) + 1, 101)


def _window_array(window, t):
    if isinstance(window, str):
        if window != "auto":
            raise ConfigurationError(f"unknown smoothing window {window!r}")
        return auto_window(t)
    if int(window) != window or window < 1 or window % 2 == 0:
        raise ConfigurationError(f"smoothing window must be a positive odd integer, got {window!r}")
    if window > t.size:
        raise ConfigurationError(f"window {window} exceeds the number of times {t.size}")
    return np.full(t.size, int(window))


def _moving_average(values, se, widths):
    n = values.size
    csum = np.concatenate([[0.0], np.cumsum(values)])
    csq = np.concatenate([[0.0], np.cumsum(se * se)])
    idx = np.arange(n)
    half = widths // 2
    # windows are truncated at the ends
    lo = np.maximum(idx - half, 0)
    hi = np.minimum(idx + half + 1, n)
    cnt = hi - lo
    out = (csum[hi] - csum[lo]) / cnt
    out_se = np.sqrt(np.maximum(csq[hi] - csq[lo], 0.0)) / cnt
    return out, out_se


def smooth(curve, window="auto"):
    """Centered moving time average of an :class:`SffCurve` or :class:`RescaledCurve`.

    ``window`` is a positive odd integer or ``"auto"`` for :func:`auto_window`.
    Windows are truncated at the ends. Standard errors are combined
    as for independent times; ``window=1`` returns an identical copy.
    """
    widths = _window_array(window, curve.t)
    values = curve.kappa if isinstance(curve, RescaledCurve) else curve.mean
    new_vals, new_se = {}, {}
    for m in values:
        if np.all(widths == 1):
            new_vals[m], new_se[m] = values[m].copy(), curve.stderr[m].copy()
        else:
            new_vals[m], new_se[m] = _moving_average(values[m], curve.stderr[m], widths)
    meta = dict(curve.metadata, smoothing_window=window)
    if isinstance(curve, RescaledCurve):
        return RescaledCurve(curve.t.copy(), curve.tau.copy(), new_vals, new_se, curve.dim,
                             curve.n_realizations, meta)
    return SffCurve(curve.t.copy(), new_vals, new_se, curve.n_realizations, meta)
