"""Extended random matrix transition ensemble (RMTE).

A realization is the Floquet operator

    U = U_c(eps) (U_1 kron U_2 kron ... kron U_L)

with independent CUE(N) factors ``U_i`` and a diagonal coupling ``U_c`` whose
entries are ``exp(i eps xi)``. Kronecker products use subsystem 1 as the
slowest-varying index, i.e. ``np.kron(U_1, np.kron(U_2, ...))``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import BudgetError, ConfigurationError, DimensionError, NumericError
from .rand_unitary import PhaseDistribution, RngStream, _as_generator, sample_cue, sample_phases

__all__ = [
    "DEFAULT_DIM_BUDGET",
    "EnsembleParams",
    "kron_all",
    "build_rmte",
    "eigenphases",
    "trace_powers",
    "unitarity_error",
]

DEFAULT_DIM_BUDGET = 2**16
UNITARITY_TOL = 1e-10


@dataclass(frozen=True)
class EnsembleParams:
    """Parameters of one extended-RMTE instance."""

    N: int
    L: int = 2
    epsilon: float = 0.0
    dist: PhaseDistribution = field(default_factory=PhaseDistribution.uniform_pi)
    dim_budget: int = DEFAULT_DIM_BUDGET

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise DimensionError(f"N must be a positive integer, got {self.N!r}")
        if int(self.L) != self.L or self.L < 1:
            raise DimensionError(f"L must be an integer >= 1, got {self.L!r}")
        if not self.epsilon >= 0:
            raise ConfigurationError(f"epsilon must be >= 0, got {self.epsilon!r}")
        # exact integer arithmetic, no float overflow
        if int(self.N) ** int(self.L) > self.dim_budget:
            raise BudgetError(
                f"N**L = {self.N}**{self.L} exceeds the dimension budget {self.dim_budget}"
            )

    @property
    def dim(self) -> int:
        return int(self.N) ** int(self.L)


def kron_all(factors) -> np.ndarray:
    """Kronecker product with the first factor as the slowest index."""
    return reduce(np.kron, factors)


def unitarity_error(u: np.ndarray) -> float:
    """Max-norm of ``U^dagger U - 1``."""
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def build_rmte(params: EnsembleParams, rng) -> np.ndarray:
    """Sample one realization of the extended RMTE Floquet operator.

    Both the ``L`` CUE factors and all ``N**L`` coupling phases are drawn
    fresh from ``rng``.
    """
    gen = _as_generator(rng)
    factors = [sample_cue(params.N, gen) for _ in range(params.L)]
    u = kron_all(factors)
    xi = sample_phases(params.dim, params.dist, gen)
    if params.epsilon != 0.0:
        # diagonal U_c acts on the rows
        u *= np.exp(1j * params.epsilon * xi)[:, None]
    return u


def _wrap(phases):
    # map to (-pi, pi]
    phases = np.asarray(phases, dtype=float)
    return np.where(phases <= -np.pi, phases + 2 * np.pi, phases)


def _eigvals_hermitian(u, cluster_tol):
    # Eigenvectors of the Hermitian part of a normal matrix diagonalize the
    # matrix itself, up to mixing inside near-degenerate clusters of
    # cos(phi). Those clusters are resolved by small general eigenproblems.
    _, w = np.linalg.eigh(0.5 * (u + u.conj().T))
    b = w.conj().T @ u @ w
    lam = np.diagonal(b).copy()
    off = np.abs(b) > cluster_tol
    np.fill_diagonal(off, False)
    if off.any():
        ncomp, labels = connected_components(off, directed=False)
        for c in range(ncomp):
            idx = np.flatnonzero(labels == c)
            if idx.size > 1:
                lam[idx] = np.linalg.eigvals(b[np.ix_(idx, idx)])
    return lam


def eigenphases(u: np.ndarray, method: str = "hermitian", check: bool = True,
                seed_info: tuple | None = None) -> np.ndarray:
    """Eigenphases of a unitary matrix, mapped to (-pi, pi].

    Parameters
    ----------
    u : ndarray, shape (d, d)
        Unitary matrix. Unitarity is verified first when ``check`` is set.
    method : {"hermitian", "schur"}
        ``"schur"`` calls the general dense eigensolver (Hessenberg/Schur
        reduction). ``"hermitian"`` diagonalizes the Hermitian part and
        resolves degenerate clusters separately; it is several times faster
        for d of a few hundred and falls back to ``"schur"`` if the phases
        do not reproduce ``tr U``.
    seed_info : (master_seed, stream_index), optional
        Attached to :class:`NumericError` for reproduction.

    Returns
    -------
    ndarray, shape (d,)
    """
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {u.shape}")
    seed, stream = seed_info if seed_info is not None else (None, None)
    d = u.shape[0]
    if check:
        err = unitarity_error(u)
        if not err < UNITARITY_TOL:
            raise NumericError(f"matrix is not unitary (max deviation {err:.3g})", seed, stream)
    try:
        if method == "hermitian":
            lam = _eigvals_hermitian(u, cluster_tol=1e-9)
            if not abs(np.sum(lam / np.abs(lam)) - np.trace(u)) <= 1e-10 * d:
                lam = np.linalg.eigvals(u)
        elif method == "schur":
            lam = np.linalg.eigvals(u)
        else:
            raise ConfigurationError(f"unknown eigensolver method {method!r}")
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigensolver failed: {exc}", seed, stream) from exc
    return _wrap(np.angle(lam))


def trace_powers(phases: np.ndarray, tmax: int, block: int = 64) -> np.ndarray:
    """Traces ``tr U^t = sum_j exp(i t phi_j)`` for ``t = 1..tmax``.

    Element ``k`` of the result holds ``t = k + 1``; there is no ``t = 0``
    entry. Each block of times starts from an exactly evaluated
    ``exp(i t0 phi)`` and is advanced by running phase rotation, so rounding
    does not accumulate beyond ``block`` steps.
    """
    if int(tmax) != tmax or tmax < 1:
        raise ConfigurationError(f"tmax must be a positive integer, got {tmax!r}")
    phases = np.asarray(phases, dtype=float)
    z = np.exp(1j * phases)
    out = np.empty(int(tmax), dtype=complex)
    for t0 in range(1, int(tmax) + 1, block):
        nb = min(block, int(tmax) - t0 + 1)
        steps = np.empty((nb, phases.size), dtype=complex)
        steps[0] = np.exp(1j * t0 * phases)
        steps[1:] = z
        np.cumprod(steps, axis=0, out=steps)
        out[t0 - 1:t0 - 1 + nb] = steps.sum(axis=1)
    return out
