"""Seeded random streams, Haar-random unitaries and random coupling phases.

Every realization of an ensemble owns its own :class:`RngStream`, keyed by
``(master_seed, stream_index)``. Streams are derived with
:class:`numpy.random.SeedSequence` spawn keys and drive a counter-based
Philox generator, so the result of a realization never depends on which
worker produced it or in what order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DimensionError

__all__ = [
    "RngStream",
    "PhaseDistribution",
    "sample_cue",
    "sample_phases",
]


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream for one realization.

    Parameters
    ----------
    master_seed : int
        Experiment-wide 64-bit seed.
    stream_index : int
        Non-negative index, one per realization.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2**64:
            raise ConfigurationError("master_seed must be a 64-bit unsigned integer")
        if int(self.stream_index) < 0:
            raise ConfigurationError("stream_index must be non-negative")

    def generator(self) -> np.random.Generator:
        """Return a fresh generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(int(self.master_seed), spawn_key=(int(self.stream_index),))
        return np.random.Generator(np.random.Philox(seq))


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


_SIGMA = {
    "uniform_pi": np.pi / np.sqrt(3.0),
    "cosine_of_uniform": 1.0 / np.sqrt(2.0),
}


@dataclass(frozen=True)
class PhaseDistribution:
    """Distribution of the zero-mean coupling phases ``xi``.

    ``kind`` is one of ``"uniform_pi"`` (uniform on [-pi, pi]),
    ``"cosine_of_uniform"`` (``cos(eta)`` with ``eta`` uniform on [-pi, pi])
    or ``"gaussian"`` (normal with standard deviation ``sigma``). For the first
    two ``sigma`` is fixed by the kind and filled in automatically.
    """

    kind: str = "uniform_pi"
    sigma: float | None = None

    def __post_init__(self):
        if self.kind in _SIGMA:
            if self.sigma is not None and not np.isclose(self.sigma, _SIGMA[self.kind]):
                raise ConfigurationError(
                    f"sigma of {self.kind!r} is fixed at {_SIGMA[self.kind]!r}, got {self.sigma!r}"
                )
            object.__setattr__(self, "sigma", float(_SIGMA[self.kind]))
        elif self.kind == "gaussian":
            if self.sigma is None or not self.sigma >= 0:
                raise ConfigurationError("gaussian phases need sigma >= 0")
            object.__setattr__(self, "sigma", float(self.sigma))
        else:
            raise ConfigurationError(f"unknown phase distribution kind {self.kind!r}")

    @classmethod
    def uniform_pi(cls) -> "PhaseDistribution":
        return cls("uniform_pi")

    @classmethod
    def cosine_of_uniform(cls) -> "PhaseDistribution":
        return cls("cosine_of_uniform")

    @classmethod
    def gaussian(cls, sigma: float = 1.0) -> "PhaseDistribution":
        return cls("gaussian", sigma)


def sample_cue(dim: int, rng) -> np.ndarray:
    """Draw a Haar-random unitary from CUE(dim).

    A complex Ginibre matrix (real and imaginary parts i.i.d. standard
    normal) is QR-factorized and each column of Q is multiplied by the phase
    of the matching diagonal entry of R. Without that correction the QR
    convention of LAPACK biases the distribution away from Haar measure.

    Parameters
    ----------
    dim : int
        Matrix dimension, at least 1.
    rng : RngStream or numpy.random.Generator

    Returns
    -------
    ndarray, shape (dim, dim), complex128
    """
    if int(dim) != dim or dim < 1:
        raise DimensionError(f"CUE dimension must be a positive integer, got {dim!r}")
    gen = _as_generator(rng)
    z = gen.standard_normal((dim, dim)) + 1j * gen.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def sample_phases(count: int, dist: PhaseDistribution, rng) -> np.ndarray:
    """Draw ``count`` i.i.d. coupling phases from ``dist``."""
    if int(count) != count or count < 1:
        raise ConfigurationError(f"count must be a positive integer, got {count!r}")
    if not isinstance(dist, PhaseDistribution):
        raise ConfigurationError(f"expected a PhaseDistribution, got {dist!r}")
    gen = _as_generator(rng)
    if dist.kind == "uniform_pi":
        return gen.uniform(-np.pi, np.pi, count)
    if dist.kind == "cosine_of_uniform":
        return np.cos(gen.uniform(-np.pi, np.pi, count))
    if dist.kind == "gaussian":
        return gen.normal(0.0, dist.sigma, count)
    raise ConfigurationError(f"unknown phase distribution kind {dist.kind!r}")
