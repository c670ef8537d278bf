"""Experiment runner: parallel realizations, theory comparison, serialization."""
from __future__ import annotations

import csv
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .ensemble import EnsembleParams, build_rmte, eigenphases, trace_powers
from .errors import ConfigurationError, NumericError, RegimeError
from .estimator import MomentAccumulator, RescaledCurve, SffCurve, finalize, rescale, smooth
from .rand_unitary import PhaseDistribution, RngStream
from .rotor import RotorParams, build_coupled_rotors, rotor_effective_theory
from .theory import (ehrenfest_time, moment2_prediction, perturbative_sff, rescale_moment,
                     scaling_gamma, sff_prediction, thouless_time, chi_abs)

__all__ = [
    "ExperimentConfig",
    "ResultBundle",
    "CSV_COLUMNS",
    "load_config_file",
    "run_experiment",
    "emit_results",
    "read_results",
]

log = logging.getLogger(__name__)

CSV_COLUMNS = ["t", "tau", "m", "kappa_mean", "kappa_stderr", "theory_exact",
               "theory_perturbative", "n_realizations"]


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one experiment.

    ``model="rmte"`` takes ``epsilon`` (and ``L``, ``dist``); ``model="rotors"``
    takes ``gamma`` with ``L`` fixed to 2 and the cosine phase model for theory.
    ``window`` is an odd integer or ``"auto"``.
    """

    model: str = "rmte"
    N: int = 8
    L: int | None = None
    epsilon: float | None = None
    gamma: float | None = None
    dist: str | None = None
    sigma: float | None = None
    realizations: int = 1000
    tmax: int | None = None
    moments: tuple = (1,)
    seed: int = 0
    window: int | str = "auto"
    format: str = "csv"
    k1: float = 9.7
    k2: float = 10.5
    perturbative: bool = True

    def __post_init__(self):
        if self.model not in ("rmte", "rotors"):
            raise ConfigurationError(f"model must be 'rmte' or 'rotors', got {self.model!r}")
        if self.model == "rmte":
            if self.epsilon is None or self.gamma is not None:
                raise ConfigurationError("model 'rmte' needs epsilon and no gamma")
            if self.L is None:
                self.L = 2
            if self.dist is None:
                self.dist = "uniform_pi"
        else:
            if self.gamma is None or self.epsilon is not None:
                raise ConfigurationError("model 'rotors' needs gamma and no epsilon")
            if self.L not in (None, 2):
                raise ConfigurationError("coupled rotors are bipartite, L must be 2")
            if self.dist not in (None, "cosine_of_uniform"):
                raise ConfigurationError("coupled rotors are modelled by cosine_of_uniform phases")
            self.L = 2
            self.dist = "cosine_of_uniform"
        self.moments = tuple(sorted(set(int(m) for m in self.moments)))
        if not self.moments:
            raise ConfigurationError("at least one moment order is required")
        if self.moments[0] < 1:
            raise ConfigurationError("moment orders must be >= 1")
        if int(self.realizations) != self.realizations or self.realizations < 2:
            raise ConfigurationError("realizations must be an integer >= 2")
        if self.format not in ("csv", "json"):
            raise ConfigurationError(f"format must be 'csv' or 'json', got {self.format!r}")
        if self.window != "auto":
            self.window = int(self.window)
            if self.window < 1 or self.window % 2 == 0:
                raise ConfigurationError("smoothing window must be a positive odd integer or 'auto'")
        # validates dimensions, budget and phase distribution
        self.phase_distribution()
        self.ensemble_params() if self.model == "rmte" else self.rotor_params()
        if self.tmax is None:
            self.tmax = 3 * self.dim
        if int(self.tmax) != self.tmax or self.tmax < 1:
            raise ConfigurationError("tmax must be a positive integer")
        if isinstance(self.window, int) and self.window > self.tmax:
            raise ConfigurationError("smoothing window exceeds tmax")

    @property
    def dim(self) -> int:
        return int(self.N) ** int(self.L)

    def phase_distribution(self) -> PhaseDistribution:
        return PhaseDistribution(self.dist, self.sigma)

    @property
    def effective_epsilon(self) -> float:
        return self.epsilon if self.model == "rmte" else self.rotor_params().epsilon

    def ensemble_params(self) -> EnsembleParams:
        return EnsembleParams(self.N, self.L, self.epsilon, self.phase_distribution())

    def rotor_params(self) -> RotorParams:
        return RotorParams(self.N, self.k1, self.k2, self.gamma)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["moments"] = list(self.moments)
        return d


_FIELD_TYPES = {
    "model": str, "N": int, "L": int, "epsilon": float, "gamma": float, "dist": str,
    "sigma": float, "realizations": int, "tmax": int, "seed": int, "format": str,
    "k1": float, "k2": float,
}


def _coerce(key, value):
    if value is None or isinstance(value, (int, float, tuple, list)) and key != "moments":
        return value
    if key == "moments":
        if isinstance(value, str):
            value = [v for v in value.replace(" ", "").split(",") if v]
        return tuple(int(v) for v in value)
    if key == "window":
        return value if str(value) == "auto" else int(value)
    if key == "perturbative":
        if isinstance(value, bool):
            return value
        return str(value).strip().lower() in ("1", "true", "yes", "on")
    if key in _FIELD_TYPES:
        return _FIELD_TYPES[key](value)
    raise ConfigurationError(f"unknown configuration key {key!r}")


def load_config_file(path) -> dict:
    """Parse a flat ``key = value`` file (``#`` starts a comment)."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            sep = "=" if "=" in line else ":"
            if sep not in line:
                raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split(sep, 1))
            out[key] = value
    return out


def make_config(**values) -> ExperimentConfig:
    """Build a config from loosely typed values (strings from files or flags)."""
    names = {f.name for f in fields(ExperimentConfig)}
    unknown = set(values) - names
    if unknown:
        raise ConfigurationError(f"unknown configuration keys: {sorted(unknown)}")
    return ExperimentConfig(**{k: _coerce(k, v) for k, v in values.items() if v is not None})


def _one_realization(cfg: ExperimentConfig, index: int) -> np.ndarray:
    gen = RngStream(cfg.seed, index).generator()
    try:
        if cfg.model == "rmte":
            u = build_rmte(cfg.ensemble_params(), gen)
        else:
            u = build_coupled_rotors(cfg.rotor_params(), gen)
        phases = eigenphases(u, seed_info=(cfg.seed, index))
    except NumericError as exc:
        raise NumericError(f"realization {index} failed: {exc}") from exc
    return trace_powers(phases, cfg.tmax)


def _run_chunk(cfg: ExperimentConfig, start: int, stop: int) -> MomentAccumulator:
    acc = MomentAccumulator(cfg.tmax, cfg.moments)
    for i in range(start, stop):
        acc.accumulate(_one_realization(cfg, i))
    return acc


def _chunks(n, parts):
    bounds = np.linspace(0, n, parts + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def accumulate_realizations(cfg: ExperimentConfig, workers: int = 1) -> MomentAccumulator:
    """Run all realizations, optionally on a process pool, and merge the sums."""
    workers = max(1, int(workers))
    if workers == 1:
        return _run_chunk(cfg, 0, cfg.realizations)
    chunks = _chunks(cfg.realizations, workers * 4)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_chunk, cfg, a, b) for a, b in chunks]
        accs = [f.result() for f in futures]
    total = accs[0]
    for acc in accs[1:]:
        total = total.merge(acc)
    return total


@dataclass
class ResultBundle:
    """Monte Carlo curves, matching theory and derived scales of one experiment."""

    config: ExperimentConfig
    raw: SffCurve
    smoothed: SffCurve
    kappa: RescaledCurve
    theory_exact: dict
    theory_perturbative: np.ndarray | None
    scales: dict = field(default_factory=dict)

    def rows(self):
        """CSV rows ordered by moment, then time."""
        n = self.raw.n_realizations
        for m in self.kappa.kappa:
            exact = self.theory_exact.get(m)
            for j, t in enumerate(self.kappa.t):
                pert = None
                if m == 1 and self.theory_perturbative is not None:
                    pert = self.theory_perturbative[j]
                yield {
                    "t": int(t),
                    "tau": float(self.kappa.tau[j]),
                    "m": int(m),
                    "kappa_mean": float(self.kappa.kappa[m][j]),
                    "kappa_stderr": float(self.kappa.stderr[m][j]),
                    "theory_exact": None if exact is None else float(exact[j]),
                    "theory_perturbative": pert,
                    "n_realizations": n,
                }

    def metadata(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "master_seed": self.config.seed,
            **self.scales,
            "version": __version__,
        }


def _scales(cfg: ExperimentConfig) -> dict:
    dist = cfg.phase_distribution()
    eps = cfg.effective_epsilon
    try:
        th = thouless_time(cfg.N, cfg.L, eps, dist)
        t_th, tau_th = th.t, th.tau
    except RegimeError:
        t_th = tau_th = None
    scales = {
        "epsilon": eps,
        "chi_abs": chi_abs(dist, eps),
        "Gamma": scaling_gamma(cfg.N, cfg.L, eps, dist),
        "tau_SH": float(cfg.N) ** (1 - cfg.L),
        "t_Th": t_th,
        "tau_Th": tau_th,
        "t_E": None,
    }
    if cfg.model == "rotors":
        eps_r, chi_r, gamma_r = rotor_effective_theory(cfg.rotor_params())
        scales.update(epsilon=eps_r, chi_abs=chi_r, Gamma=gamma_r,
                      t_E=ehrenfest_time(cfg.N, cfg.k1, cfg.k2))
    return scales


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> ResultBundle:
    """Run ``cfg.realizations`` realizations and compare them with theory.

    The result depends only on ``cfg``; ``workers`` changes wall time, never
    the numbers.
    """
    log.info("running %s N=%d L=%d realizations=%d tmax=%d on %d worker(s)",
             cfg.model, cfg.N, cfg.L, cfg.realizations, cfg.tmax, workers)
    acc = accumulate_realizations(cfg, workers)
    meta = {"config": cfg.to_dict(), "master_seed": cfg.seed}
    raw = finalize(acc, meta)
    smoothed = smooth(raw, cfg.window)
    kappa = rescale(smoothed, cfg.N, cfg.L)

    dist = cfg.phase_distribution()
    eps = cfg.effective_epsilon
    t = raw.t.astype(float)
    theory = {}
    for m in cfg.moments:
        if m == 1:
            theory[m] = sff_prediction(cfg.N, cfg.L, eps, dist, t) / cfg.dim
        elif m == 2 and cfg.L == 2:
            theory[m] = rescale_moment(moment2_prediction(cfg.N, eps, dist, t), 2, cfg.dim)
        else:
            theory[m] = None
    scales = _scales(cfg)
    pert = None
    if cfg.perturbative and 1 in cfg.moments:
        tau = t / cfg.dim
        pert = [float(v) if tau[j] > scales["tau_SH"] else None
                for j, v in enumerate(perturbative_sff(scales["Gamma"], tau))]
    return ResultBundle(cfg, raw, smoothed, kappa, theory, pert, scales)


def _fmt(value):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def _output_paths(path, fmt):
    path = Path(path)
    if fmt == "csv":
        return path / "results.csv", path / "results.meta.json"
    return path / "results.json", None


def emit_results(bundle: ResultBundle, fmt: str | None = None, path=".") -> list:
    """Write results to the directory ``path`` and return the written files.

    ``csv`` writes ``results.csv`` plus a ``results.meta.json`` sidecar;
    ``json`` writes a single ``results.json`` with metadata and rows.
    """
    fmt = fmt or bundle.config.format
    if fmt not in ("csv", "json"):
        raise ConfigurationError(f"unknown output format {fmt!r}")
    rows = list(bundle.rows())
    if not rows:
        raise ConfigurationError("nothing to write: empty moment set")
    data_path, meta_path = _output_paths(path, fmt)
    try:
        os.makedirs(data_path.parent, exist_ok=True)
        if fmt == "csv":
            with open(data_path, "w", newline="") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(CSV_COLUMNS)
                for row in rows:
                    writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
            with open(meta_path, "w") as fh:
                json.dump(bundle.metadata(), fh, indent=2, sort_keys=True)
                fh.write("\n")
            return [data_path, meta_path]
        with open(data_path, "w") as fh:
            json.dump({"metadata": bundle.metadata(), "columns": CSV_COLUMNS,
                       "rows": [[row[c] for c in CSV_COLUMNS] for row in rows]},
                      fh, indent=2, sort_keys=True)
            fh.write("\n")
        return [data_path]
    except OSError as exc:
        raise OSError(f"cannot write results to {data_path}: {exc}") from exc


def read_results(path):
    """Read a results file (CSV or JSON) back into column arrays and metadata.

    Empty CSV fields become NaN.
    """
    path = Path(path)
    if path.is_dir():
        path = path / "results.csv" if (path / "results.csv").exists() else path / "results.json"
    if path.suffix == ".json":
        with open(path) as fh:
            doc = json.load(fh)
        cols = list(zip(*doc["rows"])) if doc["rows"] else [[] for _ in doc["columns"]]
        table = {c: np.array([np.nan if v is None else v for v in col], dtype=float)
                 for c, col in zip(doc["columns"], cols)}
        meta = doc["metadata"]
    else:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            records = list(reader)
        table = {c: np.array([float(r[c]) if r[c] != "" else np.nan for r in records])
                 for c in CSV_COLUMNS}
        meta_path = path.with_name(path.stem + ".meta.json")
        meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
    for c in ("t", "m", "n_realizations"):
        table[c] = table[c].astype(int)
    return table, meta
