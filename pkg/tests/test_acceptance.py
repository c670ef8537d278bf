"""Acceptance criteria 1-11 at full statistics.

Each test records one ``CRITERION n: PASS|FAIL ...`` line, printed in the
session summary. Monte Carlo runs are cached per session since several
criteria share one run. Total runtime is several minutes on one core.
"""
import functools
import math

import numpy as np
import pytest

from rmtesff import (MomentAccumulator, PhaseDistribution, RngStream, build_rmte, eigenphases,
                     emit_results, run_experiment, sample_cue, thouless_time, trace_powers)
from rmtesff.ensemble import EnsembleParams
from rmtesff.experiment import make_config
from rmtesff.theory import epsilon_for_gamma, moment2_prediction, perturbative_sff, rescale_moment

pytestmark = pytest.mark.slow

UNIFORM = PhaseDistribution.uniform_pi()
GAUSS1 = PhaseDistribution.gaussian(1.0)


def record(report, n, ok, detail):
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'} {detail}"
    print(line)
    report.append(line)
    return ok


@functools.lru_cache(maxsize=None)
def run(**kw):
    return run_experiment(make_config(**kw))


def rmte(N, L, eps, realizations, seed, dist="uniform_pi", sigma=None, **kw):
    return run(model="rmte", N=N, L=L, epsilon=eps, dist=dist, sigma=sigma,
               realizations=realizations, seed=seed, **kw)


def eps_for(Gamma, N, L, dist=UNIFORM):
    return epsilon_for_gamma(Gamma, N, L, dist)


# 1


def test_criterion_1_cue_baseline(acceptance_report):
    b = rmte(32, 1, 0.0, 2000, seed=101, tmax=100, window=1)
    k, se = b.raw.mean[1], b.raw.stderr[1]
    z = np.abs(k - np.minimum(b.raw.t, 32)) / se
    ok = record(acceptance_report, 1, bool(np.all(z < 4)),
                f"CUE(32) K(t) vs min(t,32), t<=100: max |z| = {z.max():.2f} (limit 4)")
    assert ok


# 2


def test_criterion_2_non_interacting(acceptance_report):
    b = rmte(8, 2, 0.0, 2000, seed=102, tmax=192, window=1)
    z = np.abs(b.raw.mean[1] - np.minimum(b.raw.t, 8) ** 2) / b.raw.stderr[1]
    ok = record(acceptance_report, 2, bool(np.all(z < 4)),
                f"N=8 L=2 eps=0 K(t) vs min(t,8)^2, t<=192: max |z| = {z.max():.2f} (limit 4)")
    assert ok


# 3


def test_criterion_3_convex_combination(acceptance_report):
    parts, ok = [], True
    for i, Gamma in enumerate((2.0, 5.0, 15.0)):
        b = rmte(8, 2, eps_for(Gamma, 8, 2), 4000, seed=103 + i)
        tau, kap, se = b.kappa.tau, b.kappa.kappa[1], b.kappa.stderr[1]
        th = b.theory_exact[1]
        sel = (tau > 1 / 8) & (tau < 1)
        near = sel & (np.abs(tau - 1) < 0.1)
        far = sel & ~near
        z = np.abs(kap - th)[far] / se[far]
        ratio = kap[near] / th[near]
        good = bool(np.all(z < 4) and np.all((ratio >= 0.5) & (ratio <= 2)))
        ok &= good
        parts.append(f"Gamma={Gamma:g}: max |z| = {z.max():.2f}, near-tau_H ratio "
                     f"[{ratio.min():.3f}, {ratio.max():.3f}]")
    record(acceptance_report, 3, ok, "; ".join(parts) + " (limits 4 s.e., [0.5, 2])")
    assert ok


# 4


def test_criterion_4_universality(acceptance_report):
    runs = {
        "N8L2-uniform": rmte(8, 2, eps_for(5, 8, 2), 4000, seed=103 + 1),
        "N8L2-gauss": rmte(8, 2, eps_for(5, 8, 2, GAUSS1), 4000, seed=107, dist="gaussian",
                           sigma=1.0),
        "N4L3-uniform": rmte(4, 3, eps_for(5, 4, 3), 4000, seed=108),
    }
    names = list(runs)
    tau = runs[names[0]].kappa.tau
    for b in runs.values():
        assert np.allclose(b.kappa.tau, tau)
    sel = tau > max(b.scales["tau_SH"] for b in runs.values())
    parts, ok = [], True
    for i in range(3):
        for j in range(i + 1, 3):
            a, c = runs[names[i]].kappa, runs[names[j]].kappa
            z = np.abs(a.kappa[1] - c.kappa[1]) / np.hypot(a.stderr[1], c.stderr[1])
            zmax = z[sel].max()
            ok &= bool(zmax < 5)
            parts.append(f"{names[i]} vs {names[j]}: max |z| = {zmax:.2f}")
    record(acceptance_report, 4, ok, "Gamma=5; " + "; ".join(parts) + " (limit 5)")
    assert ok


# 5


def test_criterion_5_thouless_time(acceptance_report):
    eps = eps_for(5, 16, 2)
    b = rmte(16, 2, eps, 2000, seed=109, tmax=256)
    tau, kap = b.kappa.tau, b.kappa.kappa[1]
    close = (tau > b.scales["tau_SH"]) & (np.abs(kap / np.minimum(tau, 1) - 1) <= 0.1)
    tau_th = thouless_time(16, 2, eps, UNIFORM).tau
    if not close.any():
        record(acceptance_report, 5, False, "smoothed kappa never within 10% of min(tau,1)")
        pytest.fail("no crossing")
    tau_x = tau[np.argmax(close)]
    ratio = tau_x / tau_th
    ok = record(acceptance_report, 5, bool(1 / 1.5 <= ratio <= 1.5),
                f"N=16 Gamma=5: crossing tau = {tau_x:.4f}, tau_Th = {tau_th:.4f}, "
                f"ratio = {ratio:.3f} (limit factor 1.5)")
    assert ok


# 6, 7


def _moments_run():
    return rmte(8, 2, eps_for(5, 8, 2), 8000, seed=110, moments=(1, 2, 3))


def test_criterion_6_second_moment(acceptance_report):
    b = _moments_run()
    eps = b.scales["epsilon"]
    tau, t = b.kappa.tau, b.kappa.t
    kap, se = b.kappa.kappa[2], b.kappa.stderr[2]
    sel = (tau > 1 / 8) & (tau < 1)
    z = np.abs(kap - b.theory_exact[2])[sel] / se[sel]
    literal = rescale_moment(moment2_prediction(8, eps, UNIFORM, t, literal=True), 2, 64)
    late = t > 3 * b.scales["t_Th"]
    z_lit = np.abs(kap - literal)[late] / se[late]
    ok = bool(np.all(z < 5) and np.all(z_lit > 10))
    record(acceptance_report, 6, ok,
           f"N=8 Gamma=5: kappa_2 max |z| = {z.max():.2f} (limit 5); literal reading "
           f"min |z| for t > 3 t_Th = {z_lit.min():.1f} (must exceed 10)")
    assert ok


def test_criterion_7_exponential_plateau(acceptance_report):
    b = _moments_run()
    t = b.smoothed.t
    k1, k2, k3 = (b.smoothed.mean[m] for m in (1, 2, 3))
    late = t > b.scales["t_Th"]
    r2, r3 = (k2 / k1**2)[late], (k3 / k1**3)[late]
    ok = bool(np.all((r2 >= 1.8) & (r2 <= 2.2)) and np.all((r3 >= 5) & (r3 <= 7)))
    record(acceptance_report, 7, ok,
           f"t > t_Th = {b.scales['t_Th']:.1f}: K2/K1^2 in [{r2.min():.3f}, {r2.max():.3f}], "
           f"K3/K1^3 in [{r3.min():.3f}, {r3.max():.3f}] (limits [1.8, 2.2], [5, 7])")
    assert ok


# 8


def test_criterion_8_perturbative(acceptance_report):
    b = rmte(16, 2, eps_for(0.2, 16, 2), 10000, seed=111)
    tau, kap, se = b.kappa.tau, b.kappa.kappa[1], b.kappa.stderr[1]
    sel = (tau > 2 / 16) & (tau < 3)
    z = np.abs(kap - perturbative_sff(0.2, tau))[sel] / se[sel]
    ok = record(acceptance_report, 8, bool(np.all(z < 5)),
                f"N=16 Gamma=0.2: max |z| = {z.max():.2f} at tau = {tau[sel][np.argmax(z)]:.3f} "
                f"(limit 5)")
    assert ok


# 9


def test_criterion_9_coupled_rotors(acceptance_report):
    N = 16
    eps = 5 * math.sqrt(2) / N
    b = run(model="rotors", N=N, gamma=2 * math.pi * eps / N, realizations=2000, seed=112)
    assert b.scales["Gamma"] == pytest.approx(5.0)
    tau, kap, th = b.kappa.tau, b.kappa.kappa[1], b.theory_exact[1]
    sel = (tau > 3 / N) & (tau < 1)
    rel = np.abs(kap / th - 1)[sel]
    ok = record(acceptance_report, 9, bool(np.all(rel <= 0.15)),
                f"rotors N=16 Gamma=5: max relative deviation = {rel.max():.3f} (limit 0.15)")
    assert ok


# 10


def test_criterion_10_determinism(acceptance_report, tmp_path):
    cfg = make_config(model="rmte", N=4, L=2, epsilon=0.3, realizations=64, moments="1,2",
                      seed=113)
    blobs = {}
    for w in (1, 4, 8):
        emit_results(run_experiment(cfg, workers=w), "csv", tmp_path / str(w))
        blobs[w] = (tmp_path / str(w) / "results.csv").read_bytes()
    ok = record(acceptance_report, 10, blobs[1] == blobs[4] == blobs[8],
                "CSV bytes identical for 1, 4 and 8 workers")
    assert ok


# 11


def test_criterion_11_micro_oracles(acceptance_report):
    gen = RngStream(114, 0).generator()
    # Kronecker spectrum, N=2, L=2
    u1, u2 = sample_cue(2, gen), sample_cue(2, gen)
    a = eigenphases(np.kron(u1, u2))
    sums = np.add.outer(eigenphases(u1), eigenphases(u2)).ravel()
    expect = np.angle(np.exp(1j * sums))
    dist = np.abs(np.angle(np.exp(1j * (np.sort(a)[:, None] - np.sort(expect)[None, :]))))
    kron_err = dist.min(axis=1).max()
    # traces against explicit matrix powers, N=4
    u = build_rmte(EnsembleParams(4, 2, 0.3, UNIFORM), gen)
    tr = trace_powers(eigenphases(u), 16)
    ref = [np.trace(np.linalg.matrix_power(u, t)) for t in range(1, 17)]
    trace_err = np.max(np.abs(tr - ref))
    # merge associativity, bitwise
    accs = []
    for _ in range(3):
        acc = MomentAccumulator(16, (1, 2, 3))
        for _ in range(5):
            acc.accumulate(gen.normal(size=16) * 30 + 1j * gen.normal(size=16))
        accs.append(acc)
    assoc = accs[0].merge(accs[1]).merge(accs[2]) == accs[0].merge(accs[1].merge(accs[2]))
    ok = bool(kron_err < 1e-12 and trace_err < 1e-10 and assoc)
    record(acceptance_report, 11, ok,
           f"Kronecker spectrum err = {kron_err:.1e} (1e-12), trace vs matrix power err = "
           f"{trace_err:.1e} (1e-10), merge associative = {assoc}")
    assert ok
