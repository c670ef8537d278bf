import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rmtesff import MomentAccumulator, finalize, rescale, smooth
from rmtesff.errors import ConfigurationError
from rmtesff.estimator import SffCurve, auto_window


def _acc_from(rows, tmax, orders=(1, 2, 3)):
    acc = MomentAccumulator(tmax, orders)
    for r in rows:
        acc.accumulate(r)
    return acc


def _random_traces(rng, n, tmax, scale=10.0):
    return scale * (rng.standard_normal((n, tmax)) + 1j * rng.standard_normal((n, tmax)))


def test_identity_realization():
    d = 7
    acc = _acc_from([np.full(5, d + 0j)] * 2, 5, orders=(1,))
    c = finalize(acc)
    assert np.array_equal(c.mean[1], np.full(5, d**2.0))
    assert np.array_equal(c.stderr[1], np.zeros(5))


def test_identical_realizations_zero_stderr():
    tr = np.array([1 + 2j, 3.5, -0.25j, 11.0])
    c = finalize(_acc_from([tr, tr], 4))
    for m in (1, 2, 3):
        assert np.allclose(c.mean[m], np.abs(tr) ** (2 * m), rtol=1e-15)
        assert np.all(c.stderr[m] == 0)


def test_mean_and_stderr_match_two_pass(gen):
    x = _random_traces(gen, 300, 20)
    c = finalize(_acc_from(x, 20))
    for m in (1, 2, 3):
        v = np.abs(x) ** (2 * m)
        assert np.allclose(c.mean[m], v.mean(axis=0), rtol=1e-13)
        assert np.allclose(c.stderr[m], v.std(axis=0, ddof=1) / np.sqrt(300), rtol=1e-9)
        assert np.all(c.mean[m] >= 0)


def test_no_time_zero_entry():
    c = finalize(_acc_from(np.ones((3, 6)), 6))
    assert c.t[0] == 1 and c.t.size == 6


def test_longer_traces_are_truncated_and_short_rejected():
    acc = MomentAccumulator(4, (1,))
    acc.accumulate(np.arange(10.0))
    with pytest.raises(ValueError):
        acc.accumulate(np.ones(3))


def test_finalize_needs_two():
    acc = _acc_from([np.ones(3)], 3)
    with pytest.raises(ValueError):
        finalize(acc)


def test_bad_orders():
    with pytest.raises(ConfigurationError):
        MomentAccumulator(4, ())
    with pytest.raises(ConfigurationError):
        MomentAccumulator(4, (0, 1))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**32 - 1), st.data())
def test_merge_is_exact(n, seed, data):
    rng = np.random.default_rng(seed)
    scale = data.draw(st.sampled_from([1e-6, 1.0, 1e3]))
    x = _random_traces(rng, n, 8, scale)
    cut1 = data.draw(st.integers(0, n))
    cut2 = data.draw(st.integers(cut1, n))
    seq = _acc_from(x, 8)
    a, b, c = _acc_from(x[:cut1], 8), _acc_from(x[cut1:cut2], 8), _acc_from(x[cut2:], 8)
    assert a.merge(b).merge(c) == seq
    assert a.merge(b.merge(c)) == seq
    assert c.merge(a).merge(b) == seq
    assert np.array_equal(finalize(seq).mean[3], finalize(c.merge(b).merge(a)).mean[3])


def test_merge_rejects_mismatch():
    with pytest.raises(ValueError):
        MomentAccumulator(4, (1,)).merge(MomentAccumulator(5, (1,)))


def test_extended_range_values():
    # |tr|^6 for d ~ 1e3 spans ~1e18; tiny values coexist
    x = np.array([[1e3 + 0j, 1e-4], [2e3, 3e-4]])
    c = finalize(_acc_from(x, 2))
    assert c.mean[3][0] == pytest.approx((1e18 + 64e18) / 2, rel=1e-15)
    assert c.mean[1][1] == pytest.approx((1e-8 + 9e-8) / 2, rel=1e-9)


def test_stderr_decays_like_inverse_sqrt(gen):
    from rmtesff import sample_cue, eigenphases, trace_powers
    traces = [trace_powers(eigenphases(sample_cue(8, gen)), 16) for _ in range(1000)]
    se500 = finalize(_acc_from(traces[:500], 16, (1,))).stderr[1]
    se1000 = finalize(_acc_from(traces, 16, (1,))).stderr[1]
    ratio = se500 / se1000
    assert np.all(np.abs(ratio / np.sqrt(2) - 1) < 0.2)


def _curve(values, se=None, m=1):
    values = np.asarray(values, dtype=float)
    se = np.zeros_like(values) if se is None else np.asarray(se, dtype=float)
    return SffCurve(np.arange(1, values.size + 1), {m: values}, {m: se}, 10)


def test_rescale_first_moment():
    c = _curve([1.0, 8.0, 64.0], [0.5, 1.0, 2.0])
    r = rescale(c, 8, 2)
    assert np.allclose(r.tau, np.array([1, 2, 3]) / 64)
    assert np.allclose(r.kappa[1], np.array([1.0, 8.0, 64.0]) / 64)
    assert np.allclose(r.stderr[1], np.array([0.5, 1.0, 2.0]) / 64)


def test_rescale_second_moment_plateau():
    d = 64
    c = _curve([2.0 * d * d], [10.0], m=2)
    r = rescale(c, 8, 2)
    assert r.kappa[2][0] == pytest.approx(1.0)
    # d kappa/dK = 1 / (m d (K/m!)^((m-1)/m) m!)
    assert r.stderr[2][0] == pytest.approx(10.0 / (2 * d * d * 2))


def test_rescale_stderr_matches_finite_difference():
    K, se = 5000.0, 3.0
    c = _curve([K], [se], m=3)
    r = rescale(c, 4, 2)
    h = 1e-3
    f = lambda k: (k / 6) ** (1 / 3) / 16
    assert r.stderr[3][0] == pytest.approx(se * (f(K + h) - f(K - h)) / (2 * h), rel=1e-7)


def test_rescale_cue_input_gives_min_tau_one():
    M = 16
    t = np.arange(1, 3 * M + 1)
    for m in (1, 2, 3):
        c = SffCurve(t, {m: math.factorial(m) * np.minimum(t, M) ** m * 1.0}, {m: np.zeros(t.size)}, 2)
        r = rescale(c, 4, 2)
        assert np.allclose(r.kappa[m], np.minimum(r.tau, 1.0))


def test_smooth_window_one_is_identity():
    c = _curve([3.0, 1.0, 4.0, 1.0, 5.0], [0.1, 0.2, 0.3, 0.4, 0.5])
    s = smooth(c, 1)
    assert np.array_equal(s.mean[1], c.mean[1]) and np.array_equal(s.stderr[1], c.stderr[1])


def test_smooth_hand_example():
    s = smooth(_curve([1.0, 2.0, 3.0, 4.0]), 3)
    assert np.allclose(s.mean[1], [1.5, 2.0, 3.0, 3.5])


def test_smooth_stderr_independent_combination():
    s = smooth(_curve([0.0] * 5, [1.0, 2.0, 2.0, 2.0, 1.0]), 3)
    assert s.stderr[1][2] == pytest.approx(math.sqrt(12) / 3)
    assert s.stderr[1][0] == pytest.approx(math.sqrt(5) / 2)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 1e6), st.integers(1, 60), st.sampled_from([1, 3, 5, 11, "auto"]))
def test_smooth_constant_unchanged(value, n, window):
    if window != "auto" and window > n:
        return
    s = smooth(_curve([value] * n), window)
    assert np.allclose(s.mean[1], value, rtol=1e-12)


def test_smooth_rejects_bad_window():
    c = _curve([1.0, 2.0, 3.0])
    for w in (2, 0, 5, "wide"):
        with pytest.raises(ConfigurationError):
            smooth(c, w)


def test_auto_window():
    assert list(auto_window(np.array([1, 9, 10, 25, 499, 500, 5000]))) == [1, 1, 3, 5, 99, 101, 101]
