"""Path simulation, uniformization, and the bound validation harness.

Core claims checked here: jump paths are reproducible from (seed, stream)
and occupy states at stationary frequencies; ergodic averages are exact on
hand-built paths; uniformized kernels generate endpoint laws
indistinguishable from stepping the kernel a Poisson number of times; the
Euler scheme has the right increment and stationary variances; per-path
seeds are prefix-stable in the path count; and the validator passes sound
certificates, flags unsound ones, and sits within noise of exact
stationary biases, including on adversarial tilted alternatives built to
nearly saturate the certificate.
"""

import math

import numpy as np
import pytest
from pytest import approx
from scipy.stats import chi2_contingency

from conftest import random_kernel, two_state_chain

from markov_uq import (
    EntropyRate,
    GeneratorMatrix,
    PathSample,
    SdeModel,
    assemble_bound,
    center_observable,
    ctmc_relent_rate,
    endpoint_states,
    ergodic_average,
    hypercube_kernel,
    invariant_measure,
    jump_decomposition,
    kappa_lambda,
    mminfty_generator,
    path_ergodic_averages,
    perturbed_model,
    relative_entropy,
    simulate_ctmc,
    simulate_em,
    step_dtmc,
    symmetrize,
    uniformize,
    validate_bound,
    xi_infimum,
)
from markov_uq.errors import (
    DimensionMismatchError,
    InvalidModelError,
    OutOfRangeError,
    SimulationBlowupError,
)


# -- path containers and exact averages -----------------------------------------------

def test_path_sample_validation():
    PathSample(np.array([1.0, 2.0]), np.array([0, 1, 0]), 3.0)
    with pytest.raises(OutOfRangeError):
        PathSample(np.array([]), np.array([0]), 0.0)
    with pytest.raises(DimensionMismatchError):
        PathSample(np.array([1.0]), np.array([0]), 3.0)
    with pytest.raises(OutOfRangeError):
        PathSample(np.array([0.0]), np.array([0, 1]), 3.0)
    with pytest.raises(OutOfRangeError):
        PathSample(np.array([3.0]), np.array([0, 1]), 3.0)
    with pytest.raises(OutOfRangeError):
        PathSample(np.array([2.0, 1.0]), np.array([0, 1, 0]), 3.0)


def test_ergodic_average_exact_on_hand_paths():
    f = np.array([2.0, 5.0])
    # single jump at T/2 between the two values: mean of the two
    path = PathSample(np.array([2.0]), np.array([0, 1]), 4.0)
    assert ergodic_average(path, f) == approx(3.5, abs=1e-15)
    # no jumps: the held value
    path = PathSample(np.array([]), np.array([1]), 7.0)
    assert ergodic_average(path, f) == approx(5.0, abs=1e-15)
    # three segments, hand-weighted
    path = PathSample(np.array([1.0, 3.0]), np.array([0, 1, 0]), 4.0)
    assert ergodic_average(path, f) == approx((2.0 + 10.0 + 2.0) / 4.0, abs=1e-15)


# -- jump-path simulation --------------------------------------------------------------

def test_simulate_ctmc_deterministic_per_seed_and_stream():
    gen = two_state_chain(1.0, 2.0)
    a = simulate_ctmc(gen, 0, 50.0, seed=5)
    b = simulate_ctmc(gen, 0, 50.0, seed=5)
    assert np.array_equal(a.jump_times, b.jump_times)
    assert np.array_equal(a.states, b.states)
    c = simulate_ctmc(gen, 0, 50.0, seed=5, stream=1)
    assert not np.array_equal(a.jump_times, c.jump_times)


def test_simulate_ctmc_occupation_matches_stationary_law():
    gen = two_state_chain(1.0, 2.0)
    mu = invariant_measure(gen)
    path = simulate_ctmc(gen, mu, 3000.0, seed=11)
    occupied = ergodic_average(path, np.array([0.0, 1.0]))
    assert occupied == approx(mu.weights[1], abs=0.03)


def test_simulate_ctmc_absorbing_state_holds_to_horizon():
    q = np.array([[0.0, 0.0], [1.0, -1.0]])
    gen = GeneratorMatrix(("0", "1"), q)
    path = simulate_ctmc(gen, 1, 10.0, seed=3)
    assert path.states[-1] == 0
    assert ergodic_average(path, np.array([1.0, 0.0])) > 0.5


def test_simulate_ctmc_validates_inputs():
    gen = two_state_chain(1.0, 2.0)
    with pytest.raises(OutOfRangeError):
        simulate_ctmc(gen, 0, 0.0, seed=1)
    with pytest.raises(InvalidModelError):
        simulate_ctmc(gen, np.array([0.5, 0.2]), 1.0, seed=1)


# -- discrete stepping and uniformization ----------------------------------------------

def test_step_dtmc_visits_states_at_stationary_frequencies():
    kern, mu, _ = hypercube_kernel(2)
    walk = step_dtmc(kern, 0, 20000, seed=7)
    assert walk[0] == 0
    assert walk.shape == (20001,)
    freq = np.bincount(walk, minlength=4) / walk.size
    assert freq == approx(mu.weights, abs=0.02)
    again = step_dtmc(kern, 0, 20000, seed=7)
    assert np.array_equal(walk, again)


def test_uniformize_preserves_invariant_measure():
    rng = np.random.default_rng(19)
    for _ in range(5):
        kern = random_kernel(rng, int(rng.integers(2, 6)))
        mu = invariant_measure(kern)
        gen = uniformize(kern, 2.5)
        assert np.abs(mu.weights @ gen.q).max() < 1e-12
        assert invariant_measure(gen).weights == approx(mu.weights, abs=1e-10)
    ident = uniformize(random_kernel(rng, 3), 1.0)
    assert ident.q.sum(axis=1) == approx(np.zeros(3), abs=1e-12)
    with pytest.raises(OutOfRangeError):
        uniformize(kern, 0.0)


def _poisson_epoch_endpoints(kern, start, t_horizon, n_paths, seed):
    # step the kernel a Poisson(t) number of times, one draw stream for all paths
    rng = np.random.default_rng(seed)
    steps = rng.poisson(t_horizon, size=n_paths)
    cum = np.cumsum(kern.p, axis=1)
    x = np.full(n_paths, start, dtype=np.int64)
    for k in range(int(steps.max())):
        act = steps > k
        u = rng.random(int(act.sum()))
        x[act] = np.sum(u[:, None] > cum[x[act]], axis=1)
    return x


def test_uniformized_endpoints_match_poisson_epoch_stepping():
    cases = [hypercube_kernel(2)[0]]
    rng = np.random.default_rng(23)
    cases.append(random_kernel(rng, 5))
    for kern in cases:
        via_ctmc = endpoint_states(kern, 0, 2.0, 4000, seed=29)
        via_steps = _poisson_epoch_endpoints(kern, 0, 2.0, 4000, seed=31)
        table = np.stack([
            np.bincount(via_ctmc, minlength=kern.n),
            np.bincount(via_steps, minlength=kern.n),
        ])
        table = table[:, table.sum(axis=0) > 0]
        p_value = chi2_contingency(table).pvalue
        assert p_value > 0.01


# -- Euler scheme ------------------------------------------------------------------------

def test_simulate_em_shapes_and_determinism():
    sde = SdeModel(dim=2, drift=lambda x: -x)
    out = simulate_em(sde, np.array([1.0, -1.0]), 0.01, 50, seed=3)
    assert out.shape == (51, 2)
    assert out[0] == approx(np.array([1.0, -1.0]), abs=0.0)
    again = simulate_em(sde, np.array([1.0, -1.0]), 0.01, 50, seed=3)
    assert np.array_equal(out, again)
    scalar_start = simulate_em(SdeModel(dim=2, drift=lambda x: -x), 0.5, 0.01, 3, seed=3)
    assert scalar_start[0] == approx(np.array([0.5, 0.5]), abs=0.0)


def test_simulate_em_zero_drift_increment_variance():
    sde = SdeModel(dim=1, drift=lambda x: 0.0 * x)
    dt = 0.04
    out = simulate_em(sde, 0.0, dt, 20000, seed=13)
    incr = np.diff(out[:, 0])
    assert float(np.var(incr)) == approx(dt, rel=0.05)
    assert float(np.mean(incr)) == approx(0.0, abs=3.0 * math.sqrt(dt / 20000))


def test_simulate_em_ou_stationary_variance():
    dt = 0.05
    sde = SdeModel(dim=1, drift=lambda x: -x)
    out = simulate_em(sde, 0.0, dt, 40000, seed=17)[1000:, 0]
    assert float(np.var(out)) == approx(1.0 / (2.0 - dt), rel=0.12)


def test_simulate_em_validates_and_caps():
    sde = SdeModel(dim=1, drift=lambda x: x**3)
    with pytest.raises(SimulationBlowupError):
        simulate_em(sde, 5.0, 0.5, 50, seed=1)
    ou = SdeModel(dim=1, drift=lambda x: -x)
    with pytest.raises(OutOfRangeError):
        simulate_em(ou, 0.0, 0.0, 10, seed=1)
    with pytest.raises(OutOfRangeError):
        simulate_em(ou, 0.0, 0.1, 0, seed=1)


# -- vectorized path averages ------------------------------------------------------------

def test_path_averages_reproducible_and_prefix_stable():
    gen, mu, _ = mminfty_generator(0.25, 1.0, 15)
    f = np.arange(16, dtype=float)
    a = path_ergodic_averages(gen, mu, f, 20.0, 40, seed=37)
    b = path_ergodic_averages(gen, mu, f, 20.0, 40, seed=37)
    assert np.array_equal(a, b)
    # per-path seed words depend only on the path index, not the batch size
    head = path_ergodic_averages(gen, mu, f, 20.0, 20, seed=37)
    assert np.array_equal(a[:20], head)


def test_path_averages_concentrate_on_stationary_mean():
    gen, mu, _ = mminfty_generator(0.25, 1.0, 15)
    f = np.arange(16, dtype=float)
    avgs = path_ergodic_averages(gen, mu, f, 50.0, 4000, seed=41)
    se = float(np.std(avgs, ddof=1) / math.sqrt(avgs.size))
    assert abs(float(np.mean(avgs)) - 0.25) < 4.0 * se
    assert se < 0.01


def test_path_averages_kernel_equals_unit_uniformization():
    kern, mu, _ = hypercube_kernel(2)
    f = np.array([0.0, 1.0, 1.0, 2.0])
    via_kernel = path_ergodic_averages(kern, mu, f, 10.0, 50, seed=43)
    via_gen = path_ergodic_averages(uniformize(kern, 1.0), mu.weights, f, 10.0, 50, seed=43)
    assert np.array_equal(via_kernel, via_gen)


def test_path_averages_validate_inputs():
    gen = two_state_chain(1.0, 1.0)
    with pytest.raises(OutOfRangeError):
        path_ergodic_averages(gen, 0, np.array([0.0, 1.0]), 1.0, 0, seed=1)
    with pytest.raises(OutOfRangeError):
        path_ergodic_averages(gen, 0, np.array([0.0, 1.0]), 0.0, 4, seed=1)
    with pytest.raises(DimensionMismatchError):
        path_ergodic_averages(gen, 0, np.array([0.0, 1.0, 2.0]), 1.0, 4, seed=1)
    with pytest.raises(InvalidModelError):
        path_ergodic_averages(object(), 0, np.array([0.0]), 1.0, 4, seed=1)


# -- validation harness ------------------------------------------------------------------

def test_validate_bound_verdict_thresholds():
    gen = two_state_chain(1.0, 1.0)
    bound = assemble_bound(gen, np.array([0.0, 1.0]), 0.0)
    assert bound.xi_plus.value == 0.0
    n = 100
    ripple = np.tile([0.1, -0.1], n // 2)
    base_mean = 0.5
    se = float(np.std(ripple, ddof=1) / math.sqrt(n))

    def run(delta):
        avgs = base_mean + delta + ripple
        return validate_bound(
            gen, gen, np.array([0.0, 1.0]), 10.0, n, seed=1, bound=bound, averages=avgs
        )

    assert run(2.0 * se).verdict == "pass"
    assert run(5.0 * se).verdict == "inconclusive"
    assert run(8.0 * se).verdict == "fail"
    assert run(-5.0 * se).verdict == "inconclusive"
    report = run(0.0)
    assert report.empirical_bias == approx(0.0, abs=1e-12)
    assert report.empirical_std_error == approx(se, abs=1e-15)
    assert report.to_json()["verdict"] == "pass"
    with pytest.raises(OutOfRangeError):
        validate_bound(gen, gen, np.array([0.0, 1.0]), 10.0, 1, seed=1, bound=bound)
    with pytest.raises(DimensionMismatchError):
        validate_bound(
            gen, gen, np.array([0.0, 1.0]), 10.0, 8, seed=1, bound=bound, averages=np.zeros(5)
        )


def test_validate_bound_same_model_passes():
    gen, mu, _ = mminfty_generator(0.25, 1.0, 15)
    f = np.arange(16, dtype=float)
    bound = assemble_bound(gen, f, 0.01)
    report = validate_bound(gen, gen, f, 50.0, 800, seed=47, bound=bound)
    assert report.verdict == "pass"
    assert abs(report.empirical_bias) < 3.0 * report.empirical_std_error


def test_validate_bound_empirical_bias_matches_exact_stationary_gap():
    gen, mu, _ = mminfty_generator(0.25, 1.0, 15)
    alt = perturbed_model(gen, rel=0.1)
    f = np.arange(16, dtype=float)
    exact_bias = float(invariant_measure(alt).weights @ f) - float(mu.weights @ f)
    lam_t, a_t = jump_decomposition(alt)
    lam, a = jump_decomposition(gen)
    rate = ctmc_relent_rate(lam_t, a_t, lam, a, invariant_measure(alt)).rate
    bound = assemble_bound(gen, f, rate)
    report = validate_bound(gen, alt, f, 100.0, 2000, seed=53, bound=bound)
    assert report.verdict == "pass"
    assert abs(report.empirical_bias - exact_bias) < 3.0 * report.empirical_std_error
    assert abs(exact_bias) <= bound.xi_plus.value


def _doob_tilted_alternative(gen, mu, f_hat, c):
    # ground-state transform of the tilted generator: the alternative whose
    # stationary bias attains the variational bound at its own entropy rate
    d = np.sqrt(mu.weights)
    qs = symmetrize(gen, mu).matrix
    m = d[:, None] * (qs + np.diag(c * f_hat)) / d[None, :]
    vals, vecs = np.linalg.eigh(0.5 * (m + m.T))
    h = vecs[:, -1] / d
    h *= np.sign(h[np.argmax(np.abs(h))])
    qt = (gen.q + np.diag(c * f_hat) - vals[-1] * np.eye(gen.n)) * h[None, :] / h[:, None]
    np.fill_diagonal(qt, 0.0)
    np.fill_diagonal(qt, -qt.sum(axis=1))
    return GeneratorMatrix(gen.states, qt)


def test_validate_bound_adversarial_tilt_nearly_saturates():
    gen = two_state_chain(1.0, 1.0)
    mu = invariant_measure(gen)
    f = center_observable(np.array([0.0, 1.0]), mu)
    alt = _doob_tilted_alternative(gen, mu, f.centered, 0.3)
    mu_alt = invariant_measure(alt)
    exact_bias = float(mu_alt.weights @ f.centered)
    lam_t, a_t = jump_decomposition(alt)
    lam, a = jump_decomposition(gen)
    rate = ctmc_relent_rate(lam_t, a_t, lam, a, mu_alt).rate
    # the tilt saturates the bound built from the exact cumulant at its own rate
    xi_exact = xi_infimum(kappa_lambda(gen, f, mu), rate, sign=1).value
    assert exact_bias == approx(xi_exact, rel=1e-9)
    t_horizon = 200.0
    budget = EntropyRate(
        rate=rate, initial_term=relative_entropy(mu_alt.weights, mu.weights)
    )
    bound = assemble_bound(gen, f, budget, t_horizon=t_horizon)
    # the assembled certificate replaces the cumulant by its variance/sup
    # envelope, so it covers the bias with only a few percent of slack
    assert exact_bias <= bound.xi_plus.value
    assert exact_bias >= 0.95 * bound.xi_plus.value
    report = validate_bound(gen, alt, f, t_horizon, 3000, seed=59, bound=bound)
    assert report.verdict == "pass"
    assert abs(report.empirical_bias - exact_bias) < 3.0 * report.empirical_std_error
