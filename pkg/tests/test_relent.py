"""Relative-entropy rates: exact chain formulas and Monte Carlo estimators.

Core claims checked here: the jump-process rate formula reproduces hand
values and is a divergence (nonnegative, zero only at equality); the
discrete-time rate obeys the path chain rule exactly; the Girsanov
estimator is exact for constant drift offsets and matches the stationary
quadratic oracle for linear ones; the Euler discretization-entropy
estimators match the closed-form linear-drift oracle and are dominated by
the a-priori Taylor bound.
"""

import itertools
import math

import numpy as np
import pytest
from pytest import approx

from conftest import random_kernel, two_state_chain

from markov_uq import (
    EmScheme,
    EntropyRate,
    GeneratorMatrix,
    McEstimate,
    SdeModel,
    TransitionKernel,
    ctmc_relent_rate,
    dtmc_relent_rate,
    em_relent_onestep_mc,
    em_relent_rate,
    em_relent_taylor_bound,
    girsanov_rate_mc,
    init_relent_mc,
    invariant_measure,
    jump_decomposition,
    relative_entropy,
)
from markov_uq.errors import (
    DimensionMismatchError,
    InsufficientSamplesError,
    InvalidModelError,
    NotInvariantError,
    OutOfRangeError,
    SimulationBlowupError,
    SupportMismatchError,
)


# -- entropy budget container ---------------------------------------------------------

def test_entropy_rate_budget_resolves_horizon():
    er = EntropyRate(rate=0.02, initial_term=0.5)
    assert er.eta_at(10.0) == approx(0.02 + 0.05, abs=1e-15)
    assert er.eta_at(math.inf) == 0.02
    with pytest.raises(OutOfRangeError):
        er.eta_at(0.0)
    with pytest.raises(OutOfRangeError):
        er.eta_at(-1.0)


def test_entropy_rate_validation():
    with pytest.raises(InvalidModelError):
        EntropyRate(rate=0.1, estimator="guess")
    with pytest.raises(InvalidModelError):
        EntropyRate(rate=0.1, std_error=-1.0)
    with pytest.raises(InvalidModelError):
        EntropyRate(rate=0.1, initial_term=-0.2)
    # exact rates must be nonnegative, Monte Carlo ones only up to noise
    with pytest.raises(InvalidModelError):
        EntropyRate(rate=-0.01)
    er = EntropyRate(rate=-0.005, estimator="monte-carlo", std_error=0.01)
    assert er.rate == 0.0
    with pytest.raises(InvalidModelError):
        EntropyRate(rate=-0.05, estimator="monte-carlo", std_error=0.01)


def test_entropy_rate_json_fields():
    er = EntropyRate(rate=0.3, initial_term=0.1, estimator="monte-carlo", std_error=0.02)
    j = er.to_json()
    assert j == {
        "rate": 0.3,
        "initial_term": 0.1,
        "std_error": 0.02,
        "estimator": "monte-carlo",
    }


def test_mc_estimate_validation():
    McEstimate(value=1.0, std_error=0.1, n_samples=10)
    with pytest.raises(InvalidModelError):
        McEstimate(value=1.0, std_error=-0.1, n_samples=10)
    with pytest.raises(InsufficientSamplesError):
        McEstimate(value=1.0, std_error=0.1, n_samples=0)


def test_em_scheme_validation():
    with pytest.raises(DimensionMismatchError):
        EmScheme(drift=lambda x: -x, dim=0, dt=0.1)
    with pytest.raises(OutOfRangeError):
        EmScheme(drift=lambda x: -x, dim=1, dt=0.0)


# -- jump decomposition ---------------------------------------------------------------

def test_jump_decomposition_reconstructs_generator():
    rng = np.random.default_rng(41)
    for _ in range(20):
        n = int(rng.integers(2, 7))
        q = rng.uniform(0.1, 2.0, size=(n, n))
        np.fill_diagonal(q, 0.0)
        np.fill_diagonal(q, -q.sum(axis=1))
        gen = GeneratorMatrix(tuple(str(i) for i in range(n)), q)
        rates, kern = jump_decomposition(gen)
        assert np.all(rates > 0.0)
        assert np.allclose(np.diagonal(kern.p), 0.0)
        rebuilt = rates[:, None] * (kern.p - np.eye(n))
        assert np.abs(rebuilt - q).max() < 1e-12


def test_jump_decomposition_rejects_absorbing_state():
    q = np.array([[-1.0, 1.0], [0.0, 0.0]])
    gen = GeneratorMatrix(("0", "1"), q)
    with pytest.raises(InvalidModelError):
        jump_decomposition(gen)


# -- exact jump-process rate ----------------------------------------------------------

def test_ctmc_rate_zero_when_models_agree():
    gen = two_state_chain(1.0, 1.0)
    mu = invariant_measure(gen)
    rates, kern = jump_decomposition(gen)
    er = ctmc_relent_rate(rates, kern, rates, kern, mu)
    assert er.rate == 0.0
    assert er.estimator == "exact-formula"


def test_ctmc_rate_two_state_hand_value():
    # base rates (1, 1); alternative speeds the 0 -> 1 jump up to 1.2
    base = two_state_chain(1.0, 1.0)
    alt = two_state_chain(1.2, 1.0)
    lam, a = jump_decomposition(base)
    lam_t, a_t = jump_decomposition(alt)
    mu_t = invariant_measure(alt)
    assert mu_t.weights == approx(np.array([1.0, 1.2]) / 2.2, abs=1e-14)
    er = ctmc_relent_rate(lam_t, a_t, lam, a, mu_t)
    hand = (1.0 / 2.2) * (1.2 * math.log(1.2) - 0.2)
    assert er.rate == approx(hand, abs=1e-15)
    assert er.rate == approx(0.008539030978520703, abs=1e-15)


def test_ctmc_rate_is_a_divergence():
    rng = np.random.default_rng(42)
    for _ in range(30):
        n = int(rng.integers(2, 6))
        q1 = rng.uniform(0.2, 1.5, size=(n, n))
        q2 = rng.uniform(0.2, 1.5, size=(n, n))
        for q in (q1, q2):
            np.fill_diagonal(q, 0.0)
            np.fill_diagonal(q, -q.sum(axis=1))
        alt = GeneratorMatrix(tuple(str(i) for i in range(n)), q2)
        lam, a = jump_decomposition(GeneratorMatrix(alt.states, q1))
        lam_t, a_t = jump_decomposition(alt)
        er = ctmc_relent_rate(lam_t, a_t, lam, a, invariant_measure(alt))
        assert er.rate >= 0.0
        assert er.rate > 0.0 or np.abs(q1 - q2).max() < 1e-15


def test_ctmc_rate_rejects_bad_inputs():
    base = two_state_chain(1.0, 1.0)
    alt = two_state_chain(1.2, 1.0)
    lam, a = jump_decomposition(base)
    lam_t, a_t = jump_decomposition(alt)
    mu_t = invariant_measure(alt)
    with pytest.raises(InvalidModelError):
        ctmc_relent_rate(np.array([0.0, 1.0]), a_t, lam, a, mu_t)
    with pytest.raises(NotInvariantError):
        ctmc_relent_rate(lam_t, a_t, lam, a, invariant_measure(base))
    q3 = np.array([
        [-1.0, 1.0, 0.0],
        [0.5, -1.0, 0.5],
        [0.5, 0.5, -1.0],
    ])
    q3_wide = np.array([
        [-1.0, 0.5, 0.5],
        [0.5, -1.0, 0.5],
        [0.5, 0.5, -1.0],
    ])
    states = ("0", "1", "2")
    lam3, a3 = jump_decomposition(GeneratorMatrix(states, q3))
    lam3w, a3w = jump_decomposition(GeneratorMatrix(states, q3_wide))
    with pytest.raises(SupportMismatchError):
        ctmc_relent_rate(lam3w, a3w, lam3, a3, invariant_measure(GeneratorMatrix(states, q3_wide)))


# -- exact discrete-time rate ---------------------------------------------------------

def test_dtmc_rate_two_state_hand_value():
    p_t = TransitionKernel(("0", "1"), np.array([[0.7, 0.3], [0.4, 0.6]]))
    p = TransitionKernel(("0", "1"), np.array([[0.6, 0.4], [0.5, 0.5]]))
    mu_t = invariant_measure(p_t)
    assert mu_t.weights == approx(np.array([4.0, 3.0]) / 7.0, abs=1e-14)
    kl0 = 0.7 * math.log(0.7 / 0.6) + 0.3 * math.log(0.3 / 0.4)
    kl1 = 0.4 * math.log(0.4 / 0.5) + 0.6 * math.log(0.6 / 0.5)
    er = dtmc_relent_rate(p_t, p, mu_t)
    assert er.rate == approx((4.0 * kl0 + 3.0 * kl1) / 7.0, abs=1e-14)
    assert er.initial_term == 0.0


def test_dtmc_rate_matches_path_entropy_chain_rule():
    # brute-force path relative entropy equals initial + T * rate
    rng = np.random.default_rng(43)
    n = 3
    p_t = random_kernel(rng, n)
    p = random_kernel(rng, n)
    mu_t = invariant_measure(p_t)
    mu = invariant_measure(p)
    er = dtmc_relent_rate(p_t, p, mu_t, mu)
    assert er.initial_term == approx(relative_entropy(mu_t.weights, mu.weights), abs=1e-14)
    for t in (1, 2, 4):
        path_kl = 0.0
        for path in itertools.product(range(n), repeat=t + 1):
            pr_t = mu_t.weights[path[0]]
            pr = mu.weights[path[0]]
            for a, b in zip(path[:-1], path[1:]):
                pr_t *= p_t.p[a, b]
                pr *= p.p[a, b]
            path_kl += pr_t * math.log(pr_t / pr)
        assert path_kl == approx(er.initial_term + t * er.rate, abs=1e-12)


def test_dtmc_rate_invariant_under_relabeling():
    rng = np.random.default_rng(44)
    n = 4
    p_t = random_kernel(rng, n)
    p = random_kernel(rng, n)
    mu_t = invariant_measure(p_t)
    base_rate = dtmc_relent_rate(p_t, p, mu_t).rate
    perm = rng.permutation(n)
    states = tuple(str(i) for i in range(n))
    p_t2 = TransitionKernel(states, p_t.p[np.ix_(perm, perm)])
    p2 = TransitionKernel(states, p.p[np.ix_(perm, perm)])
    assert dtmc_relent_rate(p_t2, p2, invariant_measure(p_t2)).rate == approx(base_rate, abs=1e-13)


def test_dtmc_rate_rejects_support_escape_and_drift():
    p_t = TransitionKernel(("0", "1"), np.array([[0.7, 0.3], [0.4, 0.6]]))
    p_deg = TransitionKernel(("0", "1"), np.array([[1.0, 0.0], [0.5, 0.5]]))
    mu_t = invariant_measure(p_t)
    with pytest.raises(SupportMismatchError):
        dtmc_relent_rate(p_t, p_deg, mu_t)
    skew = invariant_measure(TransitionKernel(("0", "1"), np.array([[0.9, 0.1], [0.9, 0.1]])))
    assert skew.weights == approx(np.array([0.9, 0.1]), abs=1e-12)
    with pytest.raises(NotInvariantError):
        dtmc_relent_rate(p_t, p_t, skew)


# -- Girsanov estimator ---------------------------------------------------------------

def test_girsanov_constant_offset_is_exact():
    sde = SdeModel(dim=1, drift=lambda x: -x)
    er = girsanov_rate_mc(lambda x: np.full_like(x, 0.3), sde, t_horizon=2.0, n_paths=8, seed=5)
    assert er.rate == approx(0.5 * 0.3**2, abs=1e-12)
    assert er.std_error == 0.0
    assert er.estimator == "monte-carlo"


def test_girsanov_linear_offset_matches_stationary_quadratic():
    # beta = eps x along a stationary unit OU gives eps^2 / 4
    eps = 0.2
    sde = SdeModel(dim=1, drift=lambda x: -x)
    sampler = lambda rng, m: rng.standard_normal((m, 1)) / math.sqrt(2.0)
    er = girsanov_rate_mc(
        lambda x: eps * x, sde, t_horizon=4.0, n_paths=4000, seed=7, dt=0.01, x0_sampler=sampler
    )
    assert er.std_error > 0.0
    assert abs(er.rate - eps**2 / 4.0) < 4.0 * er.std_error + 1e-4


def test_girsanov_deterministic_and_validates():
    sde = SdeModel(dim=1, drift=lambda x: -x)
    a = girsanov_rate_mc(lambda x: 0.1 * x, sde, t_horizon=1.0, n_paths=64, seed=9)
    b = girsanov_rate_mc(lambda x: 0.1 * x, sde, t_horizon=1.0, n_paths=64, seed=9)
    assert a.rate == b.rate and a.std_error == b.std_error
    with pytest.raises(InsufficientSamplesError):
        girsanov_rate_mc(lambda x: 0.1 * x, sde, t_horizon=1.0, n_paths=1, seed=9)
    with pytest.raises(OutOfRangeError):
        girsanov_rate_mc(lambda x: 0.1 * x, sde, t_horizon=0.0, n_paths=8, seed=9)


def test_girsanov_explosive_drift_hits_cap():
    sde = SdeModel(dim=1, drift=lambda x: x**3)
    sampler = lambda rng, m: np.full((m, 1), 5.0)
    with pytest.raises(SimulationBlowupError):
        girsanov_rate_mc(
            lambda x: 0.0 * x, sde, t_horizon=5.0, n_paths=4, seed=3, dt=0.5, x0_sampler=sampler
        )


# -- Euler discretization entropy -----------------------------------------------------

def test_em_onestep_linear_drift_oracle():
    # b(x) = x gives (1/2) int_0^dt E (y s + W_s)^2 ds = y^2 dt^3/6 + dt^2/4
    b = lambda x: x
    for y, dt in ((0.0, 0.1), (1.0, 0.1), (2.0, 0.05)):
        est = em_relent_onestep_mc(b, np.array([y]), dt, n_samples=40000, seed=11)
        oracle = y**2 * dt**3 / 6.0 + dt**2 / 4.0
        assert abs(est.value - oracle) < 3.0 * est.std_error + 1e-6 * oracle
    with pytest.raises(OutOfRangeError):
        em_relent_onestep_mc(b, np.array([0.0]), 0.0, n_samples=100, seed=1)
    with pytest.raises(InsufficientSamplesError):
        em_relent_onestep_mc(b, np.array([0.0]), 0.1, n_samples=8, seed=1)


def test_em_rate_linear_drift_oracle():
    # self-consistent Euler chain of the unit OU started at its step-stationary law
    dt = 0.1
    drift = lambda x: -x
    scheme = EmScheme(drift=drift, dim=1, dt=dt)
    var_step = 1.0 / (2.0 - dt)
    sampler = lambda rng, m: rng.standard_normal((m, 1)) * math.sqrt(var_step)
    er = em_relent_rate(drift, scheme, t_horizon=10.0, n_paths=600, seed=13, x0_sampler=sampler)
    oracle = dt / 4.0 + dt**2 / 6.0 * var_step
    assert abs(er.rate - oracle) < 4.0 * er.std_error + 1e-4 * oracle
    with pytest.raises(OutOfRangeError):
        em_relent_rate(drift, scheme, t_horizon=0.55, n_paths=16, seed=13)
    with pytest.raises(InsufficientSamplesError):
        em_relent_rate(drift, scheme, t_horizon=1.0, n_paths=1, seed=13)


def test_em_taylor_bound_dominates_sampled_rate():
    dt = 0.05
    drift = lambda x: -x
    scheme = EmScheme(drift=drift, dim=1, dt=dt)
    sampler = lambda rng, m: rng.standard_normal((m, 1)) * math.sqrt(1.0 / (2.0 - dt))
    jac = lambda x: np.full((x.shape[0], 1, 1), -1.0)
    mc = em_relent_rate(drift, scheme, t_horizon=5.0, n_paths=400, seed=17, x0_sampler=sampler)
    tb = em_relent_taylor_bound(
        drift, jac, 0.0, scheme, t_horizon=5.0, n_paths=400, seed=17, x0_sampler=sampler
    )
    assert tb.estimator == "taylor-bound"
    assert tb.rate + 3.0 * tb.std_error >= mc.rate - 3.0 * mc.std_error
    with pytest.raises(OutOfRangeError):
        em_relent_taylor_bound(drift, jac, 0.5, scheme, t_horizon=5.0, n_paths=16, seed=17)
    bad_jac = lambda x: np.full((x.shape[0], 1), -1.0)
    with pytest.raises(DimensionMismatchError):
        em_relent_taylor_bound(drift, bad_jac, 0.0, scheme, t_horizon=5.0, n_paths=16, seed=17)


def test_em_rate_explosive_drift_hits_cap():
    drift = lambda x: x**3
    scheme = EmScheme(drift=drift, dim=1, dt=0.5)
    sampler = lambda rng, m: np.full((m, 1), 5.0)
    with pytest.raises(SimulationBlowupError):
        em_relent_rate(drift, scheme, t_horizon=5.0, n_paths=4, seed=3, x0_sampler=sampler)


# -- initial-law entropy --------------------------------------------------------------

def test_init_relent_gaussian_oracle():
    # N(0, s1^2) against N(0, s0^2): log(s0/s1) + s1^2/(2 s0^2) - 1/2
    s1, s0 = 0.8, 1.3
    phi_t = lambda x: x[:, 0] ** 2 / (2 * s1**2) + math.log(s1 * math.sqrt(2 * math.pi))
    phi = lambda x: x[:, 0] ** 2 / (2 * s0**2) + math.log(s0 * math.sqrt(2 * math.pi))
    sampler = lambda rng, m: s1 * rng.standard_normal((m, 1))
    est = init_relent_mc(phi_t, phi, sampler, n_samples=60000, seed=19)
    oracle = math.log(s0 / s1) + s1**2 / (2 * s0**2) - 0.5
    assert abs(est.value - oracle) < 3.0 * est.std_error
    assert est.n_samples == 60000


def test_init_relent_std_error_shrinks_like_root_n():
    s1, s0 = 0.8, 1.3
    phi_t = lambda x: x[:, 0] ** 2 / (2 * s1**2) + math.log(s1 * math.sqrt(2 * math.pi))
    phi = lambda x: x[:, 0] ** 2 / (2 * s0**2) + math.log(s0 * math.sqrt(2 * math.pi))
    sampler = lambda rng, m: s1 * rng.standard_normal((m, 1))
    se_small = init_relent_mc(phi_t, phi, sampler, n_samples=4000, seed=23).std_error
    se_big = init_relent_mc(phi_t, phi, sampler, n_samples=64000, seed=23).std_error
    assert se_small / se_big == approx(4.0, rel=0.25)


def test_init_relent_validates_shapes():
    phi = lambda x: x[:, 0]
    with pytest.raises(InsufficientSamplesError):
        init_relent_mc(phi, phi, lambda rng, m: np.zeros((m, 1)), n_samples=1, seed=1)
    with pytest.raises(DimensionMismatchError):
        init_relent_mc(phi, phi, lambda rng, m: np.zeros((m, 2)), n_samples=10, seed=1)
    bad_phi = lambda x: x
    with pytest.raises(DimensionMismatchError):
        init_relent_mc(bad_phi, bad_phi, lambda rng, m: np.zeros((m, 1)), n_samples=10, seed=1)
