"""Relative-entropy rates eta between base and alternative models.

Exact formulas cover Markov jump processes (rate + jump-chain decomposition)
and discrete-time kernels; Monte Carlo estimators cover SDE drift
perturbations (Girsanov) and Euler-Maruyama discretization error, plus the
initial-condition term R(mu_alt || mu_base). Every Monte Carlo estimator is
deterministic given (seed, n_paths): paths are split into fixed-size chunks,
each chunk owns an RNG substream keyed by (estimator tag, chunk index), and
reductions are numpy pairwise sums, so results do not depend on scheduling.

Convention for drift perturbations: the simulated process is the
*alternative* (tilde) one and `beta` is the drift offset from base to
alternative, b_alt = b_base + beta. The entropy rate integrates
(1/2)||beta||^2 along alternative paths.

Batch convention: drifts, Jacobians and potentials take arrays of shape
(m, dim) and return (m, dim), (m, dim, dim), (m,) respectively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .chain import GeneratorMatrix, StationaryMeasure, TransitionKernel, check_stationary
from .divergence import relative_entropy
from .errors import (
    DimensionMismatchError,
    InsufficientSamplesError,
    InvalidModelError,
    NotInvariantError,
    OutOfRangeError,
    SimulationBlowupError,
    SupportMismatchError,
)
from .rng import substream

__all__ = [
    "EntropyRate",
    "McEstimate",
    "EmScheme",
    "jump_decomposition",
    "ctmc_relent_rate",
    "dtmc_relent_rate",
    "girsanov_rate_mc",
    "em_relent_onestep_mc",
    "em_relent_rate",
    "em_relent_taylor_bound",
    "init_relent_mc",
]

BLOWUP_CAP = 1e8
_CHUNK = 4096

# estimator tags; also namespace the RNG substreams
EXACT = "exact-formula"
MONTE_CARLO = "monte-carlo"
TAYLOR = "taylor-bound"
_STREAM_GIRSANOV = 11
_STREAM_ONESTEP = 12
_STREAM_EMRATE = 13
_STREAM_TAYLOR = 14
_STREAM_INIT = 15


@dataclass(frozen=True)
class EntropyRate:
    """Entropy budget: rate in nats per unit time plus an initial term in nats.

    The finite-horizon budget is eta_at(T) = rate + initial_term / T.
    """

    rate: float
    initial_term: float = 0.0
    estimator: str = EXACT
    std_error: float = 0.0

    def __post_init__(self):
        if self.estimator not in (EXACT, MONTE_CARLO, TAYLOR):
            raise InvalidModelError(f"unknown estimator tag {self.estimator!r}")
        if self.std_error < 0.0 or not math.isfinite(self.std_error):
            raise InvalidModelError("std_error must be finite and >= 0")
        slack = 3.0 * self.std_error if self.estimator == MONTE_CARLO else 0.0
        if self.rate < -(slack + 1e-9):
            raise InvalidModelError(f"entropy rate {self.rate!r} below -3 std errors")
        if self.initial_term < -1e-9:
            raise InvalidModelError("initial_term must be >= 0")
        object.__setattr__(self, "rate", max(float(self.rate), 0.0) if self.rate < 0 else float(self.rate))
        object.__setattr__(self, "initial_term", max(float(self.initial_term), 0.0))

    def eta_at(self, t_horizon: float) -> float:
        if t_horizon <= 0.0:
            raise OutOfRangeError("horizon must be > 0")
        return self.rate + self.initial_term / t_horizon

    def to_json(self) -> dict:
        return {
            "rate": self.rate,
            "initial_term": self.initial_term,
            "std_error": self.std_error,
            "estimator": self.estimator,
        }


@dataclass(frozen=True)
class McEstimate:
    """A Monte Carlo scalar with its standard error and sample count."""

    value: float
    std_error: float
    n_samples: int

    def __post_init__(self):
        if self.std_error < 0.0:
            raise InvalidModelError("std_error must be >= 0")
        if self.n_samples < 1:
            raise InsufficientSamplesError("need at least one sample")


@dataclass(frozen=True)
class EmScheme:
    """Euler scheme data: batch drift, state dimension, step size."""

    drift: Callable[[np.ndarray], np.ndarray]
    dim: int
    dt: float

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionMismatchError("dimension must be >= 1")
        if not self.dt > 0.0:
            raise OutOfRangeError("dt must be > 0")


def jump_decomposition(model: GeneratorMatrix) -> tuple[np.ndarray, TransitionKernel]:
    """Split a generator into holding rates and the embedded jump kernel."""
    rates = -np.diag(model.q).copy()
    if np.any(rates <= 0.0):
        raise InvalidModelError("jump decomposition needs strictly positive exit rates")
    p = model.q / rates[:, None]
    np.fill_diagonal(p, 0.0)
    return rates, TransitionKernel(model.states, p)


def _row_kl(pt_row: np.ndarray, p_row: np.ndarray) -> float:
    on = pt_row > 0.0
    return float(np.sum(pt_row[on] * (np.log(pt_row[on]) - np.log(p_row[on]))))


def ctmc_relent_rate(
    lam_t: np.ndarray,
    a_t: TransitionKernel,
    lam: np.ndarray,
    a: TransitionKernel,
    mu_t_star: StationaryMeasure,
) -> EntropyRate:
    """Exact entropy rate between two Markov jump processes.

    rate = sum_x mu_t(x) [ lam_t(x) sum_z a_t(x,z) log(lam_t a_t / (lam a))
                           - (lam_t(x) - lam(x)) ],
    which is >= 0 and vanishes iff the models agree on the support of
    mu_t_star. Requires identical jump supports and mu_t_star invariant for
    the alternative process.
    """
    lam_t = np.asarray(lam_t, dtype=float)
    lam = np.asarray(lam, dtype=float)
    n = a_t.n
    if a.n != n or lam_t.shape != (n,) or lam.shape != (n,) or mu_t_star.n != n:
        raise DimensionMismatchError("rate/kernel/measure sizes disagree")
    if np.any(lam_t <= 0.0) or np.any(lam <= 0.0):
        raise InvalidModelError("jump rates must be strictly positive")
    if not np.all(np.isfinite(lam_t)) or not np.all(np.isfinite(lam)):
        raise InvalidModelError("jump rates must be bounded")
    if not np.array_equal(a_t.p != 0.0, a.p != 0.0):
        raise SupportMismatchError("jump kernels must share the same support")
    q_t = a_t.p * lam_t[:, None]
    np.fill_diagonal(q_t, np.diag(q_t) - lam_t)
    alt = GeneratorMatrix(a_t.states, q_t)
    residual = np.abs(mu_t_star.weights @ alt.q).max()
    if residual > 1e-8 * max(1.0, np.abs(alt.q).max()):
        raise NotInvariantError(f"measure is not invariant for the alternative: residual {residual:.3e}")
    total = 0.0
    w = mu_t_star.weights
    for x in range(n):
        if w[x] == 0.0:
            continue
        term = lam_t[x] * (_row_kl(a_t.p[x], a.p[x]) + math.log(lam_t[x] / lam[x]))
        term -= lam_t[x] - lam[x]
        total += w[x] * term
    return EntropyRate(rate=total, estimator=EXACT)


def dtmc_relent_rate(
    p_t: TransitionKernel,
    p: TransitionKernel,
    mu_t_star: StationaryMeasure,
    mu_star: StationaryMeasure | None = None,
) -> EntropyRate:
    """Exact per-step entropy rate sum_x mu_t(x) KL(p_t(x,.) || p(x,.)).

    The T-step path relative entropy started from (mu_t_star, mu_star) is
    exactly initial_term + T * rate by the chain rule; initial_term is
    R(mu_t_star || mu_star) when the base stationary measure is supplied.
    """
    n = p_t.n
    if p.n != n or mu_t_star.n != n:
        raise DimensionMismatchError("kernel/measure sizes disagree")
    check_stationary(p_t, mu_t_star, tol=1e-8)
    w = mu_t_star.weights
    total = 0.0
    for x in range(n):
        if w[x] == 0.0:
            continue
        bad = (p_t.p[x] > 0.0) & (p.p[x] == 0.0)
        if np.any(bad):
            raise SupportMismatchError(f"row {x} of the alternative kernel escapes the base support")
        total += w[x] * _row_kl(p_t.p[x], p.p[x])
    initial = 0.0
    if mu_star is not None:
        if mu_star.n != n:
            raise DimensionMismatchError("base measure size disagrees")
        initial = relative_entropy(mu_t_star.weights, mu_star.weights)
    return EntropyRate(rate=total, initial_term=initial, estimator=EXACT)


def _em_chunks(n_paths: int, chunk: int):
    done = 0
    ci = 0
    while done < n_paths:
        m = min(chunk, n_paths - done)
        yield ci, m
        done += m
        ci += 1


def _init_states(sampler, rng, m: int, dim: int) -> np.ndarray:
    if sampler is None:
        return np.zeros((m, dim))
    x = np.asarray(sampler(rng, m), dtype=float)
    if x.shape != (m, dim):
        raise DimensionMismatchError(f"initial sampler returned shape {x.shape}, wanted {(m, dim)}")
    return x


def _check_cap(x: np.ndarray, cap: float) -> None:
    if not np.all(np.isfinite(x)) or np.abs(x).max() > cap:
        raise SimulationBlowupError(f"path norm exceeded cap {cap:g}")


def _mc_rate(values: list[np.ndarray], estimator: str, initial: float = 0.0) -> EntropyRate:
    v = np.concatenate(values)
    mean = float(np.mean(v))
    se = float(np.std(v, ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return EntropyRate(rate=mean, initial_term=initial, estimator=estimator, std_error=se)


def girsanov_rate_mc(
    beta_field: Callable[[np.ndarray], np.ndarray],
    sde,
    t_horizon: float,
    n_paths: int,
    seed: int,
    dt: float = 0.01,
    x0_sampler: Callable | None = None,
    cap: float = BLOWUP_CAP,
    chunk: int = _CHUNK,
) -> EntropyRate:
    """Entropy rate (1/2T) int_0^T E||beta(X_s)||^2 ds along simulated paths.

    `sde` is the alternative process (any object with batch `drift` and
    `dim`); `beta_field` is the drift offset b_alt - b_base. The time
    integral uses the left-endpoint rule on the EM grid, so beta == const
    is exact with zero variance.
    """
    if n_paths < 2:
        raise InsufficientSamplesError("need n_paths >= 2")
    if t_horizon <= 0.0 or dt <= 0.0:
        raise OutOfRangeError("need T > 0 and dt > 0")
    dim = int(sde.dim)
    n_steps = max(int(round(t_horizon / dt)), 1)
    dt_eff = t_horizon / n_steps
    values = []
    for ci, m in _em_chunks(n_paths, chunk):
        rng = substream(seed, _STREAM_GIRSANOV, ci)
        x = _init_states(x0_sampler, rng, m, dim)
        acc = np.zeros(m)
        for _ in range(n_steps):
            acc += 0.5 * np.sum(np.asarray(beta_field(x)) ** 2, axis=1) * dt_eff
            x = x + np.asarray(sde.drift(x)) * dt_eff + math.sqrt(dt_eff) * rng.standard_normal((m, dim))
            _check_cap(x, cap)
        values.append(acc / t_horizon)
    return _mc_rate(values, MONTE_CARLO)


def em_relent_onestep_mc(
    b: Callable[[np.ndarray], np.ndarray],
    y: np.ndarray,
    dt: float,
    n_samples: int,
    seed: int,
    n_strata: int = 16,
) -> McEstimate:
    """One-step discretization entropy (1/2) int_0^dt E||b(y) - b(X_s)||^2 ds.

    X_s = y + b(y) s + W_s is the within-step interpolation of the Euler
    update. The ds integral uses a stratified midpoint rule (the integrand
    is smooth in s); samples are split evenly across strata.
    """
    if dt <= 0.0:
        raise OutOfRangeError("dt must be > 0")
    if n_samples < 2 * n_strata:
        raise InsufficientSamplesError(f"need n_samples >= {2 * n_strata}")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    dim = y.size
    m = n_samples // n_strata
    rng = substream(seed, _STREAM_ONESTEP)
    by = np.asarray(b(y[None, :]))
    total = 0.0
    var = 0.0
    for k in range(n_strata):
        s = (k + 0.5) * dt / n_strata
        x = y[None, :] + by * s + math.sqrt(s) * rng.standard_normal((m, dim))
        g = np.sum((np.asarray(b(x)) - by) ** 2, axis=1)
        weight = 0.5 * dt / n_strata
        total += weight * float(np.mean(g))
        var += weight * weight * float(np.var(g, ddof=1)) / m
    return McEstimate(value=total, std_error=math.sqrt(var), n_samples=m * n_strata)


def em_relent_rate(
    b: Callable[[np.ndarray], np.ndarray],
    scheme: EmScheme,
    t_horizon: float,
    n_paths: int,
    seed: int,
    x0_sampler: Callable | None = None,
    n_strata: int = 16,
    cap: float = BLOWUP_CAP,
    chunk: int = 1024,
) -> EntropyRate:
    """Per-unit-time discretization entropy of the Euler scheme.

    Averages the one-step bound over simulated Euler path marginals:
    rate = (1/T) sum_j (1/2) int_0^dt E||b(X_j) - b(X_j + b(X_j)s + W_s)||^2 ds,
    with the same stratified in-step rule as em_relent_onestep_mc and
    standard errors taken across paths.
    """
    if n_paths < 2:
        raise InsufficientSamplesError("need n_paths >= 2")
    dt = scheme.dt
    ratio = t_horizon / dt
    n_steps = int(round(ratio))
    if n_steps < 1 or abs(ratio - n_steps) > 1e-9 * max(1.0, ratio):
        raise OutOfRangeError("T must be a positive integer multiple of dt")
    dim = scheme.dim
    mids = (np.arange(n_strata) + 0.5) * dt / n_strata
    values = []
    for ci, m in _em_chunks(n_paths, chunk):
        rng = substream(seed, _STREAM_EMRATE, ci)
        x = _init_states(x0_sampler, rng, m, dim)
        acc = np.zeros(m)
        for _ in range(n_steps):
            bx = np.asarray(b(x))
            for s in mids:
                xs = x + bx * s + math.sqrt(s) * rng.standard_normal((m, dim))
                acc += (0.5 * dt / n_strata) * np.sum((np.asarray(b(xs)) - bx) ** 2, axis=1)
            x = x + np.asarray(scheme.drift(x)) * dt + math.sqrt(dt) * rng.standard_normal((m, dim))
            _check_cap(x, cap)
        values.append(acc / t_horizon)
    return _mc_rate(values, MONTE_CARLO)


def em_relent_taylor_bound(
    b: Callable[[np.ndarray], np.ndarray],
    db: Callable[[np.ndarray], np.ndarray],
    lipschitz_l: float,
    scheme: EmScheme,
    t_horizon: float,
    n_paths: int,
    seed: int,
    db_sup: float | None = None,
    x0_sampler: Callable | None = None,
    cap: float = BLOWUP_CAP,
    chunk: int = 1024,
) -> EntropyRate:
    """A-priori Taylor bound on the Euler discretization entropy rate.

    Evaluates, along simulated Euler paths,
      (dt/4) avg ||Db||_F^2
      + dt^{3/2} ( c_n L ||Db||_inf + n(n+2) L^2 dt^{1/2} / 3
                   + avg [ dt^{1/2}/6 ||Db b||^2 + L ||Db||_inf ||b||^3 dt^{3/2} / 2
                           + L^2 ||b||^4 dt^{5/2} / 5 ] )
    with c_n = 8 sqrt(2) Gamma((n+3)/2) / (5 Gamma(n/2)). Requires Db to be
    L-Lipschitz with sup-norm db_sup (db_sup may be omitted when L = 0).
    Not tight; use em_relent_rate for the sampled value it dominates.
    """
    if lipschitz_l < 0.0:
        raise OutOfRangeError("Lipschitz constant must be >= 0")
    if lipschitz_l > 0.0 and db_sup is None:
        raise OutOfRangeError("db_sup (sup norm of the Jacobian) is required when L > 0")
    sup = 0.0 if db_sup is None else float(db_sup)
    if sup < 0.0:
        raise OutOfRangeError("db_sup must be >= 0")
    if n_paths < 2:
        raise InsufficientSamplesError("need n_paths >= 2")
    dt = scheme.dt
    ratio = t_horizon / dt
    n_steps = int(round(ratio))
    if n_steps < 1 or abs(ratio - n_steps) > 1e-9 * max(1.0, ratio):
        raise OutOfRangeError("T must be a positive integer multiple of dt")
    dim = scheme.dim
    c_n = 8.0 * math.sqrt(2.0) * math.gamma((dim + 3) / 2.0) / (5.0 * math.gamma(dim / 2.0))
    offset = dt ** 1.5 * (
        c_n * lipschitz_l * sup + dim * (dim + 2) * lipschitz_l**2 * math.sqrt(dt) / 3.0
    )
    values = []
    for ci, m in _em_chunks(n_paths, chunk):
        rng = substream(seed, _STREAM_TAYLOR, ci)
        x = _init_states(x0_sampler, rng, m, dim)
        t_frob = np.zeros(m)
        t_dbb = np.zeros(m)
        t_b3 = np.zeros(m)
        t_b4 = np.zeros(m)
        for _ in range(n_steps):
            bx = np.asarray(b(x))
            jac = np.asarray(db(x))
            if jac.shape != (m, dim, dim):
                raise DimensionMismatchError(f"Jacobian batch shape {jac.shape}, wanted {(m, dim, dim)}")
            t_frob += np.sum(jac * jac, axis=(1, 2))
            t_dbb += np.sum(np.einsum("mij,mj->mi", jac, bx) ** 2, axis=1)
            bn = np.sqrt(np.sum(bx * bx, axis=1))
            t_b3 += bn**3
            t_b4 += bn**4
            x = x + np.asarray(scheme.drift(x)) * dt + math.sqrt(dt) * rng.standard_normal((m, dim))
            _check_cap(x, cap)
        per_path = (
            dt / 4.0 * t_frob / n_steps
            + offset
            + dt ** 1.5
            * (
                math.sqrt(dt) / 6.0 * t_dbb / n_steps
                + lipschitz_l * sup / 2.0 * dt ** 1.5 * t_b3 / n_steps
                + lipschitz_l**2 / 5.0 * dt ** 2.5 * t_b4 / n_steps
            )
        )
        values.append(per_path)
    return _mc_rate(values, TAYLOR)


def init_relent_mc(
    phi_t: Callable[[np.ndarray], np.ndarray],
    phi: Callable[[np.ndarray], np.ndarray],
    sampler: Callable,
    n_samples: int,
    seed: int,
    dim: int = 1,
) -> McEstimate:
    """R(mu_alt || mu_base) = E_alt[phi - phi_t] for densities e^{-phi_t}, e^{-phi}.

    `sampler(rng, m)` must draw from the normalized alternative law; both
    potentials include their own log normalizers.
    """
    if n_samples < 2:
        raise InsufficientSamplesError("need n_samples >= 2")
    rng = substream(seed, _STREAM_INIT)
    x = np.asarray(sampler(rng, n_samples), dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape != (n_samples, dim):
        raise DimensionMismatchError(f"sampler returned shape {x.shape}, wanted {(n_samples, dim)}")
    vals = np.asarray(phi(x), dtype=float) - np.asarray(phi_t(x), dtype=float)
    if vals.shape != (n_samples,):
        raise DimensionMismatchError("potentials must map (m, dim) batches to (m,) values")
    mean = float(np.mean(vals))
    se = float(np.std(vals, ddof=1) / math.sqrt(n_samples))
    return McEstimate(value=mean, std_error=se, n_samples=n_samples)
