"""Functional-inequality constants and eigenvalue bounds for cumulant control.

Everything here reduces to symmetric dense linear algebra in the similarity
coordinates h = D^{1/2} g with D = diag(mu*): the symmetrized generator
becomes a symmetric matrix S whose top eigenvalue is 0 (constants) and whose
second eigenvalue is minus the spectral gap. The top eigenvalue of
S + diag(V) bounds the long-run cumulant growth of int V(X_t) dt; with
V = c f_hat that is the process cumulant bound kappa(c f_hat) fed into the
divergence layer. Similarity entries are formed from log-weight ratios so
thin stationary tails never produce 0/0.

Constants come from several routes: the spectral gap itself (Poincare), a
Poisson-equation solve for the reversible asymptotic variance, Liapunov
drift data for unbounded observables, a numeric entropy/Dirichlet search or
convexity data for log-Sobolev, a contraction/minorization rate for kernels
without spectral access, and an operator-perturbation bound for kappa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .chain import (
    GeneratorMatrix,
    Observable,
    StationaryMeasure,
    TransitionKernel,
    is_reversible,
    require_matching,
)
from .divergence import LambdaFunction, cgf
from .errors import (
    ConstraintViolatedError,
    DimensionMismatchError,
    DimensionTooLargeError,
    DomainViolationError,
    EigenFailureError,
    InsufficientSamplesError,
    InvalidModelError,
    LiapunovViolatedError,
    NonDecayingError,
    NotReversibleError,
    NumericFailure,
    OutOfRangeError,
    SingularPoissonError,
    ZeroGapError,
)

__all__ = [
    "FunctionalConstants",
    "BernsteinParams",
    "LiapunovData",
    "HarrisParams",
    "HarrisResult",
    "kappa",
    "kappa_lambda",
    "poincare_constant",
    "poincare_bernstein_params",
    "asymptotic_variance",
    "reversible_bernstein_params",
    "liapunov_bernstein_params",
    "perturbation_kappa_bound",
    "log_sobolev_lambda",
    "f_sobolev_lambda",
    "log_sobolev_constant_numeric",
    "harris_xi",
    "poincare_from_decay",
    "carlen_loss_beta",
    "hessian_constants",
]


@dataclass(frozen=True)
class FunctionalConstants:
    """Certified constants: Poincare alpha, optional log-Sobolev beta, provenance."""

    poincare_alpha: float
    log_sobolev_beta: float | None = None
    reversible: bool = False
    provenance: str = "spectral"

    def __post_init__(self):
        if not self.poincare_alpha > 0.0:
            raise InvalidModelError("poincare_alpha must be > 0")
        if self.log_sobolev_beta is not None:
            if self.log_sobolev_beta < 2.0 * self.poincare_alpha * (1.0 - 1e-12):
                raise ConstraintViolatedError(
                    "log-Sobolev beta must be >= 2 * poincare_alpha "
                    f"(beta={self.log_sobolev_beta!r}, alpha={self.poincare_alpha!r})"
                )


@dataclass(frozen=True)
class BernsteinParams:
    """(sigma^2, M_+, M_-) feeding the Bernstein cumulant envelope."""

    sigma2: float
    m_plus: float
    m_minus: float

    def __post_init__(self):
        if self.sigma2 < 0.0 or self.m_plus < 0.0 or self.m_minus < 0.0:
            raise InvalidModelError("Bernstein parameters must be >= 0")


@dataclass(frozen=True)
class LiapunovData:
    """Drift data: positive U and phi with -A[U]/U >= phi - b, b >= 0."""

    u: np.ndarray
    phi: np.ndarray
    b: float

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        phi = np.asarray(self.phi, dtype=float)
        if u.ndim != 1 or u.shape != phi.shape:
            raise DimensionMismatchError("U and phi must be equal-length vectors")
        if np.any(u <= 0.0) or not np.all(np.isfinite(u)):
            raise InvalidModelError("U must be strictly positive and finite")
        if np.any(phi <= 0.0) or not np.all(np.isfinite(phi)):
            raise InvalidModelError("phi must be strictly positive and finite")
        if self.b < 0.0:
            raise InvalidModelError("b must be >= 0")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "phi", phi)


@dataclass(frozen=True)
class HarrisParams:
    """Contraction/minorization data (R, K, gamma, alpha, alpha0, T)."""

    r_level: float
    k_bound: float
    gamma: float
    alpha: float
    alpha0: float
    t_step: float

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ConstraintViolatedError("gamma must lie in (0, 1)")
        if self.k_bound < 0.0:
            raise ConstraintViolatedError("K must be >= 0")
        if not 0.0 < self.alpha <= 1.0:
            raise ConstraintViolatedError("alpha must lie in (0, 1]")
        if not 0.0 < self.alpha0 < self.alpha:
            raise ConstraintViolatedError("alpha0 must lie in (0, alpha)")
        if not self.t_step > 0.0:
            raise ConstraintViolatedError("T must be > 0")
        if not self.r_level > 2.0 * self.k_bound / (1.0 - self.gamma):
            raise ConstraintViolatedError("need R > 2 K / (1 - gamma)")


@dataclass(frozen=True)
class HarrisResult:
    """Per-step contraction factor xi in (0, 1) and exponential rate per unit time."""

    xi: float
    rate: float


def _model_matrix(model) -> np.ndarray:
    if isinstance(model, GeneratorMatrix):
        return model.q
    if isinstance(model, TransitionKernel):
        return model.p - np.eye(model.n)
    raise InvalidModelError(f"not a finite-state model: {type(model).__name__}")


def _sym_similarity(m: np.ndarray, lw: np.ndarray) -> np.ndarray:
    """D^{1/2} (M + M*)/2 D^{-1/2} from log-weights; exact 0/0 avoidance."""
    e = 0.5 * (lw[:, None] - lw[None, :])
    mask = m != 0.0
    a = np.zeros_like(m)
    a[mask] = np.exp(e[mask]) * m[mask]
    return 0.5 * (a + a.T)


def _eigh(s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        return np.linalg.eigh(s)
    except np.linalg.LinAlgError as exc:
        raise EigenFailureError(f"symmetric eigensolve failed: {exc}") from exc


def kappa(model: GeneratorMatrix, v: np.ndarray, mu: StationaryMeasure) -> float:
    """Top eigenvalue of the symmetrized generator plus multiplication by v.

    This is the certified growth rate of E[exp(int v(X_t) dt)]; kappa(0) = 0
    with the constant eigenfunction.
    """
    require_matching(model, mu)
    v = np.asarray(v, dtype=float)
    if v.shape != (model.n,):
        raise DimensionMismatchError("potential length does not match model")
    s = _sym_similarity(_model_matrix(model), mu.log_weights)
    s = s + np.diag(v)
    w, _ = _eigh(0.5 * (s + s.T))
    return float(w[-1])


def kappa_lambda(model: GeneratorMatrix, f: Observable, mu: StationaryMeasure) -> LambdaFunction:
    """Cumulant bound c -> kappa(c f_hat) as a reusable LambdaFunction."""
    require_matching(model, mu)
    _require_centered(f, mu)
    s0 = _sym_similarity(_model_matrix(model), mu.log_weights)
    s0 = 0.5 * (s0 + s0.T)
    fc = f.centered

    def ev(c: float) -> float:
        w, _ = _eigh(s0 + np.diag(c * fc))
        return float(w[-1])

    return LambdaFunction(ev, (-math.inf, math.inf), "kappa")


def poincare_constant(model, mu: StationaryMeasure) -> float:
    """alpha = 1 / spectral gap of the symmetrized generator (P - I for kernels)."""
    require_matching(model, mu)
    s = _sym_similarity(_model_matrix(model), mu.log_weights)
    w, _ = _eigh(0.5 * (s + s.T))
    scale = max(1.0, float(np.abs(w).max()))
    if abs(w[-1]) > 1e-8 * scale:
        raise NumericFailure(f"top eigenvalue {w[-1]:.3e} is not 0; measure not stationary?")
    gap = -float(w[-2])
    if gap <= 1e-12 * scale:
        raise ZeroGapError("symmetrized generator has no spectral gap")
    return 1.0 / gap


def _require_centered(f: Observable, mu: StationaryMeasure) -> None:
    if f.measure_fingerprint != mu.model_fingerprint:
        raise DimensionMismatchError("observable was centered against a different measure")
    if f.n != mu.n:
        raise DimensionMismatchError("observable length does not match measure")


def poincare_bernstein_params(
    model, f: Observable, mu: StationaryMeasure, alpha: float | None = None
) -> BernsteinParams:
    """Bernstein data from the spectral gap alone.

    sigma^2 = 2 alpha Var(f), M_+- = alpha * one-sided sups of the centered
    observable. Valid for any irreducible model with a gap; does not need
    reversibility.
    """
    _require_centered(f, mu)
    if alpha is None:
        alpha = poincare_constant(model, mu)
    var = mu.variance(f.values)
    return BernsteinParams(2.0 * alpha * var, alpha * f.pos_sup, alpha * f.neg_sup)


def asymptotic_variance(model: GeneratorMatrix, f: Observable, mu: StationaryMeasure) -> float:
    """Poisson-equation pairing <(-A)^{-1} f_hat, f_hat>_mu for reversible generators.

    Solves the Poisson equation -A g = f_hat on the mu-mean-zero subspace
    through a bordered square system (LU), so the null direction is pinned
    without any pseudo-inverse.  The time-average CLT variance is twice this
    value; the Bernstein parameter builders apply that factor themselves.
    For the infinite-server queue with f = n this returns lambda / rho^2.
    """
    if not isinstance(model, GeneratorMatrix):
        raise InvalidModelError("asymptotic_variance expects a continuous-time generator")
    require_matching(model, mu)
    _require_centered(f, mu)
    if not is_reversible(model, mu):
        raise NotReversibleError("asymptotic variance needs a reversible generator")
    n = model.n
    b = np.zeros((n + 1, n + 1))
    b[:n, :n] = -model.q
    b[:n, n] = 1.0
    b[n, :n] = mu.weights
    rhs = np.zeros(n + 1)
    rhs[:n] = f.centered
    try:
        sol = np.linalg.solve(b, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularPoissonError(f"Poisson equation solve failed: {exc}") from exc
    g = sol[:n]
    residual = np.abs(-model.q @ g - f.centered).max()
    if residual > 1e-8 * max(1.0, np.abs(f.centered).max()):
        raise SingularPoissonError(f"Poisson solve residual {residual:.3e} too large")
    sigma2 = float(np.sum(mu.weights * g * f.centered))
    return max(sigma2, 0.0)


def reversible_bernstein_params(
    model: GeneratorMatrix, f: Observable, mu: StationaryMeasure, alpha: float | None = None
) -> BernsteinParams:
    """Bernstein data with the sharper reversible variance sigma^2(f).

    sigma^2(f) = 2 <(-A)^{-1} f_hat, f_hat>_mu, never larger than the plain
    Poincare value 2 alpha Var.
    """
    if alpha is None:
        alpha = poincare_constant(model, mu)
    sigma2 = 2.0 * asymptotic_variance(model, f, mu)
    return BernsteinParams(sigma2, alpha * f.pos_sup, alpha * f.neg_sup)


def liapunov_bernstein_params(
    model: GeneratorMatrix,
    f: Observable,
    mu: StationaryMeasure,
    lia: LiapunovData,
    alpha: float | None = None,
) -> BernsteinParams:
    """Bernstein data for observables dominated by a Liapunov pair.

    Checks -A[U]/U >= phi - b on every state (tolerance 1e-10), then uses
    M_+- = (1 + alpha b) * sup of the one-sided parts of f_hat / phi.
    """
    if not isinstance(model, GeneratorMatrix):
        raise InvalidModelError("liapunov_bernstein_params expects a generator")
    require_matching(model, mu)
    _require_centered(f, mu)
    if lia.u.shape != (model.n,):
        raise DimensionMismatchError("Liapunov data length does not match model")
    drift = -(model.q @ lia.u) / lia.u
    slack = drift - (lia.phi - lia.b)
    tol = 1e-10 * max(1.0, float(np.abs(lia.phi).max()) + lia.b)
    if slack.min() < -tol:
        raise LiapunovViolatedError(
            f"-A[U]/U >= phi - b fails by {-slack.min():.3e} at state {int(slack.argmin())}"
        )
    if alpha is None:
        alpha = poincare_constant(model, mu)
    sigma2 = 2.0 * asymptotic_variance(model, f, mu)
    ratio = f.centered / lia.phi
    m_plus = (1.0 + alpha * lia.b) * float(max(ratio.max(), 0.0))
    m_minus = (1.0 + alpha * lia.b) * float(max(-ratio.min(), 0.0))
    return BernsteinParams(sigma2, m_plus, m_minus)


def perturbation_kappa_bound(d_gap: float, b_plus: float, b_x0_norm2: float, c: float) -> float:
    """Operator-perturbation bound c^2 ||B x0||^2 / (D - c B^+) for kappa(A + c B).

    Requires 0 <= c < D / B^+ (any c >= 0 when B^+ = 0) and that B x0 is
    mean-zero, which holds for multiplication by a centered observable.
    """
    if d_gap <= 0.0 or b_plus < 0.0 or b_x0_norm2 < 0.0:
        raise OutOfRangeError("need D > 0, B^+ >= 0, ||B x0||^2 >= 0")
    if c < 0.0 or c * b_plus >= d_gap:
        raise OutOfRangeError(f"c={c!r} outside [0, D/B^+)")
    return c * c * b_x0_norm2 / (d_gap - c * b_plus)


def log_sobolev_lambda(f: Observable, mu: StationaryMeasure, beta: float) -> LambdaFunction:
    """Cumulant bound (1/beta) log E_mu[exp(beta c f_hat)] from a log-Sobolev constant."""
    _require_centered(f, mu)
    if beta <= 0.0:
        raise OutOfRangeError("beta must be > 0")
    w, fc = mu.weights, f.centered

    def ev(c: float) -> float:
        return cgf(w, fc, beta * c) / beta

    return LambdaFunction(ev, (-math.inf, math.inf), "log-sobolev")


def f_sobolev_lambda(
    f: Observable,
    mu: StationaryMeasure,
    f_map: Callable[[float], float],
    f_inv: Callable[[float], float],
    c: float,
) -> float:
    """Cumulant bound F(E_mu[F^{-1}(c f_hat)]) for a concave entropy gauge F.

    F must be strictly increasing and concave with F(1) = 0 and
    F(xy) <= F(x) + F(y); F = log recovers the log-Sobolev bound with
    beta = 1. Entries of c f_hat outside the range of F raise
    DomainViolationError.
    """
    _require_centered(f, mu)
    f1 = f_map(1.0)
    if not abs(f1) <= 1e-12:
        raise InvalidModelError(f"F(1) must be 0, got {f1!r}")
    v = c * f.centered
    ys = np.empty_like(v)
    for i, vi in enumerate(v):
        try:
            y = float(f_inv(float(vi)))
        except (ValueError, OverflowError, ZeroDivisionError) as exc:
            raise DomainViolationError(f"F^{{-1}} undefined at {vi!r}") from exc
        if math.isnan(y) or y < 0.0:
            raise DomainViolationError(f"F^{{-1}}({vi!r}) = {y!r} is not a valid mass")
        ys[i] = y
    mean = float(mu.weights @ ys)
    out = float(f_map(mean))
    if math.isnan(out):
        raise DomainViolationError(f"F undefined at mean {mean!r}")
    return out


_LS_TUBE = 1e-10


def _ls_context(s: np.ndarray, lw: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    d = np.exp(0.5 * lw)
    coff = s * (d[:, None] * d[None, :])
    np.fill_diagonal(coff, 0.0)
    coff = np.maximum(coff, 0.0)
    return s, lw, d, coff


def _dirichlet(u: np.ndarray, coff: np.ndarray) -> float:
    diff = u[:, None] - u[None, :]
    return 0.5 * float(np.sum(coff * diff * diff))


def _entropy_ratio(h: np.ndarray, ctx: tuple) -> tuple[float, float, float]:
    """Entropy over Dirichlet at unit norm, safe against cancellation.

    Entropy is summed as mu * ((1+w) log1p(w) - w) with w = h^2/mu - 1, every
    term nonnegative; the Dirichlet form is the pairwise-difference sum, every
    term nonnegative. Inside a small tube around the constant direction the
    ratio is replaced by its limit 2 |h_perp|^2 / D(h_perp), which never
    exceeds twice the Poincare constant.
    """
    _, _, d, coff = ctx
    h = h / np.linalg.norm(h)
    u = h / d
    dirichlet = _dirichlet(u, coff)
    if dirichlet <= 0.0:
        return 0.0, 0.0, -math.inf
    perp = h - float(h @ d) * d
    np2 = float(perp @ perp)
    if np2 < _LS_TUBE:
        ent = 2.0 * np2
        return ent, dirichlet, ent / dirichlet
    w = u * u - 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        psi = np.where(w > -1.0, (1.0 + w) * np.log1p(w) - w, 1.0)
    ent = float(np.sum(d * d * psi))
    return ent, dirichlet, ent / dirichlet


def _ratio_grad(h: np.ndarray, ctx: tuple, ent: float, dir_: float) -> np.ndarray:
    s, _, d, _ = ctx
    perp = h - float(h @ d) * d
    if float(perp @ perp) < _LS_TUBE:
        dent = 4.0 * perp
    else:
        w = (h / d) ** 2 - 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            dent = np.where(h != 0.0, 2.0 * h * (np.log1p(w) + 1.0), 0.0)
    ddir = -2.0 * (s @ h)
    grad = (dent * dir_ - ent * ddir) / (dir_ * dir_)
    return grad - (grad @ h) * h


def _ascend(h: np.ndarray, ctx: tuple, tol: float, max_iter: int) -> tuple[float, np.ndarray]:
    h = h / np.linalg.norm(h)
    ent, dir_, val = _entropy_ratio(h, ctx)
    if not math.isfinite(val):
        return -math.inf, h
    step = 0.5
    for _ in range(max_iter):
        grad = _ratio_grad(h, ctx, ent, dir_)
        gnorm = np.linalg.norm(grad)
        if gnorm == 0.0:
            break
        improved = False
        while step > 1e-14:
            hn = h + step * grad / gnorm
            hn /= np.linalg.norm(hn)
            ent_n, dir_n, val_n = _entropy_ratio(hn, ctx)
            if val_n > val:
                improved = True
                break
            step *= 0.5
        if not improved:
            break
        gain = val_n - val
        h, ent, dir_, val = hn, ent_n, dir_n, val_n
        step = min(step * 1.6, 1.0)
        if gain <= tol * max(1.0, abs(val)):
            break
    return val, h


def _polish(h: np.ndarray, ctx: tuple) -> float:
    """Drive the entropy/Dirichlet ratio to a stationary point with BFGS.

    The objective x -> ratio(x/|x|) is scale invariant, so the sphere
    constraint needs no explicit handling.
    """
    from scipy.optimize import minimize

    def neg(x: np.ndarray) -> tuple[float, np.ndarray]:
        nx = np.linalg.norm(x)
        hx = x / nx
        ent, dir_, val = _entropy_ratio(hx, ctx)
        if not math.isfinite(val) or dir_ <= 0.0:
            return 1e6, np.zeros_like(x)
        return -val, -_ratio_grad(hx, ctx, ent, dir_) / nx

    res = minimize(neg, h, jac=True, method="BFGS", options={"gtol": 1e-12, "maxiter": 800})
    xn = res.x / np.linalg.norm(res.x)
    out = _entropy_ratio(xn, ctx)[2]
    return out if math.isfinite(out) else -math.inf


def log_sobolev_constant_numeric(
    model,
    mu: StationaryMeasure,
    seed: int = 0,
    n_starts: int = 32,
    tol: float = 1e-8,
    max_iter: int = 4000,
) -> FunctionalConstants:
    """Numeric log-Sobolev constant: sup of entropy over Dirichlet form.

    Multi-start projected gradient ascent on the L2(mu) unit sphere (random
    starts plus every coordinate direction), floored at 2 * alpha since
    log-Sobolev implies Poincare; the search can only under-shoot the
    supremum, never exceed it. Provenance is "numeric": an estimate, not a
    certificate. State count is capped at 64.
    """
    require_matching(model, mu)
    if model.n > 64:
        raise DimensionTooLargeError("numeric log-Sobolev search is capped at 64 states")
    alpha = poincare_constant(model, mu)
    s = _sym_similarity(_model_matrix(model), mu.log_weights)
    s = 0.5 * (s + s.T)
    ctx = _ls_context(s, mu.log_weights)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    candidates: list[tuple[float, np.ndarray]] = []
    for _ in range(n_starts):
        h0 = rng.standard_normal(model.n)
        candidates.append(_ascend(h0, ctx, tol, max_iter))
    for i in range(model.n):
        h0 = np.full(model.n, 1e-3)
        h0[i] = 1.0
        candidates.append(_ascend(h0, ctx, tol, max_iter))
    candidates.sort(key=lambda c: c[0], reverse=True)
    best = candidates[0][0]
    for val, h in candidates[:4]:
        if math.isfinite(val):
            best = max(best, _polish(h, ctx))
    beta = max(best, 2.0 * alpha)
    return FunctionalConstants(
        poincare_alpha=alpha,
        log_sobolev_beta=beta,
        reversible=is_reversible(model, mu),
        provenance="numeric",
    )


def harris_xi(p: HarrisParams) -> HarrisResult:
    """Contraction factor and rate from minorization/drift data.

    gamma0 = gamma + 2K/R, beta = alpha0/K (limit K -> 0 gives the
    minorization branch alone), xi = max(1 - (alpha - alpha0),
    (2 + R beta gamma0) / (2 + R beta)), rate = log(1/xi) / T.
    """
    gamma0 = p.gamma + 2.0 * p.k_bound / p.r_level
    first = 1.0 - (p.alpha - p.alpha0)
    if p.k_bound == 0.0:
        second = gamma0
    else:
        beta = p.alpha0 / p.k_bound
        second = (2.0 + p.r_level * beta * gamma0) / (2.0 + p.r_level * beta)
    xi = max(first, second)
    if not 0.0 < xi < 1.0:
        raise ConstraintViolatedError(f"contraction factor xi={xi!r} not in (0, 1)")
    return HarrisResult(xi=xi, rate=math.log(1.0 / xi) / p.t_step)


def poincare_from_decay(
    decay_samples: Sequence[Sequence[tuple[float, float]]],
) -> FunctionalConstants:
    """alpha from observed semigroup decay ||P_t f - mean||.

    Each sample is a per-observable list of (t, norm) pairs; a least-squares
    line on log(norm) gives that observable's decay rate, and alpha is the
    reciprocal of the slowest one. Observables with all-zero norms (constants)
    are skipped; fewer than 3 usable points raise, as do non-decaying fits.
    """
    rates = []
    for pairs in decay_samples:
        pts = [(t, v) for t, v in pairs if v > 0.0]
        if not pts:
            continue  # constant observable: nothing decays
        if len(pts) < 3:
            raise InsufficientSamplesError("need at least 3 positive decay points per observable")
        t = np.array([x for x, _ in pts])
        y = np.log([v for _, v in pts])
        slope = np.polyfit(t, y, 1)[0]
        if slope >= 0.0:
            raise NonDecayingError(f"fitted decay rate {-slope:.3e} is not positive")
        rates.append(-slope)
    if not rates:
        raise InsufficientSamplesError("no non-constant observables in decay data")
    return FunctionalConstants(poincare_alpha=1.0 / min(rates), provenance="decay-fit")


def carlen_loss_beta(alpha: float, c_bound: float) -> float:
    """Log-Sobolev beta = 3 alpha + 1 / ((1 + alpha |C|) pi e^2) from a Poincare alpha.

    C is the uniform bound on the non-convex part of the potential's
    curvature scale; C = 0 gives 3 alpha + 1/(pi e^2).
    """
    if alpha <= 0.0:
        raise OutOfRangeError("alpha must be > 0")
    if c_bound < 0.0:
        raise OutOfRangeError("|C| must be >= 0")
    return 3.0 * alpha + 1.0 / ((1.0 + alpha * c_bound) * math.pi * math.e**2)


def hessian_constants(m: float, convention: str = "log-sobolev") -> FunctionalConstants:
    """Constants from a uniform Hessian lower bound on the potential.

    convention "poincare": D^2 V >= (1/alpha) I gives alpha = 1/m.
    convention "log-sobolev": D^2 V >= (2/beta) I gives beta = 2/m and the
    implied alpha = beta/2 = 1/m.
    """
    if m <= 0.0:
        raise OutOfRangeError("Hessian lower bound must be > 0")
    if convention == "poincare":
        return FunctionalConstants(poincare_alpha=1.0 / m, reversible=True, provenance="hessian")
    if convention == "log-sobolev":
        return FunctionalConstants(
            poincare_alpha=1.0 / m,
            log_sobolev_beta=2.0 / m,
            reversible=True,
            provenance="hessian",
        )
    raise OutOfRangeError(f"unknown convention {convention!r}")
