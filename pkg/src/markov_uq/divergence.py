"""Divergence-to-bias conversion for expectations under model perturbation.

Core object: a convex cumulant bound Lambda with Lambda(0) = 0. Any such
bound turns a relative-entropy budget eta into a certified bias bound

    Xi(Lambda, eta) = inf_{c > 0} (Lambda(c) + eta) / c,

applied at +-c for the two signs of the bias. The infimum is unimodal in c,
so a log-spaced scan plus golden-section refinement finds it to relative
tolerance 1e-10 in c. The Bernstein envelope sigma^2 c^2 / (2 (1 - c M))
admits the closed form sqrt(2 sigma^2 eta) + M eta, which the numeric
infimum must reproduce.

Exponential tilting of a finite distribution realizes the bound with
equality: solve_tilt_level finds the tilt whose divergence equals eta, and
the tilted mean gap then matches Xi computed from the empirical cumulant
generating function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from .errors import (
    ConstantObservableError,
    DimensionMismatchError,
    DomainViolationError,
    EtaUnreachableError,
    EvaluationFailureError,
    InvalidModelError,
    NumericFailure,
    OutOfRangeError,
)

__all__ = [
    "LambdaFunction",
    "XiResult",
    "cgf",
    "relative_entropy",
    "xi_infimum",
    "bernstein_xi",
    "bernstein_lambda",
    "empirical_cgf_lambda",
    "linearized_xi",
    "tilted_measure",
    "solve_tilt_level",
]

DEFAULT_C_CAP = 1e8


@dataclass(frozen=True)
class LambdaFunction:
    """Convex cumulant bound: evaluator, open domain of finiteness, method tag."""

    evaluator: Callable[[float], float]
    domain: tuple = (-math.inf, math.inf)
    kind: str = "generic"

    def __post_init__(self):
        lo, hi = self.domain
        if not (lo < 0.0 < hi):
            raise InvalidModelError("Lambda domain must be an open interval around 0")
        v0 = self.evaluator(0.0)
        if not abs(v0) <= 1e-10:
            raise InvalidModelError(f"cumulant bound must vanish at 0, got {v0!r}")

    def __call__(self, c: float) -> float:
        lo, hi = self.domain
        if not lo < c < hi:
            return math.inf
        v = float(self.evaluator(c))
        if math.isnan(v):
            raise EvaluationFailureError(f"cumulant bound returned NaN at c={c!r}")
        return v


@dataclass(frozen=True)
class XiResult:
    """Certified one-sided bias bound: value, minimizing c (or 'boundary'), tag."""

    value: float
    minimizer_c: float | str
    method: str

    def __post_init__(self):
        if self.value < -1e-12:
            raise NumericFailure(f"bias bound must be >= 0, got {self.value!r}")
        if self.value < 0.0:
            object.__setattr__(self, "value", 0.0)


def cgf(p: np.ndarray, f: np.ndarray, c: float) -> float:
    """log E_p[exp(c f)], evaluated with a max-shift; exactly 0 at c = 0."""
    p = np.asarray(p, dtype=float)
    f = np.asarray(f, dtype=float)
    if p.shape != f.shape or p.ndim != 1:
        raise DimensionMismatchError("cgf needs equal-length weight and value vectors")
    if c == 0.0:
        return 0.0
    return float(logsumexp(c * f, b=p))


def relative_entropy(p_tilde: np.ndarray, p: np.ndarray) -> float:
    """KL divergence sum p_tilde log(p_tilde / p); +inf off the support of p."""
    pt = np.asarray(p_tilde, dtype=float)
    p = np.asarray(p, dtype=float)
    if pt.shape != p.shape or pt.ndim != 1:
        raise DimensionMismatchError("relative_entropy needs equal-length distributions")
    for name, v in (("p_tilde", pt), ("p", p)):
        if np.any(v < 0.0):
            raise InvalidModelError(f"{name} has negative entries")
        if abs(v.sum() - 1.0) > 1e-12:
            raise InvalidModelError(f"{name} must sum to 1, got {v.sum()!r}")
    on = pt > 0.0
    if np.any(p[on] == 0.0):
        return math.inf
    return float(np.sum(pt[on] * (np.log(pt[on]) - np.log(p[on]))))


def _objective(lam: LambdaFunction, eta: float, sign: int):
    def obj(c: float) -> float:
        # arguments past the gauge's numeric range contribute +inf, not an abort
        try:
            v = lam(sign * c)
        except DomainViolationError:
            return math.inf
        if math.isinf(v):
            return math.inf
        return (v + eta) / c

    return obj


def xi_infimum(
    lam: LambdaFunction,
    eta: float,
    sign: int = 1,
    c_cap: float = DEFAULT_C_CAP,
    rel_tol: float = 1e-10,
) -> XiResult:
    """Minimize (Lambda(sign c) + eta) / c over c in (0, cap).

    Log-spaced scan over 18 decades brackets the (unimodal) minimum, then
    golden-section refines log c to `rel_tol`. When the best value sits on
    the first or last scan point the infimum is attained only in the limit
    c -> 0 or c -> cap and the minimizer is reported as "boundary".
    """
    if eta < 0.0:
        raise OutOfRangeError("eta must be >= 0")
    if sign not in (1, -1):
        raise OutOfRangeError("sign must be +1 or -1")
    lo_dom, hi_dom = lam.domain
    edge = hi_dom if sign > 0 else -lo_dom
    cap = min(c_cap, edge)
    if not cap > 0.0:
        raise OutOfRangeError("empty optimization range")
    if math.isinf(cap):
        cap = DEFAULT_C_CAP
    obj = _objective(lam, eta, sign)

    n_grid = 241
    grid = np.geomspace(cap * 1e-18, cap * (1.0 - 1e-9) if math.isfinite(cap) else cap, n_grid)
    vals = np.array([obj(c) for c in grid])
    if np.all(np.isinf(vals)):
        raise EvaluationFailureError("cumulant bound is +inf on the whole scan range")
    k = int(np.argmin(vals))
    if k == 0 or k == n_grid - 1:
        return XiResult(float(vals[k]), "boundary", lam.kind)

    lo, hi = math.log(grid[k - 1]), math.log(grid[k + 1])
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = obj(math.exp(x1)), obj(math.exp(x2))
    best_c, best_v = grid[k], vals[k]
    while hi - lo > rel_tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = obj(math.exp(x1))
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = obj(math.exp(x2))
        if f1 < best_v:
            best_c, best_v = math.exp(x1), f1
        if f2 < best_v:
            best_c, best_v = math.exp(x2), f2
    return XiResult(float(best_v), float(best_c), lam.kind)


def bernstein_xi(sigma2: float, m: float, eta: float) -> float:
    """Closed-form bias bound sqrt(2 sigma^2 eta) + m eta."""
    if sigma2 < 0.0 or m < 0.0 or eta < 0.0:
        raise OutOfRangeError("bernstein_xi arguments must be >= 0")
    return math.sqrt(2.0 * sigma2 * eta) + m * eta


def bernstein_lambda(sigma2: float, m_plus: float, m_minus: float | None = None) -> LambdaFunction:
    """Bernstein envelope sigma^2 c^2 / (2 (1 - c M)) with one-sided slopes.

    Positive arguments use m_plus, negative ones m_minus (defaults to
    m_plus); the domain is the open interval (-1/m_minus, 1/m_plus).
    """
    if sigma2 < 0.0 or m_plus < 0.0:
        raise OutOfRangeError("sigma2 and m_plus must be >= 0")
    mm = m_plus if m_minus is None else m_minus
    if mm < 0.0:
        raise OutOfRangeError("m_minus must be >= 0")
    hi = math.inf if m_plus == 0.0 else 1.0 / m_plus
    lo = -math.inf if mm == 0.0 else -1.0 / mm

    def ev(c: float) -> float:
        m = m_plus if c >= 0.0 else mm
        den = 1.0 - abs(c) * m
        if den <= 0.0:
            return math.inf
        return sigma2 * c * c / (2.0 * den)

    return LambdaFunction(ev, (lo, hi), "bernstein")


def empirical_cgf_lambda(p: np.ndarray, f_centered: np.ndarray) -> LambdaFunction:
    """Exact cumulant generating function of a centered finite observable."""
    p = np.asarray(p, dtype=float)
    f = np.asarray(f_centered, dtype=float)
    mean = float(p @ f)
    if abs(mean) > 1e-10 * max(1.0, np.abs(f).max()):
        raise InvalidModelError("empirical_cgf_lambda expects a centered observable")
    return LambdaFunction(lambda c: cgf(p, f, c), (-math.inf, math.inf), "empirical-cgf")


def linearized_xi(variance: float, eta: float) -> float:
    """Small-eta leading term sqrt(2 Var eta) of the bias bound."""
    if variance < 0.0 or eta < 0.0:
        raise OutOfRangeError("linearized_xi arguments must be >= 0")
    return math.sqrt(2.0 * variance * eta)


def tilted_measure(p: np.ndarray, f: np.ndarray, c: float) -> np.ndarray:
    """Exponential tilt p_i exp(c f_i) / Z, formed with a max-shift."""
    p = np.asarray(p, dtype=float)
    f = np.asarray(f, dtype=float)
    if p.shape != f.shape or p.ndim != 1:
        raise DimensionMismatchError("tilted_measure needs equal-length vectors")
    with np.errstate(divide="ignore"):
        logw = np.where(p > 0.0, np.log(np.where(p > 0.0, p, 1.0)) + c * f, -np.inf)
    logz = logsumexp(logw)
    out = np.exp(logw - logz)
    return out / out.sum()


def _tilt_divergence(p: np.ndarray, f: np.ndarray, c: float) -> float:
    """R(p^c || p) = c E_{p^c}[f] - cgf(p, f, c), stable for large c."""
    q = tilted_measure(p, f, c)
    return c * float(q @ f) - cgf(p, f, c)


def solve_tilt_level(p: np.ndarray, f: np.ndarray, eta: float) -> float:
    """The unique c >= 0 with R(tilted_measure(p, f, c) || p) = eta.

    The divergence is 0 at c = 0 and increases to -log p(argmax f), so a
    bracket-doubling search plus Brent's method pins c; levels at or beyond
    the supremum raise EtaUnreachableError.
    """
    p = np.asarray(p, dtype=float)
    f = np.asarray(f, dtype=float)
    if p.shape != f.shape or p.ndim != 1:
        raise DimensionMismatchError("solve_tilt_level needs equal-length vectors")
    if eta < 0.0:
        raise OutOfRangeError("eta must be >= 0")
    support = p > 0.0
    fs = f[support]
    scale = max(float(np.abs(fs).max()), 1.0)
    if fs.max() - fs.min() <= 1e-12 * scale:
        raise ConstantObservableError("observable is constant on the support")
    if eta == 0.0:
        return 0.0
    top = fs.max() - 1e-12 * scale
    eta_sup = -math.log(float(p[support & (f >= top)].sum()))
    if eta >= eta_sup * (1.0 - 1e-12):
        raise EtaUnreachableError(
            f"eta={eta!r} is at or beyond the reachable supremum {eta_sup!r}"
        )

    hi = 1.0
    for _ in range(2000):
        if _tilt_divergence(p, f, hi) >= eta:
            break
        hi *= 2.0
    else:
        raise EtaUnreachableError("could not bracket the requested divergence level")
    c = brentq(lambda x: _tilt_divergence(p, f, x) - eta, 0.0, hi, xtol=1e-14, rtol=8.9e-16)
    if abs(_tilt_divergence(p, f, c) - eta) > 1e-10:
        raise NumericFailure("tilt level solve did not reach the 1e-10 residual target")
    return float(c)
