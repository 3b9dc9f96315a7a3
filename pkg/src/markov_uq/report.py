"""Assembly of certified bias bounds from a model, observable and entropy budget.

assemble_bound picks (or is told) a cumulant-bound method, derives its
constants from the spectral layer, optimizes the divergence in both signs
and packages everything into a serializable report. Discrete kernels are
uniformized at rate 1, which leaves both the stationary law and the
entropy rate per unit time unchanged, so continuous- and discrete-time
models flow through one code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import (
    GeneratorMatrix,
    Observable,
    StationaryMeasure,
    TransitionKernel,
    center_observable,
    invariant_measure,
    is_reversible,
)
from .divergence import LambdaFunction, XiResult, bernstein_xi, xi_infimum
from .entropy_rates import EntropyRate
from .errors import InvalidModelError, NoCertifiedMethod, OutOfRangeError
from .simulate import uniformize
from .spectral import (
    BernsteinParams,
    FunctionalConstants,
    LiapunovData,
    f_sobolev_lambda,
    liapunov_bernstein_params,
    log_sobolev_lambda,
    poincare_bernstein_params,
    poincare_constant,
    reversible_bernstein_params,
)

__all__ = ["UqBoundReport", "assemble_bound", "METHODS"]

METHODS = ("auto", "poincare", "reversible", "liapunov", "log-sobolev", "f-sobolev")


@dataclass(frozen=True)
class UqBoundReport:
    """Certified two-sided bias bound with all intermediate constants."""

    method: str
    n_states: int
    alpha: float
    beta: float | None
    sigma2: float | None
    m_plus: float | None
    m_minus: float | None
    eta: float
    eta_rate: float
    eta_initial: float
    t_horizon: float | None
    xi_plus: XiResult
    xi_minus: XiResult
    observable_mean: float

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "n_states": self.n_states,
            "alpha": self.alpha,
            "beta": self.beta,
            "sigma2": self.sigma2,
            "m_plus": self.m_plus,
            "m_minus": self.m_minus,
            "eta": self.eta,
            "eta_rate": self.eta_rate,
            "eta_initial": self.eta_initial,
            "T": self.t_horizon,
            "xi_plus": self.xi_plus.value,
            "xi_minus": self.xi_minus.value,
            "minimizer_plus": self.xi_plus.minimizer_c,
            "minimizer_minus": self.xi_minus.minimizer_c,
            "observable_mean": self.observable_mean,
        }


def _bernstein_xi_result(sigma2: float, m: float, eta: float) -> XiResult:
    value = bernstein_xi(sigma2, m, eta)
    if eta == 0.0:
        return XiResult(0.0, 0.0, "bernstein")
    denom = math.sqrt(sigma2) + m * math.sqrt(2.0 * eta)
    if denom == 0.0:
        return XiResult(value, "boundary", "bernstein")
    return XiResult(value, math.sqrt(2.0 * eta) / denom, "bernstein")


def _resolve_eta(eta, t_horizon: float | None) -> tuple[float, float, float]:
    if isinstance(eta, EntropyRate):
        if eta.initial_term > 0.0 and t_horizon is None:
            raise OutOfRangeError("an entropy budget with an initial term needs a horizon T")
        eff = eta.eta_at(t_horizon) if t_horizon is not None else eta.rate
        return eff, eta.rate, eta.initial_term
    eff = float(eta)
    if not eff >= 0.0 or math.isinf(eff):
        raise OutOfRangeError("eta must be finite and >= 0")
    return eff, eff, 0.0


def assemble_bound(
    model,
    f_values,
    eta,
    t_horizon: float | None = None,
    mu: StationaryMeasure | None = None,
    method: str = "auto",
    constants: FunctionalConstants | None = None,
    liapunov: LiapunovData | None = None,
) -> UqBoundReport:
    """Certified bound on +-(E_alt[(1/T) int f] - mu[f]) for a given budget.

    `eta` is a number (nats per unit time) or an EntropyRate whose initial
    term is amortized over t_horizon. Method "auto" takes the reversible
    variance when detailed balance holds and the Poincare envelope
    otherwise; "log-sobolev" needs `constants` carrying a beta;
    "liapunov" needs drift data; "f-sobolev" uses the logarithmic gauge
    (certified only when the model satisfies that inequality).
    """
    if method not in METHODS:
        raise OutOfRangeError(f"unknown method {method!r}; choose from {METHODS}")
    if mu is None:
        mu = invariant_measure(model)
    if isinstance(model, TransitionKernel):
        gen = uniformize(model, 1.0)
        mu = StationaryMeasure(mu.weights, mu.log_weights, gen.fingerprint)
    elif isinstance(model, GeneratorMatrix):
        gen = model
    else:
        raise InvalidModelError(f"cannot bound {type(model).__name__}")
    values = f_values.values if isinstance(f_values, Observable) else np.asarray(f_values, dtype=float)
    f = center_observable(values, mu)
    eta_eff, eta_rate, eta_initial = _resolve_eta(eta, t_horizon)
    alpha = poincare_constant(gen, mu)
    if method == "auto":
        method = "reversible" if is_reversible(gen, mu) else "poincare"

    beta = None
    params: BernsteinParams | None = None
    if method == "poincare":
        params = poincare_bernstein_params(gen, f, mu, alpha)
    elif method == "reversible":
        params = reversible_bernstein_params(gen, f, mu, alpha)
    elif method == "liapunov":
        if liapunov is None:
            raise NoCertifiedMethod("liapunov method needs drift data (U, phi, b)")
        params = liapunov_bernstein_params(gen, f, mu, liapunov, alpha)
    elif method == "log-sobolev":
        if constants is None or constants.log_sobolev_beta is None:
            raise NoCertifiedMethod("log-sobolev method needs a certified beta")
        beta = constants.log_sobolev_beta

    if params is not None:
        xi_plus = _bernstein_xi_result(params.sigma2, params.m_plus, eta_eff)
        xi_minus = _bernstein_xi_result(params.sigma2, params.m_minus, eta_eff)
        sigma2, m_plus, m_minus = params.sigma2, params.m_plus, params.m_minus
    else:
        if method == "log-sobolev":
            lam = log_sobolev_lambda(f, mu, beta)
        else:
            lam = LambdaFunction(
                lambda c: f_sobolev_lambda(f, mu, math.log, math.exp, c),
                (-math.inf, math.inf),
                "f-sobolev-log",
            )
        xi_plus = xi_infimum(lam, eta_eff, sign=1)
        xi_minus = xi_infimum(lam, eta_eff, sign=-1)
        sigma2 = m_plus = m_minus = None

    return UqBoundReport(
        method=method,
        n_states=gen.n,
        alpha=alpha,
        beta=beta,
        sigma2=sigma2,
        m_plus=m_plus,
        m_minus=m_minus,
        eta=eta_eff,
        eta_rate=eta_rate,
        eta_initial=eta_initial,
        t_horizon=t_horizon,
        xi_plus=xi_plus,
        xi_minus=xi_minus,
        observable_mean=float(mu.weights @ f.values),
    )
