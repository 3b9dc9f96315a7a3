"""Worked example models, each bundled with its analytic constants.

Every constructor returns the model together with its stationary measure
and a pack of analytic constants used as regression targets by the tests
and as certified inputs by the bound assembler. Analytic constants are
valid bounds but not always tight; the spectral routines may certify
sharper values on the same model.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import gammaln, logsumexp
from scipy.stats import poisson

from .chain import (
    GeneratorMatrix,
    StationaryMeasure,
    TransitionKernel,
    invariant_measure,
)
from .divergence import bernstein_lambda
from .errors import (
    DimensionTooLargeError,
    DisconnectedError,
    InvalidModelError,
    OutOfRangeError,
    StateSpaceTooLargeError,
    TruncationTooSmallError,
)
from .spectral import FunctionalConstants, hessian_constants

__all__ = [
    "SdeModel",
    "ExclusionSpec",
    "ZooModel",
    "mminfty_generator",
    "hypercube_kernel",
    "exclusion_chain",
    "langevin_model",
    "perturbed_model",
    "zoo_model",
    "zoo_names",
]

MAX_EXCLUSION_STATES = 20000
MAX_HYPERCUBE_DIM = 16


@dataclass(frozen=True)
class SdeModel:
    """Additive-noise SDE dX = b(X) dt + dW with optional potential data.

    `drift` (and `jacobian` when given) follow the batch convention:
    (m, dim) arrays in, (m, dim) respectively (m, dim, dim) out.
    """

    dim: int
    drift: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray] | None = None
    potential: Callable[[np.ndarray], np.ndarray] | None = None
    hessian_lb: float | None = None
    name: str = "sde"

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidModelError("dimension must be >= 1")
        if self.hessian_lb is not None and not self.hessian_lb > 0.0:
            raise InvalidModelError("Hessian lower bound must be > 0 when supplied")


def _check_graph(adjacency: np.ndarray) -> np.ndarray:
    a = np.asarray(adjacency)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidModelError("adjacency must be square")
    a = (a != 0).astype(int)
    if np.any(np.diag(a) != 0):
        raise InvalidModelError("adjacency must have a zero diagonal")
    if not np.array_equal(a, a.T):
        raise InvalidModelError("adjacency must be symmetric")
    n = a.shape[0]
    seen = np.zeros(n, dtype=bool)
    queue = deque([0])
    seen[0] = True
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(a[u]):
            if not seen[v]:
                seen[v] = True
                queue.append(int(v))
    if not seen.all():
        raise DisconnectedError("graph is not connected")
    return a


def _canonical_path_congestion(a: np.ndarray) -> int:
    """Length-weighted congestion of BFS canonical paths over directed edges.

    For every ordered vertex pair the canonical path is the BFS shortest
    path with lexicographic smallest-neighbor tie-break; each directed edge
    on it is charged the full path length, and the max charge is returned.
    """
    n = a.shape[0]
    neighbors = [np.flatnonzero(a[u]).tolist() for u in range(n)]
    load: dict[tuple[int, int], int] = {}
    for src in range(n):
        parent = [-1] * n
        seen = [False] * n
        seen[src] = True
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in neighbors[u]:
                if not seen[v]:
                    seen[v] = True
                    parent[v] = u
                    queue.append(v)
        for dst in range(n):
            if dst == src:
                continue
            path = [dst]
            while path[-1] != src:
                path.append(parent[path[-1]])
            path.reverse()
            length = len(path) - 1
            for u, v in zip(path, path[1:]):
                load[(u, v)] = load.get((u, v), 0) + length
    return max(load.values())


@dataclass(frozen=True)
class ExclusionSpec:
    """r-subset exclusion dynamics on a connected graph, with path constants.

    d0 is the max degree, d_r the max average degree over r-subsets, and
    delta0 the canonical-path congestion; alpha = r d_r delta0 / n and
    beta = 3 r d_r delta0 log(n) / n are the certified (upper-bound)
    constants.
    """

    adjacency: np.ndarray
    r: int
    d0: int = field(init=False)
    d_r: float = field(init=False)
    delta0: int = field(init=False)

    def __post_init__(self):
        a = _check_graph(self.adjacency)
        n = a.shape[0]
        if not 1 <= self.r <= n:
            raise OutOfRangeError(f"r={self.r} outside 1..{n}")
        degrees = a.sum(axis=1)
        object.__setattr__(self, "adjacency", a)
        object.__setattr__(self, "d0", int(degrees.max()))
        top = np.sort(degrees)[::-1][: self.r]
        object.__setattr__(self, "d_r", float(top.sum()) / self.r)
        object.__setattr__(self, "delta0", _canonical_path_congestion(a))

    @property
    def n_vertices(self) -> int:
        return self.adjacency.shape[0]

    @property
    def n_states(self) -> int:
        return math.comb(self.n_vertices, self.r)

    def states(self) -> tuple[tuple[int, ...], ...]:
        if self.n_states > MAX_EXCLUSION_STATES:
            raise StateSpaceTooLargeError(f"{self.n_states} exclusion states exceed {MAX_EXCLUSION_STATES}")
        return tuple(itertools.combinations(range(self.n_vertices), self.r))

    def constants(self) -> FunctionalConstants:
        n = self.n_vertices
        alpha = self.r * self.d_r * self.delta0 / n
        beta = 3.0 * self.r * self.d_r * self.delta0 * math.log(n) / n
        return FunctionalConstants(
            poincare_alpha=alpha,
            log_sobolev_beta=beta,
            reversible=True,
            provenance="canonical-paths",
        )


def mminfty_generator(
    lam: float, rho: float, n_trunc: int, mass_tol: float = 1e-12
) -> tuple[GeneratorMatrix, StationaryMeasure, dict]:
    """Infinite-server queue truncated to {0..n_trunc}.

    Births at rate lam, deaths at rate rho per customer; the truncation is
    reflecting (birth rate zeroed at n_trunc), which keeps the chain
    reversible with the truncated Poisson(lam/rho) stationary law exactly.
    The analytic pack carries alpha = 1/rho, the asymptotic variance
    lam/rho^2 of the customer-count observable, and its exact cumulant
    envelope lam c^2 / (rho^2 (1 - c/rho)).
    """
    if lam <= 0.0 or rho <= 0.0:
        raise OutOfRangeError("need lam > 0 and rho > 0")
    if n_trunc < 1:
        raise OutOfRangeError("need n_trunc >= 1")
    tail = float(poisson.sf(n_trunc, lam / rho))
    if tail >= mass_tol:
        raise TruncationTooSmallError(
            f"Poisson({lam / rho:g}) tail mass {tail:.3e} beyond {n_trunc} exceeds {mass_tol:g}"
        )
    n = n_trunc + 1
    q = np.zeros((n, n))
    idx = np.arange(n_trunc)
    q[idx, idx + 1] = lam
    q[idx + 1, idx] = rho * (idx + 1.0)
    np.fill_diagonal(q, -q.sum(axis=1))
    gen = GeneratorMatrix(tuple(range(n)), q)
    lw = np.arange(n) * math.log(lam / rho) - gammaln(np.arange(n) + 1.0)
    lw -= logsumexp(lw)
    mu = StationaryMeasure(np.exp(lw), lw, gen.fingerprint)
    pack = {
        "alpha": 1.0 / rho,
        "sigma2_n": lam / rho**2,
        "lambda_exact": bernstein_lambda(2.0 * lam / rho**2, 1.0 / rho, 1.0 / rho),
    }
    return gen, mu, pack


def hypercube_kernel(d: int) -> tuple[TransitionKernel, StationaryMeasure, dict]:
    """Lazy walk on {0,1}^d: pick a coordinate uniformly, then a uniform sign.

    The aggregate holding probability is 1/2; the stationary law is uniform
    and the walk has spectral gap 1/d, so the pack alpha is d.
    """
    if d < 1:
        raise OutOfRangeError("need d >= 1")
    if d > MAX_HYPERCUBE_DIM:
        raise DimensionTooLargeError(f"d={d} exceeds {MAX_HYPERCUBE_DIM}")
    n = 1 << d
    p = np.zeros((n, n))
    for x in range(n):
        p[x, x] = 0.5
        for i in range(d):
            p[x, x ^ (1 << i)] = 0.5 / d
    states = tuple(format(x, f"0{d}b") for x in range(n))
    kern = TransitionKernel(states, p)
    lw = np.full(n, -d * math.log(2.0))
    mu = StationaryMeasure(np.exp(lw), lw, kern.fingerprint)
    return kern, mu, {"alpha": float(d)}


def exclusion_chain(spec: ExclusionSpec) -> tuple[TransitionKernel, StationaryMeasure, FunctionalConstants]:
    """Degree-weighted r-exclusion kernel with certified path constants.

    From subset A: pick x in A with probability d(x)/sum_A d, pick a uniform
    neighbor y of x, move to A - x + y when y is vacant, else stay. The
    stationary measure is computed numerically; the returned constants are
    the canonical-path bounds, which upper-bound the spectral values.
    """
    states = spec.states()
    if len(states) < 2:
        raise InvalidModelError("exclusion chain needs at least 2 subsets")
    a = spec.adjacency
    degrees = a.sum(axis=1)
    index = {s: i for i, s in enumerate(states)}
    n_states = len(states)
    p = np.zeros((n_states, n_states))
    for i, occ in enumerate(states):
        occupied = set(occ)
        d_total = float(sum(degrees[x] for x in occ))
        for x in occ:
            for y in np.flatnonzero(a[x]):
                if int(y) in occupied:
                    continue
                dest = tuple(sorted(occupied - {x} | {int(y)}))
                p[i, index[dest]] += 1.0 / d_total
        p[i, i] = max(1.0 - p[i].sum(), 0.0)
    kern = TransitionKernel(states, p)
    mu = invariant_measure(kern)
    return kern, mu, spec.constants()


def langevin_model(
    potential: Callable[[np.ndarray], np.ndarray],
    grad_potential: Callable[[np.ndarray], np.ndarray],
    dim: int,
    hessian_lb: float | None = None,
    convention: str = "log-sobolev",
    jacobian: Callable[[np.ndarray], np.ndarray] | None = None,
    name: str = "langevin",
) -> tuple[SdeModel, FunctionalConstants | None]:
    """Overdamped dynamics dX = -grad V(X) dt + dW with Hessian constants.

    A uniform Hessian lower bound certifies the constants via
    hessian_constants; without one the model is returned bare and constants
    must come from elsewhere (decay fits, user-supplied values).
    """

    def drift(x: np.ndarray) -> np.ndarray:
        return -np.asarray(grad_potential(x))

    sde = SdeModel(
        dim=dim,
        drift=drift,
        jacobian=jacobian,
        potential=potential,
        hessian_lb=hessian_lb,
        name=name,
    )
    constants = hessian_constants(hessian_lb, convention) if hessian_lb is not None else None
    return sde, constants


def perturbed_model(model, rel: float = 0.1):
    """Deterministic multiplicative perturbation preserving support.

    Off-diagonal entry (i, j) is scaled by (1 + rel) on even i + j and by
    1/(1 + rel) on odd; generators rebuild the diagonal, kernels renormalize
    any row whose off-diagonal mass exceeds 1 and absorb the rest into the
    holding probability.
    """
    if not -1.0 < rel:
        raise OutOfRangeError("rel must be > -1")
    if not isinstance(model, (GeneratorMatrix, TransitionKernel)):
        raise InvalidModelError(f"cannot perturb {type(model).__name__}")
    i, j = np.indices((len(model.states), len(model.states)))
    factors = np.where((i + j) % 2 == 0, 1.0 + rel, 1.0 / (1.0 + rel))
    if isinstance(model, GeneratorMatrix):
        q = model.q * factors
        np.fill_diagonal(q, 0.0)
        np.fill_diagonal(q, -q.sum(axis=1))
        return GeneratorMatrix(model.states, q)
    if isinstance(model, TransitionKernel):
        p = model.p * factors
        np.fill_diagonal(p, 0.0)
        off = p.sum(axis=1)
        scale = np.where(off > 1.0, 1.0 / off, 1.0)
        p *= scale[:, None]
        np.fill_diagonal(p, 1.0 - p.sum(axis=1))
        p[p < 0.0] = 0.0
        return TransitionKernel(model.states, p)
    raise InvalidModelError(f"cannot perturb {type(model).__name__}")


@dataclass(frozen=True)
class ZooModel:
    """A named model instance plus everything the CLI needs to run it."""

    name: str
    kind: str
    model: object
    measure: StationaryMeasure | None
    pack: dict
    constants: FunctionalConstants | None
    observable_values: np.ndarray | None


def _parse_params(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    if not text:
        return out
    for item in text.split(","):
        if "=" not in item:
            raise InvalidModelError(f"malformed zoo parameter {item!r}, expected key=value")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _parse_graph(text: str) -> np.ndarray:
    if text.startswith("complete:"):
        k = int(text.split(":", 1)[1])
        return np.ones((k, k), dtype=int) - np.eye(k, dtype=int)
    if text.startswith("cycle:"):
        k = int(text.split(":", 1)[1])
        a = np.zeros((k, k), dtype=int)
        for u in range(k):
            a[u, (u + 1) % k] = a[(u + 1) % k, u] = 1
        return a
    with open(text) as fh:
        return np.asarray(json.load(fh))


def zoo_names() -> list[dict]:
    return [
        {"name": "mminfty", "params": "lam=1,rho=1,N=400,mass_tol=1e-12", "kind": "ctmc"},
        {"name": "hypercube", "params": "d=3", "kind": "dtmc"},
        {"name": "exclusion", "params": "graph=complete:4|cycle:6|<json file>,r=2", "kind": "dtmc"},
        {"name": "langevin", "params": "V=quadratic,dim=1,m=1", "kind": "sde"},
    ]


def zoo_model(text: str) -> ZooModel:
    """Build a zoo model from a CLI string like "mminfty:lam=1,rho=1,N=400"."""
    name, _, rest = text.partition(":")
    params = _parse_params(rest)
    try:
        if name == "mminfty":
            lam = float(params.pop("lam", "1"))
            rho = float(params.pop("rho", "1"))
            n_trunc = int(params.pop("N", "400"))
            mass_tol = float(params.pop("mass_tol", "1e-12"))
            _reject_extras(name, params)
            gen, mu, pack = mminfty_generator(lam, rho, n_trunc, mass_tol)
            values = np.arange(n_trunc + 1, dtype=float)
            return ZooModel(name, "ctmc", gen, mu, pack, None, values)
        if name == "hypercube":
            d = int(params.pop("d", "3"))
            _reject_extras(name, params)
            kern, mu, pack = hypercube_kernel(d)
            values = np.array([label.count("1") for label in kern.states], dtype=float)
            return ZooModel(name, "dtmc", kern, mu, pack, None, values)
        if name == "exclusion":
            graph = _parse_graph(params.pop("graph", "complete:4"))
            r = int(params.pop("r", "2"))
            _reject_extras(name, params)
            spec = ExclusionSpec(graph, r)
            kern, mu, constants = exclusion_chain(spec)
            values = np.array([1.0 if 0 in s else 0.0 for s in kern.states])
            pack = {"alpha": constants.poincare_alpha, "beta": constants.log_sobolev_beta}
            return ZooModel(name, "dtmc", kern, mu, pack, constants, values)
        if name == "langevin":
            shape = params.pop("V", "quadratic")
            dim = int(params.pop("dim", "1"))
            m = float(params.pop("m", "1"))
            _reject_extras(name, params)
            if shape != "quadratic":
                raise InvalidModelError(f"unknown potential {shape!r}; only 'quadratic' is built in")

            def potential(x):
                return 0.5 * m * np.sum(np.asarray(x) ** 2, axis=1)

            def grad(x):
                return m * np.asarray(x)

            def jac(x):
                x = np.asarray(x)
                return np.broadcast_to(-m * np.eye(dim), (x.shape[0], dim, dim))

            sde, constants = langevin_model(potential, grad, dim, hessian_lb=m, jacobian=jac)
            pack = {
                "alpha": constants.poincare_alpha,
                "beta": constants.log_sobolev_beta,
            }
            return ZooModel(name, "sde", sde, None, pack, constants, None)
    except ValueError as exc:
        raise InvalidModelError(f"bad zoo parameter in {text!r}: {exc}") from exc
    raise InvalidModelError(f"unknown zoo model {name!r}; known: mminfty, hypercube, exclusion, langevin")


def _reject_extras(name: str, params: dict) -> None:
    if params:
        raise InvalidModelError(f"unknown {name} parameters: {sorted(params)}")
