"""Finite-state Markov models and their stationary structure.

A continuous-time model is a generator matrix Q (non-negative off-diagonal
jump rates, rows summing to zero); a discrete-time model is a row-stochastic
kernel P. Stationary measures are solved directly: dense LU on the transposed
balance equations with the normalization row substituted in, or, for
birth-death (tridiagonal) models whose tail weights underflow double
precision, an exact log-space detailed-balance recursion. The measure keeps
its log-weights so that adjoints and similarity transforms can divide by
neighboring weights through log-ratios instead of raw underflowed values.

Observables are centered against a stationary measure before any bound is
formed; the centered positive/negative sups feed the Bernstein-style bounds.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.special import logsumexp

from .errors import (
    DimensionMismatchError,
    InvalidModelError,
    MeasureMismatchError,
    NonPositiveError,
    NotInvariantError,
    NumericFailure,
    ReducibleError,
)

__all__ = [
    "GeneratorMatrix",
    "TransitionKernel",
    "StationaryMeasure",
    "Observable",
    "invariant_measure",
    "symmetrize",
    "center_observable",
    "weighted_inner",
    "is_reversible",
    "model_from_json",
    "model_to_json",
    "observable_from_json",
]

# Entries of a solved stationary measure at or below this cannot be told apart
# from dense-solver noise; the log-space recursion path is exempt because its
# weights are positive by construction.
POSITIVITY_FLOOR = 1e-14

_ROW_TOL = 1e-12
_RESIDUAL_TOL = 1e-10


def _as_matrix(matrix) -> np.ndarray:
    m = np.array(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidModelError(f"matrix must be square, got shape {m.shape}")
    if m.shape[0] < 2:
        raise InvalidModelError("model needs at least 2 states")
    if not np.all(np.isfinite(m)):
        raise InvalidModelError("matrix entries must be finite")
    return m


def _check_states(states, n: int) -> tuple:
    states = tuple(tuple(s) if isinstance(s, list) else s for s in states)
    if len(states) != n:
        raise DimensionMismatchError(f"{len(states)} state labels for a {n}-state matrix")
    if len(set(states)) != n:
        raise InvalidModelError("state labels must be unique")
    return states


def _fingerprint(kind: str, states: tuple, m: np.ndarray) -> str:
    h = hashlib.sha256()
    h.update(kind.encode())
    h.update(repr(states).encode())
    h.update(str(m.shape).encode())
    h.update(m.tobytes())
    return h.hexdigest()


@dataclass(frozen=True)
class GeneratorMatrix:
    """Continuous-time model: off-diagonal rates >= 0, rows sum to zero."""

    states: tuple
    q: np.ndarray
    kind: str = field(default="ctmc", init=False)

    def __post_init__(self):
        m = _as_matrix(self.q)
        object.__setattr__(self, "states", _check_states(self.states, m.shape[0]))
        scale = np.maximum(np.abs(m).max(axis=1), 1.0)
        off = m.copy()
        np.fill_diagonal(off, 0.0)
        if np.any(off < -_ROW_TOL * scale[:, None]):
            raise InvalidModelError("generator off-diagonal entries must be >= 0")
        off[off < 0] = 0.0  # clamp rounding-level negatives
        row_err = np.abs(m.sum(axis=1))
        if np.any(row_err > _ROW_TOL * scale):
            raise InvalidModelError(
                f"generator rows must sum to 0 (worst residual {row_err.max():.3e})"
            )
        np.fill_diagonal(off, np.diag(m))
        off.flags.writeable = False
        object.__setattr__(self, "q", off)

    @property
    def n(self) -> int:
        return self.q.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return self.q

    @property
    def fingerprint(self) -> str:
        return _fingerprint(self.kind, self.states, self.q)


@dataclass(frozen=True)
class TransitionKernel:
    """Discrete-time model: entries in [0, 1], rows sum to one."""

    states: tuple
    p: np.ndarray
    kind: str = field(default="dtmc", init=False)

    def __post_init__(self):
        m = _as_matrix(self.p)
        object.__setattr__(self, "states", _check_states(self.states, m.shape[0]))
        if np.any(m < -_ROW_TOL) or np.any(m > 1.0 + _ROW_TOL):
            raise InvalidModelError("kernel entries must lie in [0, 1]")
        m = np.clip(m, 0.0, 1.0)
        row_err = np.abs(m.sum(axis=1) - 1.0)
        if np.any(row_err > _ROW_TOL):
            raise InvalidModelError(
                f"kernel rows must sum to 1 (worst residual {row_err.max():.3e})"
            )
        m.flags.writeable = False
        object.__setattr__(self, "p", m)

    @property
    def n(self) -> int:
        return self.p.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return self.p

    @property
    def fingerprint(self) -> str:
        return _fingerprint(self.kind, self.states, self.p)


@dataclass(frozen=True)
class StationaryMeasure:
    """Strictly positive probability weights tied to the model that produced them.

    ``log_weights`` are always finite even when far-tail ``weights`` underflow
    to zero; ratio computations must go through the log-weights.
    """

    weights: np.ndarray
    log_weights: np.ndarray
    model_fingerprint: str

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).copy()
        lw = np.asarray(self.log_weights, dtype=float).copy()
        if w.ndim != 1 or w.shape != lw.shape:
            raise DimensionMismatchError("weights and log_weights must be equal-length vectors")
        if not np.all(np.isfinite(lw)) or np.any(lw >= 0.0 + 1e-12):
            raise NonPositiveError("log-weights must be finite and negative")
        if np.any(w < 0.0):
            raise NonPositiveError("weights must be non-negative")
        if abs(w.sum() - 1.0) > _ROW_TOL:
            raise InvalidModelError(f"weights must sum to 1, got {w.sum()!r}")
        w.flags.writeable = False
        lw.flags.writeable = False
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "log_weights", lw)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def mean(self, values: np.ndarray) -> float:
        values = np.asarray(values, dtype=float)
        if values.shape != self.weights.shape:
            raise DimensionMismatchError("observable length does not match measure")
        return float(self.weights @ values)

    def variance(self, values: np.ndarray) -> float:
        values = np.asarray(values, dtype=float)
        c = values - self.mean(values)
        return float(self.weights @ (c * c))


@dataclass(frozen=True)
class Observable:
    """A state function together with its centering against a fixed measure."""

    values: np.ndarray
    centered: np.ndarray
    pos_sup: float
    neg_sup: float
    measure_fingerprint: str

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).copy()
        c = np.asarray(self.centered, dtype=float).copy()
        if v.ndim != 1 or v.shape != c.shape:
            raise DimensionMismatchError("values and centered must be equal-length vectors")
        v.flags.writeable = False
        c.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "centered", c)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def _balance_matrix(model) -> np.ndarray:
    if isinstance(model, GeneratorMatrix):
        return model.q
    if isinstance(model, TransitionKernel):
        return model.p - np.eye(model.n)
    raise InvalidModelError(f"not a finite-state model: {type(model).__name__}")


def _check_irreducible(m: np.ndarray) -> None:
    support = m.copy()
    np.fill_diagonal(support, 0.0)
    ncomp, _ = connected_components(
        csr_matrix(support > 0), directed=True, connection="strong"
    )
    if ncomp > 1:
        raise ReducibleError(f"chain has {ncomp} closed communicating classes")


def _tridiagonal_log_weights(m: np.ndarray) -> np.ndarray | None:
    """Exact detailed-balance log-weights for birth-death balance matrices."""
    n = m.shape[0]
    off = m.copy()
    np.fill_diagonal(off, 0.0)
    mask = np.abs(off) > 0
    idx = np.nonzero(mask)
    if np.any(np.abs(idx[0] - idx[1]) > 1):
        return None
    up = np.diag(m, 1)
    down = np.diag(m, -1)
    if np.any(up <= 0) or np.any(down <= 0):
        return None  # irreducibility check will have fired already
    lw = np.zeros(n)
    lw[1:] = np.cumsum(np.log(up) - np.log(down))
    return lw


def invariant_measure(model) -> StationaryMeasure:
    """Unique stationary measure of an irreducible model.

    Dense direct solve of mu @ M = 0, sum(mu) = 1 with M the generator (or
    P - I); birth-death models take the exact log-space recursion instead so
    arbitrarily thin tails stay representable. Weights from the dense path
    at or below 1e-14 are indistinguishable from solver noise and raise
    NonPositiveError.
    """
    m = _balance_matrix(model)
    _check_irreducible(m)
    n = m.shape[0]
    lw = _tridiagonal_log_weights(m)
    if lw is not None:
        lw = lw - logsumexp(lw)
        w = np.exp(lw)
        w = w / w.sum()
    else:
        a = m.T.copy()
        a[-1, :] = 1.0
        b = np.zeros(n)
        b[-1] = 1.0
        try:
            w = np.linalg.solve(a, b)
        except np.linalg.LinAlgError as exc:
            raise NumericFailure(f"stationary solve failed: {exc}") from exc
        if w.min() <= POSITIVITY_FLOOR:
            raise NonPositiveError(
                f"stationary weight {w.min():.3e} at or below the 1e-14 positivity floor"
            )
        w = w / w.sum()
        lw = np.log(w)
    residual = np.abs(w @ m).max()
    if residual > _RESIDUAL_TOL * max(1.0, np.abs(m).max()):
        raise NumericFailure(f"stationary residual {residual:.3e} too large")
    return StationaryMeasure(w, lw, model.fingerprint)


def require_matching(model, mu: StationaryMeasure) -> None:
    """Raise unless `mu` was computed for `model`."""
    if mu.model_fingerprint != model.fingerprint:
        raise MeasureMismatchError("stationary measure does not belong to this model")
    if mu.n != model.n:
        raise DimensionMismatchError("measure length does not match model")


def check_stationary(model, mu: StationaryMeasure, tol: float = 1e-8) -> None:
    """Raise NotInvariantError unless mu is stationary for the model."""
    if mu.n != model.n:
        raise DimensionMismatchError("measure length does not match model")
    m = _balance_matrix(model)
    residual = np.abs(mu.weights @ m).max()
    if residual > tol * max(1.0, np.abs(m).max()):
        raise NotInvariantError(f"stationarity residual {residual:.3e} exceeds {tol:.1e}")


def adjoint(model, mu: StationaryMeasure) -> np.ndarray:
    """Matrix of the adjoint in the mu-weighted inner product.

    Entry (i, j) is exp(lw_j - lw_i) * M[j, i]; the exponent is only formed
    where M[j, i] != 0, so thin-tailed measures never hit 0/0.
    """
    require_matching(model, mu)
    m = model.matrix
    lw = mu.log_weights
    ratio_exp = lw[None, :] - lw[:, None]
    mt = m.T
    mask = mt != 0.0
    out = np.zeros_like(m)
    out[mask] = np.exp(ratio_exp[mask]) * mt[mask]
    return out


def is_reversible(model, mu: StationaryMeasure, tol: float = 1e-10) -> bool:
    """True when mu_i M_ij == mu_j M_ji within `tol` of the largest flux."""
    require_matching(model, mu)
    m = model.matrix
    w = mu.weights
    flux = w[:, None] * m
    residual = np.abs(flux - flux.T).max()
    scale = np.abs(flux).max()
    return bool(residual <= tol * max(scale, 1e-300))


def symmetrize(model: GeneratorMatrix, mu: StationaryMeasure) -> GeneratorMatrix:
    """Additive-reversibilization (A + A*)/2; self-adjoint in L2(mu).

    The result is itself a generator: the adjoint has non-negative
    off-diagonals and zero row sums because mu is stationary.
    """
    if not isinstance(model, GeneratorMatrix):
        raise InvalidModelError("symmetrize expects a continuous-time generator")
    a_star = adjoint(model, mu)
    a_s = 0.5 * (model.q + a_star)
    sym = GeneratorMatrix(model.states, a_s)
    flux = mu.weights[:, None] * sym.q
    residual = np.abs(flux - flux.T).max()
    if residual > 1e-12 * max(np.abs(flux).max(), 1e-300):
        raise NumericFailure(f"symmetrization residual {residual:.3e} too large")
    return sym


def center_observable(values: Sequence[float] | np.ndarray, mu: StationaryMeasure) -> Observable:
    """Center `values` under mu and record the one-sided sups of the result."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.shape[0] != mu.n:
        raise DimensionMismatchError(
            f"observable has length {v.shape}, measure has {mu.n} states"
        )
    if not np.all(np.isfinite(v)):
        raise InvalidModelError("observable values must be finite")
    centered = v - mu.mean(v)
    pos_sup = float(max(centered.max(), 0.0))
    neg_sup = float(max(-centered.min(), 0.0))
    return Observable(v, centered, pos_sup, neg_sup, _measure_tag(mu))


def _measure_tag(mu: StationaryMeasure) -> str:
    return mu.model_fingerprint


def weighted_inner(g, h, mu: StationaryMeasure) -> float:
    """L2(mu) inner product sum_i mu_i g_i h_i."""
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    if g.shape != (mu.n,) or h.shape != (mu.n,):
        raise DimensionMismatchError("weighted_inner arguments must match the measure length")
    return float(np.sum(mu.weights * g * h))


def model_from_json(obj: dict | str):
    """Build a model from {"kind": "ctmc"|"dtmc", "states": [...], "matrix": [[...]]}."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict):
        raise InvalidModelError("model document must be a JSON object")
    missing = {"kind", "states", "matrix"} - set(obj)
    if missing:
        raise InvalidModelError(f"model document missing fields: {sorted(missing)}")
    kind = obj["kind"]
    if kind == "ctmc":
        return GeneratorMatrix(tuple(_listify(obj["states"])), np.array(obj["matrix"], dtype=float))
    if kind == "dtmc":
        return TransitionKernel(tuple(_listify(obj["states"])), np.array(obj["matrix"], dtype=float))
    raise InvalidModelError(f"unknown model kind {kind!r}")


def _listify(states):
    return [tuple(s) if isinstance(s, list) else s for s in states]


def model_to_json(model) -> dict:
    """Inverse of model_from_json."""
    m = _balance_matrix(model)  # validates the type
    del m
    states = [list(s) if isinstance(s, tuple) else s for s in model.states]
    return {
        "kind": model.kind,
        "states": states,
        "matrix": [[float(x) for x in row] for row in model.matrix],
    }


def observable_from_json(obj: dict | str) -> np.ndarray:
    """Extract raw values from {"values": [...]}; centering happens separately."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "values" not in obj:
        raise InvalidModelError('observable document must be {"values": [...]}')
    v = np.array(obj["values"], dtype=float)
    if v.ndim != 1:
        raise InvalidModelError("observable values must be a flat list")
    return v
