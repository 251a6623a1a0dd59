"""Finite state spaces, target distributions, and transition matrices.

All vectors and matrices are dense numpy arrays indexed by 0-based state.
Distributions optionally carry an exact `fractions.Fraction` representation
alongside their float values; constructions that renormalize (conditional
distributions of Gibbs blocks, for instance) use the exact form when it is
available, so matrices transcribed from rational entries are reproduced
bit-for-bit.

Everything here is immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidDistribution,
    NonPositiveWeight,
    NotIrreducible,
    NotReversible,
    NotRowStochastic,
    SingularSystem,
    TooFewStates,
)

# Absolute tolerance per state for row sums, detailed balance and
# distribution normalization; double precision leaves ample headroom
# at the dense sizes this library targets.
ATOL_PER_STATE = 1e-12

# Stationarity residual required of a computed stationary distribution.
STATIONARY_SOLVE_TOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def struct_tol(n: int) -> float:
    """Default structural tolerance for an n-state chain."""
    return ATOL_PER_STATE * n


@dataclass(frozen=True)
class TargetDistribution:
    """A strictly positive probability vector over an indexed state space.

    Parameters
    ----------
    probs : ndarray
        Probabilities, all > 0, summing to one within ``struct_tol(n)``.
    labels : tuple of str, optional
        Presentation-only state names.
    exact : tuple of Fraction, optional
        Exact rational values of ``probs`` (``float(exact[i]) == probs[i]``),
        kept when the distribution was built from rational weights.
    """

    probs: np.ndarray
    labels: Optional[tuple] = None
    exact: Optional[tuple] = None

    def __post_init__(self):
        p = _frozen(self.probs)
        object.__setattr__(self, "probs", p)
        if p.ndim != 1:
            raise InvalidDistribution("probability vector must be 1-d")
        n = p.size
        if n < 2:
            raise TooFewStates(f"need at least 2 states, got {n}")
        if np.any(p <= 0.0) or not np.all(np.isfinite(p)):
            bad = int(np.argmin(p))
            raise NonPositiveWeight(f"probability {p[bad]!r} at state {bad}")
        if abs(p.sum() - 1.0) > struct_tol(n):
            raise InvalidDistribution(f"probabilities sum to {p.sum()!r}, not 1")
        if self.labels is not None and len(self.labels) != n:
            raise DimensionMismatch("labels/probs length mismatch")
        if self.exact is not None and len(self.exact) != n:
            raise DimensionMismatch("exact/probs length mismatch")

    @property
    def n(self) -> int:
        return self.probs.size

    def diag(self) -> np.ndarray:
        """The diagonal matrix with the probabilities on the diagonal."""
        return np.diag(self.probs)


def new_distribution(weights, normalize: bool = True, labels=None) -> TargetDistribution:
    """Build a target distribution from positive weights.

    Weights may be ints, floats, `Fraction` objects, or strings such as
    ``"4/9"``; they are converted exactly to rationals, so normalization
    introduces no rounding beyond the final float conversion.

    Raises
    ------
    NonPositiveWeight
        If any weight is zero or negative.
    TooFewStates
        If fewer than two weights are given.
    InvalidDistribution
        If ``normalize`` is false and the weights do not already sum to one.
    """
    ws = [w if isinstance(w, Fraction) else Fraction(w) for w in weights]
    if len(ws) < 2:
        raise TooFewStates(f"need at least 2 states, got {len(ws)}")
    for i, w in enumerate(ws):
        if w <= 0:
            raise NonPositiveWeight(f"weight {w} at state {i}")
    total = sum(ws)
    if normalize:
        exact = tuple(w / total for w in ws)
    else:
        if abs(float(total) - 1.0) > struct_tol(len(ws)):
            raise InvalidDistribution(f"weights sum to {float(total)!r}, not 1")
        exact = tuple(ws)
    probs = np.array([float(w) for w in exact])
    labels = tuple(labels) if labels is not None else None
    return TargetDistribution(probs=probs, labels=labels, exact=exact)


def uniform(n: int) -> TargetDistribution:
    """The uniform distribution on ``n`` states."""
    return new_distribution([1] * n)


@dataclass(frozen=True)
class Functional:
    """A real-valued function on the state space, as a vector of values."""

    values: np.ndarray
    mean_removed: bool = False

    def __post_init__(self):
        v = _frozen(self.values)
        object.__setattr__(self, "values", v)
        if v.ndim != 1:
            raise DimensionMismatch("functional values must be 1-d")

    @property
    def n(self) -> int:
        return self.values.size


def func_values(f) -> np.ndarray:
    """Accept a Functional or any 1-d array-like and return its values."""
    if isinstance(f, Functional):
        return f.values
    return np.asarray(f, dtype=float)


def _check_dim(n: int, m: int, what: str):
    if n != m:
        raise DimensionMismatch(f"{what}: {n} vs {m}")


def weighted_inner(f, g, pi: TargetDistribution) -> float:
    """Inner product sum_x f(x) g(x) pi(x)."""
    fv, gv = func_values(f), func_values(g)
    _check_dim(fv.size, gv.size, "functionals")
    _check_dim(fv.size, pi.n, "functional vs distribution")
    return float(np.dot(fv * gv, pi.probs))


def pi_mean(f, pi: TargetDistribution) -> float:
    """Expectation of f under pi."""
    fv = func_values(f)
    _check_dim(fv.size, pi.n, "functional vs distribution")
    return float(np.dot(fv, pi.probs))


def project_zero_mean(f, pi: TargetDistribution) -> Functional:
    """Subtract the pi-mean so the result is orthogonal to constants."""
    fv = func_values(f)
    _check_dim(fv.size, pi.n, "functional vs distribution")
    return Functional(values=fv - np.dot(fv, pi.probs), mean_removed=True)


@dataclass(frozen=True)
class TransitionMatrix:
    """A row-stochastic matrix of transition probabilities.

    Entries must be non-negative (values above ``-struct_tol(n)`` are
    clamped to zero, anything lower is rejected) and each row must sum to
    one within ``struct_tol(n)``.
    """

    entries: np.ndarray

    def __post_init__(self):
        e = np.array(self.entries, dtype=float)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise NotRowStochastic(f"matrix must be square, got shape {e.shape}")
        n = e.shape[0]
        tol = struct_tol(n)
        low = e.min()
        if low < -tol or not np.all(np.isfinite(e)):
            i, j = np.unravel_index(int(np.argmin(e)), e.shape)
            raise NotRowStochastic(f"negative entry {e[i, j]!r} at ({i}, {j})")
        if low < 0.0:
            e[e < 0.0] = 0.0
        rows = e.sum(axis=1)
        bad = int(np.argmax(np.abs(rows - 1.0)))
        if abs(rows[bad] - 1.0) > tol:
            raise NotRowStochastic(f"row {bad} sums to {rows[bad]!r}, not 1")
        object.__setattr__(self, "entries", _frozen(e))

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def matrix_values(P) -> np.ndarray:
    """Accept a TransitionMatrix or a raw square array and return entries."""
    if isinstance(P, TransitionMatrix):
        return P.entries
    return np.asarray(P, dtype=float)


@dataclass(frozen=True)
class StructureReport:
    """Structural facts about a transition matrix relative to a distribution."""

    reversible: bool
    db_violation: float
    irreducible: bool
    period: int
    stationary_ok: bool
    stationarity_violation: float


def detailed_balance_violation(P, pi: TargetDistribution) -> float:
    """max |pi(x) P(x,y) - pi(y) P(y,x)| over all state pairs."""
    e = matrix_values(P)
    _check_dim(e.shape[0], pi.n, "matrix vs distribution")
    F = pi.probs[:, None] * e
    return float(np.max(np.abs(F - F.T)))


def stationarity_violation(P, pi: TargetDistribution) -> float:
    """max |(pi P)(y) - pi(y)| over states."""
    e = matrix_values(P)
    _check_dim(e.shape[0], pi.n, "matrix vs distribution")
    return float(np.max(np.abs(pi.probs @ e - pi.probs)))


def _reachable(adj: np.ndarray, start: int) -> np.ndarray:
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[start] = True
    frontier = np.array([start])
    while frontier.size:
        nxt = np.flatnonzero(adj[frontier].any(axis=0) & ~seen)
        seen[nxt] = True
        frontier = nxt
    return seen


def is_irreducible(P) -> bool:
    """Strong connectivity of the directed graph of positive entries."""
    adj = matrix_values(P) > 0.0
    return bool(_reachable(adj, 0).all() and _reachable(adj.T, 0).all())


def chain_period(P) -> int:
    """Period of the component of state 0: gcd of cycle lengths through it.

    Computed from BFS levels: every positive transition u -> v contributes
    ``level(u) + 1 - level(v)`` to the gcd.  Returns 1 for aperiodic chains.
    """
    adj = matrix_values(P) > 0.0
    n = adj.shape[0]
    level = np.full(n, -1, dtype=int)
    level[0] = 0
    frontier = np.array([0])
    while frontier.size:
        nxt = np.flatnonzero(adj[frontier].any(axis=0) & (level < 0))
        level[nxt] = level[frontier[0]] + 1
        frontier = nxt
    reach = level >= 0
    g = 0
    for u in np.flatnonzero(reach):
        for v in np.flatnonzero(adj[u]):
            g = gcd(g, abs(level[u] + 1 - level[v]))
    return g if g > 0 else 1


def validate_structure(P, pi: TargetDistribution, tol: Optional[float] = None) -> StructureReport:
    """Check reversibility, stationarity, irreducibility and period.

    ``tol`` bounds the detailed-balance violation for reversibility
    (default ``struct_tol(n)``); stationarity is checked at ``n * tol``,
    which makes "reversible implies stationary" hold by construction.
    """
    e = matrix_values(P)
    _check_dim(e.shape[0], pi.n, "matrix vs distribution")
    n = pi.n
    if tol is None:
        tol = struct_tol(n)
    db = detailed_balance_violation(e, pi)
    st = stationarity_violation(e, pi)
    return StructureReport(
        reversible=db <= tol,
        db_violation=db,
        irreducible=is_irreducible(e),
        period=chain_period(e),
        stationary_ok=st <= n * tol,
        stationarity_violation=st,
    )


def require_reversible(P, pi: TargetDistribution, tol: Optional[float] = None, what: str = "matrix"):
    """Raise NotReversible unless detailed balance holds within tol."""
    if tol is None:
        tol = struct_tol(pi.n)
    db = detailed_balance_violation(P, pi)
    if db > tol:
        raise NotReversible(f"{what}: detailed-balance violation {db:.3e} > {tol:.3e}")


def require_irreducible(P, what: str = "matrix"):
    """Raise NotIrreducible unless the positive-entry graph is strongly connected."""
    if not is_irreducible(P):
        raise NotIrreducible(f"{what} is not irreducible")


def iid_operator(pi: TargetDistribution) -> TransitionMatrix:
    """The kernel whose every row is pi: independent draws from pi."""
    return TransitionMatrix(np.tile(pi.probs, (pi.n, 1)))


def stationary_distribution(P) -> TargetDistribution:
    """Solve pi P = pi, sum(pi) = 1 for an irreducible transition matrix.

    Raises
    ------
    NotIrreducible
        If the chain has more than one closed communicating class.
    SingularSystem
        If the linear solve does not reach a small stationarity residual.
    """
    e = matrix_values(P)
    require_irreducible(e)
    n = e.shape[0]
    A = np.vstack([e.T - np.eye(n), np.ones(n)])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    if np.any(x <= 0.0):
        raise SingularSystem("stationary solve produced non-positive entries")
    x = x / x.sum()
    pi = new_distribution(x)
    resid = stationarity_violation(e, pi)
    if resid > STATIONARY_SOLVE_TOL:
        raise SingularSystem(f"stationarity residual {resid:.3e} too large")
    return pi
