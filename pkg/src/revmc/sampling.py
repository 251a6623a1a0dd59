"""Chain simulation and the Monte Carlo variance oracle.

Transitions are sampled by inverse CDF over the current row.  The hot loop
lives in a compiled extension when available, with a pure-Python fallback
selected at import time; both consume identical uniform streams, so
trajectories do not depend on the backend.

Determinism contract: a trajectory is a function of (matrix, start, seed)
only.  Replication ``r`` of the Monte Carlo estimator uses its own
generator seeded with ``seed XOR r``, so replications are independent
streams and results do not depend on scheduling order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .chains import (
    TargetDistribution,
    func_values,
    matrix_values,
    require_irreducible,
)
from .errors import BadStartState, DimensionMismatch

try:
    from ._walk import walk as _walk

    WALK_BACKEND = "compiled"
except ImportError:  # pragma: no cover - exercised only in source checkouts
    from ._walk_py import walk as _walk

    WALK_BACKEND = "pure-python"


def walk_backend() -> str:
    """Which walker implementation was selected at import: 'compiled' or 'pure-python'."""
    return WALK_BACKEND


def _cumulative_rows(P) -> np.ndarray:
    return np.ascontiguousarray(np.cumsum(matrix_values(P), axis=1))


def _draw_states(cum_probs: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    idx = np.searchsorted(cum_probs, uniforms, side="right")
    return np.minimum(idx, cum_probs.size - 1).astype(np.int64)


def simulate(
    P,
    steps: int,
    seed: int,
    start: Optional[int] = None,
    pi: Optional[TargetDistribution] = None,
) -> np.ndarray:
    """Simulate a trajectory of ``steps`` states (the start state included).

    ``start`` may be a state index; if omitted, the start is drawn from
    ``pi`` (or from the stationary distribution of ``P`` when ``pi`` is
    also omitted, which requires irreducibility).
    """
    e = matrix_values(P)
    n = e.shape[0]
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    rng = np.random.default_rng(seed)
    if start is None:
        if pi is None:
            from .chains import stationary_distribution

            pi = stationary_distribution(e)
        if pi.n != n:
            raise DimensionMismatch(f"distribution: {pi.n} vs matrix: {n}")
        start = int(_draw_states(np.cumsum(pi.probs), rng.random()))
    else:
        start = int(start)
        if not 0 <= start < n:
            raise BadStartState(f"start {start} outside 0..{n - 1}")
    uniforms = rng.random((1, steps - 1))
    starts = np.array([start], dtype=np.int64)
    return _walk(_cumulative_rows(e), starts, uniforms)[0]


@dataclass(frozen=True)
class McEstimate:
    """Replication-based Monte Carlo estimate of an asymptotic variance."""

    mean_estimate: float
    asym_var_estimate: float
    std_error: float
    steps: int
    replications: int
    seed: int


def mc_asym_var(
    P,
    pi: TargetDistribution,
    f,
    steps: int = 200_000,
    reps: int = 16,
    seed: int = 0,
) -> McEstimate:
    """Estimate the asymptotic variance of the path average of f.

    Runs ``reps`` independent chains started from exact draws of ``pi``,
    drops the first 10% of each as burn-in, and scales the across-replication
    variance of the path means by the retained length.  The standard error
    is the normal-theory spread of a variance estimate from ``reps``
    replications, floored at machine precision so it is always positive.

    Replication ``r`` uses the generator seeded ``seed XOR r``, so two calls
    whose base seeds differ only in low bits share most of their streams;
    space base seeds widely when estimates must be independent.
    """
    e = matrix_values(P)
    require_irreducible(e)
    fv = func_values(f)
    if fv.size != e.shape[0]:
        raise DimensionMismatch(f"functional: {fv.size} vs matrix: {e.shape[0]}")
    if pi.n != e.shape[0]:
        raise DimensionMismatch(f"distribution: {pi.n} vs matrix: {e.shape[0]}")
    if steps < 10_000:
        raise ValueError(f"steps must be >= 10000, got {steps}")
    if reps < 8:
        raise ValueError(f"reps must be >= 8, got {reps}")

    pi_cum = np.cumsum(pi.probs)
    starts = np.empty(reps, dtype=np.int64)
    uniforms = np.empty((reps, steps - 1))
    for r in range(reps):
        rng = np.random.default_rng(seed ^ r)
        starts[r] = _draw_states(pi_cum, rng.random())
        uniforms[r] = rng.random(steps - 1)

    paths = _walk(_cumulative_rows(e), starts, uniforms)
    burn = steps // 10
    kept = fv[paths[:, burn:]]
    means = kept.mean(axis=1)

    n_used = steps - burn
    mean_estimate = float(means.mean())
    est = float(n_used * means.var(ddof=1))
    se = est * np.sqrt(2.0 / (reps - 1))
    se = float(max(se, np.finfo(float).eps * (1.0 + abs(est))))
    return McEstimate(
        mean_estimate=mean_estimate,
        asym_var_estimate=est,
        std_error=se,
        steps=steps,
        replications=reps,
        seed=seed,
    )
