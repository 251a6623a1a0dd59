"""Exact asymptotic variance of path-average estimators, three ways.

For a reversible chain with eigenvalues ``lam_i`` and a function with
eigenbasis coefficients ``a_i`` (mean removed), the asymptotic variance is

    sum over i >= 2 of  a_i^2 (1 + lam_i) / (1 - lam_i).

The spectral route evaluates this directly (valid for periodic chains too,
where ``lam_n = -1`` contributes zero).  The resolvent route solves one
deflated linear system instead, and the autocovariance route sums the lag
series to a tolerance-controlled truncation; the three agree to high
relative accuracy on aperiodic chains and exist as independent
cross-checks of each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .chains import (
    TargetDistribution,
    matrix_values,
    project_zero_mean,
    require_irreducible,
    require_reversible,
    weighted_inner,
)
from .errors import DimensionMismatch, NotIrreducible, PeriodicChain, SingularSystem
from .spectral import SpectralDecomposition

# An eigenvalue this close to 1 means the chain is numerically reducible
# and the variance formula is invalid.
UNIT_EIG_TOL = 1e-9


@dataclass(frozen=True)
class VarianceResult:
    """An asymptotic variance with the route that produced it.

    ``terms`` is only populated by the spectral route: entry i is the
    contribution of eigenvalue i, and the value is exactly their sum.
    """

    value: float
    route: str
    terms: Optional[np.ndarray] = None


@dataclass(frozen=True)
class AutocovSequence:
    """Lag autocovariances gamma_0..gamma_K with a geometric tail bound."""

    gammas: np.ndarray
    truncation_K: int
    tail_bound: float


def _tail_coefficients(dec: SpectralDecomposition, f):
    """Squared coefficients and eigenvalues on the non-constant eigenspace."""
    a = dec.coefficients(f)
    return a[1:] ** 2, dec.eigenvalues[1:]


def asym_var_spectral(dec: SpectralDecomposition, f) -> VarianceResult:
    """Asymptotic variance from the eigenvalue formula.

    Valid for periodic chains; an eigenvalue of -1 contributes zero.

    Raises
    ------
    NotIrreducible
        If the second eigenvalue is 1 within tolerance; the defining limit
        then does not exist.
    """
    lam = dec.eigenvalues
    if lam[1] >= 1.0 - UNIT_EIG_TOL:
        raise NotIrreducible(f"second eigenvalue {lam[1]!r} is 1 within tolerance")
    a2, tail = _tail_coefficients(dec, f)
    terms = np.zeros(dec.n)
    terms[1:] = a2 * (1.0 + tail) / (1.0 - tail)
    terms.setflags(write=False)
    return VarianceResult(value=float(terms.sum()), route="spectral", terms=terms)


def asym_var_resolvent(P, pi: TargetDistribution, f) -> VarianceResult:
    """Asymptotic variance via one linear solve.

    Solves ``(I - P + Pi) x = f0`` where ``Pi`` is the rank-one kernel of
    i.i.d. sampling; the deflation makes the operator invertible on the
    whole space while agreeing with ``(I - P)^{-1}`` on mean-zero
    functions.  Returns ``2 <f0, x> - <f0, f0>``.
    """
    e = matrix_values(P)
    if e.shape[0] != pi.n:
        raise DimensionMismatch(f"matrix: {e.shape[0]} vs distribution: {pi.n}")
    require_reversible(e, pi)
    require_irreducible(e)
    f0 = project_zero_mean(f, pi).values
    A = np.eye(pi.n) - e + pi.probs[None, :]
    try:
        x = np.linalg.solve(A, f0)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(f"deflated resolvent solve failed: {exc}") from exc
    value = 2.0 * weighted_inner(f0, x, pi) - weighted_inner(f0, f0, pi)
    return VarianceResult(value=max(value, 0.0), route="resolvent")


def autocovariances(dec: SpectralDecomposition, f, K: int) -> AutocovSequence:
    """Lag-k autocovariances of f in stationarity, for k = 0..K.

    ``tail_bound`` bounds ``|gamma_k|`` summed beyond K by the geometric
    envelope; it is infinite for a periodic chain.
    """
    if K < 0:
        raise ValueError(f"K must be >= 0, got {K}")
    a2, lam = _tail_coefficients(dec, f)
    powers = lam[None, :] ** np.arange(K + 1)[:, None]
    gammas = powers @ a2
    gammas.setflags(write=False)
    radius = dec.tail_radius()
    gamma0 = float(gammas[0])
    if radius < 1.0:
        tail = gamma0 * radius ** (K + 1) / (1.0 - radius)
    else:
        tail = np.inf
    return AutocovSequence(gammas=gammas, truncation_K=K, tail_bound=float(tail))


def resolvent_operator(dec: SpectralDecomposition) -> np.ndarray:
    """The matrix of P (I - P)^{-1} restricted to mean-zero functions.

    Applies ``lam -> lam / (1 - lam)`` to the non-constant eigenvalues
    (the constant eigenspace maps to zero).  The variance identity
    ``v(f, P) = <f, f> + 2 <f, P (I-P)^{-1} f>`` makes differences of these
    operators the object whose positive semidefiniteness orders chains by
    efficiency.
    """
    lam = dec.eigenvalues
    if lam[1] >= 1.0 - UNIT_EIG_TOL:
        raise NotIrreducible(f"second eigenvalue {lam[1]!r} is 1 within tolerance")
    h = np.zeros(dec.n)
    h[1:] = lam[1:] / (1.0 - lam[1:])
    V = dec.eigenvectors
    return (V * h) @ (V.T * dec.pi.probs)


def asym_var_autocov(dec: SpectralDecomposition, f, tail_tol: float = 1e-10) -> VarianceResult:
    """Asymptotic variance as gamma_0 + 2 sum of gamma_k, truncated.

    The truncation point K is chosen so the geometric tail of the series
    is below ``tail_tol``; the partial sums are evaluated in closed form.

    Raises
    ------
    PeriodicChain
        If some eigenvalue has modulus 1 within tolerance; the series
        rearrangement is invalid there, use the spectral route instead.
    """
    lam1 = dec.eigenvalues[1]
    if lam1 >= 1.0 - UNIT_EIG_TOL:
        raise NotIrreducible(f"second eigenvalue {lam1!r} is 1 within tolerance")
    radius = dec.tail_radius()
    if radius >= 1.0 - UNIT_EIG_TOL:
        raise PeriodicChain(f"eigenvalue modulus {radius!r} is 1 within tolerance")
    a2, lam = _tail_coefficients(dec, f)
    gamma0 = float(a2.sum())
    if gamma0 == 0.0 or radius == 0.0:
        return VarianceResult(value=gamma0, route="autocov")
    K = 0
    target = tail_tol * (1.0 - radius) / (2.0 * gamma0)
    if radius ** (K + 1) > target:
        K = max(0, int(np.ceil(np.log(target) / np.log(radius))) - 1)
        while gamma0 * radius ** (K + 1) / (1.0 - radius) * 2.0 > tail_tol:
            K += 1
    partial = float(np.sum(a2 * lam * (1.0 - lam**K) / (1.0 - lam)))
    return VarianceResult(value=max(gamma0 + 2.0 * partial, 0.0), route="autocov")
