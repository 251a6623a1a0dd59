"""Spectral decomposition of reversible transition matrices.

A matrix P reversible with respect to pi is self-adjoint in the
pi-weighted inner product, so D^{1/2} P D^{-1/2} is symmetric (D the
diagonal matrix of pi).  We decompose that symmetric matrix with a
standard dense solver and map the eigenvectors back, which yields a real
spectrum and a pi-orthonormal eigenbasis by construction.

Conventions: eigenvalues are sorted non-increasing, the leading
eigenvector is the constant function 1, and every other eigenvector has
its first nonzero coordinate positive.  Within a numerically degenerate
leading eigenvalue (a reducible chain) the basis is rotated so the
constant function comes first; any orthonormal basis of a degenerate
eigenspace is acceptable downstream, since all consumers sum over
eigenspaces.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .chains import (
    TargetDistribution,
    func_values,
    matrix_values,
    require_reversible,
)
from .errors import DimensionMismatch, SingularSystem

# Orthonormality / reconstruction guarantee of a returned decomposition.
SPECTRAL_TOL = 1e-10

# Eigenvalues this close to the leading one are treated as members of the
# leading eigenspace when rotating the constant function to the front.
_TIE_TOL = 1e-11

# Coordinates smaller than this (relative to the largest) count as zero
# for the sign convention.
_SIGN_TOL = 1e-12


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues and pi-orthonormal eigenvectors of a reversible kernel.

    Attributes
    ----------
    eigenvalues : ndarray
        Sorted non-increasing; all in [-1, 1] with ``eigenvalues[0] == 1``.
    eigenvectors : ndarray, shape (n, n)
        Column i is the eigenvector for ``eigenvalues[i]``; the columns are
        orthonormal in the pi-weighted inner product and column 0 is the
        constant function 1.
    pi : TargetDistribution
        The distribution defining the inner product.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    pi: TargetDistribution

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    def coefficients(self, f) -> np.ndarray:
        """Coefficients of f in the eigenbasis: <f, v_i>_pi for each i."""
        fv = func_values(f)
        if fv.size != self.n:
            raise DimensionMismatch(f"functional: {fv.size} vs {self.n}")
        return self.eigenvectors.T @ (self.pi.probs * fv)

    def reconstruct(self) -> np.ndarray:
        """Rebuild the operator as sum_i lambda_i v_i v_i^T D."""
        V = self.eigenvectors
        return (V * self.eigenvalues) @ (V.T * self.pi.probs)

    def tail_radius(self) -> float:
        """max |lambda_i| over i >= 2; 1.0 exactly for a periodic chain."""
        return float(np.max(np.abs(self.eigenvalues[1:])))


def _orthonormality_defect(V: np.ndarray, pi: np.ndarray) -> float:
    G = (V.T * pi) @ V
    return float(np.max(np.abs(G - np.eye(V.shape[0]))))


def spectral_decompose(
    P, pi: TargetDistribution, tol: Optional[float] = None
) -> SpectralDecomposition:
    """Decompose a reversible transition matrix in the pi geometry.

    Parameters
    ----------
    P : TransitionMatrix or array
        Row-stochastic matrix, reversible with respect to ``pi`` within
        ``tol`` (default ``struct_tol(n)``).
    pi : TargetDistribution

    Raises
    ------
    NotReversible
        If detailed balance fails; symmetrizing would then be invalid.
    SingularSystem
        If the returned basis misses the orthonormality/reconstruction
        guarantee (numerical breakdown; not expected at dense scales).
    """
    e = matrix_values(P)
    if e.shape[0] != pi.n:
        raise DimensionMismatch(f"matrix: {e.shape[0]} vs distribution: {pi.n}")
    require_reversible(e, pi, tol=tol)
    n = pi.n

    root = np.sqrt(pi.probs)
    S = (root[:, None] * e) / root[None, :]
    S = (S + S.T) / 2.0
    lam, U = np.linalg.eigh(S)
    lam = lam[::-1].copy()
    U = U[:, ::-1]

    # Rotate the leading eigenspace so sqrt(pi) (the exact leading
    # eigenvector of S) is its first basis vector.
    k = int(np.sum(lam[0] - lam <= _TIE_TOL))
    w = root / np.linalg.norm(root)
    if k == 1:
        U[:, 0] = w
    else:
        B = U[:, :k]
        R = B - np.outer(w, w @ B)
        left, sv, _ = np.linalg.svd(R, full_matrices=False)
        U = U.copy()
        U[:, 0] = w
        U[:, 1:k] = left[:, : k - 1]

    V = U / root[:, None]
    V[:, 0] = 1.0

    # Deterministic sign: first coordinate of non-negligible size positive.
    scale = np.max(np.abs(V), axis=0)
    for i in range(1, n):
        col = V[:, i]
        lead = np.flatnonzero(np.abs(col) > _SIGN_TOL * scale[i])
        if lead.size and col[lead[0]] < 0.0:
            V[:, i] = -col

    lam[0] = 1.0
    if lam[-1] < -1.0 - SPECTRAL_TOL or lam[0] > 1.0 + SPECTRAL_TOL:
        raise SingularSystem(f"eigenvalues escape [-1, 1]: {lam}")
    np.clip(lam, -1.0, 1.0, out=lam)

    lam.setflags(write=False)
    V.setflags(write=False)
    dec = SpectralDecomposition(eigenvalues=lam, eigenvectors=V, pi=pi)

    defect = _orthonormality_defect(V, pi.probs)
    recon = float(np.max(np.abs(dec.reconstruct() - e)))
    if defect > SPECTRAL_TOL or recon > SPECTRAL_TOL:
        raise SingularSystem(
            f"decomposition failed validation: orthonormality {defect:.3e}, "
            f"reconstruction {recon:.3e}"
        )
    return dec
