"""Shared fixtures and random chain generators for the test suite."""

from fractions import Fraction
from pathlib import Path

import numpy as np

from revmc import TargetDistribution, TransitionMatrix, new_distribution
from revmc.chainfile import load_chain_file

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


def load_fixture(name: str):
    return load_chain_file(fixture_path(name))


def swap_pair():
    """The three-state pair that is eigen-equivalent yet incomparable."""
    a = load_fixture("swap_pair_a.json")
    b = load_fixture("swap_pair_b.json")
    return a.matrix, b.matrix, a.pi


def star_pair():
    """The zero-diagonal star chain and the i.i.d. kernel it beats."""
    p = load_fixture("star3.json")
    q = load_fixture("iid_skewed3.json")
    return p.matrix, q.matrix, p.pi


def random_distribution(rng, n: int) -> TargetDistribution:
    return new_distribution(rng.uniform(0.2, 1.0, n))


def random_reversible(rng, n: int):
    """Random walk on a dense weighted graph: reversible, irreducible,
    aperiodic, with its own stationary distribution returned alongside."""
    W = rng.uniform(0.1, 1.0, (n, n))
    W = (W + W.T) / 2.0
    rows = W.sum(axis=1)
    P = TransitionMatrix(W / rows[:, None])
    pi = new_distribution(rows / rows.sum())
    return P, pi


def metropolis_chain(rng, pi: TargetDistribution) -> TransitionMatrix:
    """Reversible w.r.t. a given pi, strictly positive entries."""
    n = pi.n
    B = rng.uniform(0.1, 1.0, (n, n))
    B = (B + B.T) / 2.0
    np.fill_diagonal(B, 0.0)
    T = B / (1.05 * B.sum(axis=1).max())
    accept = np.minimum(1.0, pi.probs[None, :] / pi.probs[:, None])
    P = T * accept
    np.fill_diagonal(P, 0.0)
    np.fill_diagonal(P, 1.0 - P.sum(axis=1))
    return TransitionMatrix(P)


def peskun_worsened(rng, P: TransitionMatrix, pi: TargetDistribution) -> TransitionMatrix:
    """Move a random share of each off-diagonal pair onto the diagonal.

    The result is reversible for the same pi and is Peskun-dominated by P.
    """
    n = P.n
    eps = rng.uniform(0.1, 0.9, (n, n))
    eps = (eps + eps.T) / 2.0
    off = P.entries * (1.0 - eps)
    np.fill_diagonal(off, 0.0)
    Q = off.copy()
    np.fill_diagonal(Q, 1.0 - off.sum(axis=1))
    return TransitionMatrix(Q)


def bipartite_period2(rng, n_a: int, n_b: int):
    """Random walk on a dense bipartite graph: reversible with period 2."""
    W = rng.uniform(0.1, 1.0, (n_a, n_b))
    n = n_a + n_b
    P = np.zeros((n, n))
    P[:n_a, n_a:] = W / W.sum(axis=1, keepdims=True)
    P[n_a:, :n_a] = W.T / W.sum(axis=0)[:, None]
    weights = np.concatenate([W.sum(axis=1), W.sum(axis=0)])
    pi = new_distribution(weights / weights.sum())
    return TransitionMatrix(P), pi


def antithetic_chain(rng, pi: TargetDistribution) -> TransitionMatrix:
    """Spectral surgery: all non-trivial eigenvalues pushed below zero.

    Starts from the i.i.d. kernel and moves along a direction built from a
    random pi-orthonormal basis with negative target eigenvalues, stopping
    short of the boundary of the stochastic matrices.
    """
    n = pi.n
    root = np.sqrt(pi.probs)
    M = rng.standard_normal((n, n))
    M[:, 0] = root
    Qb, _ = np.linalg.qr(M)
    lams = -rng.uniform(0.2, 1.0, n - 1)
    sym_dir = (Qb[:, 1:] * lams) @ Qb[:, 1:].T
    direction = (sym_dir / root[:, None]) * root[None, :]
    base = np.tile(pi.probs, (n, 1))
    with np.errstate(divide="ignore"):
        ratios = np.where(direction < 0.0, -base / direction, np.inf)
    t = 0.9 * ratios.min()
    return TransitionMatrix(base + t * direction)


def rowsum_zero_matrix(rng, n: int) -> np.ndarray:
    """Non-negative diagonal, non-positive off-diagonal, zero row sums."""
    m = rng.uniform(0.0, 1.0, (n, n))
    np.fill_diagonal(m, 0.0)
    return np.diag(m.sum(axis=1)) - m


def positive_operator_pair(rng, pi: TargetDistribution, ordered: bool = False):
    """Strictly positive pi-self-adjoint operators (second minus first PSD
    when ordered=True)."""
    n = pi.n
    root = np.sqrt(pi.probs)

    def sym_spd(floor):
        A = rng.standard_normal((n, n))
        return A @ A.T / n + floor * np.eye(n)

    SJ = sym_spd(0.1)
    SK = SJ + sym_spd(0.05) if ordered else sym_spd(0.1)
    J = (SJ / root[:, None]) * root[None, :]
    K = (SK / root[:, None]) * root[None, :]
    return J, K


def exact_matrix(rows) -> TransitionMatrix:
    """Build a matrix from rational strings/ints, converted exactly."""
    return TransitionMatrix(
        np.array([[float(Fraction(v)) for v in row] for row in rows])
    )
