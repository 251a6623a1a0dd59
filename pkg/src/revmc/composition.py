"""Composite chains: convex mixtures and random-scan Gibbs components.

A product state space is indexed lexicographically (last coordinate
fastest).  The Gibbs component for coordinate k resamples that coordinate
from its conditional distribution given the rest: on the flat space it is
block-diagonal up to a permutation, one block per assignment of the other
coordinates, each block having identical rows equal to the conditional.

Improving one block of one component (replacing it by any kernel that is
reversible for the block's conditional and dominates the old block)
improves the whole random-scan chain; `component_improvement_verdict`
checks the per-block evidence and cross-checks the conclusion against the
directly computed gap spectrum of the two mixtures.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .chains import (
    TargetDistribution,
    TransitionMatrix,
    is_irreducible,
    matrix_values,
    require_reversible,
    struct_tol,
)
from .dominance import (
    DominanceVerdict,
    Relation,
    _pi_selfadjoint_eigvals,
    efficiency_dominates,
    gap_spectrum,
    verdict_tolerance,
)
from .errors import (
    BadComponentIndex,
    BadMixingProbability,
    BadWeights,
    DimensionMismatch,
    NotIrreducibleMixture,
    NotReversibleForConditional,
    NotRowStochastic,
    StructureMismatch,
)


@dataclass(frozen=True)
class ProductSpec:
    """Factorization of a state space with a lexicographic index bijection."""

    component_sizes: tuple

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.component_sizes)
        object.__setattr__(self, "component_sizes", sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise BadComponentIndex(f"component sizes must be >= 1, got {sizes}")

    @property
    def n(self) -> int:
        return int(np.prod(self.component_sizes))

    @property
    def n_components(self) -> int:
        return len(self.component_sizes)

    def flat_index(self, coords: Sequence[int]) -> int:
        """Flat index of a coordinate tuple (0-based, last coordinate fastest)."""
        if len(coords) != self.n_components:
            raise DimensionMismatch(f"expected {self.n_components} coordinates")
        idx = 0
        for c, s in zip(coords, self.component_sizes):
            if not 0 <= c < s:
                raise BadComponentIndex(f"coordinate {c} outside 0..{s - 1}")
            idx = idx * s + c
        return idx

    def coords(self, flat: int) -> tuple:
        """Coordinate tuple of a flat index."""
        if not 0 <= flat < self.n:
            raise BadComponentIndex(f"flat index {flat} outside 0..{self.n - 1}")
        out = []
        for s in reversed(self.component_sizes):
            out.append(flat % s)
            flat //= s
        return tuple(reversed(out))

    def block_states(self, k: int):
        """For 1-based component k, yield flat state indices of each block.

        Blocks are ordered lexicographically by the values of the other
        coordinates; within a block, coordinate k runs through its range.
        """
        if not 1 <= k <= self.n_components:
            raise BadComponentIndex(f"component {k} outside 1..{self.n_components}")
        axis = k - 1
        others = [range(s) for i, s in enumerate(self.component_sizes) if i != axis]
        for rest in itertools.product(*others):
            idx = []
            for xk in range(self.component_sizes[axis]):
                coords = list(rest)
                coords.insert(axis, xk)
                idx.append(self.flat_index(coords))
            yield np.array(idx, dtype=np.intp)


@dataclass(frozen=True)
class GibbsBlock:
    """One block of a Gibbs component: its states, kernel, and conditional."""

    states: np.ndarray
    kernel: np.ndarray
    conditional: np.ndarray


@dataclass(frozen=True)
class GibbsComponent:
    """A single-coordinate update kernel materialized on the flat space.

    ``k`` is the 1-based coordinate it resamples.  The flat kernel alters
    only that coordinate and is reversible with respect to the target; it
    is generally not irreducible on its own.
    """

    k: int
    kernel: TransitionMatrix
    blocks: tuple
    pi: TargetDistribution
    prod: ProductSpec


def _conditionals(pi: TargetDistribution, states: np.ndarray) -> np.ndarray:
    if pi.exact is not None:
        vals = [pi.exact[i] for i in states]
        total = sum(vals)
        return np.array([float(v / total) for v in vals])
    vals = pi.probs[states]
    return vals / vals.sum()


def _materialize(n: int, blocks) -> TransitionMatrix:
    flat = np.zeros((n, n))
    for b in blocks:
        flat[np.ix_(b.states, b.states)] = b.kernel
    return TransitionMatrix(flat)


def gibbs_component(pi: TargetDistribution, prod: ProductSpec, k: int) -> GibbsComponent:
    """The Gibbs kernel resampling coordinate k from its conditional.

    Each block kernel has identical rows equal to the conditional of
    coordinate k given the other coordinates, so the component is an
    idempotent projection.  Conditionals are computed exactly when the
    target carries exact rational probabilities.
    """
    if pi.n != prod.n:
        raise DimensionMismatch(f"distribution: {pi.n} vs product space: {prod.n}")
    blocks = []
    for states in prod.block_states(k):
        cond = _conditionals(pi, states)
        kernel = np.tile(cond, (states.size, 1))
        blocks.append(GibbsBlock(states=states, kernel=kernel, conditional=cond))
    blocks = tuple(blocks)
    return GibbsComponent(
        k=k, kernel=_materialize(pi.n, blocks), blocks=blocks, pi=pi, prod=prod
    )


def replace_block(
    comp: GibbsComponent, block_id: int, new_block, tol: Optional[float] = None
) -> GibbsComponent:
    """Substitute one block kernel, revalidating the component invariants.

    The new block must be row-stochastic and reversible with respect to the
    block's conditional distribution within ``tol``; otherwise the
    block-improvement theory would not apply to the result.
    """
    if not 0 <= block_id < len(comp.blocks):
        raise StructureMismatch(f"block {block_id} outside 0..{len(comp.blocks) - 1}")
    old = comp.blocks[block_id]
    nb = np.asarray(new_block, dtype=float)
    K = old.kernel.shape[0]
    if nb.shape != (K, K):
        raise StructureMismatch(f"block must be {K}x{K}, got {nb.shape}")
    if tol is None:
        tol = struct_tol(K)
    if nb.min() < -tol or np.max(np.abs(nb.sum(axis=1) - 1.0)) > tol:
        raise NotRowStochastic(f"replacement for block {block_id} is not row-stochastic")
    F = old.conditional[:, None] * nb
    viol = float(np.max(np.abs(F - F.T)))
    if viol > tol:
        raise NotReversibleForConditional(
            f"block {block_id}: detailed-balance violation {viol:.3e} "
            f"against its conditional"
        )
    blocks = list(comp.blocks)
    blocks[block_id] = GibbsBlock(
        states=old.states, kernel=nb.copy(), conditional=old.conditional
    )
    blocks = tuple(blocks)
    return GibbsComponent(
        k=comp.k,
        kernel=_materialize(comp.pi.n, blocks),
        blocks=blocks,
        pi=comp.pi,
        prod=comp.prod,
    )


def block_gap_eigs(old: GibbsComponent, new: GibbsComponent):
    """Per-block spectra of (old block - new block) in the conditional geometry.

    Unchanged blocks contribute all zeros; the spectrum of the full
    component difference is the concatenation of these lists.
    """
    if old.k != new.k or old.prod.component_sizes != new.prod.component_sizes:
        raise StructureMismatch("components have different structure")
    out = []
    for ob, nb in zip(old.blocks, new.blocks):
        if not np.array_equal(ob.states, nb.states):
            raise StructureMismatch("components have different block layouts")
        diff = ob.kernel - nb.kernel
        root = np.sqrt(ob.conditional)
        M = (root[:, None] * diff) / root[None, :]
        M = (M + M.T) / 2.0
        out.append(np.linalg.eigvalsh(M)[::-1].copy())
    return out


@dataclass(frozen=True)
class MixtureSpec:
    """Kernels with strictly positive mixing weights summing to one."""

    kernels: tuple
    weights: np.ndarray

    def __post_init__(self):
        kernels = tuple(self.kernels)
        object.__setattr__(self, "kernels", kernels)
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if not kernels:
            raise BadWeights("mixture needs at least one kernel")
        if w.size != len(kernels):
            raise DimensionMismatch(f"{len(kernels)} kernels vs {w.size} weights")
        if np.any(w <= 0.0) or abs(w.sum() - 1.0) > 1e-12:
            raise BadWeights(f"weights must be positive and sum to 1, got {w}")
        n = matrix_values(kernels[0]).shape[0]
        for K in kernels[1:]:
            if matrix_values(K).shape[0] != n:
                raise DimensionMismatch("mixture kernels have different sizes")


def mix(spec: MixtureSpec) -> TransitionMatrix:
    """Entrywise convex combination of the kernels."""
    out = np.zeros_like(matrix_values(spec.kernels[0]))
    for w, K in zip(spec.weights, spec.kernels):
        out += w * matrix_values(K)
    return TransitionMatrix(out)


def random_scan_chain(components: Sequence[GibbsComponent]) -> TransitionMatrix:
    """Equal-weight mixture of Gibbs components."""
    ell = len(components)
    return mix(
        MixtureSpec(
            kernels=tuple(c.kernel for c in components),
            weights=np.full(ell, 1.0 / ell),
        )
    )


def _kernel_of(item) -> np.ndarray:
    if isinstance(item, GibbsComponent):
        return item.kernel.entries
    return matrix_values(item)


def component_improvement_verdict(
    old_comps: Sequence,
    new_comps: Sequence,
    weights,
    pi: TargetDistribution,
    tol: Optional[float] = None,
) -> DominanceVerdict:
    """Does replacing the components improve the mixed chain?

    Accepts Gibbs components or plain reversible kernels.  When every
    per-pair difference (old_k - new_k) has a non-negative spectrum, the new
    mixture dominates the old; the direct gap spectrum of the mixtures is
    computed as an independent cross-check and is also what the returned
    verdict carries.  Both mixtures must be irreducible.
    """
    if len(old_comps) != len(new_comps):
        raise StructureMismatch(
            f"{len(old_comps)} old vs {len(new_comps)} new components"
        )
    olds = [_kernel_of(c) for c in old_comps]
    news = [_kernel_of(c) for c in new_comps]
    w = np.asarray(weights, dtype=float)
    if np.any(w <= 0.0) or abs(w.sum() - 1.0) > 1e-12 or w.size != len(olds):
        raise BadWeights(f"weights must be positive and sum to 1, got {w}")
    for i, (o, nw) in enumerate(zip(olds, news)):
        require_reversible(o, pi, what=f"old component {i}")
        require_reversible(nw, pi, what=f"new component {i}")

    old_mix = sum(wi * o for wi, o in zip(w, olds))
    new_mix = sum(wi * nw for wi, nw in zip(w, news))
    for m, what in ((old_mix, "old"), (new_mix, "new")):
        if not is_irreducible(m):
            raise NotIrreducibleMixture(f"{what} mixture is not irreducible")

    direct = gap_spectrum(new_mix, old_mix, pi)
    if tol is None:
        tol = verdict_tolerance(direct)
    entry_diff = max(float(np.max(np.abs(o - nw))) for o, nw in zip(olds, news))
    if entry_diff <= tol:
        return DominanceVerdict(
            relation=Relation.EQUAL,
            gap_eigenvalues=direct,
            witness=None,
            tolerance_used=tol,
        )
    pair_min = min(
        float(_pi_selfadjoint_eigvals(o - nw, pi)[-1]) for o, nw in zip(olds, news)
    )
    floor = 5e-13 * (1.0 + abs(pair_min))
    if pair_min >= -floor:
        if direct[-1] < -tol:
            raise StructureMismatch(
                "per-component evidence and direct mixture gap disagree; "
                "inputs are numerically inconsistent"
            )
        return DominanceVerdict(
            relation=Relation.FIRST_DOMINATES,
            gap_eigenvalues=direct,
            witness=None,
            tolerance_used=tol,
        )
    return efficiency_dominates(TransitionMatrix(new_mix), TransitionMatrix(old_mix), pi, tol=tol)


def mixture_improvement_equivalence(
    P, P_prime, Q, a: float, pi: TargetDistribution, tol: Optional[float] = None
):
    """Check both sides of the mixing equivalence.

    Returns ``(direct, mixed)`` where ``direct`` says P' dominates P and
    ``mixed`` says aP' + (1-a)Q dominates aP + (1-a)Q; the two must agree
    for reversible inputs with 0 < a < 1.  Exposed for the test suite.
    """
    if not 0.0 < a < 1.0:
        raise BadMixingProbability(f"mixing probability must be in (0, 1), got {a}")
    eP, ePp, eQ = matrix_values(P), matrix_values(P_prime), matrix_values(Q)
    require_reversible(eP, pi, what="base matrix")
    require_reversible(ePp, pi, what="improved matrix")
    require_reversible(eQ, pi, what="companion matrix")

    def dominates(old: np.ndarray, new: np.ndarray) -> bool:
        gap = _pi_selfadjoint_eigvals(old - new, pi)
        limit = tol if tol is not None else 5e-13 * (1.0 + float(np.abs(gap).max()))
        return bool(gap[-1] >= -limit)

    direct = dominates(eP, ePp)
    mixed = dominates(a * eP + (1 - a) * eQ, a * ePp + (1 - a) * eQ)
    return direct, mixed
