"""Product spaces, Gibbs components, block surgery, and mixtures."""

from fractions import Fraction

import numpy as np
import pytest

import revmc
from revmc import (
    MixtureSpec,
    ProductSpec,
    Relation,
    block_gap_eigs,
    component_improvement_verdict,
    gap_spectrum,
    gibbs_component,
    mix,
    mixture_improvement_equivalence,
    new_distribution,
    random_scan_chain,
    replace_block,
    spectral_decompose,
    uniform,
    validate_structure,
)

from helpers import load_fixture, metropolis_chain, peskun_worsened, random_distribution

ANTITHETIC_BLOCK = np.array([[0.0, 1.0, 0.0], [0.25, 0.5, 0.25], [0.0, 1.0, 0.0]])


@pytest.fixture(scope="module")
def target():
    cf = load_fixture("gibbs2x3_target.json")
    return cf.pi, cf.product


@pytest.fixture(scope="module")
def components(target):
    pi, prod = target
    return gibbs_component(pi, prod, 1), gibbs_component(pi, prod, 2)


def exact(num, den):
    return float(Fraction(num, den))


class TestProductSpec:
    def test_sizes(self):
        prod = ProductSpec((2, 3))
        assert prod.n == 6 and prod.n_components == 2

    def test_bijection_round_trips(self):
        prod = ProductSpec((2, 3, 4))
        for flat in range(prod.n):
            assert prod.flat_index(prod.coords(flat)) == flat

    def test_lexicographic_order(self):
        prod = ProductSpec((2, 3))
        assert [prod.coords(i) for i in range(6)] == [
            (0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2),
        ]

    def test_block_states_component_last(self):
        prod = ProductSpec((2, 3))
        blocks = list(prod.block_states(2))
        assert [b.tolist() for b in blocks] == [[0, 1, 2], [3, 4, 5]]

    def test_block_states_component_first_are_strided(self):
        prod = ProductSpec((2, 3))
        blocks = list(prod.block_states(1))
        assert [b.tolist() for b in blocks] == [[0, 3], [1, 4], [2, 5]]

    def test_bad_component(self):
        with pytest.raises(revmc.BadComponentIndex):
            list(ProductSpec((2, 3)).block_states(3))


class TestGibbsComponent:
    def test_printed_matrix_reproduced_exactly(self, components):
        _, c2 = components
        expected = np.array(
            [
                [exact(1, 6), exact(4, 6), exact(1, 6), 0, 0, 0],
                [exact(1, 6), exact(4, 6), exact(1, 6), 0, 0, 0],
                [exact(1, 6), exact(4, 6), exact(1, 6), 0, 0, 0],
                [0, 0, 0, exact(1, 3), exact(1, 3), exact(1, 3)],
                [0, 0, 0, exact(1, 3), exact(1, 3), exact(1, 3)],
                [0, 0, 0, exact(1, 3), exact(1, 3), exact(1, 3)],
            ]
        )
        np.testing.assert_array_equal(c2.kernel.entries, expected)

    def test_uniform_two_by_two(self):
        pi = uniform(4)
        prod = ProductSpec((2, 2))
        c1 = gibbs_component(pi, prod, 1)
        for b in c1.blocks:
            np.testing.assert_array_equal(b.kernel, [[0.5, 0.5], [0.5, 0.5]])

    def test_idempotent(self, components):
        for c in components:
            K = c.kernel.entries
            np.testing.assert_allclose(K @ K, K, atol=1e-14)

    def test_reversible_not_irreducible(self, components, target):
        pi, _ = target
        for c in components:
            rep = validate_structure(c.kernel, pi)
            assert rep.reversible and not rep.irreducible

    def test_unit_eigenvalue_per_block(self, components, target):
        pi, _ = target
        for c in components:
            lam = spectral_decompose(c.kernel, pi).eigenvalues
            n_blocks = len(c.blocks)
            assert int(np.sum(lam > 1.0 - 1e-9)) == n_blocks

    def test_dimension_mismatch(self):
        with pytest.raises(revmc.DimensionMismatch):
            gibbs_component(uniform(5), ProductSpec((2, 3)), 1)


class TestReplaceBlock:
    def test_printed_replacement_reproduced(self, components):
        _, c2 = components
        new = replace_block(c2, 0, ANTITHETIC_BLOCK)
        expected = c2.kernel.entries.copy()
        expected[:3, :3] = ANTITHETIC_BLOCK
        np.testing.assert_array_equal(new.kernel.entries, expected)
        rep = validate_structure(new.kernel, c2.pi)
        assert rep.reversible

    def test_replace_with_itself_is_identity(self, components):
        _, c2 = components
        same = replace_block(c2, 1, c2.blocks[1].kernel)
        np.testing.assert_array_equal(same.kernel.entries, c2.kernel.entries)

    def test_nonreversible_block_rejected(self, components):
        _, c2 = components
        bad = np.array([[0.0, 1.0, 0.0], [0.5, 0.0, 0.5], [0.0, 1.0, 0.0]])
        with pytest.raises(revmc.NotReversibleForConditional, match="block 0"):
            replace_block(c2, 0, bad)

    def test_nonstochastic_block_rejected(self, components):
        _, c2 = components
        with pytest.raises(revmc.NotRowStochastic):
            replace_block(c2, 0, np.full((3, 3), 0.5))

    def test_bad_block_id(self, components):
        _, c2 = components
        with pytest.raises(revmc.StructureMismatch):
            replace_block(c2, 5, ANTITHETIC_BLOCK)


class TestBlockGapEigs:
    def test_printed_block_difference(self, components):
        _, c2 = components
        new = replace_block(c2, 0, ANTITHETIC_BLOCK)
        gaps = block_gap_eigs(c2, new)
        np.testing.assert_allclose(gaps[0], [0.5, 0.0, 0.0], atol=1e-10)
        np.testing.assert_array_equal(gaps[1], [0.0, 0.0, 0.0])

    def test_full_spectrum_is_blocks_plus_zeros(self, components, target):
        pi, _ = target
        _, c2 = components
        new = replace_block(c2, 0, ANTITHETIC_BLOCK)
        full = gap_spectrum(new.kernel, c2.kernel, pi)
        np.testing.assert_allclose(
            np.sort(full), np.sort([0.5, 0, 0, 0, 0, 0]), atol=1e-10
        )

    def test_structure_mismatch(self, components):
        c1, c2 = components
        with pytest.raises(revmc.StructureMismatch):
            block_gap_eigs(c1, c2)


class TestMix:
    def test_single_kernel_identity(self):
        pi = uniform(3)
        P = metropolis_chain(np.random.default_rng(0), pi)
        out = mix(MixtureSpec(kernels=(P,), weights=np.array([1.0])))
        np.testing.assert_array_equal(out.entries, P.entries)

    def test_idempotent_input(self):
        pi = new_distribution([1, 2, 2])
        Pi = revmc.iid_operator(pi)
        out = mix(MixtureSpec(kernels=(Pi, Pi), weights=np.array([0.3, 0.7])))
        np.testing.assert_allclose(out.entries, Pi.entries, atol=1e-15)

    def test_random_scan_is_reversible_irreducible(self, components, target):
        pi, _ = target
        chain = random_scan_chain(list(components))
        rep = validate_structure(chain, pi)
        assert rep.reversible and rep.irreducible

    def test_bad_weights(self):
        pi = uniform(2)
        Pi = revmc.iid_operator(pi)
        with pytest.raises(revmc.BadWeights):
            MixtureSpec(kernels=(Pi, Pi), weights=np.array([0.5, 0.6]))

    def test_gap_linearity(self, components, target):
        # mixture gap equals the weighted sum of per-component gaps
        pi, _ = target
        c1, c2 = components
        new = replace_block(c2, 0, ANTITHETIC_BLOCK)
        w = np.array([0.5, 0.5])
        mixed_old = mix(MixtureSpec(kernels=(c1.kernel, c2.kernel), weights=w))
        mixed_new = mix(MixtureSpec(kernels=(c1.kernel, new.kernel), weights=w))
        lhs = mixed_old.entries - mixed_new.entries
        rhs = 0.5 * (c2.kernel.entries - new.kernel.entries)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)


class TestComponentImprovementVerdict:
    def test_headline_example(self, components, target):
        pi, _ = target
        c1, c2 = components
        new = replace_block(c2, 0, ANTITHETIC_BLOCK)
        v = component_improvement_verdict([c1, c2], [c1, new], [0.5, 0.5], pi)
        assert v.relation is Relation.FIRST_DOMINATES
        assert v.gap_eigenvalues[-1] >= -1e-12
        # improvement is invisible to the entrywise ordering
        assert not revmc.peskun_dominates(new.kernel, c2.kernel)

    def test_unchanged_components_equal(self, components, target):
        pi, _ = target
        c1, c2 = components
        v = component_improvement_verdict([c1, c2], [c1, c2], [0.5, 0.5], pi)
        assert v.relation is Relation.EQUAL

    def test_worsened_block_not_dominating(self, components, target):
        pi, _ = target
        c1, c2 = components
        worse = replace_block(c2, 0, ANTITHETIC_BLOCK)
        # swap roles: the "new" sampler has the less efficient block
        v = component_improvement_verdict([c1, worse], [c1, c2], [0.5, 0.5], pi)
        assert v.relation is not Relation.FIRST_DOMINATES
        direct = gap_spectrum(c2.kernel, worse.kernel, pi)
        assert direct[-1] < 0

    def test_cross_check_against_direct_gap(self, target):
        pi, prod = target
        rng = np.random.default_rng(1)
        c1 = gibbs_component(pi, prod, 1)
        c2 = gibbs_component(pi, prod, 2)
        new = replace_block(c2, 0, ANTITHETIC_BLOCK)
        v = component_improvement_verdict([c1, c2], [c1, new], [0.5, 0.5], pi)
        old_mix = 0.5 * c1.kernel.entries + 0.5 * c2.kernel.entries
        new_mix = 0.5 * c1.kernel.entries + 0.5 * new.kernel.entries
        direct = gap_spectrum(new_mix, old_mix, pi)
        assert (v.relation is Relation.FIRST_DOMINATES) == (direct[-1] >= -1e-12)

    def test_plain_matrices_accepted(self):
        rng = np.random.default_rng(2)
        pi = random_distribution(rng, 4)
        P1 = metropolis_chain(rng, pi)
        P2 = metropolis_chain(rng, pi)
        P2_better = P2
        P2_worse = peskun_worsened(rng, P2, pi)
        v = component_improvement_verdict(
            [P1, P2_worse], [P1, P2_better], [0.4, 0.6], pi
        )
        assert v.relation is Relation.FIRST_DOMINATES

    def test_reducible_mixture_rejected(self, target):
        pi, prod = target
        c2 = gibbs_component(pi, prod, 2)
        with pytest.raises(revmc.NotIrreducibleMixture):
            component_improvement_verdict([c2], [c2], [1.0], pi)


class TestMixtureImprovementEquivalence:
    def test_improvement_lifts_to_mixture(self):
        rng = np.random.default_rng(3)
        pi = random_distribution(rng, 5)
        P_better = metropolis_chain(rng, pi)
        P = peskun_worsened(rng, P_better, pi)
        Q = metropolis_chain(rng, pi)
        assert mixture_improvement_equivalence(P, P_better, Q, 0.5, pi) == (True, True)

    def test_identical_improvement_weakly_true(self):
        rng = np.random.default_rng(4)
        pi = random_distribution(rng, 4)
        P = metropolis_chain(rng, pi)
        Q = metropolis_chain(rng, pi)
        assert mixture_improvement_equivalence(P, P, Q, 0.25, pi) == (True, True)

    def test_incomparable_pair_fails_both(self):
        from helpers import swap_pair

        P, Q, pi = swap_pair()
        R = metropolis_chain(np.random.default_rng(5), pi)
        assert mixture_improvement_equivalence(P, Q, R, 0.5, pi) == (False, False)

    def test_booleans_always_agree(self):
        rng = np.random.default_rng(6)
        for trial in range(30):
            pi = random_distribution(rng, 4)
            P = metropolis_chain(rng, pi)
            Pp = peskun_worsened(rng, P, pi) if trial % 3 == 0 else metropolis_chain(rng, pi)
            if trial % 3 == 0:
                P, Pp = Pp, P
            Q = metropolis_chain(rng, pi)
            a = float(rng.uniform(0.05, 0.95))
            direct, mixed = mixture_improvement_equivalence(P, Pp, Q, a, pi)
            assert direct == mixed

    def test_bad_mixing_probability(self):
        rng = np.random.default_rng(7)
        pi = random_distribution(rng, 3)
        P = metropolis_chain(rng, pi)
        with pytest.raises(revmc.BadMixingProbability):
            mixture_improvement_equivalence(P, P, P, 1.0, pi)
