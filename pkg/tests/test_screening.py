import numpy as np
import pytest

from pht import (Cov2, CovModel, InternalConsistencyError, ProjectorBlocks, build_sigma,
                 invert_cov2, kendall_tau_matrix, projector_quadratic, screen,
                 screen_two_sample)

from oracles import dense_projector


def tau_from(entries, p=3):
    r = np.eye(p)
    for (i, j), v in entries.items():
        r[i, j] = r[j, i] = v
    return r


class TestScreen:
    def test_basic_membership(self):
        tau = tau_from({(0, 1): 0.9, (0, 2): 0.1, (1, 2): 0.2})
        sets = screen(tau, 0.5)
        assert sets.pairs == ((0, 1),)
        assert sets.singles == (2,)

    def test_tau0_one_is_all_singles(self):
        tau = tau_from({(0, 1): 0.9, (0, 2): 0.8, (1, 2): 0.95})
        sets = screen(tau, 1.0)
        assert sets.pairs == ()
        assert sets.singles == (0, 1, 2)

    def test_tau0_zero_is_all_pairs(self, rng):
        # n(n-1)/2 odd, so tau-a of tie-free columns cannot be exactly 0
        r = kendall_tau_matrix(rng.standard_normal((11, 5)))
        sets = screen(r, 0.0)
        assert sets.pairs == tuple((i, j) for i in range(5) for j in range(i + 1, 5))
        assert sets.singles == ()

    def test_equality_routes_to_singles(self):
        tau = tau_from({(0, 1): 0.5, (0, 2): 0.1, (1, 2): 0.1})
        sets = screen(tau, 0.5)
        assert sets.pairs == ()
        assert sets.singles == (0, 1, 2)

    def test_uses_absolute_values(self):
        tau = tau_from({(0, 1): -0.9, (0, 2): 0.0, (1, 2): 0.0})
        sets = screen(tau, 0.5)
        assert sets.pairs == ((0, 1),)

    def test_monotone_in_threshold(self, rng):
        r = kendall_tau_matrix(rng.standard_normal((20, 8)))
        prev = None
        for tau0 in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0):
            sets = screen(r, tau0)
            if prev is not None:
                assert set(sets.pairs) <= set(prev.pairs)
                assert set(sets.singles) >= set(prev.singles)
            prev = sets

    def test_coverage(self, rng):
        for seed in range(20):
            g = np.random.default_rng(seed)
            r = kendall_tau_matrix(g.standard_normal((10, 6)))
            tau0 = g.uniform(0, 1)
            sets = screen(r, tau0)
            assert sets.covered(6).all()
            in_pairs = {k for pair in sets.pairs for k in pair}
            assert in_pairs.isdisjoint(sets.singles)


class TestScreenTwoSample:
    def test_weighted_average(self):
        t1 = tau_from({(0, 1): 0.8})
        t2 = tau_from({(0, 1): 0.4})
        sets = screen_two_sample(t1, t2, 10, 10, 0.5)
        assert sets.pairs == ((0, 1),)  # combined 0.6 > 0.5
        sets = screen_two_sample(t1, t2, 10, 10, 0.6)
        assert sets.pairs == ()  # combined 0.6 routed to singles at equality

    def test_equal_matrices_match_one_sample(self, rng):
        r = kendall_tau_matrix(rng.standard_normal((15, 6)))
        a = screen_two_sample(r, r, 7, 13, 0.3)
        b = screen(r, 0.3)
        assert a.pairs == b.pairs and a.singles == b.singles

    def test_unequal_weights(self):
        t1 = tau_from({(0, 1): 0.9})
        t2 = tau_from({(0, 1): 0.0})
        combined = (30 * 0.9 + 25 * 0.0) / 55
        sets = screen_two_sample(t1, t2, 30, 25, combined - 0.01)
        assert sets.pairs == ((0, 1),)
        sets = screen_two_sample(t1, t2, 30, 25, combined + 0.01)
        assert sets.pairs == ()


class TestProjectorQuadratic:
    def test_identity_single(self):
        tau = np.eye(2)
        sets = screen(tau, 0.5)
        blocks = ProjectorBlocks(single_inv={0: 1.0, 1: 1.0})
        e1 = np.array([1.0, 0.0])
        assert projector_quadratic(sets, blocks, e1, e1) == pytest.approx(1.0)

    def test_orthogonal_vector(self):
        tau = tau_from({(0, 1): 0.9, (0, 2): 0.0, (1, 2): 0.0})
        sets = screen(tau, 0.5)
        blocks = ProjectorBlocks(pair_inv={(0, 1): Cov2(1.0, 0.2, 1.0)},
                                 single_inv={2: 2.0})
        u = np.zeros(3)  # no mass on any covered coordinate
        assert projector_quadratic(sets, blocks, u, u) == 0.0

    def test_matches_dense_assembly(self, rng):
        sigma, _, _ = build_sigma(CovModel(kind="ar", p=6, rho=0.6), seed=3)
        tau = kendall_tau_matrix(rng.standard_normal((25, 6)))
        sets = screen(tau, 0.2)
        blocks = ProjectorBlocks(
            pair_inv={(i, j): invert_cov2(Cov2(sigma[i, i], sigma[i, j], sigma[j, j]))
                      for i, j in sets.pairs},
            single_inv={i: 1.0 / sigma[i, i] for i in sets.singles},
        )
        P = dense_projector(sigma, sets)
        for _ in range(5):
            u = rng.standard_normal(6)
            v = rng.standard_normal(6)
            assert projector_quadratic(sets, blocks, u, v) == pytest.approx(
                u @ P @ v, rel=1e-10
            )

    def test_missing_block_raises(self):
        tau = tau_from({(0, 1): 0.9, (0, 2): 0.0, (1, 2): 0.0})
        sets = screen(tau, 0.5)
        with pytest.raises(InternalConsistencyError):
            projector_quadratic(sets, ProjectorBlocks(), np.ones(3), np.ones(3))


class TestScreeningConsistency:
    def test_pair_recovery_improves_with_n(self):
        # Block compound-symmetry model: within-block tau is well above the
        # threshold, cross-block tau is near zero.
        p = 30
        model = CovModel(kind="block-cs", p=p, rho=0.9)
        _, sqrt, _ = build_sigma(model, seed=7)
        true_pairs = {(i, j)
                      for b in range(0, p, 5)
                      for i in range(b, b + 5) for j in range(i + 1, b + 5)}
        tau0 = 0.6
        fractions = []
        for n in (50, 100, 200):
            hits = 0
            for r in range(100):
                rng = np.random.default_rng([9000, n, r])
                x = rng.standard_normal((n, p)) @ sqrt
                sets = screen(kendall_tau_matrix(x), tau0)
                hits += set(sets.pairs) == true_pairs
            fractions.append(hits / 100)
        assert fractions[0] <= fractions[1] + 0.05
        assert fractions[1] <= fractions[2] + 0.05
