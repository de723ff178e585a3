import numpy as np
import pytest

from sblorec.baselines import (
    BaselineParams,
    score_cosra,
    score_cosra_t,
    score_grm,
    score_hhp,
    score_md,
    score_pd,
    score_rwr,
    score_socmd,
)
from sblorec.graphdata import InteractionNetwork, SocialNetwork

import oracles
from oracles import interactions_from_dense, random_instance, social_from_dense


def dense(score_matrix):
    return score_matrix.values


class TestParams:
    @pytest.mark.parametrize("field,value", [
        ("hhp_lambda", 1.5), ("hhp_lambda", -0.1),
        ("socmd_p", 1.01), ("socmd_p", -0.5),
        ("rwr_theta3", 1.0), ("rwr_theta3", -0.2),
        ("rwr_theta1", -1.0),
    ])
    def test_rejects_out_of_range(self, field, value):
        with pytest.raises(ValueError):
            BaselineParams(**{field: value})


class TestMd:
    def test_single_user_two_objects(self):
        inter = InteractionNetwork(1, 2, np.array([[0, 0], [0, 1]]))
        scores = score_md(inter, mask_trained=False)
        np.testing.assert_allclose(dense(scores), [[1.0, 1.0]], atol=1e-14)

    def test_isolated_user_zero_row(self, rng):
        _, b = random_instance(rng, m=5, n=6)
        b[2] = 0.0
        scores = score_md(interactions_from_dense(b), mask_trained=False)
        assert not dense(scores)[2].any()

    def test_matches_diffusion_oracle(self, rng):
        for _ in range(5):
            _, b = random_instance(rng, m=5, n=6, p_inter=0.4)
            scores = score_md(interactions_from_dense(b), mask_trained=False)
            np.testing.assert_allclose(dense(scores), oracles.md_scores(b),
                                       atol=1e-12)

    def test_resource_conservation(self):
        # connected bipartite graph, no degree-0 endpoints
        b = np.array([
            [1, 1, 0, 0],
            [0, 1, 1, 0],
            [0, 0, 1, 1],
            [1, 0, 0, 1],
        ], dtype=float)
        inter = interactions_from_dense(b)
        scores = score_md(inter, mask_trained=False)
        np.testing.assert_allclose(dense(scores).sum(axis=1),
                                   inter.user_degrees, atol=1e-12)


class TestHhp:
    def test_lambda_one_is_md(self, fixture_20_users):
        _, _, _, inter = fixture_20_users
        md = dense(score_md(inter, mask_trained=False))
        hhp = dense(score_hhp(inter, 1.0, mask_trained=False))
        np.testing.assert_allclose(hhp, md, atol=1e-12)

    def test_lambda_zero_is_heat_conduction(self, rng):
        _, b = random_instance(rng, m=5, n=6)
        got = dense(score_hhp(interactions_from_dense(b), 0.0, mask_trained=False))
        np.testing.assert_allclose(got, oracles.hhp_scores(b, 0.0), atol=1e-12)

    def test_matches_formula_oracle(self, rng):
        for _ in range(5):
            _, b = random_instance(rng, m=5, n=6)
            got = dense(score_hhp(interactions_from_dense(b), 0.5,
                                  mask_trained=False))
            np.testing.assert_allclose(got, oracles.hhp_scores(b, 0.5), atol=1e-12)

    def test_lambda_out_of_range(self, fixture_20_users):
        _, _, _, inter = fixture_20_users
        with pytest.raises(ValueError):
            score_hhp(inter, 1.2)


class TestPd:
    def test_epsilon_zero_is_md(self, fixture_20_users):
        _, _, _, inter = fixture_20_users
        md = dense(score_md(inter, mask_trained=False))
        pd = dense(score_pd(inter, 0.0, mask_trained=False))
        np.testing.assert_allclose(pd, md, atol=1e-12)

    def test_isolated_user_zero_row(self, rng):
        _, b = random_instance(rng, m=5, n=6)
        b[1] = 0.0
        scores = score_pd(interactions_from_dense(b), -0.8, mask_trained=False)
        assert not dense(scores)[1].any()

    def test_matches_formula_oracle(self, rng):
        for _ in range(5):
            _, b = random_instance(rng, m=5, n=6)
            got = dense(score_pd(interactions_from_dense(b), -0.8,
                                 mask_trained=False))
            np.testing.assert_allclose(got, oracles.pd_scores(b, -0.8), atol=1e-12)


class TestGrm:
    def test_rows_equal_degree_vector(self):
        edges = [(u, 0) for u in range(3)] + [(0, 2), (1, 2), (2, 1)]
        inter = InteractionNetwork(3, 3, np.array(edges))
        scores = score_grm(inter, mask_trained=False)
        assert inter.object_degrees.tolist() == [3, 1, 2]
        for row in dense(scores):
            np.testing.assert_array_equal(row, [3, 1, 2])

    def test_ranking_order(self):
        edges = [(u, 0) for u in range(3)] + [(0, 2), (1, 2), (2, 1)]
        inter = InteractionNetwork(3, 3, np.array(edges))
        scores = score_grm(inter, mask_trained=False)
        ranked = np.argsort(-dense(scores)[0], kind="stable")
        assert ranked.tolist() == [0, 2, 1]


class TestRwr:
    def test_theta3_zero_no_walk(self, rng):
        a, b = random_instance(rng, m=5, n=6)
        got = dense(score_rwr(social_from_dense(a), interactions_from_dense(b),
                              1.0, 1.0, 0.0, mask_trained=False))
        np.testing.assert_allclose(got, oracles.rwr_scores(a, b, 1.0, 1.0, 0.0),
                                   atol=1e-12)

    def test_two_user_clique_hand_inverse(self):
        # T = [[0,1],[1,0]]; (I - 0.5 T)^{-1} scaled by 0.5 gives
        # [[2/3, 1/3], [1/3, 2/3]]
        social = SocialNetwork(2, np.array([[0, 1]]))
        inter = InteractionNetwork(2, 1, np.array([[0, 0]]))
        got = dense(score_rwr(social, inter, 1.0, 0.0, 0.5, mask_trained=False))
        # with theta2=0, W = sim_a^1 * sim_b^0; sim_b zeros drop pairs with
        # either user uncollected -> only user 0 has k^B > 0
        sim_a = np.array([[2 / 3, 1 / 3], [1 / 3, 2 / 3]])
        assert got[0, 0] == pytest.approx(sim_a[0, 0] * 1.0)
        assert got[1, 0] == pytest.approx(sim_a[1, 0] * 0.0)

    def test_social_similarity_rows(self):
        social = SocialNetwork(2, np.array([[0, 1]]))
        # both users share object 0 so the interaction similarity is positive
        # everywhere and theta2=0 reduces W to the social walk matrix
        b = np.array([[1.0, 1.0, 0.0], [1.0, 0.0, 1.0]])
        inter = interactions_from_dense(b)
        got = dense(score_rwr(social, inter, 1.0, 0.0, 0.5, mask_trained=False))
        expected = np.array([[2 / 3, 1 / 3], [1 / 3, 2 / 3]]) @ b
        np.testing.assert_allclose(got, expected, atol=1e-12)

    def test_pure_salton_when_theta1_zero(self, rng):
        a, b = random_instance(rng, m=6, n=7)
        got = dense(score_rwr(social_from_dense(a), interactions_from_dense(b),
                              0.0, 1.0, 0.5, mask_trained=False))
        np.testing.assert_allclose(got, oracles.rwr_scores(a, b, 0.0, 1.0, 0.5),
                                   atol=1e-12)

    def test_isolated_social_user(self, rng):
        a, b = random_instance(rng, m=5, n=6)
        a[3, :] = 0.0
        a[:, 3] = 0.0
        got = dense(score_rwr(social_from_dense(a), interactions_from_dense(b),
                              1.0, 1.0, 0.4, mask_trained=False))
        np.testing.assert_allclose(got, oracles.rwr_scores(a, b, 1.0, 1.0, 0.4),
                                   atol=1e-12)

    def test_matches_formula_oracle(self, rng):
        for _ in range(5):
            a, b = random_instance(rng, m=6, n=7)
            got = dense(score_rwr(social_from_dense(a),
                                  interactions_from_dense(b),
                                  0.5, 2.0, 0.3, mask_trained=False))
            np.testing.assert_allclose(got, oracles.rwr_scores(a, b, 0.5, 2.0, 0.3),
                                       atol=1e-12)

    def test_theta3_bounds(self, toy_pair):
        _, _, social, inter = toy_pair
        with pytest.raises(ValueError):
            score_rwr(social, inter, 1.0, 1.0, 1.0)


class TestCosraT:
    def test_theta_one_equals_plain_cosra(self, fixture_20_users):
        _, _, social, inter = fixture_20_users
        with_social = dense(score_cosra_t(social, inter, 1.0, mask_trained=False))
        plain = dense(score_cosra(inter, mask_trained=False))
        np.testing.assert_allclose(with_social, plain, atol=1e-12)

    def test_empty_social_ignores_theta(self, rng):
        _, b = random_instance(rng, m=5, n=6)
        empty = SocialNetwork(5, np.zeros((0, 2)))
        inter = interactions_from_dense(b)
        for theta in (0.3, 1.0, 2.0):
            got = dense(score_cosra_t(empty, inter, theta, mask_trained=False))
            np.testing.assert_allclose(
                got, dense(score_cosra(inter, mask_trained=False)), atol=1e-14)

    def test_matches_formula_oracle(self, rng):
        for _ in range(5):
            a, b = random_instance(rng, m=5, n=6)
            got = dense(score_cosra_t(social_from_dense(a),
                                      interactions_from_dense(b),
                                      0.5, mask_trained=False))
            np.testing.assert_allclose(got, oracles.cosra_t_scores(a, b, 0.5),
                                       atol=1e-12)

    def test_zero_resource_convention_logged(self, caplog, rng):
        a = np.zeros((3, 3))
        a[0, 1] = a[1, 0] = 1.0
        b = np.zeros((3, 4))
        b[0, 0] = 1.0  # users 0 and 1 share nothing
        with caplog.at_level("WARNING"):
            got = dense(score_cosra_t(social_from_dense(a),
                                      interactions_from_dense(b),
                                      -0.5, mask_trained=False))
        assert np.isfinite(got).all()
        assert any("convention" in r.message for r in caplog.records)


class TestSocmd:
    def test_pure_interaction_at_p_one(self, rng):
        a, b = random_instance(rng, m=5, n=6)
        got = dense(score_socmd(social_from_dense(a), interactions_from_dense(b),
                                1.0, mask_trained=False))
        np.testing.assert_allclose(got, oracles.socmd_scores(a, b, 1.0),
                                   atol=1e-12)

    def test_p_zero_isolated_social_user_zero_row(self, rng):
        a, b = random_instance(rng, m=5, n=6)
        a[2, :] = 0.0
        a[:, 2] = 0.0
        got = dense(score_socmd(social_from_dense(a), interactions_from_dense(b),
                                0.0, mask_trained=False))
        assert not got[2].any()

    def test_matches_formula_oracle(self, rng):
        for _ in range(5):
            a, b = random_instance(rng, m=5, n=6)
            got = dense(score_socmd(social_from_dense(a),
                                    interactions_from_dense(b),
                                    0.6, mask_trained=False))
            np.testing.assert_allclose(got, oracles.socmd_scores(a, b, 0.6),
                                       atol=1e-12)

    def test_p_out_of_range(self, toy_pair):
        _, _, social, inter = toy_pair
        with pytest.raises(ValueError):
            score_socmd(social, inter, 1.5)


class TestDeterminismAndMasking:
    def test_scorers_are_pure(self, fixture_20_users):
        a, b, social, inter = fixture_20_users
        first = dense(score_socmd(social, inter, 0.4, mask_trained=False))
        second = dense(score_socmd(social, inter, 0.4, mask_trained=False))
        np.testing.assert_array_equal(first, second)

    def test_masking_blocks_train_items(self, fixture_20_users):
        _, _, social, inter = fixture_20_users
        for scores in (
            score_md(inter),
            score_hhp(inter, 0.5),
            score_pd(inter, -0.5),
            score_grm(inter),
            score_rwr(social, inter, 1.0, 1.0, 0.5),
            score_cosra_t(social, inter, 0.5),
            score_socmd(social, inter, 0.5),
        ):
            vals = dense(scores)
            for u, o in inter.edges:
                assert vals[u, o] == -np.inf
