import numpy as np
import pytest

from signedgl import (
    BinaryLabelData,
    MulticlassLabelData,
    SSBMParams,
    generate_ssbm,
    harmonic_functions,
    local_global,
)

from conftest import clique_graph, random_signed_graph


def test_hf_all_labeled_is_identity(rng):
    g = random_signed_graph(rng, 12, neg_share=0.0)
    signs = np.where(rng.random(12) < 0.5, 1.0, -1.0)
    labels = BinaryLabelData.from_signs(signs, np.ones(12, bool))
    pred, scores = harmonic_functions(g.Wp, labels)
    assert np.array_equal(pred, signs.astype(int))
    assert np.array_equal(scores, signs)


def test_hf_path_midpoint_tie_positive():
    W = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float)
    labels = BinaryLabelData.from_signs([1.0, 0.0, -1.0], [True, False, True])
    pred, scores = harmonic_functions(W, labels)
    assert abs(scores[1]) <= 1e-12
    assert pred[1] == 1  # sign(0) := +1


def test_hf_two_cliques_match_direct_solve_oracle():
    g, truth = clique_graph([5, 5])
    # add one weak bridge so the positive graph is connected
    Wp = g.Wp.toarray()
    Wp[4, 5] = Wp[5, 4] = 0.1
    mask = np.zeros(10, bool)
    mask[0] = mask[9] = True
    signs = np.where(truth == 0, 1.0, -1.0)
    labels = BinaryLabelData.from_signs(signs, mask)
    pred, scores = harmonic_functions(Wp, labels)

    # independent dense solve of the Dirichlet system
    L = np.diag(Wp.sum(1)) - Wp
    unl = np.flatnonzero(~mask)
    lab = np.flatnonzero(mask)
    expected = np.array(labels.f)
    expected[unl] = np.linalg.solve(
        L[np.ix_(unl, unl)], Wp[np.ix_(unl, lab)] @ labels.f[lab]
    )
    assert np.allclose(scores, expected, atol=1e-10)
    assert np.array_equal(pred, signs.astype(int))


def test_hf_singular_unlabeled_block():
    # two disjoint edges, labels only in the first component
    W = np.zeros((4, 4))
    W[0, 1] = W[1, 0] = 1.0
    W[2, 3] = W[3, 2] = 1.0
    labels = BinaryLabelData.from_signs([1.0, 0, 0, 0], [True, False, False, False])
    with pytest.raises(np.linalg.LinAlgError):
        harmonic_functions(W, labels)


def test_hf_requires_some_labels():
    g, _ = clique_graph([3])
    labels = BinaryLabelData.from_signs(np.zeros(3), np.zeros(3, bool))
    with pytest.raises(ValueError, match="labeled"):
        harmonic_functions(g.Wp, labels)


def test_hf_maximum_principle(rng):
    for _ in range(5):
        g, _ = generate_ssbm(SSBMParams(n=60, k=2, p_in=0.3, p_out=0.3, seed=int(rng.integers(1e6))))
        sub = g.Wp.toarray()
        signs = np.where(rng.random(60) < 0.5, 1.0, -1.0)
        mask = rng.random(60) < 0.2
        mask[0] = True
        labels = BinaryLabelData.from_signs(signs, mask)
        try:
            _, scores = harmonic_functions(sub, labels)
        except np.linalg.LinAlgError:
            continue  # isolated unlabeled region in this draw
        lo, hi = labels.f[mask].min(), labels.f[mask].max()
        assert scores[~mask].min() >= lo - 1e-9
        assert scores[~mask].max() <= hi + 1e-9


def test_hf_multiclass_three_cliques():
    g, truth = clique_graph([4, 4, 4])
    Wp = g.Wp.toarray()
    Wp[3, 4] = Wp[4, 3] = 0.1  # bridges keep the system nonsingular
    Wp[7, 8] = Wp[8, 7] = 0.1
    mask = np.zeros(12, bool)
    mask[[0, 4, 8]] = True
    labels = MulticlassLabelData.from_classes(truth, mask, 3)
    pred, _ = harmonic_functions(Wp, labels)
    assert np.array_equal(pred, truth)


def test_lgc_zero_labels_all_positive():
    g, _ = clique_graph([4])
    labels = BinaryLabelData.from_signs(np.zeros(4), np.zeros(4, bool))
    pred, scores = local_global(g.Wp, labels)
    assert np.array_equal(scores, np.zeros(4))
    assert np.array_equal(pred, np.ones(4, dtype=int))


def test_lgc_alpha_to_zero_limit(rng):
    g = random_signed_graph(rng, 15, neg_share=0.0)
    signs = np.where(rng.random(15) < 0.5, 1.0, -1.0)
    mask = rng.random(15) < 0.5
    mask[0] = True
    labels = BinaryLabelData.from_signs(signs, mask)
    pred, _ = local_global(g.Wp, labels, alpha=1e-9)
    assert np.array_equal(pred[mask], signs[mask].astype(int))


def test_lgc_two_cliques_match_direct_solve(rng):
    g, truth = clique_graph([5, 5])
    mask = np.zeros(10, bool)
    mask[0] = mask[9] = True
    signs = np.where(truth == 0, 1.0, -1.0)
    labels = BinaryLabelData.from_signs(signs, mask)
    pred, scores = local_global(g.Wp, labels, alpha=0.9)

    Wp = g.Wp.toarray()
    d = Wp.sum(1)
    Dinv = np.diag(1 / np.sqrt(d))
    M = np.eye(10) - 0.9 * Dinv @ Wp @ Dinv
    expected = np.linalg.solve(M, labels.f)
    assert np.allclose(scores, expected, atol=1e-10)
    assert np.array_equal(pred, signs.astype(int))
    # solve residual
    assert np.linalg.norm(M @ scores - labels.f) <= 1e-10


def test_lgc_alpha_validation():
    g, _ = clique_graph([3])
    labels = BinaryLabelData.from_signs(np.zeros(3), np.zeros(3, bool))
    for alpha in (0.0, 1.0, -0.5, 2.0):
        with pytest.raises(ValueError, match="alpha"):
            local_global(g.Wp, labels, alpha=alpha)


def test_cg_path_matches_dense_oracle():
    # n above the dense cap exercises the conjugate-gradient branch
    g, blocks = generate_ssbm(SSBMParams(n=2200, k=2, p_in=0.01, p_out=0.0, seed=3))
    rng = np.random.default_rng(0)
    signs = np.where(blocks == 0, 1.0, -1.0)
    mask = rng.random(2200) < 0.1
    labels = BinaryLabelData.from_signs(np.where(mask, signs, 0.0), mask)

    _, scores = local_global(g.Wp, labels, alpha=0.9)
    Wp = g.Wp.toarray()
    d = Wp.sum(1)
    dinv = np.where(d > 0, 1 / np.sqrt(np.where(d > 0, d, 1)), 0.0)
    M = np.eye(2200) - 0.9 * (dinv[:, None] * Wp * dinv[None, :])
    expected = np.linalg.solve(M, labels.f)
    assert np.allclose(scores, expected, atol=1e-6)
