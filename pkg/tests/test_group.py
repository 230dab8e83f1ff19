import math

import numpy as np
import pytest

from currentlab import group as G
from currentlab.errors import DomainError, NotInGroupError, PointAtInfinityError
from currentlab.specfun import Dimensions


def test_form_matrix_shape():
    s = G.form_matrix(3)
    want = np.array([
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
    ])
    assert np.array_equal(s, want)


def test_make_z_blocks():
    g = G.make_z([1.0, 2.0])
    m = np.array([
        [1.0, 0.0, 0.0, 0.0],
        [-1.0, 1.0, 0.0, 0.0],
        [-2.0, 0.0, 1.0, 0.0],
        [-2.5, 1.0, 2.0, 1.0],
    ])
    assert np.allclose(g.m, m, atol=1e-15)
    assert g.membership_residual() <= 1e-14


def test_make_d_blocks_and_domain():
    g = G.make_d(2.0, n=2)
    assert np.allclose(g.m, np.diag([0.5, 1.0, 2.0]), atol=1e-15)
    with pytest.raises(DomainError):
        G.make_d(0.0, n=2)
    with pytest.raises(DomainError):
        G.make_d(1.0, u=np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_letters_satisfy_form_relation():
    rng = np.random.default_rng(3)
    for n in (2, 3):
        d = n - 1
        for _ in range(20):
            g = G.random_element(Dimensions(n), rng)
            assert g.membership_residual() <= 1e-9
            assert (g @ g.inverse()).m == pytest.approx(np.eye(n + 1), abs=1e-9)
        assert G.make_s(n).membership_residual() == 0.0


def test_inversion_squared_is_identity():
    for n in (2, 3):
        s = G.make_s(n)
        assert np.array_equal((s @ s).m, np.eye(n + 1))


def test_act_special_cases():
    # translation: gamma -> gamma + gamma0
    z = G.make_z([0.3, -0.2])
    assert G.act([1.0, 1.0], z) == pytest.approx([1.3, 0.8], abs=1e-14)
    # dilation with rotation: gamma -> eps^{-1} gamma u
    u = np.array([[0.0, 1.0], [-1.0, 0.0]])
    dlt = G.make_d(2.0, u=u)
    assert G.act([1.0, 3.0], dlt) == pytest.approx(
        np.array([1.0, 3.0]) @ u / 2.0, abs=1e-14)
    # inversion: gamma -> -2 gamma / |gamma|^2
    s = G.make_s(3)
    gam = np.array([0.6, -0.8])
    assert G.act(gam, s) == pytest.approx(-2.0 * gam / (gam @ gam), abs=1e-13)


def test_act_point_at_infinity():
    with pytest.raises(PointAtInfinityError):
        G.act([0.0, 0.0], G.make_s(3))


def test_cocycle_beta_special_cases():
    gam = np.array([0.7, -1.1])
    # translations are isometries of the boundary metric
    assert G.cocycle_beta(gam, G.make_z([2.0, 3.0])) == pytest.approx(1.0, abs=1e-14)
    # dilations scale by |eps|
    assert G.cocycle_beta(gam, G.make_d(-3.0, n=3)) == pytest.approx(3.0, abs=1e-14)
    # inversion gives |gamma|^2 / 2
    assert G.cocycle_beta(gam, G.make_s(3)) == pytest.approx(
        float(gam @ gam) / 2.0, abs=1e-14)


def test_cocycle_law_random_words():
    rng = np.random.default_rng(11)
    for n in (2, 3):
        dims = Dimensions(n)
        done = 0
        while done < 50:
            g1 = G.random_element(dims, rng)
            g2 = G.random_element(dims, rng)
            gam = rng.standard_normal(dims.d)
            try:
                lhs = G.cocycle_beta(gam, g1 @ g2)
                rhs = G.cocycle_beta(gam, g1) * G.cocycle_beta(G.act(gam, g1), g2)
            except PointAtInfinityError:
                continue
            assert lhs == pytest.approx(rhs, rel=1e-9)
            done += 1


def test_cocycle_beta_variant_fails_for_diagonal_letters():
    # the middle-column reading returns |gamma| for a diagonal letter, not
    # |eps|; keeping both routes distinguishes the two candidate formulas
    gam = np.array([0.7, -1.1])
    dlt = G.make_d(3.0, n=3)
    assert G.cocycle_beta_variant(gam, dlt) == pytest.approx(
        float(np.linalg.norm(gam)), abs=1e-14)
    assert G.cocycle_beta(gam, dlt) == pytest.approx(3.0, abs=1e-14)
    # for a translation it returns the norm of the translated point
    z = G.make_z([0.5, 0.5])
    assert G.cocycle_beta_variant(gam, z) == pytest.approx(
        float(np.linalg.norm(gam + np.array([0.5, 0.5]))), abs=1e-13)


def test_measure_relations():
    rng = np.random.default_rng(5)
    for n in (2, 3):
        dims = Dimensions(n)
        done = 0
        while done < 25:
            g = G.random_element(dims, rng)
            x = rng.standard_normal(dims.d)
            y = rng.standard_normal(dims.d)
            try:
                r1, r2 = G.measure_relation_check(g, x, y)
            except PointAtInfinityError:
                continue
            assert r1 <= 1e-6
            assert r2 <= 1e-6
            done += 1


def test_triangular_composition_matches_matrix_product():
    rng = np.random.default_rng(7)
    for n in (2, 3):
        d = n - 1
        for _ in range(10):
            t1 = G.TriangularElement(
                math.exp(rng.uniform(-1, 1)),
                G.random_orthogonal(d, rng), rng.standard_normal(d))
            t2 = G.TriangularElement(
                -math.exp(rng.uniform(-1, 1)),
                G.random_orthogonal(d, rng), rng.standard_normal(d))
            prod = t1.compose(t2).matrix()
            assert np.abs(prod.m - (t1.matrix() @ t2.matrix()).m).max() <= 1e-12


def test_factor_word_triangular_case():
    t = G.TriangularElement(2.0, np.eye(2), np.array([1.0, -1.0]))
    w = G.factor_word(t.matrix())
    assert len(w) == 1
    assert np.abs(w.evaluate().m - t.matrix().m).max() <= 1e-10


def test_factor_word_generic_case():
    rng = np.random.default_rng(23)
    for n in (2, 3):
        dims = Dimensions(n)
        for _ in range(25):
            g = G.random_element(dims, rng)
            w = G.factor_word(g)
            assert len(w) <= 3
            assert np.abs(w.evaluate().m - g.m).max() <= 1e-8


def test_factor_word_rejects_non_members():
    bad = G.GroupElement(np.eye(4) * 2.0, 3)
    with pytest.raises(NotInGroupError):
        G.factor_word(bad)


def test_d_of_gamma_is_the_exchange_coefficient():
    gam = np.array([1.0, 2.0])
    dg = G.d_of_gamma(gam)
    assert dg.g33 == pytest.approx(-0.5 * float(gam @ gam), abs=1e-14)
    assert dg.g11 == pytest.approx(-2.0 / float(gam @ gam), abs=1e-14)
    assert dg.membership_residual() <= 1e-14
    with pytest.raises(DomainError):
        G.d_of_gamma([0.0, 0.0])


def test_word_identity():
    rng = np.random.default_rng(31)
    for n in (2, 3):
        for _ in range(20):
            gam = rng.standard_normal(n - 1)
            assert G.word_identity_residual(gam) <= 1e-10
    with pytest.raises(DomainError):
        G.word_identity_residual(np.zeros(2))
