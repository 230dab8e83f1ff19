import math

import numpy as np
import pytest

from currentlab import group as G
from currentlab import measures as M
from currentlab import quadrature as Q
from currentlab import reps as R
from currentlab.errors import DomainError
from currentlab.gridfn import grid_1d_sqrt, tabulate
from currentlab.process import SeededStream
from currentlab.specfun import Dimensions

D2 = Dimensions(2)
D3 = Dimensions(3)
LAM = 0.5


def grid64():
    return grid_1d_sqrt(25.0, 64)


def bump(grid):
    return tabulate([grid], lambda xi: np.exp(-np.sum((xi - 0.8) ** 2, axis=-1)))


def test_op_kernel_dual_route_n2():
    # closed-form Bessel route against direct oscillatory quadrature of the
    # defining integral
    for xi, xp in ((0.6, 1.2), (0.6, -1.2), (-2.5, 0.3)):
        a = R.op_kernel(D2, LAM, xi, xp)
        b = R.op_kernel_quadrature(D2, LAM, xi, xp)
        assert a == pytest.approx(b, abs=1e-8)


def test_op_kernel_dual_route_n3():
    xi = np.array([0.5, -0.2])
    xp = np.array([1.0, 0.7])
    a = R.op_kernel(D3, 0.8, xi, xp)
    b = R.op_kernel_quadrature(D3, 0.8, xi, xp)
    assert a == pytest.approx(b, rel=1e-8)


def test_kernel_matrix_matches_pointwise():
    g = grid_1d_sqrt(5.0, 8)
    m = R.kernel_matrix(D2, LAM, g, g)
    for i in (0, 3, 7):
        for j in (1, 4, 6):
            want = R.op_kernel(D2, LAM, g.nodes[i, 0], g.nodes[j, 0]) * g.weights[j]
            assert m[i, j] == pytest.approx(want, rel=1e-10)


def test_std_model_letter_action():
    f = lambda gamma: math.exp(-float(np.dot(gamma, gamma)))
    z = G.make_z([0.3])
    out = R.t_std_apply(D2, LAM, z, f)
    gam = np.array([0.5])
    # translations have beta = 1
    assert out(gam) == pytest.approx(f(gam + 0.3), rel=1e-14)
    d = G.make_d(2.0, n=2)
    out_d = R.t_std_apply(D2, LAM, d, f)
    assert out_d(gam) == pytest.approx(
        f(gam / 2.0) * 2.0 ** (1.0 - 2 + LAM / 2.0), rel=1e-13)


def test_z_and_d_letter_unitarity():
    phi = bump(grid64())
    n0 = R.comm_norm(D2, LAM, phi)
    for letter in (G.TriangularElement(1.0, np.eye(1), [0.7]),
                   G.TriangularElement(2.0, np.eye(1), [0.0]),
                   G.TriangularElement(-0.6, np.eye(1), [1.3])):
        out = R.t_comm_apply(D2, LAM, letter, phi)
        assert math.sqrt(R.comm_norm(D2, LAM, out) / n0) == pytest.approx(
            1.0, abs=1e-12)


def test_current_group_elementwise_unitarity():
    part = M.Partition((0.5, 0.3))
    cells = [grid64(), grid64()]
    phi = R._product_bump(cells)
    letters = [G.TriangularElement(2.0, np.eye(1), [0.4]),
               G.TriangularElement(-0.7, np.eye(1), [-1.1])]
    out = R.u_current_apply(D2, part, letters, phi)
    assert math.sqrt(R.nu_norm(D2, part, out) / R.nu_norm(D2, part, phi)) \
        == pytest.approx(1.0, abs=1e-12)


def test_involution_squares_to_identity_and_preserves_norm():
    inv_res, norm_res = R.involution_residual(D2, LAM, grid64())
    assert inv_res <= 1e-3
    assert norm_res <= 1e-3


def test_inversion_dilation_conjugation():
    assert R.s_dilation_conjugation_residual(D2, LAM, grid64(), 2.0) <= 1e-3


def test_inversion_translation_exchange():
    assert R.z_exchange_residual(D2, LAM, grid_1d_sqrt(60.0, 320), [0.7]) <= 1e-3


def test_vacuum_identities():
    for dims, lam in ((D2, 0.5), (D3, 1.0)):
        out = R.vacuum_checks(dims, lam, Q.cached_cn(dims.n).value)
        assert out["ratio_residual"] <= 1e-6
        assert out["norm_residual"] <= 1e-6


def test_tau_embedding_z_commutation():
    cells = [grid_1d_sqrt(10.0, 24), grid_1d_sqrt(10.0, 24)]
    res = R.tau_z_commutation_residual(
        D2, cells, lambda xi: np.exp(-np.sum(np.atleast_1d(xi) ** 2)), [0.4])
    assert res <= 1e-12


def test_tau_embedding_isometry_mc():
    f = lambda g: math.exp(-float(np.dot(g, g)))
    e1, s1, e2, s2 = R.tau_isometry_mc(
        D3, (0.5, 0.7), f, SeededStream(2024, 100), SeededStream(2024, 101),
        n_mc=100_000)
    assert abs(e1 - e2) / math.sqrt(s1 ** 2 + s2 ** 2) <= 3.0


def test_r_transform_covariances():
    part = M.Partition((0.5, 0.3))
    cells = [grid_1d_sqrt(60.0, 320)] * 2
    gamma = np.array([[0.7], [-1.1]])
    assert R.r_covariance_z_residual(D2, part, cells, [[0.4], [-0.6]], gamma) \
        <= 1e-12
    assert R.r_covariance_d_residual(D2, part, cells, [2.0, -0.7], gamma) <= 1e-6
    assert R.r_covariance_s_residual(D2, part, cells, gamma) <= 1e-3
    with pytest.raises(DomainError):
        R.r_covariance_s_residual(D2, part, cells, np.array([[0.0], [-1.1]]))


def test_special_cocycle_law():
    ident = np.eye(1)
    g1 = [G.TriangularElement(1.0, ident, [0.6])]
    g2 = [G.TriangularElement(1.7, ident, [-0.3])]
    assert R.special_cocycle_law_residual(D2, g1, g2, grid64()) <= 1e-8


def test_special_representation_is_lambda_zero_limit():
    phi = bump(grid64())
    letter = G.TriangularElement(1.01, np.eye(1), [0.5])
    small = R.t_comm_apply(D2, 1e-4, letter, phi)
    zero = R.t_comm_apply(D2, 0.0, letter, phi)
    rel = float(np.abs(small.values - zero.values).max()
                / np.abs(zero.values).max())
    assert rel <= 1e-6


def test_spherical_reproduction_single_case():
    part = M.Partition((0.5, 0.5))
    gamma = np.full((2, 1), 1.0 / math.sqrt(1.0))
    est, se, target = R.spherical_reproduce(
        D2, part, gamma, SeededStream(2024, 200), n_draws=100_000)
    assert abs(est - target) <= 3.0 * max(se, 1e-12)


def test_inner_std_matches_power_pairing_scale():
    # MC pairing of two Gaussians against the deterministic radial reduction
    f = lambda g: math.exp(-float(np.dot(g, g)))
    est, se = R.inner_std(D2, LAM, f, f, SeededStream(2024, 300), n_mc=200_000)
    # closed form via u = x - y, v = x + y:
    # (1/2) sqrt(2 pi) 2^((1-lam)/2) Gamma((1-lam)/2)
    want = 0.5 * math.sqrt(2.0 * math.pi) * 2.0 ** ((1.0 - LAM) / 2.0) \
        * math.gamma((1.0 - LAM) / 2.0)
    assert abs(est - want) <= 4.0 * se
