import math

import numpy as np
import pytest

from currentlab import gridfn as GF
from currentlab.errors import DomainError


def test_cell_grid_validation():
    with pytest.raises(DomainError):
        GF.CellGrid(np.zeros((3, 1)), np.ones(2))
    g = GF.CellGrid(np.array([[1.0], [-2.0]]), np.ones(2))
    assert g.size == 2 and g.d == 1
    assert np.allclose(g.radii, [1.0, 2.0])


def test_grid_1d_integrates_gaussian():
    g = GF.grid_1d(12.0, 400)
    val = float(np.sum(np.exp(-g.nodes[:, 0] ** 2) * g.weights))
    assert val == pytest.approx(math.sqrt(math.pi), rel=1e-8)


def test_grid_1d_sqrt_integrates_singular_density():
    # the square-root-graded grid resolves |x|^(-1/2) near the origin
    g = GF.grid_1d_sqrt(12.0, 400)
    val = float(np.sum(np.abs(g.nodes[:, 0]) ** -0.5
                       * np.exp(-np.abs(g.nodes[:, 0])) * g.weights))
    want = 2.0 * math.gamma(0.5)  # two half-lines of Gamma(1/2) each
    assert val == pytest.approx(want, rel=1e-3)


def test_grid_2d_integrates_gaussian():
    g = GF.grid_2d(10.0, 80, 40)
    val = float(np.sum(np.exp(-np.sum(g.nodes ** 2, axis=1)) * g.weights))
    assert val == pytest.approx(math.pi, rel=1e-6)


def test_default_grid_dimensions():
    assert GF.default_grid(1).d == 1
    assert GF.default_grid(2).d == 2
    with pytest.raises(DomainError):
        GF.default_grid(3)


def test_tabulate_and_weight_tensor():
    cells = [GF.grid_1d(6.0, 40), GF.grid_1d(6.0, 48)]
    phi = GF.tabulate(cells, lambda x, y: math.exp(-float(x @ x) - float(y @ y)))
    assert phi.values.shape == (40, 48)
    assert phi.l == 2
    wt = phi.weight_tensor()
    assert wt.shape == (40, 48)
    # total integral of the product Gaussian over both cells
    got = float(np.real(np.sum(wt * phi.values)))
    assert got == pytest.approx(math.pi, rel=1e-3)


def test_scale_values():
    cells = [GF.grid_1d(5.0, 6), GF.grid_1d(5.0, 4)]
    phi = GF.tabulate(cells, lambda x, y: 1.0)
    f0 = np.arange(6.0)
    f1 = np.arange(4.0)
    out = phi.scale_values([f0, f1])
    assert np.allclose(out.values, np.multiply.outer(f0, f1))
    # original untouched
    assert np.allclose(phi.values, 1.0)
