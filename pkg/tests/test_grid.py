import math

import numpy as np
import pytest

from entwave.errors import FileFormatError
from entwave.grid import (
    ComplexPlaneGrid,
    Field,
    ScaleGrid,
    default_grid,
    default_scale_grid,
    integrate,
    read_field_csv,
    read_field_ewg1,
    sample,
    scale_weights,
    write_field_csv,
    write_field_ewg1,
)
from entwave.wavelets import emhw, eval_wavelet


def test_centered_grid_symmetric():
    g = ComplexPlaneGrid.centered(256, 8.0)
    assert g.x_min == pytest.approx(-(g.nx - 1) * g.dx / 2)
    assert g.x[0] == -8.0
    assert g.x[-1] == pytest.approx(8.0)


def test_grid_validation():
    with pytest.raises(ValueError):
        ComplexPlaneGrid(1, 4, 0.0, 0.0, 0.1, 0.1)
    with pytest.raises(ValueError):
        ComplexPlaneGrid(4, 4, 0.0, 0.0, -0.1, 0.1)


def test_sample_constant():
    g = ComplexPlaneGrid.centered(16, 2.0)
    f = sample(lambda e: np.ones_like(e), g)
    assert np.all(f.values == 1.0)


def test_sample_gaussian_boundary_decay():
    g = default_grid()
    f = sample(lambda e: np.exp(-0.5 * np.abs(e) ** 2), g)
    assert f.boundary_max() <= np.exp(-8)


def test_sample_matches_eval_wavelet():
    g = ComplexPlaneGrid.centered(64, 6.0)
    w = emhw()
    f = sample(lambda e: eval_wavelet(w, e), g)
    assert np.array_equal(f.values, eval_wavelet(w, g.nodes()))


def test_sample_rejects_nonfinite():
    g = ComplexPlaneGrid.centered(17, 2.0)  # odd: contains the origin
    with np.errstate(divide="ignore"), pytest.raises(ValueError):
        sample(lambda e: 1.0 / np.abs(e) ** 2, g)


def test_integrate_gaussian_unit():
    f = sample(lambda e: np.exp(-np.abs(e) ** 2), default_grid())
    assert abs(integrate(f, "d2_over_pi") - 1.0) <= 1e-8


def test_integrate_emhw_zero_mean():
    f = sample(lambda e: eval_wavelet(emhw(), e), default_grid())
    assert abs(integrate(f, "d2_over_2pi")) <= 1e-8


def test_integrate_plain_unit_square():
    g = ComplexPlaneGrid.centered(41, 1.0)
    f = sample(lambda e: np.ones_like(e), g)
    assert integrate(f, "plain") == pytest.approx(4.0, rel=1e-13)


def test_integrate_unknown_measure():
    f = sample(lambda e: np.ones_like(e), ComplexPlaneGrid.centered(8, 1.0))
    with pytest.raises(ValueError):
        integrate(f, "d2")


def test_gamma_closed_forms():
    # radial Gaussian-times-polynomial against Gamma values
    g = default_grid()
    for power, expected in [(0, 1.0), (2, 1.0), (4, 2.0), (6, 6.0)]:
        f = sample(lambda e, p=power: np.abs(e) ** p * np.exp(-np.abs(e) ** 2), g)
        assert abs(integrate(f, "d2_over_pi") - expected) <= 1e-7


def test_refinement_improves_quadrature():
    # sharp Gaussian: 32^2 on extent 8 underresolves it, 64^2 nails it
    exact = 1.0 / 8.0
    errs = []
    for n in (32, 64):
        f = sample(lambda e: np.exp(-8 * np.abs(e) ** 2),
                   ComplexPlaneGrid.centered(n, 8.0))
        errs.append(abs(integrate(f, "d2_over_pi") - exact))
    assert errs[0] / errs[1] >= 3.0


def test_scale_grid_validation():
    with pytest.raises(ValueError):
        ScaleGrid(np.array([]))
    with pytest.raises(ValueError):
        ScaleGrid(np.array([-1.0, 1.0]))
    with pytest.raises(ValueError):
        ScaleGrid(np.array([1.0, 2.0, 3.0]))  # linear, not log spaced
    sg = ScaleGrid.log_spaced(64, 0.25, 4.0)
    ratios = sg.mu_values[1:] / sg.mu_values[:-1]
    assert ratios.max() - ratios.min() <= 1e-12 * ratios.max()
    assert default_scale_grid().mu_min == pytest.approx(0.25)
    assert default_scale_grid().mu_max == pytest.approx(4.0)


@pytest.mark.parametrize("p", [1, 3, 4, 5])
def test_scale_weights_constant_log_integrand(p):
    # f = mu^(p-1) makes the integrand d(ln mu): integral = ln(mu_max/mu_min)
    sg = ScaleGrid.log_spaced(33, 1.0, math.e)
    w = scale_weights(sg, p)
    val = float(np.sum(w * sg.mu_values ** (p - 1)))
    assert abs(val - 1.0) <= 1e-10


@pytest.mark.parametrize("p", [1, 3, 4, 5])
def test_scale_weights_linear_integrand(p):
    # f = mu^p: integral is mu_max - mu_min; trapezoid in log mu at 200 nodes
    sg = ScaleGrid.log_spaced(200, 1.0, 1.5)
    w = scale_weights(sg, p)
    val = float(np.sum(w * sg.mu_values**p))
    assert abs(val - 0.5) <= 1e-6


def test_scale_weights_guards():
    with pytest.raises(ValueError):
        scale_weights(ScaleGrid.log_spaced(8, 1, 2), 2)
    with pytest.raises(ValueError):
        ScaleGrid.log_spaced(1, 1.0, 2.0)


def _random_field(n=12, extent=3.0, seed=0):
    rng = np.random.default_rng(seed)
    g = ComplexPlaneGrid.centered(n, extent)
    vals = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return Field(g, vals)


def test_ewg1_round_trip(tmp_path):
    f = _random_field()
    path = str(tmp_path / "f.ewg")
    write_field_ewg1(f, path)
    back = read_field_ewg1(path)
    assert back.grid == f.grid
    assert np.array_equal(back.values, f.values)


def test_ewg1_truncated(tmp_path):
    f = _random_field()
    path = str(tmp_path / "f.ewg")
    write_field_ewg1(f, path)
    data = open(path, "rb").read()
    bad = str(tmp_path / "bad.ewg")
    open(bad, "wb").write(data[:-8])
    with pytest.raises(FileFormatError):
        read_field_ewg1(bad)


def test_ewg1_bad_magic(tmp_path):
    path = str(tmp_path / "x.ewg")
    open(path, "wb").write(b"NOPE" + b"\x00" * 64)
    with pytest.raises(FileFormatError):
        read_field_ewg1(path)


def test_csv_round_trip(tmp_path):
    f = _random_field(seed=4)
    path = str(tmp_path / "f.csv")
    write_field_csv(f, path)
    back = read_field_csv(path)
    assert back.grid.nx == f.grid.nx and back.grid.ny == f.grid.ny
    assert np.allclose(back.grid.dx, f.grid.dx, rtol=0, atol=1e-15)
    assert np.array_equal(back.values, f.values)  # repr round-trips floats


def test_csv_bad_header(tmp_path):
    path = str(tmp_path / "f.csv")
    open(path, "w").write("a,b,c\n1,2,3\n")
    with pytest.raises(FileFormatError):
        read_field_csv(path)


def test_field_shape_and_finiteness():
    g = ComplexPlaneGrid.centered(8, 1.0)
    with pytest.raises(ValueError):
        Field(g, np.zeros((4, 4)))
    bad = np.zeros((8, 8), dtype=complex)
    bad[3, 3] = np.nan
    with pytest.raises(ValueError):
        Field(g, bad)
