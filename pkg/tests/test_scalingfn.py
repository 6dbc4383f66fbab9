import math

import numpy as np
import pytest

from anisorabi.model import ModelParams
from anisorabi.scalingfn import (DEFAULT_H, GridSpec, ScalingCurve, energy_expansion, moments, scaled_variables,
                                 solve_scaling_ode, universal_functions)
from anisorabi.solver import observables

QUARTIC_E0 = 2 ** (-4 / 3) * 1.0603620904  # standard -d^2/dx^2 + x^4 ground value, rescaled


def hermite_oracle(v, n_basis=120, omega=1.5):
    """Ground (E0, X1, P1) of -1/2 d^2 - v u^2 + u^4/4 in an oscillator basis (independent of the grid)."""
    big = n_basis + 4
    a = np.diag(np.sqrt(np.arange(1, big)), 1)
    u = (a + a.T) / math.sqrt(2 * omega)
    ip = (a.T - a) * math.sqrt(omega / 2)
    u2 = u @ u
    p2 = -(ip @ ip)
    h = 0.5 * p2 - v * u2 + 0.25 * (u2 @ u2)
    h = h[:n_basis, :n_basis]
    e, vec = np.linalg.eigh(h)
    c = vec[:, 0]
    return e[0], c @ u2[:n_basis, :n_basis] @ c, c @ p2[:n_basis, :n_basis] @ c


def test_quartic_ground_energy():
    e0 = solve_scaling_ode(0.0)[0]
    oracle = hermite_oracle(0.0)[0]
    assert oracle == pytest.approx(QUARTIC_E0, abs=1e-9)
    assert abs(e0 - 0.420805) <= 2e-5
    assert abs(e0 - oracle) <= 2e-5


@pytest.mark.parametrize("v", [-3.0, -1.0, 0.5, 2.0])
def test_against_oscillator_basis(v):
    e0, phi, grid = solve_scaling_ode(v)
    x1, p1 = moments(phi, grid, 1)
    oe, ox, op = hermite_oracle(v, n_basis=160, omega=1.5 + max(v, 0))
    assert e0 == pytest.approx(oe, abs=2e-5)
    assert x1 == pytest.approx(ox, rel=1e-4)
    assert p1 == pytest.approx(op, rel=1e-4)


def test_harmonic_asymptote():
    assert solve_scaling_ode(-50.0)[0] == pytest.approx(5.0, rel=0.01)


def test_double_well_asymptote():
    _, phi, grid = solve_scaling_ode(50.0)
    assert moments(phi, grid, 1)[0] == pytest.approx(100.0, rel=0.02)


def test_odd_moments_vanish():
    for v in (-2.0, 0.0, 3.0):
        _, phi, grid = solve_scaling_ode(v)
        u, h = grid.u, grid.spacing
        for k in (0, 1, 2):
            assert abs(np.trapezoid(phi**2 * u ** (2 * k + 1), dx=h)) < 1e-10


@pytest.fixture(scope="module")
def curve():
    return universal_functions(np.round(np.arange(-6, 6.01, 0.5), 10), (1, 2))


def test_virial_and_hellmann_feynman(curve):
    d = 1e-3
    for i, v in enumerate(curve.v_samples):
        x1, p1, x2 = curve.xn[1][i], curve.pn[1][i], curve.xn[2][i]
        assert abs(p1 - (-2 * v * x1 + x2)) < 1e-4
        slope = (solve_scaling_ode(v + d)[0] - solve_scaling_ode(v - d)[0]) / (2 * d)
        assert abs(slope + x1) < 1e-4


def test_monotone_and_uncertainty(curve):
    assert np.all(np.diff(curve.e0) < 0)
    assert np.all(np.diff(curve.xn[1]) > 0)
    assert np.all(curve.xn[1] * curve.pn[1] >= 0.25)
    assert np.all(curve.xn[1] > 0) and np.all(curve.pn[1] > 0)


def test_convergence_estimate(curve):
    assert np.all(curve.convergence_estimate < 1e-6)


@pytest.mark.parametrize("v", [-10.0, -4.0, 0.0, 4.0, 10.0])
def test_grid_convergence(v):
    half = GridSpec.default(v).half_width
    e = [solve_scaling_ode(v, GridSpec.with_spacing(half, h))[0]
         for h in (2 * DEFAULT_H, DEFAULT_H, DEFAULT_H / 2)]
    assert abs(e[2] - e[1]) < 1e-6
    ratio = (e[0] - e[1]) / (e[1] - e[2])
    assert ratio == pytest.approx(4, rel=0.05)


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec(8.0, 200)
    with pytest.raises(ValueError):
        GridSpec(-1.0, 301)
    assert GridSpec.default(0.0).spacing <= 0.02


def test_csv_roundtrip(tmp_path, curve):
    path = tmp_path / "curve.csv"
    curve.to_csv(path)
    assert path.read_text().splitlines()[0] == "v,e0,x1,p1,x2,p2"
    back = ScalingCurve.from_csv(path)
    assert np.array_equal(back.e0, curve.e0)
    assert np.array_equal(back.pn[2], curve.pn[2])


def test_interpolation_range(curve):
    assert float(curve.x(1, 0.25)) == pytest.approx(hermite_oracle(0.25)[1], rel=1e-3)
    with pytest.raises(ValueError):
        curve.x(1, 7.0)


def test_scaled_variables():
    s = scaled_variables(ModelParams(2**10, 1.0, 1.0))
    assert s.mass == 2.0**20
    assert s.u_scale == pytest.approx(2 ** (10 / 3) / 2**5)
    half = scaled_variables(ModelParams(2**10, 1.0, 0.5))
    assert half.mass == pytest.approx(1.125 * 2**20)
    neg = scaled_variables(ModelParams(2**10, 1.5, -0.5))
    assert neg.soft == "p" and neg.mass == pytest.approx(half.mass)
    assert neg.t == pytest.approx(1.5 * 1.5 / 2 - 1)
    with pytest.raises(ValueError):
        scaled_variables(ModelParams(16, 1.0, 0.0))


def test_energy_expansion_critical():
    p = ModelParams.from_xi(2**10, 1.0, 1.0)
    e = energy_expansion(p)
    assert e + 0.5 == pytest.approx(2 ** (-40 / 3) * 0.420805, rel=1e-4)
    full = observables(p, 1e-13).energy
    assert abs((full + 0.5) / (e + 0.5) - 1) < 0.1


def test_energy_expansion_lambda_term():
    p = ModelParams.from_xi(2**10, 0.98, 0.5)
    pure = -0.5 + scaled_variables(p).mass ** (-2 / 3) * solve_scaling_ode(scaled_variables(p).v)[0]
    assert energy_expansion(p) - pure == pytest.approx(0.5 / (2 * 2**10 * 1.5))
