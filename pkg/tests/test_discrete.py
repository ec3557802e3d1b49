"""Discrete Dirac / d / delta operators and the Hertz pipeline."""

import math

import numpy as np
import pytest
import sympy as sp

from stamax import algebra as al
from stamax import fields as fl
from stamax import grids as gr


def small_grid(h=0.1, n=7, origin=(-0.35, -0.35, -0.35, -0.35)):
    return gr.Grid(origin, (h, h, h, h), (n, n, n, n))


class _ConstField:
    has_jacobian = False

    def values(self, t, x, y, z):
        shape = np.broadcast(t, x, y, z).shape
        out = np.zeros(shape + (16,))
        out[..., al.G01] = 2.5
        out[..., al.SCALAR] = 1.0
        return out


class _LinearScalar:
    """f = x^1 as a grade-0 field."""

    has_jacobian = False

    def values(self, t, x, y, z):
        tt, xx, yy, zz = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (t, x, y, z)))
        out = np.zeros(tt.shape + (16,))
        out[..., al.SCALAR] = xx
        return out


def test_dirac_constant_field_is_zero():
    g = small_grid()
    dF = gr.dirac_operator(_ConstField(), g)
    assert dF.grid == g.trimmed(1)
    assert np.max(np.abs(dF.values)) == 0.0


def test_dirac_linear_scalar_gives_g1():
    g = small_grid()
    dF = gr.dirac_operator(_LinearScalar(), g)
    expected = al.basis(al.G1)
    err = np.max(al.norm(dF.values - expected))
    assert err <= 1e-13  # central differences are exact on linear data


def test_dirac_plane_wave_analytic_path():
    F = fl.eq_5a_field(omega=1.0)
    g = small_grid()
    dF = gr.dirac_operator(F, g)
    assert dF.grid == g  # analytic path: no trim
    assert np.max(al.norm(dF.values)) <= 1e-10


def test_grid_validation():
    with pytest.raises(ValueError):
        gr.Grid((0, 0, 0, 0), (0.1, -0.1, 0.1, 0.1), (5, 5, 5, 5))
    g = gr.Grid((0, 0, 0, 0), (0.1, 0.1, 0.1, 0.1), (1, 5, 5, 5))
    assert g.diff_axes == (1, 2, 3)
    # a differentiated axis below the stencil minimum is an argument error
    small = gr.Grid((0, 0, 0, 0), (0.1, 0.1, 0.1, 0.1), (3, 7, 7, 7))
    with pytest.raises(ValueError, match=">= 5"):
        gr.dirac_sampled(gr.SampledField(small, np.zeros(small.dims + (16,))))


def test_grade_bookkeeping_of_dirac():
    rng = np.random.default_rng(3)
    g = small_grid()
    T, X, Y, Z = g.meshgrid()
    smooth = np.sin(X + 0.3 * Y) * np.cos(Z - T)
    for k in range(5):
        blade_mix = rng.standard_normal(16) * al.GRADE_MASKS[k]
        f = gr.SampledField(g, smooth[..., None] * blade_mix)
        df = gr.dirac_sampled(f)
        allowed = np.zeros(16, dtype=bool)
        if k < 4:
            allowed |= al.GRADE_MASKS[k + 1]
        if k > 0:
            allowed |= al.GRADE_MASKS[k - 1]
        assert np.max(np.abs(df.values[..., ~allowed])) <= 1e-12


def test_d_squared_and_delta_squared_vanish():
    g = small_grid(h=0.15, n=9)
    T, X, Y, Z = g.meshgrid()
    smooth = np.exp(0.2 * X) * np.sin(Y + 0.5 * Z - 0.7 * T)
    f0 = gr.SampledField(g, smooth[..., None] * al.basis(al.SCALAR))
    df, delta0 = gr.d_and_delta(f0, 0)
    assert np.max(np.abs(delta0.values)) == 0.0  # delta of a 0-form is 0
    ddf, _ = gr.d_and_delta(df, 1)
    scale = np.max(al.norm(df.values))
    assert np.max(al.norm(ddf.values)) <= 1e-12 * scale  # commuting stencils: d^2 = 0
    f2 = gr.SampledField(g, smooth[..., None] * al.basis(al.G02))
    _, delta_f2 = gr.d_and_delta(f2, 2)
    _, delta_delta = gr.d_and_delta(delta_f2, 1)
    assert np.max(al.norm(delta_delta.values)) <= 1e-12 * scale


def test_d_and_delta_rejects_mixed_grade():
    g = small_grid()
    vals = np.zeros(g.dims + (16,))
    vals[..., al.SCALAR] = 1.0
    vals[..., al.G01] = 1.0
    with pytest.raises(ValueError):
        gr.d_and_delta(gr.SampledField(g, vals), 0)


def test_delta_of_xwave_hertz_matches_hand_formula():
    """Blade-expansion oracle for A = -delta(Pi), Pi = Re(Phi) g12 + Im(Phi) ii g12.

    The real channel gives d2Re g1 - d1Re g2; the imaginary channel rides
    ii g12 = +g03, whose grade-1 contractions give +d3Im g0 + d0Im g3.
    """
    p = fl.XWaveParams(eta=0.8, a0=1.1)
    hz = fl.HertzField(fl.xwave_scalar_closure(p), al.basis(al.G12))
    pt = (0.3, 0.4, -0.2, 0.6)
    A = hz.potential_values(*pt)
    sc = fl.xwave_scalar_closure(p)
    d0 = complex(sc.partial((0,), *pt))
    d1 = complex(sc.partial((1,), *pt))
    d2 = complex(sc.partial((2,), *pt))
    d3 = complex(sc.partial((3,), *pt))
    expected = (
        d2.real * al.basis(al.G1) - d1.real * al.basis(al.G2)
        + d3.imag * al.basis(al.G0) + d0.imag * al.basis(al.G3)
    )
    assert np.allclose(A, expected, atol=1e-13)
    # ii g12 = +g03
    assert np.array_equal(al.gp(al.PAULI_I, al.basis(al.G12)), al.basis(al.G03))


def test_hertz_pipeline_analytic_xwave_matches_field_catalog():
    p = fl.XWaveParams(eta=math.pi / 4, a0=1.0)
    hz = fl.HertzField(fl.xwave_scalar_closure(p), al.basis(al.G12))
    g = small_grid(h=0.2, n=5)
    res = gr.hertz_pipeline(hz, g)
    catalog = gr.SampledField.from_closure(fl.XWaveField(p), g)
    assert np.allclose(res.F.values, catalog.values, atol=1e-12)
    assert res.lorenz_residual <= 1e-12
    assert res.wave_residual <= 1e-9


def test_hertz_pipeline_fd_path_matches_analytic():
    p = fl.XWaveParams(eta=math.pi / 4, a0=1.0)
    hz = fl.HertzField(fl.xwave_scalar_closure(p), al.basis(al.G12))

    class PiClosure:
        has_jacobian = False

        def values(self, t, x, y, z):
            return hz.pi_values(t, x, y, z)

    errs = []
    hs = [0.08, 0.04]
    for h in hs:
        n = 9
        half = (n - 1) / 2 * h
        g = gr.Grid((0.3 - half, -half, -half, 0.5 - half), (h, h, h, h), (n, n, n, n))
        res = gr.hertz_pipeline(PiClosure(), g, wave_rtol=None)
        exact = gr.SampledField.from_closure(fl.XWaveField(p), res.F.grid)
        errs.append(np.max(al.norm(res.F.values - exact.values)))
    assert errs[1] <= errs[0] / 3.0  # second-order convergence of the stencil path


def test_hertz_pipeline_exact_form_gives_zero_field():
    """Pi = d(omega) with box(omega) = 0 produces F = 0 hence T0 = 0.

    omega = sin(z - t) g1 gives d(omega) = -cos(z - t)(g01 + g13); commuting
    stencils make the discrete F vanish to roundoff, not just O(h^2).
    """
    g = small_grid(h=0.1, n=9)
    T, X, Y, Z = g.meshgrid()
    c = np.cos(Z - T)
    pi_vals = (-c)[..., None] * (al.basis(al.G01) + al.basis(al.G13))
    res = gr.hertz_pipeline(gr.SampledField(g, pi_vals), wave_rtol=None, grid=g)
    scale = np.max(al.norm(pi_vals))
    assert np.max(al.norm(res.F.values)) <= 1e-10 * scale
    T0 = -0.5 * al.gp(res.F.values, al.gp(al.GAMMA[0], res.F.values))
    assert np.max(al.norm(T0)) <= 1e-20 * scale


def test_hertz_pipeline_plane_wave_modulated_lorenz_gauge():
    expr = sp.exp(sp.I * (sp.Symbol("z", real=True) - sp.Symbol("t", real=True)))
    t, x, y, z = sp.symbols("t x y z", real=True)
    expr = sp.exp(sp.I * (z - t))
    sc = fl.SymbolicScalar("null_plane_scalar", expr, (), ())
    hz = fl.HertzField(sc, al.basis(al.G12))
    g = small_grid(h=0.3, n=5)
    res = gr.hertz_pipeline(hz, g)
    assert res.lorenz_residual <= 1e-9
    assert res.wave_residual <= 1e-12
    assert gr.maxwell_residual(hz, grid=g) <= 1e-10


def test_hertz_pipeline_rejects_non_wave_potential():
    t, x, y, z = sp.symbols("t x y z", real=True)
    sc = fl.SymbolicScalar("not_a_wave", x**2 + 0 * sp.I, (), ())
    hz = fl.HertzField(sc, al.basis(al.G12))
    with pytest.raises(gr.PipelineError, match="wave equation"):
        gr.hertz_pipeline(hz, small_grid())


def test_axis_aligned_plane_wave_is_exact_discrete_solution():
    # both stencil directions pick up the same discrete-dispersion factor,
    # so the sampled residual sits at roundoff for any h
    F = fl.eq_5a_field(omega=1.0)
    g = gr.Grid((-0.8, -0.8, -0.8, -0.8), (0.2, 0.2, 0.2, 0.2), (9, 5, 5, 9))
    assert gr.maxwell_residual(gr.SampledField.from_closure(F, g)) <= 1e-13


def test_maxwell_residual_convergence_order_on_plane_wave():
    # tilted propagation direction: per-axis dispersion factors differ and
    # the residual converges at the stencil order
    F = fl.PlaneWaveField(fl.PlaneWaveParams(omega=1.0, direction=(1.0, 2.0, 2.0)))
    hs, errs = [], []
    for n in (9, 17, 33):
        h = 1.6 / (n - 1)
        g = gr.Grid((-0.8, -0.8, -0.8, -0.8), (h, h, h, h), (n, n, n, n))
        sampled = gr.SampledField.from_closure(F, g)
        errs.append(gr.maxwell_residual(sampled))
        hs.append(h)
    slope = gr.loglog_slope(hs, errs)
    assert 1.9 <= slope <= 2.1


def test_maxwell_residual_negative_control():
    F = fl.eq_5a_field(omega=1.0)
    g = small_grid(h=0.2, n=7)
    clean = gr.SampledField.from_closure(F, g)
    base = gr.maxwell_residual(clean)
    corrupted = gr.corrupt_field(clean)
    assert gr.maxwell_residual(corrupted) > 50 * max(base, 1e-6)


def test_vector_split_matches_clifford_residual_orders():
    F = fl.eq_5a_field(omega=1.0)
    g = small_grid(h=0.1, n=9)
    sampled = gr.SampledField.from_closure(F, g)
    clifford = gr.maxwell_residual(sampled)
    split = gr.vector_form_split(sampled)
    assert split.max() <= 3 * clifford + 1e-12
    assert clifford <= 3 * split.max() + 1e-12
    corrupted = gr.corrupt_field(sampled)
    assert gr.vector_form_split(corrupted).max() > 50 * split.max()


def test_vector_split_analytic_plane_wave_faraday():
    F = fl.eq_5a_field(omega=1.3)
    g = small_grid(h=0.25, n=5)
    split = gr.vector_form_split_closure(F, g)
    assert split.faraday <= 1e-10
    assert split.max() <= 1e-10


def test_vector_split_static_dipole():
    p = fl.DipoleParams(Q=1.0, C=1.0, R=0.5)
    h = 0.05
    g = gr.Grid((0.0, 1.0, 1.0, 1.0), (1.0, h, h, h), (1, 9, 9, 9))
    sampled = gr.SampledField.from_closure(fl.DipoleField(p), g)
    split = gr.vector_form_split(sampled)
    assert split.div_E <= 5e-3
    assert split.div_B <= 5e-3
    assert split.max() <= 5e-3


def test_sampled_field_csv_roundtrip(tmp_path):
    g = gr.Grid((0, 0, 0, 0), (0.1, 0.2, 0.3, 0.4), (1, 5, 5, 5))
    rng = np.random.default_rng(9)
    f = gr.SampledField(g, rng.standard_normal(g.dims + (16,)))
    path = tmp_path / "field.csv"
    gr.save_sampled_field(f, path)
    loaded = gr.load_sampled_field(path)
    assert loaded.grid == g
    assert np.allclose(loaded.values, f.values, atol=0, rtol=0)
