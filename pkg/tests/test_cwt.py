import math

import numpy as np
import pytest

from rgwave.cwt import (
    RICKER_NORM,
    admissibility_check,
    admissibility_grid,
    convolution_consistency,
    quadrature_coefficient,
    ricker,
    ricker_prime,
    scale_grid,
    scalogram,
)
from rgwave.wavelets import (
    EtaVector,
    MotherShape,
    SampleGrid,
    build_wavelet_matrix,
    eval_dilated,
    random_eta,
)


def make_shape():
    return MotherShape(
        zeros=np.array([1.1]), pole_reals=np.array([0.4]), pole_imags_raw=np.array([0.9])
    )


# --- baseline mother --------------------------------------------------------


def test_ricker_norm_frozen_value():
    assert RICKER_NORM == pytest.approx(2.0 / (math.sqrt(3.0) * math.pi ** 0.25), rel=1e-15)


def test_ricker_peak_and_zero_crossings():
    assert ricker(0.0) == pytest.approx(RICKER_NORM)
    assert ricker(1.0) == pytest.approx(0.0, abs=1e-15)
    assert ricker(-1.0) == pytest.approx(0.0, abs=1e-15)


def test_ricker_has_unit_l2_norm():
    grid = SampleGrid.symmetric(10.0, 8001)
    samples = ricker(grid.points)
    assert grid.h * float(np.sum(samples * samples)) == pytest.approx(1.0, abs=1e-9)


def test_ricker_prime_matches_fd():
    t = np.linspace(-4, 4, 101)
    h = 1e-6
    fd = (ricker(t + h) - ricker(t - h)) / (2 * h)
    np.testing.assert_allclose(ricker_prime(t), fd, rtol=1e-7, atol=1e-9)


# --- quadrature coefficients --------------------------------------------------


def test_quadrature_coefficient_matches_matrix_column():
    rng = np.random.default_rng(5)
    grid = SampleGrid.signal(200)
    eta = random_eta(rng, 3, 1, 1)
    f = rng.standard_normal(len(grid))
    psi = build_wavelet_matrix(eta, grid)
    for k in range(eta.m):
        expected = grid.h * float(f @ psi.column(k))
        assert quadrature_coefficient(f, eta, k, grid) == pytest.approx(expected, rel=1e-12)


def test_quadrature_coefficient_of_orthogonal_signal_is_zero():
    # The mother is odd around tau, an even signal around tau integrates to ~0.
    grid = SampleGrid.symmetric(6.0, 2401)
    eta = EtaVector(scales=[0.7], translations=[0.0], zeros=[1.1], pole_reals=[0.4], pole_imags_raw=[0.9])
    f = np.exp(-0.5 * grid.points ** 2)
    assert abs(quadrature_coefficient(f, eta, 0, grid)) < 1e-14


def test_quadrature_coefficient_checks_length():
    grid = SampleGrid.signal(100)
    eta = random_eta(np.random.default_rng(0), 2, 1, 1)
    with pytest.raises(ValueError):
        quadrature_coefficient(np.zeros(99), eta, 0, grid)


# --- scale axis ----------------------------------------------------------------


def test_linear_scale_grid_spans_requested_interval():
    scales = scale_grid(25, 0.1, 1.5)
    assert scales.size == 25
    assert scales[0] == pytest.approx(0.1)
    assert scales[-1] == pytest.approx(1.5)
    assert np.all(np.diff(scales) > 0)


def test_octave_scale_grid_returns_inverse_powers():
    scales = scale_grid(low=0.1, high=1.5, spacing="octave")
    np.testing.assert_allclose(sorted(scales), [0.125, 0.25, 0.5, 1.0])


def test_octave_scale_grid_rejects_empty_interval():
    with pytest.raises(ValueError):
        scale_grid(low=0.9, high=0.95, spacing="octave")


def test_scale_grid_rejects_unknown_spacing():
    with pytest.raises(ValueError):
        scale_grid(spacing="mel")


# --- scalogram -------------------------------------------------------------------


def test_scalogram_peak_localizes_matching_wavelet():
    """A signal that *is* one dilation lights up at that (scale, translation)."""
    grid = SampleGrid.signal(300)
    shape = make_shape()
    scales = np.linspace(0.1, 1.5, 25)
    translations = grid.points[::10]
    eta = EtaVector(
        scales=[0.62], translations=[1.0],
        zeros=shape.zeros, pole_reals=shape.pole_reals, pole_imags_raw=shape.pole_imags_raw,
    )
    f = eval_dilated(eta, 0, grid.points)
    gram_rows = scalogram(f, shape, scales, translations, grid)
    i, j = gram_rows.peak()
    assert abs(scales[i] - 0.62) <= (scales[1] - scales[0])
    assert abs(translations[j] - 1.0) <= 2 * (translations[1] - translations[0])


def test_scalogram_magnitudes_are_nonnegative_and_shaped():
    grid = SampleGrid.signal(120)
    rng = np.random.default_rng(7)
    f = rng.standard_normal(len(grid))
    s = scalogram(f, make_shape(), np.array([0.3, 0.6]), grid.points[::12], grid)
    assert s.magnitudes.shape == (2, 10)
    assert np.all(s.magnitudes >= 0)


def test_scalogram_with_baseline_mother_matches_manual_row():
    grid = SampleGrid.signal(150)
    rng = np.random.default_rng(9)
    f = rng.standard_normal(len(grid))
    lam = 0.5
    taus = grid.points[::15]
    s = scalogram(f, make_shape(), np.array([lam]), taus, grid, mother=ricker)
    manual = np.array([
        grid.h / math.sqrt(lam) * float(f @ ricker((grid.points - tau) / lam))
        for tau in taus
    ])
    np.testing.assert_allclose(s.magnitudes[0], np.abs(manual), rtol=1e-12)


def test_scalogram_rejects_mismatched_signal():
    grid = SampleGrid.signal(90)
    with pytest.raises(ValueError):
        scalogram(np.zeros(89), make_shape(), np.array([0.5]), np.array([1.0]), grid)


# --- convolution cross-check -------------------------------------------------------


def test_quadrature_agrees_with_discrete_correlation():
    rng = np.random.default_rng(15)
    grid = SampleGrid.symmetric(10.0, 1501)
    eta = EtaVector(scales=[0.4], translations=[0.0], zeros=[1.1], pole_reals=[0.4], pole_imags_raw=[0.9])
    f = np.exp(-0.5 * ((grid.points - 1.0) / 0.4) ** 2) * np.sin(3 * grid.points)
    deviation = convolution_consistency(f, eta, 0, grid)
    assert deviation < 1e-12


def test_convolution_consistency_returns_nan_without_interior():
    # Scale so large that the wavelet support never fits inside the grid.
    grid = SampleGrid.signal(100)
    eta = EtaVector(scales=[1.5], translations=[1.0], zeros=[1.1], pole_reals=[0.4], pole_imags_raw=[0.9])
    assert math.isnan(convolution_consistency(np.sin(grid.points), eta, 0, grid))


# --- admissibility ------------------------------------------------------------------


def test_admissibility_dc_bin_cancels_exactly():
    report = admissibility_check(make_shape())
    assert report.psi_hat_at_zero <= 1e-10 * report.psi_hat_max


def test_admissibility_integral_finite_and_positive():
    report = admissibility_check(make_shape())
    assert math.isfinite(report.admissibility_integral)
    assert report.admissibility_integral > 0.0
    assert report.l2_norm == pytest.approx(1.0, abs=1e-9)


def test_admissibility_stable_under_refinement():
    shape = make_shape()
    coarse = admissibility_check(shape)
    fine = admissibility_check(shape, grid=admissibility_grid(refinement=2))
    drift = abs(fine.admissibility_integral - coarse.admissibility_integral)
    assert drift < 0.01 * coarse.admissibility_integral


def test_admissibility_random_shape_sweep():
    rng = np.random.default_rng(23)
    for _ in range(15):
        n = int(rng.integers(1, 4))
        shape = MotherShape(
            zeros=rng.uniform(0.1, 3.0, size=int(rng.integers(0, 4))),
            pole_reals=rng.uniform(-1.5, 1.5, size=n),
            pole_imags_raw=rng.uniform(0.0, 1.5, size=n),
        )
        report = admissibility_check(shape)
        assert report.psi_hat_at_zero <= 1e-10 * report.psi_hat_max
        assert math.isfinite(report.admissibility_integral)


def test_report_as_dict_round_trips_fields():
    report = admissibility_check(make_shape())
    d = report.as_dict()
    assert set(d) == {"psi_hat_at_zero", "psi_hat_max", "admissibility_integral", "l2_norm"}
    assert d["l2_norm"] == report.l2_norm
