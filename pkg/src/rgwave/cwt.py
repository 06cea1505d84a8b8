"""Reference continuous wavelet transform: quadrature coefficients, scalograms,
an FFT-based admissibility check, and the fixed Ricker baseline mother."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .wavelets import (
    EtaVector,
    MotherShape,
    SampleGrid,
    eval_dilated,
    eval_mother,
    eval_mother_unnormalized,
)

# Default grid for spectral checks: wide enough for the Gaussian envelope to
# drop below 1e-14 and fine enough to resolve the narrowest admissible pole
# spikes (half-width b_hat >= 1e-3 needs a Nyquist rate of several thousand).
ADMISSIBILITY_HALF_WIDTH = 12.0
ADMISSIBILITY_POINTS = 65536

# L2 normalization of the second Gaussian derivative.
RICKER_NORM = 2.0 / (math.sqrt(3.0) * math.pi**0.25)


def ricker(t):
    """Fixed baseline mother: normalized second derivative of a Gaussian."""
    t = np.asarray(t, dtype=float)
    return (RICKER_NORM * (1.0 - t * t) * np.exp(-0.5 * t * t))[()]

def ricker_prime(t):
    """Analytic t-derivative of the baseline mother."""
    t = np.asarray(t, dtype=float)
    return (RICKER_NORM * t * (t * t - 3.0) * np.exp(-0.5 * t * t))[()]

def quadrature_coefficient(
    f_samples, eta: EtaVector, k: int, grid: SampleGrid, norm_constant: float | None = None
) -> float:
    """Riemann-sum wavelet coefficient ``h * sum_j f(t_j) psi_{lam_k,tau_k}(t_j)``."""
    f = np.asarray(f_samples, dtype=float)
    if f.shape != (len(grid),):
        raise ValueError("signal length does not match grid")
    column = eval_dilated(eta, k, grid.points, norm_constant=norm_constant)
    return grid.h * float(f @ column)


def scale_grid(
    count: int = 25,
    low: float = 0.1,
    high: float = 1.5,
    spacing: str = "linear",
    octave_base: float = 2.0,
) -> np.ndarray:
    """Scale axis for scalograms: linear by default, octave powers behind a flag.

    Octave spacing returns the powers ``octave_base**(-r)`` that fall inside
    [low, high]; ``count`` is ignored in that mode because the exponent range
    is determined by the interval.
    """
    if spacing == "linear":
        return np.linspace(low, high, count)
    if spacing == "octave":
        if octave_base <= 1.0:
            raise ValueError("octave base must exceed 1")
        r_min = math.ceil(math.log(1.0 / high, octave_base))
        r_max = math.floor(math.log(1.0 / low, octave_base))
        if r_max < r_min:
            raise ValueError("no octave scales inside the requested interval")
        return octave_base ** (-np.arange(r_min, r_max + 1, dtype=float))
    raise ValueError(f"unknown spacing {spacing!r}")


@dataclass(frozen=True, eq=False)
class Scalogram:
    """Coefficient magnitudes on a scale x translation lattice."""

    scales: np.ndarray
    translations: np.ndarray
    magnitudes: np.ndarray

    def __post_init__(self):
        mags = np.asarray(self.magnitudes, dtype=float)
        if mags.shape != (len(np.atleast_1d(self.scales)), len(np.atleast_1d(self.translations))):
            raise ValueError("magnitude array does not match the axes")
        object.__setattr__(self, "scales", np.asarray(self.scales, dtype=float))
        object.__setattr__(self, "translations", np.asarray(self.translations, dtype=float))
        object.__setattr__(self, "magnitudes", mags)

    def peak(self) -> tuple[int, int]:
        """(scale index, translation index) of the largest magnitude."""
        flat = int(np.argmax(self.magnitudes))
        return flat // self.magnitudes.shape[1], flat % self.magnitudes.shape[1]


def scalogram(
    f_samples,
    shape: MotherShape,
    scales,
    translations,
    grid: SampleGrid,
    mother=None,
) -> Scalogram:
    """Absolute quadrature coefficients over every (scale, translation) pair.

    ``mother`` overrides the analyzed mother wavelet (e.g. the Ricker
    baseline); by default the normalized rational Gaussian mother of
    ``shape`` is used.
    """
    f = np.asarray(f_samples, dtype=float)
    if f.shape != (len(grid),):
        raise ValueError("signal length does not match grid")
    scales = np.asarray(scales, dtype=float)
    translations = np.asarray(translations, dtype=float)
    if mother is None:
        c = shape.norm_constant
        mother = lambda u: c * eval_mother_unnormalized(shape, u)
    rows = np.empty((scales.size, translations.size))
    t = grid.points[:, None]
    for i, lam in enumerate(scales):
        u = (t - translations[None, :]) / lam
        rows[i] = grid.h / math.sqrt(lam) * (f @ np.asarray(mother(u), dtype=float))
    return Scalogram(scales=scales, translations=translations, magnitudes=np.abs(rows))


def convolution_consistency(
    f_samples, eta: EtaVector, k: int, grid: SampleGrid
) -> float:
    """Max deviation between per-translation quadrature and discrete correlation.

    The comparison is restricted to translations whose wavelet support
    (|u| <= 8 in mother coordinates) sits inside the grid; nan is returned
    when no translation qualifies at this scale.
    """
    f = np.asarray(f_samples, dtype=float)
    if f.shape != (len(grid),):
        raise ValueError("signal length does not match grid")
    shape = eta.shape
    c = shape.norm_constant
    lam = float(eta.scales[k])
    h = grid.h
    count = len(grid)

    # Route 1: dense quadrature with tau at every grid node.
    t = grid.points[:, None]
    u = (t - grid.points[None, :]) / lam
    dense = h / math.sqrt(lam) * (f @ (c * eval_mother_unnormalized(shape, u)))

    # Route 2: discrete correlation against the wavelet sampled at offset
    # multiples of h; index s of the kernel holds the offset (s - count + 1) h.
    offsets = np.arange(-(count - 1), count, dtype=float) * h / lam
    kernel = c / math.sqrt(lam) * eval_mother_unnormalized(shape, offsets)
    correlated = h * np.convolve(f, kernel[::-1])[count - 1 : 2 * count - 1]

    support = 8.0 * lam
    valid = (grid.points >= grid.points[0] + support) & (
        grid.points <= grid.points[-1] - support
    )
    if not np.any(valid):
        return math.nan
    return float(np.max(np.abs(dense[valid] - correlated[valid])))


@dataclass(frozen=True, eq=False)
class AdmissibilityReport:
    """Spectral diagnostics: DC leakage, admissibility integral, L2 norm."""

    psi_hat_at_zero: float
    psi_hat_max: float
    admissibility_integral: float
    l2_norm: float

    def as_dict(self) -> dict:
        return {
            "psi_hat_at_zero": self.psi_hat_at_zero,
            "psi_hat_max": self.psi_hat_max,
            "admissibility_integral": self.admissibility_integral,
            "l2_norm": self.l2_norm,
        }


def admissibility_grid(refinement: int = 1) -> SampleGrid:
    return SampleGrid.symmetric(ADMISSIBILITY_HALF_WIDTH, refinement * ADMISSIBILITY_POINTS)


def admissibility_check(shape: MotherShape, grid: SampleGrid | None = None) -> AdmissibilityReport:
    """DFT-based admissibility diagnostics of the normalized mother.

    The spectrum is approximated by ``h * rfft(psi)`` on a symmetric grid;
    the admissibility integral sums |psi_hat|^2 / |xi| over nonzero bins of
    both half-axes.  Oddness makes the DC bin cancel to rounding noise.
    """
    grid = admissibility_grid() if grid is None else grid
    psi = eval_mother(shape, grid.points)
    h = grid.h
    spectrum = h * np.fft.rfft(psi)
    magnitude2 = np.abs(spectrum) ** 2
    xi = 2.0 * math.pi * np.fft.rfftfreq(len(grid), d=h)
    d_xi = xi[1] - xi[0]
    # Factor 2 covers the negative half-axis (real signal, even |spectrum|).
    integral = 2.0 * float(np.sum(magnitude2[1:] / xi[1:]) * d_xi)
    return AdmissibilityReport(
        psi_hat_at_zero=float(np.abs(spectrum[0])),
        psi_hat_max=float(np.max(np.abs(spectrum))),
        admissibility_integral=integral,
        l2_norm=math.sqrt(h * float(np.sum(psi * psi))),
    )
