"""Rational Gaussian wavelets: evaluation, normalization, matrix assembly.

A mother wavelet in this family has the form ``C * P(t) * v(t) * exp(-t^2/2)``
where ``P`` is an odd polynomial with real roots at the origin and at ``+-t_k``,
``v`` is a strictly positive even rational factor built from quadruples of
complex poles, and ``C`` scales the discrete L2 norm to one.  Dilated and
translated copies sampled on a uniform grid form the columns of the wavelet
matrix consumed by the variable-projection layer.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

# Floor added to b_raw^2 so poles stay off the real axis and the rational
# factor keeps a positive denominator.
POLE_IMAG_EPS = 1e-3
# Smallest admissible dilation; optimizers project onto [LAMBDA_MIN, inf).
LAMBDA_MIN = 1e-3
# Keeps adjustable polynomial roots away from the mandatory root at 0.
ZERO_FLOOR = 1e-4
# Dedicated grid on which normalization constants are computed.
NORM_GRID_POINTS = 4096
NORM_GRID_HALF_WIDTH = 8.0
# Below this unnormalized energy the wavelet is numerically zero.
DEGENERATE_ENERGY = 1e-300
# Smallest/largest singular value ratio before a matrix counts as rank deficient.
RANK_RATIO_FLOOR = 1e-10


class DegenerateWavelet(ValueError):
    """Raised when a shape evaluates to a numerically zero wavelet."""


class RankDeficientWarning(UserWarning):
    """Emitted when a wavelet matrix loses full column rank."""


@dataclass(frozen=True, eq=False)
class SampleGrid:
    """Uniform, strictly increasing sampling grid."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("grid needs at least two points")
        steps = np.diff(pts)
        if np.any(steps <= 0.0):
            raise ValueError("grid must be strictly increasing")
        h = float(pts[1] - pts[0])
        tol = 1e-12 * max(1.0, abs(float(pts[0])), abs(float(pts[-1])))
        if np.max(np.abs(steps - h)) > tol:
            raise ValueError("grid spacing is not uniform")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return int(self.points.size)

    @property
    def h(self) -> float:
        return float(self.points[1] - self.points[0])

    @property
    def span(self) -> float:
        return float(self.points[-1] - self.points[0])

    @classmethod
    def uniform(cls, start: float, stop: float, count: int) -> "SampleGrid":
        return cls(np.linspace(start, stop, count))

    @classmethod
    def symmetric(cls, half_width: float, count: int) -> "SampleGrid":
        # Offsets are exact multiples of h around zero, so t -> -t maps the
        # grid onto itself bit-exactly; odd integrands then cancel exactly.
        h = 2.0 * half_width / (count - 1)
        offsets = np.arange(count, dtype=float) - (count - 1) / 2.0
        return cls(offsets * h)

    @classmethod
    def signal(cls, count: int, start: float = 0.0, stop: float = 2.0) -> "SampleGrid":
        """Default grid on which sampled signals live."""
        return cls.uniform(start, stop, count)


def normalization_grid() -> SampleGrid:
    return SampleGrid.symmetric(NORM_GRID_HALF_WIDTH, NORM_GRID_POINTS)


@dataclass(frozen=True)
class PolePair:
    """One quadruple of complex poles ``+-a +- i*b_hat`` with ``b_hat = b_raw^2 + eps``."""

    a: float
    b_raw: float

    @property
    def b_hat(self) -> float:
        return self.b_raw * self.b_raw + POLE_IMAG_EPS

    @classmethod
    def from_b_hat(cls, a: float, b_hat: float) -> "PolePair":
        if b_hat < POLE_IMAG_EPS:
            raise ValueError(f"b_hat must be at least {POLE_IMAG_EPS}")
        return cls(float(a), math.sqrt(b_hat - POLE_IMAG_EPS))


def _floor_zeros(zeros: np.ndarray) -> np.ndarray:
    signs = np.where(zeros >= 0.0, 1.0, -1.0)
    return signs * np.maximum(np.abs(zeros), ZERO_FLOOR)


def _frozen_array(values, size_name: str | None = None) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(values, dtype=float)).copy()
    if arr.ndim != 1:
        raise ValueError(f"{size_name or 'parameter'} array must be one-dimensional")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class MotherShape:
    """Shape parameters of one mother wavelet: real roots plus pole quadruples."""

    zeros: np.ndarray
    pole_reals: np.ndarray
    pole_imags_raw: np.ndarray

    def __post_init__(self):
        zeros = np.asarray(self.zeros, dtype=float).reshape(-1)
        object.__setattr__(self, "zeros", _frozen_array(_floor_zeros(zeros)) if zeros.size else _frozen_array(np.empty(0)))
        object.__setattr__(self, "pole_reals", _frozen_array(self.pole_reals, "pole_reals"))
        object.__setattr__(self, "pole_imags_raw", _frozen_array(self.pole_imags_raw, "pole_imags_raw"))
        if self.pole_reals.size != self.pole_imags_raw.size:
            raise ValueError("pole_reals and pole_imags_raw must have equal length")
        if self.pole_reals.size < 1:
            raise ValueError("at least one pole pair is required")

    @property
    def p(self) -> int:
        return int(self.zeros.size)

    @property
    def n(self) -> int:
        return int(self.pole_reals.size)

    @property
    def poles(self) -> tuple[PolePair, ...]:
        return tuple(
            PolePair(float(a), float(b))
            for a, b in zip(self.pole_reals, self.pole_imags_raw)
        )

    @cached_property
    def norm_constant(self) -> float:
        return compute_norm_constant(self)


@dataclass(frozen=True, eq=False)
class EtaVector:
    """Full trainable parameter vector: m (scale, translation) pairs plus shape.

    The flat layout used by ``to_flat``/``from_flat`` interleaves scales and
    translations first, then lists zeros, then interleaved pole coordinates:
    ``[lam_1, tau_1, ..., lam_m, tau_m, t_1, ..., t_p, a_1, b_1, ..., a_n, b_n]``.
    """

    scales: np.ndarray
    translations: np.ndarray
    zeros: np.ndarray
    pole_reals: np.ndarray
    pole_imags_raw: np.ndarray

    def __post_init__(self):
        scales = np.asarray(self.scales, dtype=float).reshape(-1)
        object.__setattr__(self, "scales", _frozen_array(np.maximum(scales, LAMBDA_MIN)))
        object.__setattr__(self, "translations", _frozen_array(self.translations, "translations"))
        zeros = np.asarray(self.zeros, dtype=float).reshape(-1)
        object.__setattr__(self, "zeros", _frozen_array(_floor_zeros(zeros)) if zeros.size else _frozen_array(np.empty(0)))
        object.__setattr__(self, "pole_reals", _frozen_array(self.pole_reals, "pole_reals"))
        object.__setattr__(self, "pole_imags_raw", _frozen_array(self.pole_imags_raw, "pole_imags_raw"))
        if self.scales.size < 1:
            raise ValueError("at least one (scale, translation) pair is required")
        if self.scales.size != self.translations.size:
            raise ValueError("scales and translations must have equal length")
        if self.pole_reals.size != self.pole_imags_raw.size:
            raise ValueError("pole_reals and pole_imags_raw must have equal length")
        if self.pole_reals.size < 1:
            raise ValueError("at least one pole pair is required")

    @property
    def m(self) -> int:
        return int(self.scales.size)

    @property
    def p(self) -> int:
        return int(self.zeros.size)

    @property
    def n(self) -> int:
        return int(self.pole_reals.size)

    @property
    def dim(self) -> int:
        return 2 * self.m + self.p + 2 * self.n

    @cached_property
    def shape(self) -> MotherShape:
        return MotherShape(self.zeros, self.pole_reals, self.pole_imags_raw)

    def to_flat(self) -> np.ndarray:
        flat = np.empty(self.dim)
        flat[0 : 2 * self.m : 2] = self.scales
        flat[1 : 2 * self.m : 2] = self.translations
        flat[2 * self.m : 2 * self.m + self.p] = self.zeros
        flat[2 * self.m + self.p :: 2] = self.pole_reals
        flat[2 * self.m + self.p + 1 :: 2] = self.pole_imags_raw
        return flat

    @classmethod
    def from_flat(cls, flat, m: int, p: int, n: int) -> "EtaVector":
        flat = np.asarray(flat, dtype=float).reshape(-1)
        if flat.size != 2 * m + p + 2 * n:
            raise ValueError(f"expected {2 * m + p + 2 * n} entries, got {flat.size}")
        return cls(
            scales=flat[0 : 2 * m : 2],
            translations=flat[1 : 2 * m : 2],
            zeros=flat[2 * m : 2 * m + p],
            pole_reals=flat[2 * m + p :: 2],
            pole_imags_raw=flat[2 * m + p + 1 :: 2],
        )


def random_eta(
    rng: np.random.Generator,
    m: int,
    p: int,
    n: int,
    scale_range: tuple[float, float] = (0.1, 1.5),
    translation_range: tuple[float, float] = (0.0, 2.0),
    zero_range: tuple[float, float] = (0.1, 3.0),
    pole_real_range: tuple[float, float] = (-2.0, 2.0),
    pole_imag_range: tuple[float, float] = (-2.0, 2.0),
    log_scales: bool = False,
) -> EtaVector:
    """Draw a random parameter vector with every entry inside the given ranges."""
    if log_scales:
        lo, hi = scale_range
        scales = np.exp(rng.uniform(math.log(lo), math.log(hi), size=m))
    else:
        scales = rng.uniform(*scale_range, size=m)
    return EtaVector(
        scales=scales,
        translations=rng.uniform(*translation_range, size=m),
        zeros=rng.uniform(*zero_range, size=p),
        pole_reals=rng.uniform(*pole_real_range, size=n),
        pole_imags_raw=rng.uniform(*pole_imag_range, size=n),
    )


def eval_base_poly(pole: PolePair, t):
    """Quartic denominator factor ``t^4 + 2(b_hat^2 - a^2) t^2 + (a^2 + b_hat^2)^2``."""
    t2 = np.square(np.asarray(t, dtype=float))
    a2 = pole.a * pole.a
    b2 = pole.b_hat * pole.b_hat
    return (t2 * t2 + 2.0 * (b2 - a2) * t2 + (a2 + b2) ** 2)[()]

def eval_rational_term(poles, t):
    """Product of reciprocal quartics; even and strictly positive."""
    poles = tuple(poles)
    if not poles:
        raise ValueError("at least one pole pair is required")
    out = 1.0 / np.asarray(eval_base_poly(poles[0], t), dtype=float)
    for pole in poles[1:]:
        out = out / eval_base_poly(pole, t)
    return out[()]

def eval_odd_poly(zeros, t):
    """Odd polynomial ``t * prod_k (t^2 - t_k^2)``."""
    t = np.asarray(t, dtype=float)
    t2 = t * t
    out = np.array(t, copy=True)
    for tk in np.asarray(zeros, dtype=float).reshape(-1):
        out = out * (t2 - tk * tk)
    return out[()]

def eval_mother_unnormalized(shape: MotherShape, t):
    """Mother wavelet before normalization: ``P(t) * v(t) * exp(-t^2/2)``."""
    t = np.asarray(t, dtype=float)
    return (
        eval_odd_poly(shape.zeros, t)
        * eval_rational_term(shape.poles, t)
        * np.exp(-0.5 * t * t)
    )[()]


def norm_constant_from_samples(values, h: float) -> float:
    """1 / discrete L2 norm of the supplied samples."""
    energy = h * float(np.sum(np.square(np.asarray(values, dtype=float))))
    if not energy > DEGENERATE_ENERGY:
        raise DegenerateWavelet("wavelet is numerically zero on the normalization grid")
    return 1.0 / math.sqrt(energy)


def compute_norm_constant(shape: MotherShape, grid: SampleGrid | None = None) -> float:
    """Normalization constant making the sampled mother unit norm.

    The grid must be wide enough that the Gaussian envelope is below 1e-12 at
    both ends; the default grid satisfies this with margin.
    """
    grid = normalization_grid() if grid is None else grid
    edge = max(math.exp(-0.5 * grid.points[0] ** 2), math.exp(-0.5 * grid.points[-1] ** 2))
    if edge > 1e-12:
        raise ValueError("normalization grid too narrow for the Gaussian envelope")
    return norm_constant_from_samples(eval_mother_unnormalized(shape, grid.points), grid.h)


def eval_mother(shape: MotherShape, t, norm_constant: float | None = None):
    """Normalized mother wavelet."""
    c = shape.norm_constant if norm_constant is None else norm_constant
    return (c * np.asarray(eval_mother_unnormalized(shape, t), dtype=float))[()]

def eval_dilated(eta: EtaVector, k: int, t, norm_constant: float | None = None):
    """Sample ``lam_k^(-1/2) * psi((t - tau_k) / lam_k)`` of the normalized mother."""
    if not 0 <= k < eta.m:
        raise IndexError(f"wavelet index {k} out of range for m={eta.m}")
    shape = eta.shape
    c = shape.norm_constant if norm_constant is None else norm_constant
    lam = float(eta.scales[k])
    tau = float(eta.translations[k])
    u = (np.asarray(t, dtype=float) - tau) / lam
    return (c / math.sqrt(lam) * eval_mother_unnormalized(shape, u))[()]


@dataclass(frozen=True, eq=False)
class WaveletMatrix:
    """Sampled dilations as columns; ``values[j, k] = psi_k(t_j)``."""

    values: np.ndarray
    rank_deficient: bool = False

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2:
            raise ValueError("wavelet matrix must be two-dimensional")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n_samples(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_wavelets(self) -> int:
        return int(self.values.shape[1])

    def column(self, k: int) -> np.ndarray:
        return self.values[:, k]


def sample_dilations(mother, scales, translations, grid: SampleGrid) -> np.ndarray:
    """N x m array whose column k samples ``mother((t - tau_k)/lam_k) / sqrt(lam_k)``."""
    t = grid.points[:, None]
    lam = np.asarray(scales, dtype=float)[None, :]
    tau = np.asarray(translations, dtype=float)[None, :]
    u = (t - tau) / lam
    return np.asarray(mother(u), dtype=float) / np.sqrt(lam)


def matrix_from_mother(mother, scales, translations, grid: SampleGrid) -> WaveletMatrix:
    """Assemble a wavelet matrix from an arbitrary mother callable."""
    values = sample_dilations(mother, scales, translations, grid)
    singular_values = np.linalg.svd(values, compute_uv=False)
    largest = float(singular_values[0]) if singular_values.size else 0.0
    deficient = largest <= 0.0 or bool(singular_values[-1] < RANK_RATIO_FLOOR * largest)
    if deficient:
        warnings.warn(
            "wavelet matrix is numerically rank deficient; coefficients fall "
            "back to the minimum-norm solution",
            RankDeficientWarning,
            stacklevel=2,
        )
    return WaveletMatrix(values=values, rank_deficient=deficient)


def build_wavelet_matrix(
    eta: EtaVector, grid: SampleGrid, norm_constant: float | None = None
) -> WaveletMatrix:
    """Sample all m dilations of the normalized mother on the grid.

    ``norm_constant`` overrides the freshly computed constant; gradient code
    passes the frozen value so parameter sweeps hold the scaling fixed.
    """
    shape = eta.shape
    c = shape.norm_constant if norm_constant is None else norm_constant
    return matrix_from_mother(
        lambda u: c * eval_mother_unnormalized(shape, u),
        eta.scales,
        eta.translations,
        grid,
    )
