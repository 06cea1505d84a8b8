"""Analytic parameter derivatives of sampled rational Gaussian wavelets.

Every closed form here is checked against the central finite-difference
oracle in the test suite; the oracle arbitrates whenever there is doubt.
Derivatives with respect to shape parameters treat the normalization
constant as frozen, so finite-difference comparisons must hold it fixed too
(``build_wavelet_matrix(..., norm_constant=...)``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .wavelets import (
    EtaVector,
    MotherShape,
    SampleGrid,
    build_wavelet_matrix,
    eval_base_poly,
    eval_mother_unnormalized,
    eval_odd_poly,
    eval_rational_term,
)

FD_STEP = 1e-6


def d_base_poly(pole, t):
    """Derivatives (d/da, d/db_raw) of the quartic denominator factor.

    The b derivative is chained through ``b_hat = b_raw^2 + eps``.
    """
    t2 = np.square(np.asarray(t, dtype=float))
    a = pole.a
    bh = pole.b_hat
    d_da = -4.0 * (a * t2 - a**3 - a * bh * bh)
    d_dbhat = 4.0 * (bh * t2 + bh**3 + a * a * bh)
    d_db = d_dbhat * (2.0 * pole.b_raw)
    return d_da[()], d_db[()]

def d_rational_term(poles, which: int, t):
    """Derivatives of the reciprocal-quartic product w.r.t. one pole pair.

    Uses d(1/r_k)/dtheta * prod_{j != k} 1/r_j, written as -v * (dr_k/dtheta) / r_k
    so the remaining factors never need to be multiplied out separately.
    """
    poles = tuple(poles)
    v = eval_rational_term(poles, t)
    r = eval_base_poly(poles[which], t)
    d_da, d_db = d_base_poly(poles[which], t)
    factor = -v / r
    return (factor * d_da)[()], (factor * d_db)[()]

def d_mother_d_zero(shape: MotherShape, which: int, t):
    """d/dt_k of the unnormalized mother: ``-t * prod_{j != k}(t^2 - t_j^2) * 2 t_k * v * exp(-t^2/2)``."""
    t = np.asarray(t, dtype=float)
    t2 = t * t
    partial = np.ones_like(t2)
    for j, tj in enumerate(shape.zeros):
        if j != which:
            partial = partial * (t2 - tj * tj)
    tk = float(shape.zeros[which])
    v = eval_rational_term(shape.poles, t)
    return (-2.0 * tk * t * partial * v * np.exp(-0.5 * t2))[()]

def d_mother_d_pole(shape: MotherShape, which: int, t):
    """(d/da_k, d/db_raw_k) of the unnormalized mother."""
    t = np.asarray(t, dtype=float)
    base = eval_odd_poly(shape.zeros, t) * np.exp(-0.5 * t * t)
    dv_da, dv_db = d_rational_term(shape.poles, which, t)
    return (base * dv_da)[()], (base * dv_db)[()]

def d_mother_dt(shape: MotherShape, t):
    """Analytic t-derivative of the unnormalized mother (product rule)."""
    t = np.asarray(t, dtype=float)
    t2 = t * t
    quads = [t2 - tk * tk for tk in shape.zeros]
    prod_all = np.ones_like(t2)
    for q in quads:
        prod_all = prod_all * q
    sum_partials = np.zeros_like(t2)
    for j in range(len(quads)):
        partial = np.ones_like(t2)
        for i, q in enumerate(quads):
            if i != j:
                partial = partial * q
        sum_partials += partial
    poly = t * prod_all
    d_poly = prod_all + 2.0 * t2 * sum_partials
    v = eval_rational_term(shape.poles, t)
    d_log_v = np.zeros_like(t2)
    for pole in shape.poles:
        r = eval_base_poly(pole, t)
        d_log_v += 4.0 * t * (t2 + pole.b_hat**2 - pole.a**2) / r
    d_v = -v * d_log_v
    gauss = np.exp(-0.5 * t2)
    return ((d_poly * v + poly * d_v - t * poly * v) * gauss)[()]

def d_dilated_d_scale_translation(
    eta: EtaVector, k: int, t, norm_constant: float | None = None
):
    """Derivatives of the dilated normalized wavelet w.r.t. (lam_k, tau_k).

    With u = (t - tau)/lam and psi the normalized mother:
      d/dlam = -lam^(-3/2) * (psi(u)/2 + u * psi'(u))
      d/dtau = -lam^(-3/2) * psi'(u)
    Both are odd under t -> 2 tau - t when the mother itself is odd.
    """
    if not 0 <= k < eta.m:
        raise IndexError(f"wavelet index {k} out of range for m={eta.m}")
    shape = eta.shape
    c = shape.norm_constant if norm_constant is None else norm_constant
    lam = float(eta.scales[k])
    tau = float(eta.translations[k])
    u = (np.asarray(t, dtype=float) - tau) / lam
    psi_u = c * np.asarray(eval_mother_unnormalized(shape, u), dtype=float)
    d_psi_u = c * np.asarray(d_mother_dt(shape, u), dtype=float)
    lam_m32 = lam**-1.5
    d_dlam = -lam_m32 * (0.5 * psi_u + u * d_psi_u)
    d_dtau = -lam_m32 * d_psi_u
    return d_dlam[()], d_dtau[()]


@dataclass(frozen=True, eq=False)
class JacobianBlock:
    """Stack of N x m derivative matrices, one per flat parameter.

    Ordering mirrors ``EtaVector.to_flat``: interleaved (scale, translation)
    pairs, then zeros, then interleaved pole coordinates.
    """

    matrices: np.ndarray
    m: int
    p: int
    n: int

    def __post_init__(self):
        mats = np.asarray(self.matrices, dtype=float)
        if mats.ndim != 3:
            raise ValueError("expected a (Q, N, m) stack")
        if mats.shape[0] != 2 * self.m + self.p + 2 * self.n:
            raise ValueError("stack depth does not match parameter count")
        if mats.shape[2] != self.m:
            raise ValueError("matrix width does not match m")
        object.__setattr__(self, "matrices", mats)

    @property
    def dim(self) -> int:
        return int(self.matrices.shape[0])

    def matrix(self, q: int) -> np.ndarray:
        return self.matrices[q]


def parameter_names(m: int, p: int, n: int) -> list[str]:
    names = []
    for k in range(m):
        names += [f"scale_{k + 1}", f"translation_{k + 1}"]
    names += [f"zero_{j + 1}" for j in range(p)]
    for i in range(n):
        names += [f"pole_re_{i + 1}", f"pole_im_{i + 1}"]
    return names


def parameter_blocks(m: int, p: int, n: int) -> dict[str, list[int]]:
    """Indices of the flat layout grouped into the five parameter families."""
    return {
        "scale": list(range(0, 2 * m, 2)),
        "translation": list(range(1, 2 * m, 2)),
        "zero": list(range(2 * m, 2 * m + p)),
        "pole_re": list(range(2 * m + p, 2 * m + p + 2 * n, 2)),
        "pole_im": list(range(2 * m + p + 1, 2 * m + p + 2 * n, 2)),
    }


def dilation_jacobian(
    mother, mother_prime, scales, translations, grid: SampleGrid
) -> np.ndarray:
    """(2m, N, m) stack of scale/translation derivatives for a fixed mother."""
    t = grid.points[:, None]
    lam = np.asarray(scales, dtype=float)[None, :]
    tau = np.asarray(translations, dtype=float)[None, :]
    u = (t - tau) / lam
    psi_u = np.asarray(mother(u), dtype=float)
    d_psi_u = np.asarray(mother_prime(u), dtype=float)
    lam_m32 = lam**-1.5
    d_dlam = -lam_m32 * (0.5 * psi_u + u * d_psi_u)
    d_dtau = -lam_m32 * d_psi_u
    m = lam.shape[1]
    out = np.zeros((2 * m, grid.points.size, m))
    for k in range(m):
        out[2 * k, :, k] = d_dlam[:, k]
        out[2 * k + 1, :, k] = d_dtau[:, k]
    return out


def build_jacobian(
    eta: EtaVector, grid: SampleGrid, norm_constant: float | None = None
) -> JacobianBlock:
    """Analytic derivative of the wavelet matrix w.r.t. every eta component.

    The normalization constant is frozen at its current value: it is applied
    as a fixed factor and never differentiated.
    """
    shape = eta.shape
    c = shape.norm_constant if norm_constant is None else norm_constant
    out = np.zeros((eta.dim, grid.points.size, eta.m))
    out[: 2 * eta.m] = dilation_jacobian(
        lambda u: c * eval_mother_unnormalized(shape, u),
        lambda u: c * d_mother_dt(shape, u),
        eta.scales,
        eta.translations,
        grid,
    )
    t = grid.points[:, None]
    u = (t - eta.translations[None, :]) / eta.scales[None, :]
    scale_factor = c / np.sqrt(eta.scales)[None, :]
    base = 2 * eta.m
    for j in range(eta.p):
        out[base + j] = scale_factor * d_mother_d_zero(shape, j, u)
    base = 2 * eta.m + eta.p
    for i in range(eta.n):
        d_da, d_db = d_mother_d_pole(shape, i, u)
        out[base + 2 * i] = scale_factor * d_da
        out[base + 2 * i + 1] = scale_factor * d_db
    return JacobianBlock(out, eta.m, eta.p, eta.n)


def finite_difference_oracle(func, eta: EtaVector, step: float = FD_STEP) -> np.ndarray:
    """Central differences of an array-valued map over every flat parameter.

    Perturbed points must stay inside the feasible region (scales above the
    clamp floor, zeros above theirs), otherwise the projection applied by the
    EtaVector constructor corrupts the difference quotient.
    """
    flat = eta.to_flat()
    base = np.asarray(func(eta), dtype=float)
    out = np.zeros((flat.size,) + base.shape)
    for q in range(flat.size):
        plus = flat.copy()
        plus[q] += step
        minus = flat.copy()
        minus[q] -= step
        f_plus = np.asarray(func(EtaVector.from_flat(plus, eta.m, eta.p, eta.n)), dtype=float)
        f_minus = np.asarray(func(EtaVector.from_flat(minus, eta.m, eta.p, eta.n)), dtype=float)
        out[q] = (f_plus - f_minus) / (2.0 * step)
    return out


def relative_jacobian_errors(analytic: np.ndarray, numeric: np.ndarray) -> np.ndarray:
    """Per-parameter relative deviation between two derivative stacks.

    The denominator is floored at a small fraction of the global derivative
    scale so parameters with (near) vanishing derivatives do not divide
    rounding noise by rounding noise.
    """
    analytic = np.asarray(analytic, dtype=float)
    numeric = np.asarray(numeric, dtype=float)
    axes = tuple(range(1, analytic.ndim))
    diff = np.max(np.abs(analytic - numeric), axis=axes) if analytic.ndim > 1 else np.abs(analytic - numeric)
    scale_a = np.max(np.abs(analytic), axis=axes) if analytic.ndim > 1 else np.abs(analytic)
    scale_n = np.max(np.abs(numeric), axis=axes) if numeric.ndim > 1 else np.abs(numeric)
    global_scale = max(float(np.max(scale_a, initial=0.0)), float(np.max(scale_n, initial=0.0)))
    denom = np.maximum.reduce([scale_a, scale_n, np.full_like(scale_a, 1e-3 * global_scale)])
    denom = np.maximum(denom, 1e-300)
    return diff / denom


def jacobian_check(
    eta: EtaVector, grid: SampleGrid, step: float = FD_STEP
) -> dict[str, float]:
    """Max relative error of the analytic Jacobian per parameter family.

    Finite differences run against the matrix build with the normalization
    constant frozen at the base point, matching what the analytic stack
    differentiates.
    """
    frozen_c = eta.shape.norm_constant
    analytic = build_jacobian(eta, grid, norm_constant=frozen_c).matrices
    numeric = finite_difference_oracle(
        lambda e: build_wavelet_matrix(e, grid, norm_constant=frozen_c).values,
        eta,
        step=step,
    )
    errors = relative_jacobian_errors(analytic, numeric)
    blocks = parameter_blocks(eta.m, eta.p, eta.n)
    return {
        name: (float(np.max(errors[idx])) if idx else 0.0)
        for name, idx in blocks.items()
    }
