import numpy as np
import pytest

from rgwave.derivatives import (
    FD_STEP,
    JacobianBlock,
    build_jacobian,
    d_base_poly,
    d_dilated_d_scale_translation,
    d_mother_d_pole,
    d_mother_d_zero,
    d_mother_dt,
    d_rational_term,
    dilation_jacobian,
    finite_difference_oracle,
    jacobian_check,
    parameter_blocks,
    parameter_names,
    relative_jacobian_errors,
)
from rgwave.wavelets import (
    EtaVector,
    MotherShape,
    PolePair,
    SampleGrid,
    build_wavelet_matrix,
    eval_base_poly,
    eval_mother_unnormalized,
    eval_rational_term,
    random_eta,
)

# Scalar-level checks use FD with interior-safe parameter draws, so the clamp
# projections inside the constructors never bite.
SCALAR_TOL = 1e-6
JACOBIAN_TOL = 1e-5


def central(f, x, h=1e-6):
    return (f(x + h) - f(x - h)) / (2.0 * h)


def test_base_poly_derivative_frozen_value():
    # a=1, b_hat=1, t=0: d/da of (a^2+b_hat^2)^2 - 2 a^2 t^2 ... = 8 at the origin
    pole = PolePair.from_b_hat(1.0, 1.0)
    d_da, _ = d_base_poly(pole, 0.0)
    assert d_da == pytest.approx(8.0, abs=1e-12)


def test_base_poly_derivatives_match_fd():
    rng = np.random.default_rng(3)
    t = rng.uniform(-4, 4, size=32)
    for _ in range(25):
        a, b = rng.uniform(-2, 2), rng.uniform(0.3, 2)
        d_da, d_db = d_base_poly(PolePair(a, b), t)
        fd_a = central(lambda x: eval_base_poly(PolePair(x, b), t), a)
        fd_b = central(lambda x: eval_base_poly(PolePair(a, x), t), b)
        np.testing.assert_allclose(d_da, fd_a, rtol=1e-6, atol=1e-6)
        np.testing.assert_allclose(d_db, fd_b, rtol=1e-6, atol=1e-6)


def test_rational_term_derivatives_match_fd():
    rng = np.random.default_rng(4)
    t = rng.uniform(-4, 4, size=32)
    for _ in range(25):
        a = rng.uniform(-1.5, 1.5, size=2)
        b = rng.uniform(0.3, 1.5, size=2)
        poles = [PolePair(a[0], b[0]), PolePair(a[1], b[1])]
        which = int(rng.integers(0, 2))
        d_da, d_db = d_rational_term(poles, which, t)

        def with_a(x):
            ps = list(poles)
            ps[which] = PolePair(x, b[which])
            return eval_rational_term(ps, t)

        def with_b(x):
            ps = list(poles)
            ps[which] = PolePair(a[which], x)
            return eval_rational_term(ps, t)

        np.testing.assert_allclose(d_da, central(with_a, a[which]), rtol=2e-5, atol=1e-10)
        np.testing.assert_allclose(d_db, central(with_b, b[which]), rtol=2e-5, atol=1e-10)


def test_zero_root_derivative_matches_fd():
    rng = np.random.default_rng(5)
    t = rng.uniform(-4, 4, size=32)
    for _ in range(25):
        zeros = rng.uniform(0.3, 2.5, size=2)
        shape = MotherShape(zeros=zeros, pole_reals=np.array([0.4]), pole_imags_raw=np.array([0.9]))
        which = int(rng.integers(0, 2))
        got = d_mother_d_zero(shape, which, t)

        def with_zero(x):
            zs = zeros.copy()
            zs[which] = x
            return eval_mother_unnormalized(
                MotherShape(zeros=zs, pole_reals=shape.pole_reals, pole_imags_raw=shape.pole_imags_raw), t
            )

        np.testing.assert_allclose(got, central(with_zero, zeros[which]), rtol=2e-5, atol=1e-9)


def test_pole_derivatives_match_fd():
    rng = np.random.default_rng(6)
    t = rng.uniform(-4, 4, size=32)
    for _ in range(25):
        a, b = rng.uniform(-1.5, 1.5), rng.uniform(0.3, 1.5)
        shape = MotherShape(zeros=np.array([1.1]), pole_reals=np.array([a]), pole_imags_raw=np.array([b]))
        d_da, d_db = d_mother_d_pole(shape, 0, t)

        def with_a(x):
            return eval_mother_unnormalized(
                MotherShape(zeros=shape.zeros, pole_reals=np.array([x]), pole_imags_raw=np.array([b])), t
            )

        def with_b(x):
            return eval_mother_unnormalized(
                MotherShape(zeros=shape.zeros, pole_reals=np.array([a]), pole_imags_raw=np.array([x])), t
            )

        np.testing.assert_allclose(d_da, central(with_a, a), rtol=2e-5, atol=1e-9)
        np.testing.assert_allclose(d_db, central(with_b, b), rtol=2e-5, atol=1e-9)


def test_time_derivative_matches_fd():
    rng = np.random.default_rng(7)
    for _ in range(20):
        shape = MotherShape(
            zeros=rng.uniform(0.3, 2.5, size=int(rng.integers(0, 3))),
            pole_reals=rng.uniform(-1.5, 1.5, size=2),
            pole_imags_raw=rng.uniform(0.3, 1.5, size=2),
        )
        t = rng.uniform(-4, 4, size=48)
        got = d_mother_dt(shape, t)
        fd = central(lambda x: eval_mother_unnormalized(shape, x), t)
        np.testing.assert_allclose(got, fd, rtol=5e-5, atol=1e-9)


def test_time_derivative_is_even_for_odd_mother():
    shape = MotherShape(zeros=np.array([1.2]), pole_reals=np.array([0.5]), pole_imags_raw=np.array([0.8]))
    t = np.linspace(0.1, 5.0, 80)
    np.testing.assert_array_equal(d_mother_dt(shape, t), d_mother_dt(shape, -t))


def test_dilation_derivatives_match_fd():
    rng = np.random.default_rng(8)
    t = np.linspace(0.0, 2.0, 64)
    for _ in range(15):
        eta = random_eta(rng, 2, 1, 1, scale_range=(0.2, 1.2), pole_imag_range=(0.3, 1.5))
        c = eta.shape.norm_constant
        k = int(rng.integers(0, 2))
        d_dlam, d_dtau = d_dilated_d_scale_translation(eta, k, t, norm_constant=c)
        flat = eta.to_flat()

        def from_flat(q, x):
            f2 = flat.copy()
            f2[q] = x
            e2 = EtaVector.from_flat(f2, eta.m, eta.p, eta.n)
            shape = e2.shape
            lam, tau = float(e2.scales[k]), float(e2.translations[k])
            return c / np.sqrt(lam) * eval_mother_unnormalized(shape, (t - tau) / lam)

        fd_lam = central(lambda x: from_flat(2 * k, x), flat[2 * k])
        fd_tau = central(lambda x: from_flat(2 * k + 1, x), flat[2 * k + 1])
        np.testing.assert_allclose(d_dlam, fd_lam, rtol=5e-5, atol=1e-8)
        np.testing.assert_allclose(d_dtau, fd_tau, rtol=5e-5, atol=1e-8)


def test_scale_derivative_is_odd_around_translation():
    # Both dilation derivatives inherit the mother's odd symmetry.
    eta = EtaVector(scales=[0.8], translations=[1.0], zeros=[1.1], pole_reals=[0.4], pole_imags_raw=[0.9])
    offsets = np.linspace(0.05, 1.0, 40)
    dl_right, dt_right = d_dilated_d_scale_translation(eta, 0, 1.0 + offsets)
    dl_left, dt_left = d_dilated_d_scale_translation(eta, 0, 1.0 - offsets)
    # (1 + d) - 1 and 1 - (1 - d) differ in the last bits, so rounding-level
    # tolerance rather than exact equality.
    np.testing.assert_allclose(dl_right, -dl_left, rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(dt_right, dt_left, rtol=1e-10, atol=1e-12)


def test_parameter_names_follow_flat_layout():
    names = parameter_names(2, 1, 1)
    assert names == ["scale_1", "translation_1", "scale_2", "translation_2", "zero_1", "pole_re_1", "pole_im_1"]


def test_parameter_blocks_partition_the_layout():
    m, p, n = 3, 2, 2
    blocks = parameter_blocks(m, p, n)
    combined = sorted(i for idx in blocks.values() for i in idx)
    assert combined == list(range(2 * m + p + 2 * n))


def test_jacobian_block_validates_shape():
    with pytest.raises(ValueError):
        JacobianBlock(np.zeros((3, 10, 2)), m=2, p=1, n=1)  # depth should be 7
    with pytest.raises(ValueError):
        JacobianBlock(np.zeros((7, 10, 3)), m=2, p=1, n=1)  # width should be 2


def test_dilation_jacobian_stacks_one_column_per_pair():
    grid = SampleGrid.signal(40)
    mother = lambda u: u * np.exp(-0.5 * u * u)
    mother_prime = lambda u: (1 - u * u) * np.exp(-0.5 * u * u)
    stack = dilation_jacobian(mother, mother_prime, np.array([0.5, 0.9]), np.array([0.7, 1.3]), grid)
    assert stack.shape == (4, 40, 2)
    # Derivative for pair k lives only in column k.
    assert np.all(stack[0][:, 1] == 0.0)
    assert np.all(stack[3][:, 0] == 0.0)


def test_full_jacobian_against_fd_sweep():
    """Analytic matrix derivatives agree with central differences everywhere."""
    rng = np.random.default_rng(42)
    grid = SampleGrid.signal(100)
    worst = 0.0
    for _ in range(15):
        m = int(rng.integers(1, 4))
        p = int(rng.integers(0, 3))
        n = int(rng.integers(1, 3))
        eta = random_eta(
            rng, m, p, n,
            scale_range=(0.1, 1.5),
            zero_range=(0.1, 3.0),
            pole_real_range=(-1.5, 1.5),
            pole_imag_range=(0.1, 1.5),
        )
        report = jacobian_check(eta, grid)
        worst = max(worst, max(report.values()))
    assert worst < JACOBIAN_TOL


def test_jacobian_freezes_normalization_constant():
    # Against FD *without* freezing C the zero/pole blocks must disagree,
    # because a moving normalization constant feeds back into every column.
    rng = np.random.default_rng(12)
    grid = SampleGrid.signal(80)
    eta = random_eta(rng, 2, 1, 1, pole_imag_range=(0.3, 1.5))
    analytic = build_jacobian(eta, grid).matrices
    numeric_moving_c = finite_difference_oracle(
        lambda e: build_wavelet_matrix(e, grid).values, eta
    )
    errors = relative_jacobian_errors(analytic, numeric_moving_c)
    blocks = parameter_blocks(eta.m, eta.p, eta.n)
    shape_errors = [errors[i] for i in blocks["zero"] + blocks["pole_re"] + blocks["pole_im"]]
    assert max(shape_errors) > 1e-3


def test_fd_oracle_shape_and_step_default():
    eta = random_eta(np.random.default_rng(1), 2, 1, 1)
    out = finite_difference_oracle(lambda e: e.to_flat() * 2.0, eta)
    assert out.shape == (eta.dim, eta.dim)
    np.testing.assert_allclose(out, 2.0 * np.eye(eta.dim), atol=1e-9)
    assert FD_STEP == 1e-6


def test_relative_errors_do_not_blow_up_on_zero_rows():
    analytic = np.zeros((3, 4))
    analytic[0] = [1.0, 2.0, 3.0, 4.0]
    numeric = analytic.copy()
    numeric[1] = 1e-12  # noise on an identically zero derivative
    errors = relative_jacobian_errors(analytic, numeric)
    assert errors[0] == 0.0
    assert errors[1] < 1e-8  # measured against the global scale, not 0/0
