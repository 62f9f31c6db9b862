import math

import numpy as np
import pytest

from rodesim import (MODELS, Beta, CompoundPoisson, ConfigurationError, ErrorNorm,
                     FractionalBM, GeometricBM, HawkesExpDecay, LinearItoHomogeneous,
                     OrnsteinUhlenbeck, PoissonStep, SamplePath, TargetStrategy, TimeMesh,
                     Transport, TransportForm, Uniform, Wiener, draw_x0, euler_solve,
                     model_all_noise_linear_system, model_earthquake, model_fbm_linear,
                     model_fisher_kpp, model_linear_homogeneous,
                     model_population_dynamics, model_risk, model_toggle_switch,
                     risk_surplus, sample_noise_bundle, substream)


def test_registry_covers_all_benchmarks():
    assert set(MODELS) == {"linear_homogeneous", "all_noise_linear_system", "fbm_linear",
                           "population_dynamics", "earthquake", "toggle_switch", "risk",
                           "fisher_kpp"}


# ---------------------------------------------------------------------------
# linear homogeneous


def test_linear_homogeneous_rhs_and_defaults():
    m = model_linear_homogeneous()
    assert m.rhs(0.0, np.array([2.0]), np.array([3.0]))[0] == 6.0
    assert m.rhs(0.7, np.array([5.0]), np.array([0.0]))[0] == 0.0
    assert m.samples == 500
    assert m.resolutions == tuple(2 ** i for i in range(4, 15))
    assert m.n_target == 2 ** 16
    assert m.target is TargetStrategy.EXACT_LINEAR_HOMOGENEOUS
    assert m.horizon == 1.0


# ---------------------------------------------------------------------------
# all-noise linear system


def test_all_noise_rhs_values():
    m = model_all_noise_linear_system()
    zero = np.zeros(9)
    assert (m.rhs(0.0, np.ones(9), zero) == 0.0).all()
    e1 = np.eye(9)[0]
    np.testing.assert_array_equal(m.rhs(0.0, e1, e1), np.zeros(9))


def test_all_noise_bundle_order_and_defaults():
    m = model_all_noise_linear_system()
    kinds = [type(s) for s in m.noise_specs]
    assert kinds == [Wiener, OrnsteinUhlenbeck, GeometricBM, LinearItoHomogeneous,
                     CompoundPoisson, PoissonStep, HawkesExpDecay, Transport, FractionalBM]
    assert m.noise_specs[7].form is TransportForm.SUM_SIN_CBRT
    assert m.noise_specs[8] == FractionalBM(hurst=0.6, y0=0.2)
    assert m.samples == 80
    assert m.resolutions == (64, 128, 256, 512)
    assert m.n_target == 2 ** 18
    assert m.error_norm is ErrorNorm.EUCLIDEAN


# ---------------------------------------------------------------------------
# fBm linear


def test_fbm_linear_rhs_and_grid():
    m = model_fbm_linear(0.3)
    assert m.rhs(0.0, np.array([1.0]), np.array([1.0]))[0] == 0.0
    assert m.samples == 200 and m.n_target == 2 ** 18
    for hurst in (0.1, 0.2, 0.3, 0.4, 0.5, 0.7, 0.9):
        assert model_fbm_linear(hurst).noise_specs[0].hurst == hurst
    with pytest.raises(ConfigurationError):
        model_fbm_linear(1.2)


# ---------------------------------------------------------------------------
# population dynamics


def test_population_rhs_zeros():
    m = model_population_dynamics()
    f = m.rhs
    assert f(0.0, np.array([-0.5]), np.array([1.0, 0.3]))[0] == 0.0  # cutoff region
    assert f(0.0, np.array([0.0]), np.array([1.0, 0.3]))[0] == 0.0   # extinction
    assert f(0.0, np.array([1.0]), np.array([2.0, 0.0]))[0] == 0.0   # capacity, no harvest


def test_population_noise_and_defaults():
    m = model_population_dynamics()
    assert m.noise_specs == (GeometricBM(mu=1.0, sigma=0.8, y0=1.0),
                             PoissonStep(lam=15.0, step_law=Beta(5.0, 7.0)))
    assert m.x0 == (Beta(7.0, 5.0),)
    assert m.samples == 200
    assert m.resolutions == (16, 32, 64, 128, 256, 512)


def test_population_paths_stay_in_invariant_band():
    m = model_population_dynamics()
    mesh = TimeMesh(0.0, 1.0, 512)
    slack = mesh.dt * 1.2  # dt * max|f|; |f| < gamma(1+eps)/4 + alpha < 1.2
    for stream in range(20):
        rng = substream(404, stream)
        x0 = draw_x0(m, rng)
        noise = sample_noise_bundle(m.noise_specs, mesh, rng)
        path = euler_solve(m.rhs, x0, noise).scalar
        assert (path >= -slack).all() and (path <= 1.0 + slack).all()


# ---------------------------------------------------------------------------
# earthquake oscillator


def test_earthquake_rhs_values():
    m = model_earthquake()
    np.testing.assert_array_equal(m.rhs(0.0, np.zeros(2), np.zeros(1)), np.zeros(2))
    np.testing.assert_array_equal(m.rhs(0.0, np.array([1.0, 0.0]), np.zeros(1)),
                                  np.array([0.0, -225.0]))
    np.testing.assert_array_equal(m.rhs(0.0, np.array([0.0, 1.0]), np.zeros(1)),
                                  np.array([1.0, -18.0]))
    assert m.horizon == 2.0 and m.samples == 100
    assert (m.x0 == np.zeros(2)).all()
    assert m.noise_specs[0].form is TransportForm.GROUND_ACCELERATION
    assert m.noise_specs[0].n_terms == 12


def test_earthquake_unforced_motion_converges_to_damped_oscillator():
    # exact underdamped solution from (1, 0): omega_d = omega0 sqrt(1 - zeta^2) = 12
    m = model_earthquake()

    def exact(t):
        return np.exp(-9.0 * t) * (np.cos(12.0 * t) + 0.75 * np.sin(12.0 * t))

    errs = []
    for n in (2 ** 9, 2 ** 10):
        mesh = TimeMesh(0.0, 2.0, n)
        quiet = SamplePath(mesh, np.zeros((n + 1, 1)))
        path = euler_solve(m.rhs, np.array([1.0, 0.0]), quiet)
        errs.append(np.abs(path.values[:, 0] - exact(mesh.nodes())).max())
    assert errs[1] < errs[0]
    assert 1.6 <= errs[0] / errs[1] <= 2.4


# ---------------------------------------------------------------------------
# toggle switch


def test_toggle_rhs_values():
    m = model_toggle_switch()
    np.testing.assert_array_equal(m.rhs(0.0, np.zeros(2), np.zeros(2)), np.zeros(2))
    out = m.rhs(0.0, np.array([4.0, 0.0]), np.zeros(2))
    hand = 256.0 / (0.25 ** 4 + 256.0) - 0.75 * 4.0  # plug X=4, Y=0, A=0 into the X line
    assert out[0] == pytest.approx(hand, abs=1e-15)
    assert out[0] == pytest.approx(-2.00001526, abs=1e-8)


def test_toggle_decay_dominates_far_out():
    m = model_toggle_switch()
    out = m.rhs(0.0, np.array([50.0, 50.0]), np.array([0.0, 0.0]))
    assert (out < 0.0).all()  # production is bounded, decay is linear


def test_toggle_noise_and_defaults():
    m = model_toggle_switch()
    assert m.noise_specs == (CompoundPoisson(lam=5.0, jump_law=Uniform(0.0, 0.5)),
                             LinearItoHomogeneous(mu1=0.7, mu2=0.3, sigma=0.3,
                                                  theta=3.0 * math.pi, y0=0.2))
    assert (m.x0 == np.array([4.0, 4.0])).all()
    assert m.horizon == 5.0 and m.samples == 100
    assert m.resolutions == (32, 64, 128, 256, 512)


# ---------------------------------------------------------------------------
# risk model


def test_risk_rhs_values():
    m = model_risk(premium=1.0)
    assert m.rhs(0.0, np.array([1.0]), np.zeros(3))[0] == 1.0  # pure premium inflow
    m0 = model_risk(premium=0.0)
    assert m0.rhs(0.0, np.array([1.0]), np.array([0.0, 0.0, 0.2]))[0] == pytest.approx(0.2)
    assert m.noise_specs == (OrnsteinUhlenbeck(nu=5.0, sigma=0.8, y0=0.0),
                             CompoundPoisson(lam=8.0, jump_law=Uniform(0.0, 0.2)),
                             GeometricBM(mu=0.02, sigma=0.4, y0=0.2))
    assert m.horizon == 3.0 and m.samples == 400


def test_risk_surplus_reconstruction():
    m = model_risk()
    mesh = TimeMesh(0.0, 3.0, 64)
    rng = substream(17, 0)
    x0 = draw_x0(m, rng)
    noise = sample_noise_bundle(m.noise_specs, mesh, rng)
    sol = euler_solve(m.rhs, x0, noise)
    u = risk_surplus(sol, noise)
    np.testing.assert_array_equal(
        u.scalar, sol.values[:, 0] + noise.values[:, 1] + noise.values[:, 0])


# ---------------------------------------------------------------------------
# Fisher-KPP


def test_kpp_steady_states():
    m = model_fisher_kpp(k_values=(8,), k_target=64, resolutions=(32,), n_target=1024)
    rhs = m.rhs_for_intervals(8)
    quiet = np.zeros(2)
    assert (rhs(0.0, np.zeros(9), quiet) == 0.0).all()
    assert np.allclose(rhs(0.0, np.ones(9), quiet), 0.0)  # carrying capacity


def test_kpp_left_boundary_influx():
    m = model_fisher_kpp(k_values=(8,), k_target=64, resolutions=(32,), n_target=1024)
    rhs = m.rhs_for_intervals(8)
    y = np.array([2.0, 1.5])  # flux Y = 3
    out = rhs(0.0, np.zeros(9), y)
    # ghost node substitution: du_0 = 2 mu Y / dx with dx = 1/8
    assert out[0] == pytest.approx(2.0 * 0.009 * 3.0 * 8.0)
    assert (out[1:] == 0.0).all()


def test_kpp_stability_guard():
    with pytest.raises(ConfigurationError):
        model_fisher_kpp(k_values=(64,), k_target=64, resolutions=(32,), n_target=1024)


def test_kpp_pairing_and_defaults():
    m = model_fisher_kpp()
    assert m.spatial.pairs == ((32, 8), (128, 16), (512, 32))
    assert m.spatial.target_intervals == 512
    assert m.samples == 40 and m.n_target == 2 ** 18
    assert m.error_norm is ErrorNorm.SPATIAL_SUM
    assert m.noise_specs[0] == HawkesExpDecay(lambda0=3.0, a=0.3, delta=5.0,
                                              jump_law=m.noise_specs[0].jump_law)
    assert m.noise_specs[0].jump_law.scale == pytest.approx(1.0 / 1.8)
    ou = m.noise_specs[1]
    assert ou.nu == pytest.approx(200.0) and ou.sigma == pytest.approx(20.0)
    with pytest.raises(ConfigurationError):
        m.spatial.intervals_for(64)


def test_kpp_mass_grows_under_positive_influx():
    # trapezoid-weighted mass; the boundary half-weights make the interior
    # fluxes telescope, leaving mu * Y + the nonnegative reaction integral
    m = model_fisher_kpp(k_values=(16,), k_target=64, resolutions=(128,), n_target=1024)
    rhs = m.rhs_for_intervals(16)
    mesh = TimeMesh(0.0, 1.0, 512)
    noise = SamplePath(mesh, np.column_stack([np.full(513, 2.0), np.full(513, 1.5)]))
    path = euler_solve(rhs, np.zeros(17), noise)
    weights = np.full(17, 1.0 / 16)
    weights[[0, -1]] /= 2.0
    mass = path.values @ weights
    inside = (path.values <= 1.0 + 1e-9).all(axis=1)
    growth = np.diff(mass)
    assert (growth[inside[:-1]] >= -1e-12).all()
    assert mass[-1] > mass[0]


def test_draw_x0_constant_and_law():
    m_const = model_toggle_switch()
    rng = substream(5, 0)
    a = draw_x0(m_const, rng)
    assert (a == np.array([4.0, 4.0])).all()
    a[0] = -1.0  # caller owns the copy
    assert m_const.x0[0] == 4.0
    m_law = model_population_dynamics()
    vals = [draw_x0(m_law, substream(5, s))[0] for s in range(200)]
    assert all(0.0 < v < 1.0 for v in vals)
