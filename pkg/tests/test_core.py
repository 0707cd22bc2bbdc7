import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elastic_lbm import core
from elastic_lbm.core import B2, C, W, MaterialParams, NumericalDivergence
from elastic_lbm.solver import ElasticLBM
from elastic_lbm.sources import SourceSpec

finite = st.floats(-1.0, 1.0, allow_nan=False)


# ---------------------------------------------------------------- material

@pytest.mark.parametrize("nu", [0.0, 0.1, 0.2, 0.25, 0.3, 0.44, -0.5])
def test_material_invariants(nu):
    p = MaterialParams(nu=nu)
    assert p.mu == pytest.approx(B2)
    assert p.lam == pytest.approx(2 * nu * p.mu / (1 - 2 * nu))
    assert p.vS == pytest.approx(np.sqrt(B2))
    assert p.vP / p.vS == pytest.approx(p.speed_ratio())
    assert p.Lambda_coef == pytest.approx((1 - 4 * nu) / (1 - 2 * nu))
    # Poisson ratio recovered from the Lame pair
    assert p.lam / (2 * (p.lam + p.mu)) == pytest.approx(nu)


def test_lambda_coefficient_special_values():
    assert MaterialParams(nu=0.25).Lambda_coef == pytest.approx(0.0, abs=1e-15)
    assert MaterialParams(nu=0.0).Lambda_coef == pytest.approx(1.0)


@pytest.mark.parametrize("kwargs, text", [
    ({"tau": 0.5}, "tau"),
    ({"tau": 0.3}, "tau"),
    ({"nu": 5 / 11}, "5/11"),
    ({"nu": 0.46}, "5/11"),
    ({"rho0": 0.0}, "rho0"),
])
def test_material_rejections(kwargs, text):
    with pytest.raises(ValueError, match=text):
        MaterialParams(**kwargs)


# ---------------------------------------------------------------- equilibrium

def test_equilibrium_rest():
    np.testing.assert_allclose(core.equilibrium(1.0, [0.0, 0.0], [0.0, 0.0, 0.0]), W)


def test_equilibrium_pure_flux():
    feq = core.equilibrium(0.0, [1.0, 0.0], [0.0, 0.0, 0.0])
    assert feq.sum() == pytest.approx(0.0, abs=1e-15)
    assert feq @ C[:, 0] == pytest.approx(1.0)


def test_equilibrium_stress():
    feq = core.equilibrium(1.0, [0.0, 0.0], [0.1, 0.0, -0.1])
    assert feq @ C[:, 0] ** 2 == pytest.approx(1 / 3 + 0.1)
    assert feq @ C[:, 1] ** 2 == pytest.approx(1 / 3 - 0.1)
    assert feq @ (C[:, 0] * C[:, 1]) == pytest.approx(0.0, abs=1e-15)


@given(finite, finite, finite, finite, finite, finite)
def test_equilibrium_moment_identities(rho, jx, jy, pxx, pxy, pyy):
    feq = core.equilibrium(rho, [jx, jy], [pxx, pxy, pyy])
    m0, m1, m2 = core.moments(feq)
    assert abs(m0 - rho) <= 1e-12
    np.testing.assert_allclose(m1, [jx, jy], atol=1e-12)
    np.testing.assert_allclose(m2, [pxx + B2 * rho, pxy, pyy + B2 * rho], atol=1e-12)
    third = np.einsum("i,ia,ib,ic->abc", feq, C, C, C)
    j = np.array([jx, jy])
    d = np.eye(2)
    target = B2 * (np.einsum("a,bc->abc", j, d) + np.einsum("b,ac->abc", j, d)
                   + np.einsum("c,ab->abc", j, d))
    np.testing.assert_allclose(third, target, atol=1e-12)


# ---------------------------------------------------------------- sources

def test_discrete_source_zero():
    np.testing.assert_array_equal(core.discrete_source([0.0, 0.0]), np.zeros(9))


def test_discrete_source_unit_x():
    Si = core.discrete_source([1.0, 0.0])
    assert Si.sum() == pytest.approx(0.0, abs=1e-15)
    assert Si @ C[:, 0] == pytest.approx(1.0)
    assert Si[0] == 0.0


@given(finite, finite)
def test_discrete_source_moments(sx, sy):
    Si = core.discrete_source([sx, sy])
    m0, m1, m2 = core.moments(Si)
    assert abs(m0) <= 1e-15
    np.testing.assert_allclose(m1, [sx, sy], atol=1e-15)
    np.testing.assert_allclose(m2, 0.0, atol=1e-15)


# ---------------------------------------------------------------- recovery

def test_recover_rest():
    rho, j, P, _ = core.recover_macros(W.copy(), np.zeros(2))
    assert rho == pytest.approx(1.0)
    np.testing.assert_allclose(j, 0.0, atol=1e-16)
    np.testing.assert_allclose(P, [1 / 3, 0.0, 1 / 3])


def test_recover_half_force():
    _, j, _, _ = core.recover_macros(W.copy(), np.array([0.01, 0.0]))
    np.testing.assert_allclose(j, [0.005, 0.0], atol=1e-16)


def test_recover_plain_moment():
    rng = np.random.default_rng(3)
    f = rng.random(9)
    # direction 1 is (1, 0): adjusting it moves only the x-moment
    f[1] += 0.2 - f @ C[:, 0]
    _, j, _, _ = core.recover_macros(f, np.zeros(2))
    assert j[0] == pytest.approx(0.2)
    assert j[1] == pytest.approx(f @ C[:, 1])


def test_recover_with_damping_solves_penalty():
    f = core.equilibrium(1.0, [0.02, 0.0], [0.0, 0.0, 0.0])
    S0 = np.array([0.004, 0.0])
    A = 0.1
    _, j, _, S = core.recover_macros(f, S0, np.array(A))
    # j is consistent with the total source it returns
    np.testing.assert_allclose(j, f @ C + 0.5 * S, atol=1e-16)
    np.testing.assert_allclose(S, S0 - A * j, atol=1e-16)


# ---------------------------------------------------------------- collide / stream

def test_collide_fixed_point():
    feq = core.equilibrium(1.0, [0.01, -0.02], [0.001, 0.0, 0.002])
    np.testing.assert_allclose(core.collide(feq, feq, np.zeros(9), 0.55), feq)


def test_collide_full_relaxation():
    rng = np.random.default_rng(0)
    f, feq = rng.random(9), rng.random(9)
    np.testing.assert_allclose(core.collide(f, feq, np.zeros(9), 1.0), feq)
    Si = rng.random(9)
    np.testing.assert_allclose(core.collide(f, feq, Si, 1.0), feq + 0.5 * Si)


def test_stream_single_population():
    fpost = np.zeros((9, 10, 10))
    fpost[1, 5, 5] = 1.0
    out = core.stream(fpost)
    assert out[1, 6, 5] == 1.0
    assert out.sum() == 1.0


def test_stream_each_direction_moves_by_its_velocity():
    fpost = np.zeros((9, 7, 7))
    fpost[:, 3, 3] = np.arange(1, 10)
    out = core.stream(fpost)
    for i, (cx, cy) in enumerate(C.astype(int)):
        assert out[i, 3 + cx, 3 + cy] == i + 1


def test_stream_uniform_unchanged():
    f = np.broadcast_to(W[:, None, None], (9, 8, 6)).copy()
    np.testing.assert_array_equal(core.stream(f), f)


@settings(max_examples=20)
@given(st.integers(0, 2**32 - 1))
def test_stream_conserves_each_population(seed):
    f = np.random.default_rng(seed).random((9, 6, 5))
    np.testing.assert_allclose(core.stream(f).sum(axis=(1, 2)), f.sum(axis=(1, 2)), rtol=1e-14)


# ---------------------------------------------------------------- gradient

def test_gradient_of_uniform_field():
    np.testing.assert_array_equal(core.density_gradient(np.full((8, 8), 1.0)), 0.0)


def test_gradient_of_periodic_sine_is_exact():
    n, eps = 32, 1e-3
    x = np.arange(n)
    rho = 1.0 + eps * np.sin(2 * np.pi * x / n)[:, None] * np.ones((1, 4))
    g = core.density_gradient(rho)
    expected = eps * np.sin(2 * np.pi / n) * np.cos(2 * np.pi * x / n)
    np.testing.assert_allclose(g[0], expected[:, None] * np.ones((1, 4)), atol=1e-16)
    np.testing.assert_allclose(g[1], 0.0, atol=1e-16)


def test_gradient_of_ramp_non_periodic():
    x = np.arange(10, dtype=float)
    rho = (2.0 + 0.3 * x)[:, None] * np.ones((1, 5))
    g = core.density_gradient(rho, periodic=(False, False))
    np.testing.assert_allclose(g[0], 0.3)
    np.testing.assert_allclose(g[1], 0.0, atol=1e-15)


def test_gradient_one_sided_at_edges():
    rho = np.array([[0.0], [1.0], [4.0], [9.0]]) * np.ones((1, 3))
    g = core.density_gradient(rho, periodic=(False, True))
    np.testing.assert_allclose(g[0][:, 0], [1.0, 2.0, 4.0, 5.0])


# ---------------------------------------------------------------- step

def test_rest_state_stays_at_rest():
    lb = ElasticLBM(12, 10)
    f0 = lb.state.f.copy()
    lb.run(50)
    np.testing.assert_allclose(lb.state.f, f0, rtol=0, atol=1e-15)
    assert lb.state.time_step == 50


def test_rest_state_is_stress_free():
    st0 = core.rest_state(4, 4)
    lb = ElasticLBM(4, 4, state=st0)
    np.testing.assert_allclose(lb.state.Pn(), 0.0, atol=1e-16)


def test_step_sequence_matches_manual_update():
    params = MaterialParams(nu=0.1)
    src = SourceSpec(center=(8, 8), sigma=2.0, period=10.0, t0=10.0)
    lb = ElasticLBM(16, 16, params, src)
    lb.run(12)
    st0 = lb.state
    f = st0.f.copy()
    feq = core.equilibrium(st0.rho, st0.j, st0.Pn())
    expected = core.stream(core.collide(f, feq, core.discrete_source(st0.S), params.tau))
    lb.step()
    np.testing.assert_allclose(lb.state.f, expected, atol=1e-18)


def test_bulk_misfit_at_poisson_solid():
    from elastic_lbm.experiments import bulk_compare
    assert bulk_compare(0.25)["misfit"] <= 0.1155 * 1.15


def test_divergence_is_reported_with_node():
    lb = ElasticLBM(6, 6)
    lb.state.f[3, 2, 4] = np.nan
    with pytest.raises(NumericalDivergence) as exc:
        lb.step()
    assert exc.value.node == (1, 4)
    assert exc.value.step == 1
