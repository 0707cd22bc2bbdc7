import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elastic_lbm import core
from elastic_lbm.core import B2, EQ, MOMENTS, MaterialParams
from elastic_lbm.solver import ElasticLBM
from elastic_lbm.stability import (
    default_k_grid, eigen_loci, spectral_radius, stability_map, vn_matrix,
)

angle = st.floats(0.0, np.pi)


@pytest.mark.parametrize("nu", [0.0, 0.25, 0.4])
def test_zero_wave_vector_is_marginal(nu):
    M = vn_matrix((0.0, 0.0), MaterialParams(nu=nu))
    vals = np.linalg.eigvals(M)
    assert spectral_radius(M) == pytest.approx(1.0, abs=1e-12)
    # density, two flux components: undamped
    assert np.sum(np.abs(vals - 1.0) < 1e-9) >= 3


def test_poisson_solid_reduces_to_bgk_advection():
    tau = 0.55
    params = MaterialParams(nu=0.25, tau=tau)
    # f -> (rho, j, Pn) -> f_eq, assembled from the solver's own tables
    to_moments = MOMENTS.copy()
    to_moments[3] -= B2 * MOMENTS[0]
    to_moments[5] -= B2 * MOMENTS[0]
    relax = (1 - 1 / tau) * np.eye(9) + EQ @ to_moments / tau
    for k in [(0.3, 0.0), (1.0, 2.0), (np.pi, np.pi / 3)]:
        shift = np.exp(-1j * (core.C @ np.array(k)))
        np.testing.assert_allclose(vn_matrix(k, params), shift[:, None] * relax, atol=1e-14)


@pytest.mark.parametrize("nu", [0.0, 0.1, 0.3, 0.4])
@pytest.mark.parametrize("mode", [(1, 0), (2, 3), (5, 5), (7, 1)])
def test_matrix_matches_one_solver_step(nu, mode):
    n = 16
    params = MaterialParams(nu=nu, tau=0.55)
    k = 2 * np.pi * np.array(mode) / n
    rng = np.random.default_rng(sum(mode))
    F = rng.normal(size=9) + 1j * rng.normal(size=9)
    x, y = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    phase = np.exp(1j * (k[0] * x + k[1] * y))
    eps = 1e-4
    rest = core.rest_state(n, n).f
    f0 = rest + eps * np.real(F[:, None, None] * phase)
    lb = ElasticLBM(n, n, params, state=core.FieldState(f=f0.copy()))
    lb.step()
    predicted = rest + eps * np.real((vn_matrix(k, params) @ F)[:, None, None] * phase)
    np.testing.assert_allclose(lb.state.f, predicted, atol=1e-15)


def test_spectral_radius_basics():
    assert spectral_radius(np.eye(9)) == pytest.approx(1.0)
    assert spectral_radius(np.diag([0.5] * 9)) == pytest.approx(0.5)
    assert spectral_radius(np.diag([0.2, -0.7, 0.1j])) == pytest.approx(0.7)


def test_spectral_radius_rejects_non_finite():
    M = np.eye(3)
    M[0, 1] = np.nan
    with pytest.raises(ValueError):
        spectral_radius(M)


def test_diagonal_at_nyquist_stable_for_poisson_solid():
    k = np.pi * np.array([1.0, 1.0]) / np.sqrt(2.0)
    assert spectral_radius(vn_matrix(k, MaterialParams(nu=0.25))) <= 1 + 1e-8


@settings(max_examples=40, deadline=None)
@given(angle, angle, st.sampled_from([0.0, 0.25, 0.4]))
def test_lattice_symmetry_of_radius(kx, ky, nu):
    p = MaterialParams(nu=nu)
    r = spectral_radius(vn_matrix((kx, ky), p))
    for k in [(ky, kx), (-kx, ky), (kx, -ky), (-ky, -kx)]:
        assert spectral_radius(vn_matrix(k, p)) == pytest.approx(r, abs=1e-10)


def test_default_grid_covers_quadrant():
    g = default_k_grid(64)
    assert len(g) == 65 * 65
    assert g.min() == 0.0 and g.max() == pytest.approx(np.pi)


def test_poisson_solid_map_is_stable():
    rep = stability_map(0.25, 0.55)
    assert rep.n_unstable == 0
    assert rep.min_unstable_norm() is None
    assert np.all(rep.max_modulus >= 0)


def test_high_poisson_ratio_unstable_only_at_high_k():
    rep = stability_map(0.4, 0.55)
    assert rep.n_unstable > 0
    assert rep.min_unstable_norm() > 0.9 * np.pi / 3


def test_zero_poisson_ratio_unstable_near_diagonal():
    rep = stability_map(0.0, 0.55)
    assert rep.n_unstable > 0
    ang = np.degrees(np.arctan2(rep.unstable[:, 1], rep.unstable[:, 0]))
    assert np.all(np.abs(ang - 45.0) < 10.0)
    assert np.hypot(*rep.unstable.T).min() > 0.9 * np.pi


def test_unstable_subset_of_grid():
    rep = stability_map(0.4, k_grid=default_k_grid(16))
    grid = {tuple(k) for k in rep.k_grid}
    assert all(tuple(k) in grid for k in rep.unstable)


def test_map_rejects_out_of_quadrant():
    with pytest.raises(ValueError):
        stability_map(0.25, k_grid=[[4.0, 0.0]])
    with pytest.raises(ValueError):
        stability_map(0.25, k_grid=[[-0.1, 0.0]])


def test_map_csv(tmp_path):
    rep = stability_map(0.25, k_grid=default_k_grid(4))
    path = tmp_path / "map.csv"
    rep.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "kx,ky,max_modulus"
    assert len(lines) == 26
    kx, ky, m = map(float, lines[-1].split(","))
    assert (kx, ky) == (np.pi, np.pi)
    assert m == rep.max_modulus[-1]


def test_loci_start_at_one():
    norms, vals = eigen_loci(0.25, n_samples=16)
    assert vals.shape == (16, 9)
    assert norms[0] == 0.0 and norms[-1] == pytest.approx(np.pi)
    assert np.min(np.abs(vals[0] - 1.0)) < 1e-12


def test_loci_leave_disk_for_nu_03_diagonal():
    d = np.array([1.0, 1.0]) / np.sqrt(2.0)
    _, vals = eigen_loci(0.3, direction=d, n_samples=64)
    assert np.abs(vals).max() > 1.0


def test_loci_bounded_by_radius():
    norms, vals = eigen_loci(0.1, n_samples=8)
    p = MaterialParams(nu=0.1)
    for s, row in zip(norms, vals):
        assert np.abs(row).max() <= spectral_radius(vn_matrix((s, 0.0), p)) + 1e-12


def test_loci_direction_must_be_unit():
    with pytest.raises(ValueError):
        eigen_loci(0.25, direction=(1.0, 1.0))
