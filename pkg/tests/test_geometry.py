"""Jets, frames, second fundamental form, covariant derivative, curvature."""

import numpy as np
import pytest

import nk6
from nk6 import geometry
from conftest import random_chart_points

S5 = np.sqrt(5.0)
HSQ_DVV = 25 / 8


def test_jet_image_is_unit(dvv):
    pts = random_chart_points(dvv, 200, seed=1)
    jt = nk6.jet(dvv, pts, 0)
    assert jt.unit_image_residual() < 1e-12


def test_jet_order_bounds(dvv):
    with pytest.raises(ValueError):
        nk6.jet(dvv, np.array([0.5, 0.0, 0.0]), 4)
    with pytest.raises(ValueError):
        nk6.jet(dvv, np.array([2.0, 0.0, 0.0]), 1)  # eta outside [0, pi/2]


def test_jet_degenerate_axis_at_pole(dvv):
    # at eta = 0 the xi2 angle is idle, so all xi2-partials vanish
    jt = nk6.jet(dvv, np.array([0.0, 0.7, 1.3]), 2)
    assert np.max(np.abs(jt.d1[2])) < 1e-14
    assert np.max(np.abs(jt.d2[2, 2])) < 1e-14


def test_analytic_jets_match_fd_oracle(dvv):
    pts = random_chart_points(dvv, 100, seed=2, margin=0.15)
    exact = nk6.jet(dvv, pts, 3)
    approx = nk6.fd_jet(dvv, pts, 3)
    assert np.max(np.abs(exact.value - approx.value)) == 0.0
    assert np.max(np.abs(exact.d1 - approx.d1)) < 1e-6
    assert np.max(np.abs(exact.d2 - approx.d2)) < 1e-6
    assert np.max(np.abs(exact.d3 - approx.d3)) < 1e-6


def test_jet_partial_accessor(dvv):
    q = np.array([0.4, 1.1, 0.3])
    jt = nk6.jet(dvv, q, 3)
    assert np.allclose(jt.partial((0, 0, 0)), jt.value)
    assert np.allclose(jt.partial((1, 1, 0)), jt.d2[0, 1])
    assert np.allclose(jt.partial((1, 1, 1)), jt.d3[0, 1, 2])
    with pytest.raises(ValueError):
        nk6.jet(dvv, q, 1).partial((1, 1, 0))


def test_frame_is_orthonormal_and_lagrangian(dvv):
    pts = random_chart_points(dvv, 100, seed=3)
    pk = nk6.frame(dvv, pts)
    assert pk.orthonormality_residual() < 1e-10
    assert pk.lagrangian_residual() < 1e-10


def test_frame_from_chart_partials(geodesic):
    pts = random_chart_points(geodesic, 50, seed=4)
    pk = nk6.frame(geodesic, pts, use_model_fields=False)
    assert pk.orthonormality_residual() < 1e-10
    assert pk.lagrangian_residual() < 1e-10


def test_frame_pole_degeneracy_error(geodesic):
    with pytest.raises(nk6.ChartDegeneracyError) as err:
        nk6.frame(geodesic, np.array([0.0, 0.3, 0.9]), use_model_fields=False)
    assert err.value.distance is not None
    assert err.value.distance < 1e-12


def test_sff_vanishes_on_totally_geodesic(geodesic):
    pts = random_chart_points(geodesic, 100, seed=5)
    sff = nk6.second_fundamental_form(geodesic, pts)
    assert np.max(np.abs(sff.h)) < 1e-10


def test_sff_reproduces_reference_table(dvv):
    pts = random_chart_points(dvv, 50, seed=6)
    sff = nk6.second_fundamental_form(dvv, pts)
    expected = nk6.reconstruct_sff((S5 / 4, S5 / 4, 0.0, 0.0))
    assert np.max(np.abs(sff.h - expected)) < 1e-8
    # named entries of the table
    assert np.allclose(sff.h[..., 0, 0, 0], S5 / 2, atol=1e-8)
    assert np.allclose(sff.h[..., 1, 0, 1], -S5 / 4, atol=1e-8)
    assert np.allclose(sff.h[..., 2, 0, 2], -S5 / 4, atol=1e-8)
    assert np.allclose(sff.h[..., 0, 1, 1], -S5 / 4, atol=1e-8)
    assert np.allclose(sff.h[..., 0, 2, 2], -S5 / 4, atol=1e-8)
    assert np.max(np.abs(sff.h[..., :, 1, 2])) < 1e-8


def test_sff_norm_and_invariants(dvv):
    pts = random_chart_points(dvv, 50, seed=7)
    sff = nk6.second_fundamental_form(dvv, pts)
    assert np.max(np.abs(sff.norm_sq() - HSQ_DVV)) < 1e-8
    assert sff.symmetry_residual() < 1e-9
    assert sff.trace_residual() < 1e-9
    sff.validate()


def test_shape_operator(dvv):
    q = np.array([0.8, 0.2, 5.0])
    sff = nk6.second_fundamental_form(dvv, q)
    H1 = nk6.shape_operator(sff, 0)
    assert np.allclose(H1, np.diag([S5 / 2, -S5 / 4, -S5 / 4]), atol=1e-9)
    for k in range(3):
        assert abs(np.trace(nk6.shape_operator(sff, k))) < 1e-9
    zero = geometry.SFF(h=np.zeros((3, 3, 3)))
    assert np.allclose(nk6.shape_operator(zero, 1), 0.0)


def test_nabla_h_codazzi_and_exchange(dvv, table):
    pts = random_chart_points(dvv, 20, seed=8)
    nh = nk6.nabla_h(dvv, pts)
    assert nh.codazzi_residual() < 1e-7
    nh.validate()
    # exchange identity relating the J-transposed derivative to h against G
    pk = nk6.frame(dvv, pts)
    sff = nk6.second_fundamental_form(dvv, pts, frame_packet=pk)
    gj = np.einsum("pqc,...ip,...jq,...lc->...ijl", table.f, pk.e, pk.e, pk.estar)
    rhs = np.einsum("...pmi,...kjp->...kijm", sff.h, gj)
    residual = nh.coeffs - np.swapaxes(nh.coeffs, -4, -2) - rhs
    assert np.max(np.abs(residual)) < 1e-7


def test_nabla_h_norm_value(dvv):
    pts = random_chart_points(dvv, 20, seed=9)
    nh = nk6.nabla_h(dvv, pts)
    assert np.max(np.abs(nh.norm_sq() - 0.75 * HSQ_DVV)) < 1e-6


def test_nabla_h_matches_ambient_field_oracle(dvv):
    # independent route: differentiate the R^7-valued field h(e_i, e_j) =
    # sum_l h[l,i,j] Je_l directly, project onto the normal space, and remove
    # the tangential-connection terms; no normal-connection bookkeeping at all
    q = np.array([0.66, 2.1, 0.8])
    pk = nk6.frame(dvv, q)
    sff = nk6.second_fundamental_form(dvv, q, frame_packet=pk)
    nh = nk6.nabla_h(dvv, q)
    step = 3e-6 * np.asarray(dvv.chart.extents)

    def packet_at(qq):
        p = nk6.frame(dvv, qq, validate=False)
        return p, nk6.second_fundamental_form(dvv, qq, frame_packet=p)

    oracle = np.zeros((3, 3, 3, 3))
    for m in range(3):
        cm = pk.chart_comps[m]
        dH = np.zeros((3, 3, 7))
        de = np.zeros((3, 7))
        for a in range(3):
            qp, qm = q.copy(), q.copy()
            qp[a] += step[a]
            qm[a] -= step[a]
            pp, sp = packet_at(qp)
            pmk, sm = packet_at(qm)
            dH += cm[a] * (np.einsum("lij,lc->ijc", sp.h, pp.estar)
                           - np.einsum("lij,lc->ijc", sm.h, pmk.estar)) / (2 * step[a])
            de += cm[a] * (pp.e - pmk.e) / (2 * step[a])
        proj = np.einsum("ijc,kc->kij", dH, pk.estar)
        gamma = np.einsum("ic,jc->ij", de, pk.e)
        corr = (np.einsum("il,klj->kij", gamma, sff.h)
                + np.einsum("jl,kil->kij", gamma, sff.h))
        oracle[:, :, :, m] = proj - corr
    assert np.max(np.abs(oracle - nh.coeffs)) < 1e-7


def test_nabla_h_vanishes_on_totally_geodesic(geodesic):
    pts = random_chart_points(geodesic, 10, seed=10)
    nh = nk6.nabla_h(geodesic, pts)
    assert np.max(np.abs(nh.coeffs)) < 1e-10


def test_curvature_reference_values(dvv):
    pts = random_chart_points(dvv, 50, seed=11)
    cp = nk6.curvature(dvv, pts)
    assert np.max(np.abs(cp.R[..., 1, 2, 1, 2] - 21 / 16)) < 1e-8
    assert np.max(np.abs(cp.R[..., 0, 1, 0, 1] - 1 / 16)) < 1e-8
    assert np.max(np.abs(cp.R[..., 0, 2, 0, 2] - 1 / 16)) < 1e-8
    assert np.max(np.abs(cp.tau - 23 / 8)) < 1e-8
    assert np.max(np.abs(cp.sectional_sum - 23 / 16)) < 1e-8
    assert cp.gauss_scalar_residual() < 1e-8
    # contracted-Gauss Ricci against the flagged reference convention
    assert np.max(np.abs(cp.ricci_reference_convention - cp.ricci - np.eye(3))) < 1e-12
    ric1 = cp.ricci[..., 0, 0]
    assert np.max(np.abs(ric1 - 1 / 8)) < 1e-8


def test_sectional_curvature_of_random_planes(dvv, rng):
    q = np.array([0.5, 2.2, 0.4])
    cp = nk6.curvature(dvv, q)
    u = rng.normal(size=(1000, 3))
    v = rng.normal(size=(1000, 3))
    K = nk6.sectional_curvature(cp, u, v)
    assert np.all(K > 1 / 16 - 1e-8)
    assert np.all(K < 21 / 16 + 1e-8)


def test_totally_geodesic_constant_curvature(geodesic):
    pts = random_chart_points(geodesic, 50, seed=12)
    cp = nk6.curvature(geodesic, pts)
    eye = np.eye(3)
    round_tensor = np.einsum("ik,jl->ijkl", eye, eye) - np.einsum("il,jk->ijkl", eye, eye)
    assert np.max(np.abs(cp.R - round_tensor)) < 1e-8
    assert np.max(np.abs(cp.tau - 6.0)) < 1e-8


def test_volume_form_and_normality(dvv, table):
    pts = random_chart_points(dvv, 50, seed=13)
    pk = nk6.frame(dvv, pts)
    g12 = nk6.g_tensor(pk.base, pk.e[..., 0, :], pk.e[..., 1, :], table, check=False)
    vol = np.einsum("...c,...c->...", g12, pk.estar[..., 2, :])
    assert np.max(np.abs(np.abs(vol) - 1.0)) < 1e-9
    assert np.ptp(np.sign(vol)) == 0.0  # constant sign per orientation
    ge = np.einsum("pqc,...ip,...jq,...kc->...ijk", table.f, pk.e, pk.e, pk.e)
    assert np.max(np.abs(ge)) < 1e-10


def test_gauge_invariance_under_frame_rotation(dvv, rng):
    q = np.array([0.7, 1.9, 3.1])
    theta_ref = float(nk6.maximize_theta(nk6.second_fundamental_form(dvv, q).h)[1])
    base = {
        "hsq": float(nk6.second_fundamental_form(dvv, q).norm_sq()),
        "tau": float(nk6.curvature(dvv, q).tau),
        "nhsq": float(nk6.nabla_h(dvv, q).norm_sq()),
    }
    A = rng.normal(size=(3, 3))
    R, _ = np.linalg.qr(A)
    kwargs = {"use_model_fields": False, "basis_rotation": R}
    sff = nk6.second_fundamental_form(dvv, q, **kwargs)
    assert abs(float(sff.norm_sq()) - base["hsq"]) < 1e-8
    assert abs(float(nk6.curvature(dvv, q, **kwargs).tau) - base["tau"]) < 1e-8
    assert abs(float(nk6.nabla_h(dvv, q, **kwargs).norm_sq()) - base["nhsq"]) < 1e-8
    assert abs(float(nk6.maximize_theta(sff.h)[1]) - theta_ref) < 1e-8


def test_laplace_beltrami_constant_field(dvv):
    q = np.array([0.6, 0.5, 1.0])
    val = nk6.laplace_beltrami(dvv, lambda qq: np.full(np.shape(qq)[:-1], 2.5), q)
    assert abs(val) < 1e-8


def test_laplace_beltrami_hsq_field(dvv):
    q = np.array([0.75, 2.0, 0.9])
    field = lambda qq: nk6.second_fundamental_form(dvv, qq).norm_sq()  # noqa: E731
    assert abs(float(nk6.laplace_beltrami(dvv, field, q))) < 1e-4


def test_laplace_beltrami_round_sphere_eigenfunction(geodesic):
    # coordinate functions of the round three-sphere have eigenvalue -3
    pts = random_chart_points(geodesic, 10, seed=14, margin=0.2)
    for a in range(4):
        field = lambda qq: geodesic.chart.to_y(qq)[..., a]  # noqa: E731
        lap = nk6.laplace_beltrami(geodesic, field, pts)
        target = -3.0 * geodesic.chart.to_y(pts)[..., a]
        assert np.max(np.abs(lap - target)) < 1e-5


def test_laplace_beltrami_near_pole_raises(geodesic):
    with pytest.raises(nk6.ChartDegeneracyError):
        nk6.laplace_beltrami(
            geodesic, lambda qq: np.zeros(np.shape(qq)[:-1]), np.array([1e-9, 0.1, 0.1])
        )
