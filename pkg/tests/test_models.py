"""Built-in models: embedding data, table selection, Berger curvature."""

import numpy as np
import pytest

import nk6
from nk6 import models
from conftest import random_chart_points

S5 = np.sqrt(5.0)


def flow(i, t, y):
    A = models.FIELD_MATS[i]
    return (np.cos(t) * np.eye(4) + np.sin(t) * A) @ y


def test_embedding_pole_value(dvv):
    x = dvv.embed(np.array([1.0, 0.0, 0.0, 0.0]))
    expected = np.zeros(7)
    expected[0] = 1.0  # (5 + 4) / 9
    assert np.allclose(x, expected, atol=1e-15)


def test_embedding_image_on_sphere(dvv, rng):
    y = rng.normal(size=(1000, 4))
    y /= np.linalg.norm(y, axis=-1, keepdims=True)
    x = dvv.embed(y)
    assert np.max(np.abs(np.sum(x * x, -1) - 1.0)) < 1e-12


def test_frame_field_brackets_by_flow_composition(rng):
    # [X_i, X_j] = 2 X_k cyclically, recovered from the group commutator of flows
    t = 1e-4
    for (i, j, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        y = rng.normal(size=4)
        y /= np.linalg.norm(y)
        z = flow(j, -t, flow(i, -t, flow(j, t, flow(i, t, y))))
        bracket_fd = (z - y) / t**2
        bracket = 2.0 * models.FIELD_MATS[k] @ y
        assert np.max(np.abs(bracket_fd - bracket)) < 1e-3


def test_pullback_metric_is_berger(dvv, rng):
    y = rng.normal(size=(200, 4))
    y /= np.linalg.norm(y, axis=-1, keepdims=True)
    jac = dvv.jacobian_y(y)
    fields = np.einsum("fab,...b->...fa", models.FIELD_MATS, y)
    push = np.einsum("...ca,...fa->...fc", jac, fields)
    gram = np.einsum("...ic,...jc->...ij", push, push)
    assert np.max(np.abs(gram - np.diag([4 / 9, 8 / 3, 8 / 3]))) < 1e-10


def test_structure_alignment(dvv, table):
    pts = random_chart_points(dvv, 25, seed=21)
    pk = nk6.frame(dvv, pts)
    g23 = nk6.g_tensor(pk.base, pk.e[..., 1, :], pk.e[..., 2, :], table, check=False)
    assert np.max(np.abs(g23 - pk.estar[..., 0, :])) < 1e-8


def test_table_selection_is_deterministic(table):
    assert table.triples == nk6.cayley_dickson_table().triples
    assert nk6.select_table() is nk6.default_table()


def test_table_selection_rejects_flipped_orientation(table):
    # the global sign flip passes the Lagrangian and alignment conditions but
    # reverses the cubic form; the oracle must reject it
    flipped = nk6.MulTable.from_triples(
        tuple(((i, j, k), -s) for (i, j, k), s in table.triples), source="flipped"
    )
    assert not models._dvv_oracle(flipped)
    imm = nk6.dvv_immersion(flipped)
    pk = nk6.frame(imm, np.array([0.8, 0.4, 1.2]), validate=False)
    assert pk.lagrangian_residual() < 1e-10  # still Lagrangian
    sff = nk6.second_fundamental_form(imm, np.array([0.8, 0.4, 1.2]), frame_packet=pk)
    assert sff.h[0, 0, 0] < 0  # but the cubic form is negated


def test_env_table_override(tmp_path, monkeypatch, table):
    path = tmp_path / "env.table"
    lines = [
        f"{i} {j} {k} {'+1' if s > 0 else '-1'}" for (i, j, k), s in table.triples
    ]
    path.write_text("\n".join(lines) + "\n")
    monkeypatch.setenv("NK6_TABLE_PATH", str(path))
    nk6.default_table.cache_clear()
    try:
        loaded = nk6.default_table()
        assert np.array_equal(loaded.f, table.f)
    finally:
        nk6.default_table.cache_clear()


def test_totally_geodesic_properties(geodesic, rng):
    pts = random_chart_points(geodesic, 100, seed=22)
    sff = nk6.second_fundamental_form(geodesic, pts)
    assert np.max(np.abs(sff.h)) < 1e-10
    pk = nk6.frame(geodesic, pts)
    assert pk.lagrangian_residual() < 1e-10
    cp = nk6.curvature_from_sff(sff)
    u = rng.normal(size=(len(pts), 3))
    v = rng.normal(size=(len(pts), 3))
    assert np.max(np.abs(nk6.sectional_curvature(cp, u, v) - 1.0)) < 1e-8


def test_totally_geodesic_uses_doubled_half(geodesic, table):
    # products of two doubled-half units land in the quaternion half: the
    # subspace block of the table vanishes and its complement is a full line
    comps = sorted({c for c, _, _ in geodesic.terms})
    assert len(comps) == 4
    block = table.f[np.ix_(comps, comps, comps)]
    assert np.all(block == 0.0)
    line = [i for i in range(7) if i not in comps]
    assert abs(table.f[line[0], line[1], line[2]]) == 1.0


def test_berger_curvature_reference_planes(rng):
    spec = nk6.BergerSpec()
    alpha, beta = spec.curvature_coefficients()
    assert abs(alpha - 1 / 16) < 1e-14
    assert abs(beta - 20 / 16) < 1e-14
    assert abs(spec.scalar_curvature() - 23 / 8) < 1e-14
    y = rng.normal(size=4)
    y /= np.linalg.norm(y)
    E = [s * (models.FIELD_MATS[i] @ y) for i, s in
         zip(range(3), (1.5, np.sqrt(3 / 8), -np.sqrt(3 / 8)))]
    k12 = nk6.berger_curvature(spec, y, E[0], E[1], E[1], E[0])
    k23 = nk6.berger_curvature(spec, y, E[1], E[2], E[2], E[1])
    assert abs(k12 - 1 / 16) < 1e-12
    assert abs(k23 - 21 / 16) < 1e-12


def test_berger_curvature_angle_formula(rng):
    spec = nk6.BergerSpec()
    y = rng.normal(size=4)
    y /= np.linalg.norm(y)
    E = [s * (models.FIELD_MATS[i] @ y) for i, s in
         zip(range(3), (1.5, np.sqrt(3 / 8), -np.sqrt(3 / 8)))]
    for _ in range(100):
        theta, phi = rng.uniform(0, 2 * np.pi, size=2)
        X = np.cos(theta) * E[1] + np.sin(theta) * E[2]
        Y = (np.sin(phi) * E[0]
             - np.cos(phi) * np.sin(theta) * E[1]
             + np.cos(phi) * np.cos(theta) * E[2])
        K = nk6.berger_curvature(spec, y, X, Y, Y, X)
        assert abs(K - (1 / 16 + 20 / 16 * np.cos(phi) ** 2)) < 1e-12


def test_berger_matches_gauss_equation(dvv, rng):
    # intrinsic Berger curvature equals the extrinsic Gauss-equation curvature
    spec = nk6.BergerSpec()
    pts = random_chart_points(dvv, 10, seed=23)
    cp = nk6.curvature(dvv, pts)
    y = dvv.chart.to_y(pts)
    for row in range(len(pts)):
        u4 = models.FIELD_MATS[0] @ y[row] + 0.3 * models.FIELD_MATS[1] @ y[row]
        v4 = models.FIELD_MATS[2] @ y[row] - 0.7 * models.FIELD_MATS[1] @ y[row]
        intrinsic = nk6.berger_curvature(spec, y[row], u4, v4, v4, u4)
        u = models._berger_components(spec, y[row], u4)
        v = models._berger_components(spec, y[row], v4)
        num = np.einsum("ijkl,i,j,k,l->", cp.R[row], u, v, u, v)
        assert abs(intrinsic - num) < 1e-8


def test_synthetic_cases():
    a = nk6.synthetic_case("a")
    assert a.tuple() == (0.0, 0.0, 0.0, 0.0)
    assert float(a.sff().norm_sq()) == 0.0
    b = nk6.synthetic_case("b")
    assert np.allclose(b.tuple(), (S5 / 4, S5 / 4, np.sqrt(10) / 4, 0.0))
    assert abs(float(b.sff().norm_sq()) - 45 / 8) < 1e-12
    c = nk6.synthetic_case("c")
    assert abs(float(c.sff().norm_sq()) - 25 / 8) < 1e-12
    _, theta = nk6.maximize_theta(c.sff().h)
    assert abs(float(theta) - S5 / 2) < 1e-10
    with pytest.raises(ValueError):
        nk6.synthetic_case("d")


def test_embedding_separates_points(dvv, rng):
    y1 = rng.normal(size=(10000, 4))
    y1 /= np.linalg.norm(y1, axis=-1, keepdims=True)
    y2 = rng.normal(size=(10000, 4))
    y2 /= np.linalg.norm(y2, axis=-1, keepdims=True)
    din = np.linalg.norm(y1 - y2, axis=-1)
    mask = din > 1e-3
    dout = np.linalg.norm(dvv.embed(y1) - dvv.embed(y2), axis=-1)
    assert np.all(dout[mask] > 0.5 * din[mask])


def test_polynomial_immersion_file_roundtrip(tmp_path, dvv, table):
    path = tmp_path / "berger.poly"
    rows = [
        f"{c + 1} {e[0]} {e[1]} {e[2]} {e[3]} {co:.17g}" for c, e, co in dvv.terms
    ]
    path.write_text("# embedding coefficients\n" + "\n".join(rows) + "\n")
    imm = nk6.load_polynomial_immersion(path, table)
    pts = random_chart_points(imm, 10, seed=24)
    assert np.max(np.abs(imm.jet(pts, 2).value - dvv.jet(pts, 2).value)) < 1e-15
    # no frame fields in the file: Gram-Schmidt frame, gauge-invariant norms agree
    sff = nk6.second_fundamental_form(imm, pts)
    assert np.max(np.abs(sff.norm_sq() - 25 / 8)) < 1e-8


def test_polynomial_immersion_rejects_off_sphere(tmp_path, table):
    path = tmp_path / "bad.poly"
    path.write_text("1 1 0 0 0 0.5\n")
    with pytest.raises(ValueError):
        nk6.load_polynomial_immersion(path, table)


def test_resolve_model_names(table):
    assert nk6.resolve_model("dvv", table).name == "dvv"
    assert nk6.resolve_model("totally-geodesic", table).name == "totally-geodesic"
    assert nk6.resolve_model("synthetic:b", table).tag == "b"
    with pytest.raises(ValueError):
        nk6.resolve_model("nope", table)
