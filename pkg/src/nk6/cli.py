"""Command-line front end: verification suites, per-point analysis and
quadrature certification, with deterministic JSON/CSV reports.

Exit codes: 0 all assertions pass, 1 assertion failure, 2 usage or
configuration error.  Every reported check carries the formula of the
identity it exercises and the worst residual observed, so a failure is
traceable to a specific equation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import __version__, canonical, cayley, geometry, models, simons

SCHEMA_VERSION = "1"

DEFAULT_TOLERANCES = {
    "algebraic": 1e-12,
    "fd_identity": 1e-6,
    "unit_image": 1e-12,
    "jet_fd_agreement": 1e-6,
    "orthonormal": 1e-10,
    "lagrangian": 1e-10,
    "metric_values": 1e-10,
    "sff_symmetry": 1e-9,
    "minimality": 1e-9,
    "volume_form": 1e-9,
    "g_normality": 1e-10,
    "h_values": 1e-8,
    "g_orientation": 1e-8,
    "hsq_value": 1e-8,
    "theta_value": 1e-6,
    "normal_form": 1e-7,
    "codazzi": 1e-7,
    "covariant_exchange": 1e-7,
    "gauss_scalar": 1e-8,
    "sectional_values": 1e-8,
    "f_norm": 1e-10,
    "t_decomposition": 1e-6,
    "cross_term": 1e-6,
    "t_norm": 1e-8,
    "j_parallel": 1e-7,
    "gradient_bound": 1e-8,
    "laplacian": 1e-4,
    "closed_form_match": 1e-12,
    "constraints": 1e-8,
    "remainder_sign": 0.0,
    "integral": 1e-8,
    "volume": 1e-6,
}


@dataclass
class RunConfig:
    """Echoed verbatim into every report; a fixed config fixes the output."""

    command: str
    model: str = "dvv"
    table: str = "auto"
    seed: int = 0
    samples: int = 1000
    fd_step: float | None = None
    rule: simons.QuadratureRule = dc_field(default_factory=simons.QuadratureRule)
    tolerances: dict = dc_field(default_factory=dict)
    out: Path | None = None
    fmt: str = "json"
    points: list | None = None
    random_points: int = 10

    def tol(self, key):
        return self.tolerances.get(key, DEFAULT_TOLERANCES[key])

    def to_dict(self):
        return {
            "command": self.command,
            "model": self.model,
            "table": self.table,
            "seed": self.seed,
            "samples": self.samples,
            "fd_step": self.fd_step,
            "rule": list(self.rule.counts()),
            "tolerances": {k: self.tolerances[k] for k in sorted(self.tolerances)},
            "format": self.fmt,
            "points": self.points,
            "random_points": self.random_points,
        }


def _check(name, formula, residual, tolerance, **extra):
    row = {
        "name": name,
        "formula": formula,
        "max_residual": float(residual),
        "tolerance": float(tolerance),
        "passed": bool(residual <= tolerance),
    }
    row.update(extra)
    return row


def _suite(name, checks):
    return {"name": name, "checks": checks}


def _resolve_table(cfg: RunConfig):
    if cfg.table == "auto":
        return models.default_table()
    return cayley.load_table(cfg.table)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _structure_suite(table, cfg):
    report = cayley.verify_nk_identities(
        table,
        n_samples=cfg.samples,
        seed=cfg.seed,
        tol_algebraic=cfg.tol("algebraic"),
        tol_fd=cfg.tol("fd_identity"),
    )
    checks = [
        _check(row["identity"], row["formula"], row["max_residual"], row["tolerance"])
        for row in report.rows()
    ]
    return _suite("structure_identities", checks)


def _sample_points(imm, cfg, n):
    rng = np.random.default_rng(cfg.seed)
    return imm.chart.random_points(n, rng)


def _immersion_suite(imm, cfg):
    checks = []
    pts = _sample_points(imm, cfg, min(cfg.samples, 200))
    jt = imm.jet(pts, 2)
    checks.append(_check(
        "unit_image", "|Psi(q)| = 1", jt.unit_image_residual(), cfg.tol("unit_image")))

    fd_pts = pts[:4]
    exact = imm.jet(fd_pts, 3)
    approx = geometry.fd_jet(imm, fd_pts, 3)
    dev = max(
        float(np.max(np.abs(exact.d1 - approx.d1))),
        float(np.max(np.abs(exact.d2 - approx.d2))),
        float(np.max(np.abs(exact.d3 - approx.d3))),
    )
    checks.append(_check(
        "jet_fd_agreement", "analytic jets match value-only finite differences",
        dev, cfg.tol("jet_fd_agreement")))

    pk = geometry.frame(imm, pts, validate=False)
    checks.append(_check(
        "frame_orthonormal", "<e_i, e_j> = delta_ij",
        pk.orthonormality_residual(), cfg.tol("orthonormal")))
    checks.append(_check(
        "lagrangian", "<J e_i, e_j> = 0",
        pk.lagrangian_residual(), cfg.tol("lagrangian")))

    sff = geometry.second_fundamental_form(imm, pts, frame_packet=pk)
    checks.append(_check(
        "sff_full_symmetry", "h^{k*}_{ij} is symmetric in (i, j, k)",
        sff.symmetry_residual(), cfg.tol("sff_symmetry")))
    checks.append(_check(
        "minimality", "sum_i h(e_i, e_i) = 0",
        sff.trace_residual(), cfg.tol("minimality")))

    g12 = cayley.g_tensor(pk.base, pk.e[..., 0, :], pk.e[..., 1, :], imm.table, check=False)
    vol = np.einsum("...c,...c->...", g12, pk.estar[..., 2, :])
    checks.append(_check(
        "volume_form", "g(G(e1,e2), J e3) = +-1 with constant sign",
        float(np.max(np.abs(np.abs(vol) - 1.0)) + (np.ptp(np.sign(vol)) > 0)),
        cfg.tol("volume_form")))
    ge = np.einsum(
        "pqc,...ip,...jq,...kc->...ijk", imm.table.f, pk.e, pk.e, pk.e)
    checks.append(_check(
        "g_normality", "g(G(e_i, e_j), e_k) = 0",
        float(np.max(np.abs(ge))), cfg.tol("g_normality")))

    cp = geometry.curvature_from_sff(sff)
    checks.append(_check(
        "gauss_scalar", "tau = 6 - |h|^2",
        cp.gauss_scalar_residual(), cfg.tol("gauss_scalar")))

    few = pts[: min(24, len(pts))]
    nh = geometry.nabla_h(imm, few, fd_step=cfg.fd_step)
    checks.append(_check(
        "codazzi", "h^{k*}_{ij,l} = h^{k*}_{il,j}",
        nh.codazzi_residual(), cfg.tol("codazzi")))

    pk_few = geometry.frame(imm, few, validate=False)
    sff_few = geometry.second_fundamental_form(imm, few, frame_packet=pk_few)
    gj = np.einsum(
        "pqc,...ip,...jq,...lc->...ijl", imm.table.f, pk_few.e, pk_few.e, pk_few.estar)
    # residual of g((nabla h)(W,X,Z),JY) - g((nabla h)(W,X,Y),JZ) = g(h(W,X),G(Y,Z))
    rhs = np.einsum("...pmi,...kjp->...kijm", sff_few.h, gj)
    exchange = nh.coeffs - np.swapaxes(nh.coeffs, -4, -2) - rhs
    checks.append(_check(
        "covariant_exchange",
        "g((nabla h)(W,X,Z),JY) - g((nabla h)(W,X,Y),JZ) = g(h(W,X),G(Y,Z))",
        float(np.max(np.abs(exchange))), cfg.tol("covariant_exchange")))

    F = simons.f_tensor(sff_few, pk_few)
    packet = simons.t_tensor(nh, F, sff_few, tol=np.inf)
    checks.append(_check(
        "f_norm", "|F|^2 = (3/4) |h|^2",
        packet.f_norm_residual(), cfg.tol("f_norm")))
    checks.append(_check(
        "t_decomposition", "|nabla h|^2 = |T|^2 + (3/4) |h|^2",
        packet.decomposition_residual(), cfg.tol("t_decomposition")))
    checks.append(_check(
        "cross_term", "<nabla h, F> = (3/4) |h|^2",
        packet.cross_term_residual(), cfg.tol("cross_term")))
    slack = float(np.min(packet.nabla_h_sq - 0.75 * packet.hsq))
    checks.append(_check(
        "gradient_bound", "|nabla h|^2 >= (3/4) |h|^2",
        max(0.0, -slack), cfg.tol("gradient_bound")))
    return _suite("immersion_invariants", checks)


def _dvv_suite(imm, cfg):
    checks = []
    pts = _sample_points(imm, cfg, 50)
    y = imm.chart.to_y(pts)
    jac = imm.jacobian_y(y)
    fields = np.einsum("fab,...b->...fa", models.FIELD_MATS, y)
    push = np.einsum("...ca,...fa->...fc", jac, fields)
    gram = np.einsum("...ic,...jc->...ij", push, push)
    target = np.diag([4 / 9, 8 / 3, 8 / 3])
    checks.append(_check(
        "metric_values", "pullback metric is diag(4/9, 8/3, 8/3) in the X-frame",
        float(np.max(np.abs(gram - target))), cfg.tol("metric_values")))

    pk = geometry.frame(imm, pts, validate=False)
    sff = geometry.second_fundamental_form(imm, pts, frame_packet=pk)
    s5 = np.sqrt(5.0)
    expected = canonical.reconstruct_sff((s5 / 4, s5 / 4, 0.0, 0.0))
    checks.append(_check(
        "h_values", "second fundamental form matches the Berger-sphere table",
        float(np.max(np.abs(sff.h - expected))), cfg.tol("h_values")))

    g23 = cayley.g_tensor(pk.base, pk.e[..., 1, :], pk.e[..., 2, :], imm.table, check=False)
    checks.append(_check(
        "g_orientation", "G(E2, E3) = J E1",
        float(np.max(np.abs(g23 - pk.estar[..., 0, :]))), cfg.tol("g_orientation")))

    hsq = sff.norm_sq()
    checks.append(_check(
        "hsq_value", "|h|^2 = 25/8",
        float(np.max(np.abs(hsq - 25 / 8))), cfg.tol("hsq_value")))
    _, theta = canonical.maximize_theta(sff.h)
    checks.append(_check(
        "theta_value", "Theta = sqrt(5)/2",
        float(np.max(np.abs(theta - s5 / 2))), cfg.tol("theta_value")))

    cd = canonical.canonical_basis(sff.h[0])
    dev = np.max(np.abs(np.array(cd.tuple()) - np.array([s5 / 4, s5 / 4, 0.0, 0.0])))
    checks.append(_check(
        "normal_form", "normal form is (sqrt(5)/4, sqrt(5)/4, 0, 0)",
        float(dev), cfg.tol("normal_form")))

    cp = geometry.curvature_from_sff(sff)
    k23 = cp.R[..., 1, 2, 1, 2]
    k12 = cp.R[..., 0, 1, 0, 1]
    dev = max(float(np.max(np.abs(k23 - 21 / 16))), float(np.max(np.abs(k12 - 1 / 16))))
    checks.append(_check(
        "sectional_values", "K(E2,E3) = 21/16 and K(E1,.) = 1/16",
        dev, cfg.tol("sectional_values")))
    checks.append(_check(
        "gauss_scalar", "tau = 23/8 = 6 - |h|^2",
        float(np.max(np.abs(cp.tau - 23 / 8))), cfg.tol("gauss_scalar")))

    point = pts[0]
    lap = simons.laplacian_identity_check(imm, point, fd_step=cfg.fd_step)
    checks.append(_check(
        "laplacian", "(1/2) Lap |h|^2 = |nabla h|^2 + 3 |h|^2 - Q",
        lap.residual_pipeline, cfg.tol("laplacian")))

    nh = geometry.nabla_h(imm, pts[:16], fd_step=cfg.fd_step)
    checks.append(_check(
        "t_norm", "|T|^2 = 0 on the Berger sphere",
        float(np.max(np.abs(
            nh.norm_sq() - 0.75 * sff.norm_sq()[:16]))), cfg.tol("t_norm")))
    defect = simons.j_parallel_defect(nh)
    checks.append(_check(
        "j_parallel", "g((nabla h)(v,v,v), Jv) = 0",
        float(np.max(defect)), cfg.tol("j_parallel")))
    return _suite("berger_sphere_reference", checks)


def _geodesic_suite(imm, cfg):
    checks = []
    pts = _sample_points(imm, cfg, 50)
    sff = geometry.second_fundamental_form(imm, pts)
    checks.append(_check(
        "h_values", "h = 0 on a totally geodesic model",
        float(np.max(np.abs(sff.h))), cfg.tol("h_values")))
    cp = geometry.curvature_from_sff(sff)
    eye = np.eye(3)
    target = np.einsum("ik,jl->ijkl", eye, eye) - np.einsum("il,jk->ijkl", eye, eye)
    checks.append(_check(
        "sectional_values", "K = 1 on a totally geodesic model",
        float(np.max(np.abs(cp.R - target))), cfg.tol("sectional_values")))
    return _suite("totally_geodesic_reference", checks)


def _synthetic_suite(model, cfg):
    checks = []
    rng = np.random.default_rng(cfg.seed)
    sff = model.sff()
    cf = canonical.closed_forms(model.tuple())
    inv = canonical.commutator_invariant_direct(canonical.h_matrices(model.tuple()))
    checks.append(_check(
        "closed_form_match", "closed-form Q equals the direct matrix invariant",
        float(np.abs(cf.q_closed - inv.Q) / max(1.0, abs(float(inv.Q)))),
        cfg.tol("closed_form_match")))
    cd = canonical.canonical_basis(sff.h)
    dev = np.max(np.abs(np.array(cd.tuple()) - np.array(model.tuple())))
    checks.append(_check(
        "normal_form", "normal-form extraction returns the case tuple",
        float(dev), cfg.tol("normal_form")))
    checks.append(_check(
        "constraints", "normal-form constraints hold",
        max(0.0, cd.constraint_slack()), cfg.tol("constraints")))
    tuples = rng.normal(size=(min(cfg.samples, 10000), 4))
    rand = canonical.closed_forms(tuples)
    randinv = canonical.commutator_invariant_direct(canonical.h_matrices(tuples))
    rel = np.max(np.abs(rand.q_closed - randinv.Q) / np.maximum(1.0, np.abs(randinv.Q)))
    checks.append(_check(
        "closed_form_match_random", "closed-form Q matches direct matrices on random tuples",
        float(rel), cfg.tol("closed_form_match")))
    checks.append(_check(
        "remainder_sign", "regrouping remainder is nonnegative",
        max(0.0, -float(np.min(rand.r_residual))), cfg.tol("remainder_sign")))
    return _suite("canonical_algebra", checks)


def cmd_verify(cfg: RunConfig):
    table = _resolve_table(cfg)
    suites = [
        _suite("multiplication_table", [_check(
            "table_axioms",
            "|u x v|^2 = |u|^2 |v|^2 - <u,v>^2 and total antisymmetry",
            0.0, 1.0, table=table.describe())]),
        _structure_suite(table, cfg),
    ]
    model = models.resolve_model(cfg.model, table)
    if isinstance(model, models.SyntheticH):
        suites.append(_synthetic_suite(model, cfg))
    else:
        suites.append(_immersion_suite(model, cfg))
        if cfg.model == "dvv":
            suites.append(_dvv_suite(model, cfg))
        elif cfg.model == "totally-geodesic":
            suites.append(_geodesic_suite(model, cfg))
    return suites


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------

ANALYZE_COLUMNS = (
    "eta", "xi1", "xi2", "hsq", "theta", "lambda1", "lambda2", "mu1", "mu2",
    "K_min", "K_max", "ric_min", "ric_max", "tau", "nabla_h_sq", "t_sq",
    "j_parallel_defect",
    "flag_K_above_1_16", "flag_K_below_21_16", "flag_ric_ge_3_4", "flag_hsq_lt_5_2",
    "error",
)


def analyze_point(imm, q, fd_step=None):
    """One analysis row; pinching-threshold flags are annotations only."""
    q = np.asarray(q, dtype=float)
    pk = geometry.frame(imm, q)
    sff = geometry.second_fundamental_form(imm, q, frame_packet=pk)
    hsq = float(sff.norm_sq())
    _, theta = canonical.maximize_theta(sff.h)
    cd = canonical.canonical_basis(sff.h)
    cp = geometry.curvature_from_sff(sff)
    ric_eigs = cp.ricci_eigenvalues()
    tau = float(cp.tau)
    k_min, k_max = (float(v) for v in cp.sectional_range())
    nh = geometry.nabla_h(imm, q, fd_step=fd_step)
    packet = simons.t_tensor(nh, simons.f_tensor(sff, pk), sff, tol=np.inf)
    return {
        "eta": float(q[0]), "xi1": float(q[1]), "xi2": float(q[2]),
        "hsq": hsq, "theta": float(theta),
        "lambda1": cd.lambda1, "lambda2": cd.lambda2, "mu1": cd.mu1, "mu2": cd.mu2,
        "K_min": k_min, "K_max": k_max,
        "ric_min": float(ric_eigs[0]), "ric_max": float(ric_eigs[-1]),
        "tau": tau,
        "nabla_h_sq": float(packet.nabla_h_sq), "t_sq": float(packet.t_sq),
        "j_parallel_defect": float(simons.j_parallel_defect(nh)),
        "flag_K_above_1_16": bool(k_min > 1 / 16),
        "flag_K_below_21_16": bool(k_max < 21 / 16),
        "flag_ric_ge_3_4": bool(ric_eigs[0] >= 3 / 4),
        "flag_hsq_lt_5_2": bool(hsq < 5 / 2),
        "error": "",
    }


def cmd_analyze(cfg: RunConfig):
    table = _resolve_table(cfg)
    model = models.resolve_model(cfg.model, table)
    if isinstance(model, models.SyntheticH):
        raise ConfigError("analyze needs a model with chart jets; synthetic data has none")
    if cfg.points:
        pts = [np.asarray(p, dtype=float) for p in cfg.points]
    else:
        rng = np.random.default_rng(cfg.seed)
        pts = list(model.chart.random_points(cfg.random_points, rng))
    rows = []
    for q in pts:
        try:
            rows.append(analyze_point(model, q, fd_step=cfg.fd_step))
        except geometry.ChartDegeneracyError as exc:
            row = {k: float("nan") for k in ANALYZE_COLUMNS if not k.startswith("flag")}
            row.update({
                "eta": float(q[0]), "xi1": float(q[1]), "xi2": float(q[2]),
                "flag_K_above_1_16": False, "flag_K_below_21_16": False,
                "flag_ric_ge_3_4": False, "flag_hsq_lt_5_2": False,
                "error": str(exc),
            })
            rows.append(row)
    return rows


def _rows_to_csv(rows, columns):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        out = []
        for col in columns:
            v = row[col]
            if isinstance(v, float):
                out.append(f"{v:.17g}")
            elif isinstance(v, bool):
                out.append(str(int(v)))
            else:
                out.append(str(v))
        writer.writerow(out)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# integrate / report
# ---------------------------------------------------------------------------

def cmd_integrate(cfg: RunConfig):
    table = _resolve_table(cfg)
    model = models.resolve_model(cfg.model, table)
    if isinstance(model, models.SyntheticH):
        raise ConfigError("integrate needs a compact immersed model")
    return simons.integrate_inequality(
        model, cfg.rule,
        tol_equality=cfg.tol("integral"),
        refine_tol=cfg.tol("volume"),
    )


class ConfigError(ValueError):
    pass


def _summary(suites):
    checks = [c for s in suites for c in s["checks"]]
    failures = [c for c in checks if not c["passed"]]
    return {"checks": len(checks), "failures": len(failures), "passed": not failures}


def _provenance():
    return {
        "package": f"nk6 {__version__}",
        "numpy": np.__version__,
        "python": ".".join(str(v) for v in sys.version_info[:3]),
    }


def _emit(cfg: RunConfig, document, csv_blobs=None):
    text = json.dumps(document, indent=2, sort_keys=True)
    if cfg.fmt == "json" or not csv_blobs:
        print(text)
    else:
        for blob in csv_blobs.values():
            print(blob, end="")
    if cfg.out is not None:
        cfg.out.mkdir(parents=True, exist_ok=True)
        (cfg.out / f"{cfg.command}_report.json").write_text(text + "\n")
        for name, blob in (csv_blobs or {}).items():
            (cfg.out / name).write_text(blob)


def run(cfg: RunConfig) -> int:
    if cfg.command == "verify":
        suites = cmd_verify(cfg)
        document = {
            "schema_version": SCHEMA_VERSION,
            "config": cfg.to_dict(),
            "suites": suites,
            "summary": _summary(suites),
            "provenance": _provenance(),
        }
        failed = not document["summary"]["passed"]
        blob = _rows_to_csv(
            [c for s in suites for c in s["checks"]],
            ("name", "formula", "max_residual", "tolerance", "passed"),
        ) if cfg.fmt == "csv" else None
        _emit(cfg, document, {"verify_checks.csv": blob} if blob else None)
        return 1 if failed else 0

    if cfg.command == "analyze":
        rows = cmd_analyze(cfg)
        document = {
            "schema_version": SCHEMA_VERSION,
            "config": cfg.to_dict(),
            "rows": rows,
            "provenance": _provenance(),
        }
        _emit(cfg, document, {"analyze_points.csv": _rows_to_csv(rows, ANALYZE_COLUMNS)})
        return 0

    if cfg.command == "integrate":
        report = cmd_integrate(cfg)
        document = {
            "schema_version": SCHEMA_VERSION,
            "config": cfg.to_dict(),
            "inequality": report.to_dict(),
            "provenance": _provenance(),
        }
        blob = _rows_to_csv(
            [dict(zip(report.CSV_COLUMNS, row)) for row in report.samples.tolist()],
            report.CSV_COLUMNS,
        )
        _emit(cfg, document, {"integrand_samples.csv": blob})
        return 0

    if cfg.command == "report":
        suites = cmd_verify(cfg)
        document = {
            "schema_version": SCHEMA_VERSION,
            "config": cfg.to_dict(),
            "suites": suites,
            "summary": _summary(suites),
            "provenance": _provenance(),
        }
        csv_blobs = {}
        model = models.resolve_model(cfg.model, _resolve_table(cfg))
        if not isinstance(model, models.SyntheticH):
            rows = cmd_analyze(cfg)
            document["rows"] = rows
            csv_blobs["analyze_points.csv"] = _rows_to_csv(rows, ANALYZE_COLUMNS)
            inequality = cmd_integrate(cfg)
            document["inequality"] = inequality.to_dict()
            csv_blobs["integrand_samples.csv"] = _rows_to_csv(
                [dict(zip(inequality.CSV_COLUMNS, row)) for row in inequality.samples.tolist()],
                inequality.CSV_COLUMNS,
            )
        _emit(cfg, document, csv_blobs)
        return 1 if not document["summary"]["passed"] else 0

    raise ConfigError(f"unknown command {cfg.command!r}")


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _parse_points(text):
    pts = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        vals = [float(v) for v in chunk.split(",")]
        if len(vals) != 3:
            raise argparse.ArgumentTypeError("each point must be 'eta,xi1,xi2'")
        pts.append(vals)
    if not pts:
        raise argparse.ArgumentTypeError("no points given")
    return pts


def _parse_tol(pairs):
    tols = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise ConfigError(f"--tol expects KEY=VALUE, got {pair!r}")
        key, _, value = pair.partition("=")
        if key not in DEFAULT_TOLERANCES:
            raise ConfigError(
                f"unknown tolerance key {key!r}; known: {', '.join(sorted(DEFAULT_TOLERANCES))}")
        tols[key] = float(value)
        if tols[key] < 0:
            raise ConfigError("tolerances must be nonnegative")
    return tols


def build_parser():
    parser = argparse.ArgumentParser(
        prog="nk6",
        description="Invariants and inequality certification for Lagrangian "
        "submanifolds of the nearly Kahler six-sphere.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_rule=False):
        p.add_argument("--model", default="dvv",
                       help="dvv | totally-geodesic | synthetic:a|b|c | poly:<path>")
        p.add_argument("--table", default=None,
                       help="multiplication-table file, or 'auto' (default; "
                       "honors NK6_TABLE_PATH)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=int, default=1000)
        p.add_argument("--fd-step", type=float, default=None,
                       help="relative step for field finite differences")
        p.add_argument("--tol", action="append", metavar="KEY=VAL",
                       help="override a named tolerance (repeatable)")
        p.add_argument("--out", type=Path, default=None, help="output directory")
        p.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
        if with_rule:
            p.add_argument("--rule", default="32,32,32",
                           help="quadrature nodes 'n_eta,n_xi1,n_xi2'")

    def point_args(p):
        p.add_argument("--points", type=_parse_points, default=None,
                       help="semicolon-separated chart points 'eta,xi1,xi2;...'")
        p.add_argument("--random", dest="random_points", type=int, default=10,
                       help="number of random chart points when --points is absent")

    common(sub.add_parser("verify", help="run the identity and invariant suites"))
    pa = sub.add_parser("analyze", help="per-point invariant table")
    common(pa)
    point_args(pa)
    common(sub.add_parser("integrate", help="certify the integral inequality"),
           with_rule=True)
    pr = sub.add_parser("report", help="verify + analyze + integrate in one document")
    common(pr, with_rule=True)
    point_args(pr)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command,
            model=args.model,
            table=args.table if args.table is not None else "auto",
            seed=args.seed,
            samples=args.samples,
            fd_step=args.fd_step,
            rule=simons.QuadratureRule.parse(getattr(args, "rule", "32,32,32")),
            tolerances=_parse_tol(args.tol),
            out=args.out,
            fmt=args.fmt,
            points=getattr(args, "points", None),
            random_points=getattr(args, "random_points", 10),
        )
        if cfg.samples < 1:
            raise ConfigError("--samples must be positive")
        return run(cfg)
    except (ConfigError, cayley.TableError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (simons.ResolutionError, simons.IdentityViolation,
            geometry.ChartDegeneracyError, models.ConstructionError) as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
