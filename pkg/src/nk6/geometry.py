"""Immersion framework for Lagrangian three-manifolds in the six-sphere.

Everything here is pointwise and batched: chart points have shape (..., 3)
and every derived quantity carries the same leading batch shape.  Immersion
handles (see `models`) supply exact chart jets; first derivatives of frame
and form fields are taken by central differences of those exact jets, which
keeps field-differentiation error near 1e-10 while all pointwise tensors are
exact to roundoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .cayley import MulTable, cross

__all__ = [
    "ChartDegeneracyError",
    "ImmersionJet",
    "FramePacket",
    "SFF",
    "NablaH",
    "CurvaturePacket",
    "jet",
    "fd_jet",
    "frame",
    "second_fundamental_form",
    "shape_operator",
    "nabla_h",
    "curvature",
    "curvature_from_sff",
    "sectional_curvature",
    "laplace_beltrami",
]

EPS = np.finfo(float).eps
FD_STEP_ORDER1 = EPS ** (1.0 / 3.0)
FD_STEP_ORDER2 = EPS ** 0.25


class ChartDegeneracyError(RuntimeError):
    """Chart-induced frame or step failure; carries distance to the bad locus."""

    def __init__(self, message, distance=None):
        if distance is not None:
            message = f"{message} (distance to degeneracy locus: {distance:.3e})"
        super().__init__(message)
        self.distance = distance


# ---------------------------------------------------------------------------
# jets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ImmersionJet:
    """Value and symmetric mixed partials of an immersion chart at a point."""

    order: int
    value: np.ndarray                 # (..., 7)
    d1: np.ndarray | None = None      # (..., 3, 7)
    d2: np.ndarray | None = None      # (..., 3, 3, 7)
    d3: np.ndarray | None = None      # (..., 3, 3, 3, 7)

    def partial(self, alpha):
        """Mixed partial for a 3-tuple of exponents with |alpha| <= order."""
        total = sum(alpha)
        if total > self.order:
            raise ValueError(f"jet holds order {self.order}, requested {alpha}")
        if total == 0:
            return self.value
        axes = [a for a, m in enumerate(alpha) for _ in range(m)]
        block = (self.d1, self.d2, self.d3)[total - 1]
        for ax in axes:
            block = block[..., ax, :]
        return block

    def unit_image_residual(self):
        return float(np.max(np.abs(np.sum(self.value**2, axis=-1) - 1.0)))


def jet(imm, q, order: int) -> ImmersionJet:
    """Jet of the immersion at chart point(s) q, exact for built-in models."""
    if not 0 <= order <= 3:
        raise ValueError("jet order must be in 0..3")
    return imm.jet(q, order)


@lru_cache(maxsize=None)
def _fd_weights(offsets: tuple, deriv: int) -> tuple:
    """Finite-difference weights on integer offsets for one derivative order."""
    n = len(offsets)
    A = np.array([[o**p / math.factorial(p) for o in offsets] for p in range(n)])
    b = np.zeros(n)
    b[deriv] = 1.0
    return tuple(np.linalg.solve(A, b))


_STENCIL_POINTS = {0: (0,), 1: (-2, -1, 1, 2), 2: (-2, -1, 0, 1, 2), 3: (-3, -2, -1, 1, 2, 3)}


def fd_jet(imm, q, order: int, step=None) -> ImmersionJet:
    """Jet from immersion *values* only, by high-order central differences.

    Independent oracle for the analytic jets; fourth-order stencils keep the
    roundoff/truncation balance below 1e-6 for third derivatives.
    """
    if not 0 <= order <= 3:
        raise ValueError("jet order must be in 0..3")
    q = np.asarray(q, dtype=float)
    if step is None:
        step = EPS ** (1.0 / 7.0)
    steps = step * np.asarray(imm.chart.extents)

    def value(points):
        return imm.jet(points, 0, check_domain=False).value

    blocks = {0: value(q)}
    from ._series import multi_indices

    partials = {}
    for alpha in multi_indices(order):
        total = sum(alpha)
        if total == 0:
            partials[alpha] = blocks[0]
            continue
        axis_stencils = []
        for ax, m in enumerate(alpha):
            pts = _STENCIL_POINTS[m]
            axis_stencils.append((ax, pts, _fd_weights(pts, m)))
        combos = [((), 1.0)]
        for ax, pts, wts in axis_stencils:
            combos = [
                (shift + ((ax, o),), w * wt)
                for shift, w in combos
                for o, wt in zip(pts, wts)
            ]
        shifted = []
        for shift, _ in combos:
            qq = np.array(q, copy=True)
            for ax, o in shift:
                qq[..., ax] = qq[..., ax] + o * steps[ax]
            shifted.append(qq)
        vals = value(np.stack(shifted))
        weights = np.array([w for _, w in combos])
        scale = np.prod([steps[ax] ** m for ax, m in enumerate(alpha)])
        partials[alpha] = np.tensordot(weights, vals, axes=(0, 0)) / scale

    batch = q.shape[:-1]
    d1 = d2 = d3 = None
    if order >= 1:
        d1 = np.stack([partials[tuple(np.eye(3, dtype=int)[a])] for a in range(3)], axis=-2)
    if order >= 2:
        d2 = np.empty(batch + (3, 3, 7))
        for a in range(3):
            for b in range(3):
                alpha = [0, 0, 0]
                alpha[a] += 1
                alpha[b] += 1
                d2[..., a, b, :] = partials[tuple(alpha)]
    if order >= 3:
        d3 = np.empty(batch + (3, 3, 3, 7))
        for a in range(3):
            for b in range(3):
                for c in range(3):
                    alpha = [0, 0, 0]
                    alpha[a] += 1
                    alpha[b] += 1
                    alpha[c] += 1
                    d3[..., a, b, c, :] = partials[tuple(alpha)]
    return ImmersionJet(order=order, value=blocks[0], d1=d1, d2=d2, d3=d3)


# ---------------------------------------------------------------------------
# adapted frames
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FramePacket:
    """Point, adapted orthonormal frames and induced metric data.

    e[..., i, :] spans the tangent space of the submanifold, estar_i = J e_i
    spans its normal space inside the sphere, and chart_comps expresses each
    e_i in the chart-partial basis.
    """

    base: np.ndarray                  # (..., 7)
    e: np.ndarray                     # (..., 3, 7)
    estar: np.ndarray                 # (..., 3, 7)
    metric: np.ndarray                # (..., 3, 3) chart-basis induced metric
    christoffel: np.ndarray           # (..., 3, 3, 3)  Gamma^c_ab in chart basis
    chart_comps: np.ndarray           # (..., 3, 3) rows: e_i in chart partials
    table: MulTable = field(repr=False, default=None)

    def orthonormality_residual(self):
        gram = np.einsum("...ic,...jc->...ij", self.e, self.e)
        return float(np.max(np.abs(gram - np.eye(3))))

    def lagrangian_residual(self):
        return float(np.max(np.abs(np.einsum("...ic,...jc->...ij", self.estar, self.e))))

    def validate(self, tol=1e-10):
        worst = max(self.orthonormality_residual(), self.lagrangian_residual())
        base_tangency = float(np.max(np.abs(np.einsum("...ic,...c->...i", self.e, self.base))))
        worst = max(worst, base_tangency)
        if worst > tol:
            raise ValueError(
                f"frame violates adapted-frame invariants: residual {worst:.3e} > {tol:g}"
            )
        return worst


def _gram_schmidt(vectors, degeneracy_distance=None):
    out = []
    for i in range(vectors.shape[-2]):
        v = vectors[..., i, :]
        for prev in out:
            v = v - np.sum(v * prev, axis=-1, keepdims=True) * prev
        n = np.linalg.norm(v, axis=-1, keepdims=True)
        if np.any(n < 1e-8):
            dist = None
            if degeneracy_distance is not None:
                dist = float(np.min(degeneracy_distance))
            raise ChartDegeneracyError(
                "chart partials are rank deficient; cannot orthonormalize", dist
            )
        out.append(v / n)
    return np.stack(out, axis=-2)


def frame(imm, q, use_model_fields=True, basis_rotation=None, validate=True,
          tol=1e-10) -> FramePacket:
    """Adapted frame, induced metric and Christoffel symbols at q.

    Prefers the model's global tangent fields (they stay smooth across the
    chart poles); otherwise orthonormalizes the chart partials, optionally
    premultiplied by `basis_rotation` for gauge experiments.
    """
    q = np.asarray(q, dtype=float)
    jt = imm.jet(q, 2, check_domain=False)
    x, d1, d2 = jt.value, jt.d1, jt.d2
    metric = np.einsum("...ac,...bc->...ab", d1, d1)
    dist = imm.chart.degeneracy_distance(q)
    if np.any(np.abs(np.linalg.det(metric)) < 1e-12):
        # the frame vectors may survive a chart pole but the chart-component
        # decomposition used downstream does not
        raise ChartDegeneracyError(
            "chart Jacobian is rank deficient at the requested point",
            float(np.min(dist)),
        )

    fields = imm.tangent_fields(q) if use_model_fields else None
    if fields is not None:
        e = _gram_schmidt(fields, dist)
    else:
        basis = d1
        if basis_rotation is not None:
            basis = np.einsum("ri,...ic->...rc", np.asarray(basis_rotation), d1)
        e = _gram_schmidt(basis, dist)

    estar = cross(x[..., None, :], e, imm.table)
    christoffel = _christoffel(metric, d1, d2)
    comps_rhs = np.einsum("...ac,...ic->...ai", d1, e)
    chart_comps = np.swapaxes(np.linalg.solve(metric, comps_rhs), -1, -2)

    packet = FramePacket(
        base=x, e=e, estar=estar, metric=metric,
        christoffel=christoffel, chart_comps=chart_comps, table=imm.table,
    )
    if validate:
        packet.validate(tol)
    return packet


def _christoffel(metric, d1, d2):
    # Gamma^c_ab: chart components of the tangential part of Psi_ab
    inner = np.einsum("...abd,...cd->...abc", d2, d1)
    return np.einsum("...dc,...abc->...dab", np.linalg.inv(metric), inner)


# ---------------------------------------------------------------------------
# second fundamental form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SFF:
    """Second-fundamental-form coefficients h[k, i, j] = <h(e_i, e_j), J e_k>."""

    h: np.ndarray  # (..., 3, 3, 3)

    def norm_sq(self):
        return np.sum(self.h**2, axis=(-3, -2, -1))

    def symmetry_residual(self):
        worst = 0.0
        for perm in ((0, 2, 1), (1, 0, 2), (2, 1, 0), (1, 2, 0), (2, 0, 1)):
            axes = tuple(range(self.h.ndim - 3)) + tuple(self.h.ndim - 3 + p for p in perm)
            worst = max(worst, float(np.max(np.abs(self.h - np.transpose(self.h, axes)))))
        return worst

    def trace_residual(self):
        return float(np.max(np.abs(np.einsum("...kii->...k", self.h))))

    def validate(self, tol=1e-9):
        worst = max(self.symmetry_residual(), self.trace_residual())
        if worst > tol:
            raise ValueError(f"second fundamental form invariants violated: {worst:.3e}")
        return worst


def second_fundamental_form(imm, q, frame_packet: FramePacket | None = None,
                            **frame_kwargs) -> SFF:
    """Normal-valued second fundamental form in the adapted frame.

    h(e_i, e_j) is the component of the ambient derivative of the immersion
    orthogonal to both the position vector and the tangent space; only the
    chart second partials contribute after projecting onto the J-frame.
    """
    pk = frame_packet if frame_packet is not None else frame(imm, q, **frame_kwargs)
    jt = imm.jet(np.asarray(q, dtype=float), 2, check_domain=False)
    proj = np.einsum("...abc,...kc->...abk", jt.d2, pk.estar)
    h = np.einsum("...ia,...jb,...abk->...kij", pk.chart_comps, pk.chart_comps, proj)
    return SFF(h=h)


def shape_operator(sff: SFF, k: int):
    """Matrix of the shape operator for the normal direction J e_k."""
    return sff.h[..., k, :, :]


# ---------------------------------------------------------------------------
# covariant derivative of h
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NablaH:
    """First covariant derivative coefficients nh[k, i, j, m] = h^{k*}_{ij,m}."""

    coeffs: np.ndarray  # (..., 3, 3, 3, 3)

    def norm_sq(self):
        return np.sum(self.coeffs**2, axis=(-4, -3, -2, -1))

    def codazzi_residual(self):
        swapped = np.swapaxes(self.coeffs, -1, -2)
        return float(np.max(np.abs(self.coeffs - swapped)))

    def validate(self, tol=1e-7):
        r = self.codazzi_residual()
        if r > tol:
            raise ValueError(f"Codazzi symmetry violated: residual {r:.3e}")
        return r


def _frame_and_h(imm, q, frame_kwargs):
    pk = frame(imm, q, validate=False, **frame_kwargs)
    return pk, second_fundamental_form(imm, q, frame_packet=pk)


def nabla_h(imm, q, fd_step=None, **frame_kwargs) -> NablaH:
    """Covariant derivative of h from frame-field derivatives plus connection terms.

    The h-coefficient and frame fields are differentiated along the chart by
    central differences of exact jets; tangential connection coefficients come
    from the frame-field derivative and the normal connection from the
    structure tensor G.
    """
    q = np.asarray(q, dtype=float)
    pk, sff = _frame_and_h(imm, q, frame_kwargs)
    step = (fd_step if fd_step is not None else FD_STEP_ORDER1) * np.asarray(
        imm.chart.extents
    )

    shifts = []
    for a in range(3):
        for sgn in (1.0, -1.0):
            qq = np.array(q, copy=True)
            qq[..., a] = qq[..., a] + sgn * step[a]
            shifts.append(qq)
    pk_s, h_s = _frame_and_h(imm, np.stack(shifts), frame_kwargs)

    dh = np.empty(q.shape[:-1] + (3, 3, 3, 3))     # (..., a, k, i, j)
    de = np.empty(q.shape[:-1] + (3, 3, 7))        # (..., a, i, c)
    for a in range(3):
        plus, minus = 2 * a, 2 * a + 1
        dh[..., a, :, :, :] = (h_s.h[plus] - h_s.h[minus]) / (2 * step[a])
        de[..., a, :, :] = (pk_s.e[plus] - pk_s.e[minus]) / (2 * step[a])

    c = pk.chart_comps
    hgrad = np.einsum("...ma,...akij->...mkij", c, dh)
    dframe = np.einsum("...ma,...aic->...mic", c, de)
    omega = np.einsum("...mic,...jc->...mij", dframe, pk.e)

    gframe = np.einsum(
        "pqc,...mp,...lq,...kc->...mlk",
        imm.table.f, pk.e, pk.e, pk.estar,
    )
    omega_perp = gframe + omega

    h = sff.h
    coeffs = (
        np.moveaxis(hgrad, -4, -1)
        + np.einsum("...kil,...mlj->...kijm", h, omega)
        + np.einsum("...klj,...mli->...kijm", h, omega)
        + np.einsum("...lij,...mlk->...kijm", h, omega_perp)
    )
    return NablaH(coeffs=coeffs)


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CurvaturePacket:
    """Gauss-equation curvature data in the adapted frame.

    `ricci` contracts the Gauss equation directly (2 delta - sum H_p^2 for a
    minimal Lagrangian).  The reference convention printing 3 delta in place
    of 2 delta is inconsistent with tau = 6 - |h|^2 and is reported separately
    as `ricci_reference_convention`, flagged, never used downstream.
    """

    R: np.ndarray                      # (..., 3, 3, 3, 3)
    ricci: np.ndarray                  # (..., 3, 3)
    ricci_reference_convention: np.ndarray
    tau: np.ndarray                    # (...,) scalar curvature (= 2 sum_{i<j} K_ij)
    sectional_sum: np.ndarray          # (...,) sum_{i<j} K_ij = tau / 2
    tau_from_h: np.ndarray             # (...,) 6 - |h|^2
    hsq: np.ndarray

    def gauss_scalar_residual(self):
        return float(np.max(np.abs(self.tau - self.tau_from_h)))

    def ricci_eigenvalues(self):
        return np.linalg.eigvalsh(self.ricci)

    def sectional_range(self):
        """Exact pointwise sectional extremes: on a 3-manifold the curvature
        of the plane normal to n is tau/2 - Ric(n, n)."""
        eigs = self.ricci_eigenvalues()
        return self.tau / 2 - eigs[..., -1], self.tau / 2 - eigs[..., 0]


def curvature_from_sff(sff: SFF) -> CurvaturePacket:
    h = sff.h
    eye = np.eye(3)
    hh = np.einsum("...pik,...pjl->...ijkl", h, h)
    R = (
        np.einsum("ik,jl->ijkl", eye, eye)
        - np.einsum("il,jk->ijkl", eye, eye)
        + hh
        - np.swapaxes(hh, -1, -2)
    )
    square = np.einsum("...pik,...pkj->...ij", h, h)
    ricci = 2.0 * eye - square
    ricci_ref = 3.0 * eye - square
    tau = np.einsum("...ii->...", ricci)
    hsq = sff.norm_sq()
    return CurvaturePacket(
        R=R,
        ricci=ricci,
        ricci_reference_convention=ricci_ref,
        tau=tau,
        sectional_sum=tau / 2.0,
        tau_from_h=6.0 - hsq,
        hsq=hsq,
    )


def curvature(imm, q, **frame_kwargs) -> CurvaturePacket:
    return curvature_from_sff(second_fundamental_form(imm, q, **frame_kwargs))


def sectional_curvature(packet: CurvaturePacket, u, v):
    """Sectional curvature of the plane spanned by frame-component vectors u, v."""
    num = np.einsum("...ijkl,...i,...j,...k,...l->...", packet.R, u, v, u, v)
    uu = np.sum(u * u, axis=-1)
    vv = np.sum(v * v, axis=-1)
    uv = np.sum(u * v, axis=-1)
    return num / (uu * vv - uv**2)


# ---------------------------------------------------------------------------
# Laplace-Beltrami operator on chart scalar fields
# ---------------------------------------------------------------------------

def laplace_beltrami(imm, scalar_field, q, step=None):
    """Laplacian of a chart scalar field at q by central differences.

    Uses the divergence form with analytic metric coefficients from the jets:
    Lap f = g^{ab} d2f_ab + (d_a(sqrt(det g) g^{ab}) / sqrt(det g)) d_b f.
    """
    q = np.asarray(q, dtype=float)
    extents = np.asarray(imm.chart.extents)
    hf = (step if step is not None else FD_STEP_ORDER2) * extents
    hm = FD_STEP_ORDER1 * extents
    dist = np.min(imm.chart.degeneracy_distance(q))
    if dist < 4 * max(hf.max(), hm.max()):
        raise ChartDegeneracyError(
            "stencil would cross the chart-degeneracy locus", float(dist)
        )

    def metric_density(points):
        jt = imm.jet(points, 1, check_domain=False)
        g = np.einsum("...ac,...bc->...ab", jt.d1, jt.d1)
        ginv = np.linalg.inv(g)
        dens = np.sqrt(np.linalg.det(g))
        return dens[..., None, None] * ginv, dens

    def shifted(base, axis, delta):
        qq = np.array(base, copy=True)
        qq[..., axis] = qq[..., axis] + delta
        return qq

    A0, dens0 = metric_density(q)
    ginv0 = A0 / dens0[..., None, None]

    divergence = np.zeros(q.shape[:-1] + (3,))
    for a in range(3):
        Ap, _ = metric_density(shifted(q, a, hm[a]))
        Am, _ = metric_density(shifted(q, a, -hm[a]))
        divergence += (Ap[..., a, :] - Am[..., a, :]) / (2 * hm[a])
    divergence /= dens0[..., None]

    f0 = np.asarray(scalar_field(q), dtype=float)
    grad = np.zeros(q.shape[:-1] + (3,))
    hess = np.zeros(q.shape[:-1] + (3, 3))
    fplus, fminus = [], []
    for a in range(3):
        fp = np.asarray(scalar_field(shifted(q, a, hf[a])), dtype=float)
        fm = np.asarray(scalar_field(shifted(q, a, -hf[a])), dtype=float)
        fplus.append(fp)
        fminus.append(fm)
        grad[..., a] = (fp - fm) / (2 * hf[a])
        hess[..., a, a] = (fp - 2 * f0 + fm) / hf[a] ** 2
    for a in range(3):
        for b in range(a + 1, 3):
            fpp = scalar_field(shifted(shifted(q, a, hf[a]), b, hf[b]))
            fpm = scalar_field(shifted(shifted(q, a, hf[a]), b, -hf[b]))
            fmp = scalar_field(shifted(shifted(q, a, -hf[a]), b, hf[b]))
            fmm = scalar_field(shifted(shifted(q, a, -hf[a]), b, -hf[b]))
            mixed = (np.asarray(fpp) - np.asarray(fpm) - np.asarray(fmp) + np.asarray(fmm)) / (
                4 * hf[a] * hf[b]
            )
            hess[..., a, b] = mixed
            hess[..., b, a] = mixed

    return np.einsum("...ab,...ab->...", ginv0, hess) + np.einsum(
        "...b,...b->...", divergence, grad
    )
