"""Canonical adapted basis of a Lagrangian second fundamental form.

At a point, the cubic form f(u) = <h(u,u), Ju> attains a maximum Theta on the
unit tangent sphere; the maximizer e1, together with the eigenvectors of the
associated shape operator on its orthogonal complement, normalizes h to a
four-parameter form (lambda1, lambda2, mu1, mu2).  This module extracts that
normal form deterministically and provides both the direct matrix invariants
(commutators, mutual traces) and their closed polynomial forms, each checked
against the other in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "CanonicalData",
    "HMatrices",
    "CommutatorInvariants",
    "ClosedForms",
    "ReconstructionError",
    "cubic_form",
    "maximize_theta",
    "canonical_basis",
    "h_matrices",
    "reconstruct_sff",
    "commutator_invariant_direct",
    "closed_forms",
]


class ReconstructionError(RuntimeError):
    """The extracted normal form does not reproduce the input tensor."""


def _h_array(sff_like):
    h = sff_like.h if hasattr(sff_like, "h") else np.asarray(sff_like, dtype=float)
    if h.shape[-3:] != (3, 3, 3):
        raise ValueError("second-fundamental-form coefficients must end in (3,3,3)")
    return h


def cubic_form(h, u):
    """f(u) = sum_{kij} h[k,i,j] u_k u_i u_j, the value <h(u,u), Ju>."""
    return np.einsum("...kij,...k,...i,...j->...", h, u, u, u)


@lru_cache(maxsize=None)
def _sphere_grid(n_polar=64, n_azimuth=128):
    theta = (np.arange(n_polar) + 0.5) * np.pi / n_polar
    phi = np.arange(n_azimuth) * 2 * np.pi / n_azimuth
    T, P = np.meshgrid(theta, phi, indexing="ij")
    grid = np.stack(
        [np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=-1
    ).reshape(-1, 3)
    return np.concatenate([grid, [[1, 0, 0], [0, 1, 0], [0, 0, 1]]])


@lru_cache(maxsize=None)
def _grid_monomials(n_polar=64, n_azimuth=128):
    # cubic monomials u_k u_i u_j per grid direction, for BLAS-friendly scans
    U = _sphere_grid(n_polar, n_azimuth)
    return np.einsum("pk,pi,pj->pkij", U, U, U).reshape(-1, 27)


def _cross3(u, v):
    return np.stack(
        [
            u[..., 1] * v[..., 2] - u[..., 2] * v[..., 1],
            u[..., 2] * v[..., 0] - u[..., 0] * v[..., 2],
            u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0],
        ],
        axis=-1,
    )


def _tangent_basis(u):
    helper = np.eye(3)[np.argmin(np.abs(u), axis=-1)]
    t1 = helper - np.sum(helper * u, axis=-1, keepdims=True) * u
    t1 /= np.linalg.norm(t1, axis=-1, keepdims=True)
    return t1, _cross3(u, t1)


def maximize_theta(sff_like, grid=(64, 128), max_newton=60, tol_grad=1e-12,
                   n_candidates=8):
    """Global maximum of the cubic form over the unit tangent sphere.

    Deterministic: a fixed spherical grid ranks basins (the form is odd, so
    grid values are folded by sign), the top `n_candidates` starts are each
    polished by a safeguarded Newton iteration on the sphere to gradient norm
    below `tol_grad`, and the best polished value wins.  Refining several
    starts resolves near-ties between distinct maxima that fall below the
    grid's sampling error.  Returns (maximizer, theta); a vanishing form
    yields (e1, 0).
    """
    h = _h_array(sff_like)
    batch = h.shape[:-3]
    scale = np.sqrt(np.sum(h**2, axis=(-3, -2, -1)))
    U = _sphere_grid(*grid)
    mono = _grid_monomials(*grid)

    k = min(n_candidates, mono.shape[0])
    hflat = np.ascontiguousarray(h.reshape(batch + (27,)))
    flat = hflat.reshape(-1, 27)
    best = np.empty((flat.shape[0], k), dtype=int)
    sign = np.empty((flat.shape[0], k))
    chunk = max(1, int(2.5e7 // mono.shape[0]))
    for lo in range(0, flat.shape[0], chunk):
        fvals = flat[lo : lo + chunk] @ mono.T
        idx = np.argpartition(-np.abs(fvals), k - 1, axis=-1)[:, :k]
        idx.sort(axis=-1)  # deterministic candidate order
        best[lo : lo + chunk] = idx
        sign[lo : lo + chunk] = np.take_along_axis(fvals, idx, axis=-1)
    # candidate axis joins the batch for the Newton polish
    h = np.broadcast_to(h.reshape(batch + (1, 3, 3, 3)), batch + (k, 3, 3, 3))
    scale_b = np.broadcast_to(scale.reshape(batch + (1,)), batch + (k,))
    sign = np.sign(sign.reshape(batch + (k,)))
    sign = np.where(sign == 0.0, 1.0, sign)
    u = U[best.reshape(batch + (k,))] * sign[..., None]

    for _ in range(max_newton):
        v2 = np.einsum("...kij,...i,...j->...k", h, u, u)
        f = np.sum(v2 * u, axis=-1)
        grad = 3.0 * (v2 - f[..., None] * u)
        if np.max(np.abs(grad)) <= 0.1 * tol_grad:
            break
        W = 6.0 * np.einsum("...kij,...j->...ki", h, u) - 3.0 * f[..., None, None] * np.eye(3)
        t1, t2 = _tangent_basis(u)
        T = np.stack([t1, t2], axis=-2)
        H2 = np.einsum("...ac,...cd,...bd->...ab", T, W, T)
        g2 = np.einsum("...ac,...c->...a", T, grad)
        det = H2[..., 0, 0] * H2[..., 1, 1] - H2[..., 0, 1] * H2[..., 1, 0]
        safe = np.abs(det) > 1e-14 * np.maximum(scale_b, 1.0) ** 2
        det = np.where(safe, det, 1.0)
        s0 = (-g2[..., 0] * H2[..., 1, 1] + g2[..., 1] * H2[..., 0, 1]) / det
        s1 = (-g2[..., 1] * H2[..., 0, 0] + g2[..., 0] * H2[..., 1, 0]) / det
        step = s0[..., None] * t1 + s1[..., None] * t2
        # fall back to a short ascent step where the tangent Hessian degenerates
        ascent = grad / np.maximum(scale_b, 1e-30)[..., None] * 0.05
        step = np.where(safe[..., None], step, ascent)
        norm = np.linalg.norm(step, axis=-1, keepdims=True)
        step = np.where(norm > 0.2, step * (0.2 / np.maximum(norm, 1e-30)), step)
        unew = u + step
        unew /= np.linalg.norm(unew, axis=-1, keepdims=True)
        fnew = cubic_form(h, unew)
        u = np.where((fnew >= f - 1e-14 * np.maximum(scale_b, 1.0))[..., None], unew, u)

    ffinal = cubic_form(h, u)
    winner = np.argmax(ffinal, axis=-1)
    u = np.take_along_axis(u, winner[..., None, None], axis=-2)[..., 0, :]
    theta = np.take_along_axis(ffinal, winner[..., None], axis=-1)[..., 0]
    zero = scale < 1e-15
    if np.any(zero):
        e1 = np.zeros(batch + (3,))
        e1[..., 0] = 1.0
        u = np.where(zero[..., None], e1, u)
        theta = np.where(zero, 0.0, theta)
    return u, theta


# ---------------------------------------------------------------------------
# normal form
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CanonicalData:
    """Normal-form invariants and the basis realizing them (rows e1, e2, e3)."""

    basis: np.ndarray
    lambda1: float
    lambda2: float
    mu1: float
    mu2: float
    reconstruction_residual: float = 0.0

    @property
    def theta(self):
        return self.lambda1 + self.lambda2

    def tuple(self):
        return (self.lambda1, self.lambda2, self.mu1, self.mu2)

    def constraint_slack(self):
        """Worst violation of the normal-form inequality constraints.

        theta >= 0, 3*lambda1 + lambda2 >= 0, 3*lambda2 + lambda1 >= 0 and
        |mu_i| <= theta; nonpositive slack means all constraints hold.
        """
        l1, l2, m1, m2 = self.tuple()
        violations = [
            -(l1 + l2),
            -(3 * l1 + l2),
            -(3 * l2 + l1),
            abs(m1) - (l1 + l2),
            abs(m2) - (l1 + l2),
        ]
        return max(violations)

    def validate(self, tol=1e-8):
        slack = self.constraint_slack()
        if slack > tol:
            raise ValueError(f"normal-form constraints violated by {slack:.3e}")
        if self.reconstruction_residual > tol:
            raise ReconstructionError(
                f"normal form does not reproduce input: residual "
                f"{self.reconstruction_residual:.3e}"
            )
        return slack


@dataclass(frozen=True)
class HMatrices:
    """Shape-operator matrices H[k] = (h^{k*}_{ij}) in the canonical basis."""

    H: np.ndarray  # (..., 3, 3, 3)

    @property
    def H1(self):
        return self.H[..., 0, :, :]

    @property
    def H2(self):
        return self.H[..., 1, :, :]

    @property
    def H3(self):
        return self.H[..., 2, :, :]


def _as_tuple4(source):
    if isinstance(source, CanonicalData):
        return source.tuple()
    if isinstance(source, (tuple, list)) and len(source) == 4:
        return tuple(np.asarray(v, dtype=float) for v in source)
    arr = np.asarray(source, dtype=float)
    if arr.shape[-1] == 4:
        return tuple(arr[..., i] for i in range(4))
    raise ValueError("expected CanonicalData or a (lambda1, lambda2, mu1, mu2) tuple")


def h_matrices(source) -> HMatrices:
    """Explicit matrices of the normal form; traces vanish by construction."""
    l1, l2, m1, m2 = _as_tuple4(source)
    batch = np.broadcast(l1, l2, m1, m2).shape
    z = np.zeros(batch)
    l1, l2, m1, m2 = (np.broadcast_to(v, batch) for v in (l1, l2, m1, m2))
    H = np.stack(
        [
            np.stack([np.stack([l1 + l2, z, z], -1),
                      np.stack([z, -l1, z], -1),
                      np.stack([z, z, -l2], -1)], -2),
            np.stack([np.stack([z, -l1, z], -1),
                      np.stack([-l1, m1, m2], -1),
                      np.stack([z, m2, -m1], -1)], -2),
            np.stack([np.stack([z, z, -l2], -1),
                      np.stack([z, m2, -m1], -1),
                      np.stack([-l2, -m1, -m2], -1)], -2),
        ],
        axis=-3,
    )
    return HMatrices(H=H)


def reconstruct_sff(source, basis=None):
    """Second-fundamental-form coefficients generated by a normal-form tuple.

    With `basis` (rows e1, e2, e3 in some ambient frame) the tensor is
    expressed back in that ambient frame.
    """
    h = h_matrices(source).H
    if basis is None:
        return h
    R = np.asarray(basis, dtype=float)
    return np.einsum("...KIJ,...Ka,...Ib,...Jc->...abc", h, R, R, R)


def canonical_basis(sff_like, tol=1e-8) -> CanonicalData:
    """Extract the normal form of a single second fundamental form.

    e1 maximizes the cubic form; e2, e3 diagonalize the shape operator of
    J e1 restricted to the orthogonal complement (eigenvalues -lambda1 and
    -lambda2 with lambda1 >= lambda2).  When that restriction is umbilic the
    pair is rotated so that mu2 = 0 and mu1 >= 0; remaining sign freedom is
    fixed by making mu1 and mu2 nonnegative.  Raises ReconstructionError when
    the reassembled tensor misses the input beyond `tol`.
    """
    h = _h_array(sff_like)
    if h.ndim != 3:
        raise ValueError("canonical_basis expects a single (3,3,3) tensor")
    scale = float(np.sqrt(np.sum(h**2)))
    if scale < 1e-14:
        return CanonicalData(basis=np.eye(3), lambda1=0.0, lambda2=0.0, mu1=0.0, mu2=0.0)

    e1, theta = maximize_theta(h)
    B = np.einsum("kij,k->ij", h, e1)
    t1, t2 = _tangent_basis(e1)
    T = np.stack([t1, t2])
    B2 = T @ B @ T.T
    w, vecs = np.linalg.eigh(B2)
    e2 = vecs[0, 0] * t1 + vecs[1, 0] * t2
    e3 = vecs[0, 1] * t1 + vecs[1, 1] * t2
    lambda1, lambda2 = -w[0], -w[1]

    def mu(e2v, e3v):
        m1 = cubic_form(h, e2v)
        m2 = float(np.einsum("kij,k,i,j->", h, e3v, e2v, e2v))
        return float(m1), m2

    for ev in (e2, e3):  # deterministic eigenvector sign
        lead = np.argmax(np.abs(ev))
        if ev[lead] < 0:
            ev *= -1.0

    if abs(w[0] - w[1]) < 1e-8 * max(1.0, scale):
        m1, m2 = mu(e2, e3)
        ang = np.arctan2(m2, m1) / 3.0
        e2, e3 = (
            np.cos(ang) * e2 + np.sin(ang) * e3,
            -np.sin(ang) * e2 + np.cos(ang) * e3,
        )
    m1, m2 = mu(e2, e3)
    if m1 < -1e-12 * max(1.0, scale):
        e2 = -e2
        m1, m2 = mu(e2, e3)
    if m2 < -1e-12 * max(1.0, scale):
        e3 = -e3
        m1, m2 = mu(e2, e3)

    basis = np.stack([e1, e2, e3])
    data = CanonicalData(
        basis=basis,
        lambda1=float(lambda1),
        lambda2=float(lambda2),
        mu1=m1,
        mu2=m2,
    )
    residual = float(
        np.sqrt(np.sum((h - reconstruct_sff(data.tuple(), basis)) ** 2))
    )
    data = CanonicalData(
        basis=basis,
        lambda1=float(lambda1),
        lambda2=float(lambda2),
        mu1=m1,
        mu2=m2,
        reconstruction_residual=residual,
    )
    if residual > tol * max(1.0, scale):
        raise ReconstructionError(
            f"normal form failed to reproduce the input tensor "
            f"(residual {residual:.3e}, scale {scale:.3e})"
        )
    return data


# ---------------------------------------------------------------------------
# matrix invariants: direct and closed forms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CommutatorInvariants:
    """Q = sum_{ij} N([H_i,H_j]) + sum_{ij} trace(H_i H_j)^2 by direct matrix work."""

    Q: np.ndarray
    S: np.ndarray          # (..., 3, 3) mutual traces
    N_terms: np.ndarray    # (..., 3) squared norms of the three commutators


def commutator_invariant_direct(hm) -> CommutatorInvariants:
    H = hm.H if isinstance(hm, HMatrices) else np.asarray(hm, dtype=float)
    HH = np.einsum("...iab,...jbc->...ijac", H, H)
    comm = HH - np.swapaxes(HH, -4, -3)
    N = np.sum(comm**2, axis=(-2, -1))
    S = np.einsum("...ijaa->...ij", HH)
    Q = np.sum(N, axis=(-2, -1)) + np.sum(S**2, axis=(-2, -1))
    N_terms = np.stack([N[..., 0, 1], N[..., 0, 2], N[..., 1, 2]], axis=-1)
    return CommutatorInvariants(Q=Q, S=S, N_terms=N_terms)


@dataclass(frozen=True)
class ClosedForms:
    """Polynomial values of the invariants in the normal-form parameters."""

    hsq: np.ndarray
    q_closed: np.ndarray
    r_residual: np.ndarray
    r_terms: tuple          # the three nonnegative remainder terms
    q_from_regrouping: np.ndarray

    def regrouping_residual(self):
        denom = np.maximum(np.abs(self.q_closed), 1.0)
        return float(np.max(np.abs(self.q_closed - self.q_from_regrouping) / denom))


def closed_forms(source) -> ClosedForms:
    """Closed forms of |h|^2 and Q, plus the nonnegative remainder of the
    Laplacian regrouping.

    The quartic mu-coupling coefficient is 18(lambda1^2 + lambda2^2); the
    direct matrix computation arbitrates this normalization (the regrouping
    identity below fails for any other reading).  The remainder satisfies

        q_closed = 3 hsq^2 - (9/2) theta^2 hsq - r_residual

    identically, and each remainder term is a nonnegative polynomial.
    """
    l1, l2, m1, m2 = _as_tuple4(source)
    m = m1 * m1 + m2 * m2
    hsq = 4 * l1 * l1 + 4 * l2 * l2 + 2 * l1 * l2 + 4 * m
    quartic = l1**4 + l1**3 * l2 + l1**2 * l2**2 + l1 * l2**3 + l2**4
    q_closed = 24 * quartic + 18 * (l1 * l1 + l2 * l2) * m - 36 * l1 * l2 * m + 24 * m * m
    term_mu4 = 24 * m * m
    term_shear = 3 * (l1 - l2) ** 2 * (2 * l1 * l1 + 2 * l2 * l2 - 3 * l1 * l2)
    term_mix = 12 * (5 * l1 * l1 + 5 * l2 * l2 + 4 * l1 * l2) * m
    r_residual = term_mu4 + term_shear + term_mix
    theta_sq = (l1 + l2) ** 2
    q_regrouped = 3 * hsq * hsq - 4.5 * theta_sq * hsq - r_residual
    return ClosedForms(
        hsq=hsq,
        q_closed=q_closed,
        r_residual=r_residual,
        r_terms=(term_mu4, term_shear, term_mix),
        q_from_regrouping=q_regrouped,
    )
