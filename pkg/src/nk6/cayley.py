"""Octonionic kernel: the seven-dimensional cross product and the induced
almost complex structure on the unit six-sphere.

The cross product is defined by totally antisymmetric structure constants
f[i,j,k] in {-1,0,+1} ("multiplication table").  The table is configurable
data; `cayley_dickson_table()` is the default convention and `table_catalog()`
enumerates every valid convention on the standard basis.  On the sphere the
product induces

    J_x U   = x cross U                 (almost complex structure)
    G(X, Y) = tangential part of X cross Y at x

and the identity suite of `verify_nk_identities` certifies that (g, J, G)
is a strict nearly Kahler structure for any validated table.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

__all__ = [
    "MulTable",
    "TableError",
    "cayley_dickson_table",
    "table_catalog",
    "load_table",
    "cross",
    "almost_complex",
    "g_tensor",
    "tangent_project",
    "check_sphere_point",
    "check_tangent",
    "random_tangent",
    "lagrangian_frame",
    "geodesic",
    "parallel_transport",
    "g_tensor_fd",
    "nabla_g_fd",
    "IdentityReport",
    "verify_nk_identities",
]

TOL_UNIT = 1e-12

# One oriented Fano line per row; the sign fixes e_i x e_j = +-e_k.
# This is the Cayley-Dickson doubling of the quaternions: units 1..3 are
# the imaginary quaternions, units 4..7 the doubled half.
CAYLEY_DICKSON_TRIPLES = (
    ((1, 2, 3), 1),
    ((1, 4, 5), 1),
    ((1, 6, 7), -1),
    ((2, 4, 6), 1),
    ((2, 5, 7), 1),
    ((3, 4, 7), 1),
    ((3, 5, 6), -1),
)


class TableError(ValueError):
    """Raised when structure constants fail the cross-product axioms."""


def _dense_from_triples(triples):
    f = np.zeros((7, 7, 7))
    for (i, j, k), s in triples:
        even = ((i, j, k), (j, k, i), (k, i, j))
        odd = ((j, i, k), (i, k, j), (k, j, i))
        for a, b, c in even:
            f[a - 1, b - 1, c - 1] = s
        for a, b, c in odd:
            f[a - 1, b - 1, c - 1] = -s
    return f


def _canonical_triples(triples):
    out = []
    for (i, j, k), s in triples:
        arr = [i, j, k]
        sign = 1
        for a in range(3):
            for b in range(a + 1, 3):
                if arr[a] > arr[b]:
                    arr[a], arr[b] = arr[b], arr[a]
                    sign = -sign
        out.append(((arr[0], arr[1], arr[2]), s * sign))
    return tuple(sorted(out))


@dataclass(frozen=True)
class MulTable:
    """Validated, immutable structure constants of the R^7 cross product."""

    f: np.ndarray = field(repr=False)
    triples: tuple = ()
    source: str = "builtin"

    @classmethod
    def from_triples(cls, triples, source="builtin") -> "MulTable":
        triples = _canonical_triples(triples)
        table = cls(f=_dense_from_triples(triples), triples=triples, source=source)
        table.validate()
        table.f.setflags(write=False)
        return table

    def validate(self) -> None:
        """Total antisymmetry plus the cross-product axiom, checked exactly.

        |u x v|^2 = |u|^2 |v|^2 - <u,v>^2 is biquadratic in (u, v), so
        verifying it on every basis vector and every two-element sum of
        basis vectors decides the identity.
        """
        f = self.f
        if f.shape != (7, 7, 7):
            raise TableError("structure constants must be a 7x7x7 array")
        if not np.all(np.isin(f, (-1.0, 0.0, 1.0))):
            raise TableError("structure constants must lie in {-1, 0, +1}")
        for perm, sign in ((
            (0, 1, 2), 1), ((1, 2, 0), 1), ((2, 0, 1), 1),
            ((1, 0, 2), -1), ((0, 2, 1), -1), ((2, 1, 0), -1),
        ):
            if not np.array_equal(np.transpose(f, perm), sign * f):
                raise TableError("structure constants are not totally antisymmetric")
        eye = np.eye(7)
        test = np.concatenate(
            [eye, [eye[i] + eye[j] for i in range(7) for j in range(i + 1, 7)]]
        )
        w = np.einsum("ijk,ui,vj->uvk", f, test, test)
        lhs = np.sum(w * w, axis=-1)
        gram = test @ test.T
        norms = np.diag(gram)
        rhs = np.outer(norms, norms) - gram**2
        if np.max(np.abs(lhs - rhs)) > 1e-9:
            raise TableError(
                "cross-product axiom violated: |u x v|^2 != |u|^2|v|^2 - <u,v>^2"
            )

    def describe(self) -> str:
        rows = ", ".join(
            f"e{i}xe{j}={'-' if s < 0 else ''}e{k}" for (i, j, k), s in self.triples
        )
        return f"MulTable[{self.source}: {rows}]"


@lru_cache(maxsize=1)
def cayley_dickson_table() -> MulTable:
    return MulTable.from_triples(CAYLEY_DICKSON_TRIPLES, source="cayley-dickson")


@lru_cache(maxsize=1)
def table_catalog() -> tuple[MulTable, ...]:
    """Every valid multiplication table on the standard basis.

    Orientation flips of the seven Fano lines leave 16 valid tables, and
    basis permutations move the line set around; together they yield 480
    distinct tables.  Listed deterministically, default convention first.
    """
    lines = tuple(t for t, _ in CAYLEY_DICKSON_TRIPLES)
    oriented = []
    for signs in itertools.product((1, -1), repeat=7):
        triples = tuple(zip(lines, signs))
        f = _dense_from_triples(triples)
        try:
            MulTable(f=f, triples=_canonical_triples(triples)).validate()
        except TableError:
            continue
        oriented.append(triples)
    seen = set()
    for perm in itertools.permutations(range(1, 8)):
        relabel = {i + 1: perm[i] for i in range(7)}
        for triples in oriented:
            mapped = _canonical_triples(
                [((relabel[i], relabel[j], relabel[k]), s) for (i, j, k), s in triples]
            )
            seen.add(mapped)
    default = cayley_dickson_table()
    rest = sorted(t for t in seen if t != default.triples)
    catalog = [default]
    catalog += [MulTable.from_triples(t, source="catalog") for t in rest]
    return tuple(catalog)


def load_table(path) -> MulTable:
    """Load structure constants from a plain-text file.

    Each non-comment line reads "i j k s" with 1-based indices and
    s in {+1, -1}, listing f_ijk = s once per line with i < j; every
    unlisted triple is zero.
    """
    triples = []
    seen = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise TableError(f"{path}:{lineno}: expected 'i j k s'")
        try:
            i, j, k = (int(p) for p in parts[:3])
            s = int(float(parts[3]))
        except ValueError as exc:
            raise TableError(f"{path}:{lineno}: non-numeric entry") from exc
        if len({i, j, k}) != 3 or not all(1 <= t <= 7 for t in (i, j, k)):
            raise TableError(f"{path}:{lineno}: indices must be distinct, in 1..7")
        if s not in (1, -1):
            raise TableError(f"{path}:{lineno}: sign must be +1 or -1")
        key = tuple(sorted((i, j, k)))
        canon = _canonical_triples([((i, j, k), s)])[0]
        if key in seen and seen[key] != canon[1]:
            raise TableError(f"{path}:{lineno}: conflicting sign for triple {key}")
        seen[key] = canon[1]
        triples.append(((i, j, k), s))
    if not triples:
        raise TableError(f"{path}: no triples found")
    return MulTable.from_triples(triples, source=str(path))


# ---------------------------------------------------------------------------
# products and the nearly Kahler tensors
# ---------------------------------------------------------------------------

def cross(u, v, table: MulTable):
    """Cross product of batched 7-vectors, u x v."""
    return np.einsum("ijk,...i,...j->...k", table.f, u, v)


def tangent_project(x, v):
    """Project v onto the tangent space of the sphere at x."""
    return v - np.sum(v * x, axis=-1, keepdims=True) * x


def check_sphere_point(x, tol=TOL_UNIT):
    x = np.asarray(x, dtype=float)
    err = np.max(np.abs(np.sum(x * x, axis=-1) - 1.0))
    if err > tol:
        raise ValueError(f"point not on the unit sphere: |x|^2 - 1 = {err:.3e}")
    return x


def check_tangent(x, u, tol=1e-10):
    u = np.asarray(u, dtype=float)
    err = np.max(np.abs(np.sum(x * u, axis=-1)))
    if err > tol:
        raise ValueError(f"vector not tangent at base point: <x,u> = {err:.3e}")
    return u


def almost_complex(x, u, table: MulTable, check=True):
    """J_x u = x cross u for u tangent at x."""
    if check:
        x = check_sphere_point(x)
        u = check_tangent(x, u)
    return cross(x, u, table)


def g_tensor(x, X, Y, table: MulTable, check=True):
    """G(X, Y) at x: the tangential part of X cross Y.

    Closed form for the covariant derivative of J applied to Y; the
    difference-quotient oracle `g_tensor_fd` guards this formula.
    """
    if check:
        x = check_sphere_point(x)
        X = check_tangent(x, X)
        Y = check_tangent(x, Y)
    return tangent_project(x, cross(X, Y, table))


# ---------------------------------------------------------------------------
# sphere transport and finite-difference oracles
# ---------------------------------------------------------------------------

def geodesic(x, X, t):
    """Unit-speed great circle through x with initial unit velocity X."""
    t = np.asarray(t)[..., None]
    return np.cos(t) * x + np.sin(t) * X


def parallel_transport(x, X, t, v):
    """Parallel transport of tangent v along the geodesic (x, X) to time t.

    X must be a unit tangent; the component of v along X rotates with the
    velocity while the orthogonal part stays fixed.
    """
    t = np.asarray(t)[..., None]
    a = np.sum(v * X, axis=-1, keepdims=True)
    v_perp = v - a * X
    velocity = -np.sin(t) * x + np.cos(t) * X
    return v_perp + a * velocity


def _geodesic_data(x, X_dir, step):
    n = np.linalg.norm(X_dir, axis=-1, keepdims=True)
    Xu = X_dir / n
    return Xu, n[..., 0], geodesic(x, Xu, step), geodesic(x, Xu, -step)


def g_tensor_fd(x, X, Y, table: MulTable, step=1e-5):
    """Difference-quotient evaluation of (covariant derivative of J)(Y) along X.

    Y is parallel-transported along the geodesic with velocity X, so the
    J-correction term vanishes and the central difference of J(Y) projected
    back to the tangent space at x approximates G(X, Y).
    """
    Xu, speed, xp, xm = _geodesic_data(x, X, step)
    Yp = parallel_transport(x, Xu, step, Y)
    Ym = parallel_transport(x, Xu, -step, Y)
    dJY = (cross(xp, Yp, table) - cross(xm, Ym, table)) / (2 * step)
    return tangent_project(x, dJY) * speed[..., None]


def nabla_g_fd(x, X, Y, Z, table: MulTable, step=1e-5):
    """Central difference of the covariant derivative of G along X.

    Transports Y and Z in parallel, differentiates t -> G(Y(t), Z(t)) along
    the geodesic, and projects to the tangent space at x.
    """
    Xu, speed, xp, xm = _geodesic_data(x, X, step)
    Yp, Ym = (parallel_transport(x, Xu, s, Y) for s in (step, -step))
    Zp, Zm = (parallel_transport(x, Xu, s, Z) for s in (step, -step))
    Gp = g_tensor(xp, Yp, Zp, table, check=False)
    Gm = g_tensor(xm, Ym, Zm, table, check=False)
    return tangent_project(x, (Gp - Gm) / (2 * step)) * speed[..., None]


def random_tangent(x, rng, unit=False):
    v = tangent_project(x, rng.normal(size=x.shape))
    if unit:
        v = v / np.linalg.norm(v, axis=-1, keepdims=True)
    return v


def lagrangian_frame(x, table: MulTable, rng=None):
    """Orthonormal tangent triple (e_1, e_2, e_3) at x with J e_i orthogonal
    to every e_j.  Such a frame spans a Lagrangian subspace of the tangent
    space and exists at every point."""
    if rng is None:
        rng = np.random.default_rng(0)
    x = check_sphere_point(x)
    frame = []
    span = [x]
    for _ in range(3):
        for _attempt in range(50):
            v = rng.normal(size=7)
            for w in span:
                v = v - (v @ w) * w
            n = np.linalg.norm(v)
            if n > 1e-6:
                v = v / n
                break
        else:  # pragma: no cover - random degeneracy is measure zero
            raise RuntimeError("failed to extend Lagrangian frame")
        frame.append(v)
        jv = cross(x, v, table)
        span.extend([v, jv / np.linalg.norm(jv)])
    return np.stack(frame)


# ---------------------------------------------------------------------------
# identity suite
# ---------------------------------------------------------------------------

IDENTITY_FORMULAS = {
    "antisymmetry": "G(X,Y) + G(Y,X) = 0",
    "complex_anticommutation": "G(X,JY) + J G(X,Y) = 0",
    "skew_adjointness": "g(G(X,Y),Z) + g(G(X,Z),Y) = 0",
    "product_expansion": (
        "g(G(X,Y),G(Z,W)) = g(X,Z)g(Y,W) - g(X,W)g(Z,Y)"
        " + g(JX,Z)g(Y,JW) - g(JX,W)g(Y,JZ)"
    ),
    "covariant_derivative": "(nabla_X G)(Y,Z) = g(Y,JZ)X + g(X,Z)JY - g(X,Y)JZ",
    "lagrangian_frame_products": "g(G(e_i,e_j),G(e_k,e_l)) = d_ik d_jl - d_il d_jk",
}


@dataclass(frozen=True)
class IdentityReport:
    """Maximum residual of each structure identity over the sampled data."""

    residuals: dict
    tolerances: dict
    n_samples: int
    seed: int
    fd_step: float

    @property
    def passed(self) -> bool:
        return all(self.residuals[k] <= self.tolerances[k] for k in self.residuals)

    def failures(self):
        return [k for k in self.residuals if self.residuals[k] > self.tolerances[k]]

    def rows(self):
        return [
            {
                "identity": name,
                "formula": IDENTITY_FORMULAS[name],
                "max_residual": self.residuals[name],
                "tolerance": self.tolerances[name],
                "passed": self.residuals[name] <= self.tolerances[name],
            }
            for name in self.residuals
        ]


def verify_nk_identities(
    table: MulTable,
    n_samples: int = 1000,
    seed: int = 0,
    fd_step: float = 1e-5,
    tol_algebraic: float = 1e-12,
    tol_fd: float = 1e-6,
) -> IdentityReport:
    """Check the nearly Kahler identity suite at random points and vectors.

    Algebraic identities are sampled in batch; the covariant-derivative
    identity uses the parallel-transport difference quotient.  Residuals are
    reported, never raised.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n_samples, 7))
    x /= np.linalg.norm(x, axis=-1, keepdims=True)
    X, Y, Z, W = (random_tangent(x, rng) for _ in range(4))

    g = lambda a, b: np.sum(a * b, axis=-1)  # noqa: E731
    J = lambda v: cross(x, v, table)  # noqa: E731
    G = lambda a, b: g_tensor(x, a, b, table, check=False)  # noqa: E731

    res = {}
    res["antisymmetry"] = float(np.max(np.abs(G(X, Y) + G(Y, X))))
    res["complex_anticommutation"] = float(np.max(np.abs(G(X, J(Y)) + J(G(X, Y)))))
    res["skew_adjointness"] = float(np.max(np.abs(g(G(X, Y), Z) + g(G(X, Z), Y))))
    expansion = (
        g(X, Z) * g(Y, W)
        - g(X, W) * g(Z, Y)
        + g(J(X), Z) * g(Y, J(W))
        - g(J(X), W) * g(Y, J(Z))
    )
    res["product_expansion"] = float(np.max(np.abs(g(G(X, Y), G(Z, W)) - expansion)))

    nabla = nabla_g_fd(x, X, Y, Z, table, step=fd_step)
    rhs = (
        g(Y, J(Z))[..., None] * X
        + g(X, Z)[..., None] * J(Y)
        - g(X, Y)[..., None] * J(Z)
    )
    res["covariant_derivative"] = float(np.max(np.abs(nabla - rhs)))

    # delta-pattern of G-products on a Lagrangian frame
    n_frames = min(n_samples, 8)
    worst = 0.0
    eye = np.eye(3)
    for p in range(n_frames):
        e = lagrangian_frame(x[p], table, rng)
        Ge = np.stack([
            [g_tensor(x[p], e[i], e[j], table, check=False) for j in range(3)]
            for i in range(3)
        ])
        prod = np.einsum("ijc,klc->ijkl", Ge, Ge)
        target = np.einsum("ik,jl->ijkl", eye, eye) - np.einsum("il,jk->ijkl", eye, eye)
        worst = max(worst, float(np.max(np.abs(prod - target))))
    res["lagrangian_frame_products"] = worst

    tol = {name: tol_algebraic for name in res}
    tol["covariant_derivative"] = tol_fd
    return IdentityReport(
        residuals=res, tolerances=tol, n_samples=n_samples, seed=seed, fd_step=fd_step
    )
