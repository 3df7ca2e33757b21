"""Round-sphere primitives: frames, equators, gnomonic charts, the projective
action on points, and quadrature rules.

Points on S^n are plain unit vectors in R^(n+1).  An equator is the great
hypersphere cut out by a unit normal v; its canonical representative has the
first nonzero coordinate of v positive, so v and -v name the same equator.
The gnomonic chart at p parameterizes the open hemisphere around p by the
tangent space, sending straight lines through the origin of the chart to great
circles; all metric differentiation elsewhere in the package happens in these
charts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

from .tableio import write_csv
from .tensor_core import DegenerateInputError, DimensionError, GroupElement

__all__ = [
    "check_unit",
    "tangent_frame",
    "Equator",
    "great_circle",
    "GnomonicChart",
    "chart_at",
    "phi_T",
    "dphi_T",
    "jacobian_density",
    "equator_image",
    "QuadratureRule",
    "equator_quadrature",
    "sphere_quadrature",
    "sphere_volume",
    "random_unit",
    "random_equator",
]

CHART_RADIUS = 10.0


def check_unit(p, tol: float = 1e-10) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if abs(p @ p - 1.0) > tol:
        raise DegenerateInputError(f"vector has |p|^2 = {p @ p:.12g}, not unit")
    return p


def random_unit(rng, dim: int) -> np.ndarray:
    while True:
        v = rng.standard_normal(dim)
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            return v / norm


def tangent_frame(p) -> np.ndarray:
    """Deterministic orthonormal basis of the tangent space at p, as rows.

    Gram-Schmidt applied to the standard basis with the coordinate most
    aligned with p dropped (ties broken by lowest index).
    """
    p = check_unit(p)
    dim = p.shape[0]
    drop = int(np.argmax(np.abs(p)))
    frame = []
    for j in range(dim):
        if j == drop:
            continue
        v = np.zeros(dim)
        v[j] = 1.0
        v -= (v @ p) * p
        for u in frame:
            v -= (v @ u) * u
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            raise DegenerateInputError("tangent frame construction degenerated")
        frame.append(v / norm)
    return np.array(frame)


@dataclass(frozen=True)
class Equator:
    """Great hypersphere of S^n, stored through its canonical unit normal."""

    normal: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.normal, dtype=float)
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            raise DegenerateInputError("equator normal must be nonzero")
        v = v / norm
        for comp in v:
            if abs(comp) > 1e-12:
                if comp < 0:
                    v = -v
                break
        v.flags.writeable = False
        object.__setattr__(self, "normal", v)

    @property
    def n(self) -> int:
        return self.normal.shape[0] - 1

    def basis(self) -> np.ndarray:
        """Orthonormal basis of the hyperplane of the equator, as rows."""
        return tangent_frame(self.normal)

    def contains(self, p, tol: float = 1e-10) -> bool:
        return abs(float(np.asarray(p, float) @ self.normal)) <= tol

    def point(self, coords) -> np.ndarray:
        """Ambient point from unit coordinates in the equator hyperplane."""
        c = check_unit(coords)
        return c @ self.basis()


def random_equator(rng, n: int) -> Equator:
    return Equator(random_unit(rng, n + 1))


def great_circle(p, u, t):
    """Arc-length great circle cos(t) p + sin(t) u; u must be unit and tangent at p."""
    p = check_unit(p)
    u = np.asarray(u, dtype=float)
    if abs(u @ u - 1.0) > 1e-10 or abs(p @ u) > 1e-10:
        raise DegenerateInputError("direction must be a unit vector orthogonal to p")
    t = np.asarray(t, dtype=float)
    return np.cos(t)[..., None] * p + np.sin(t)[..., None] * u


@dataclass(frozen=True)
class GnomonicChart:
    """Gnomonic chart centered at a point, with an orthonormal tangent frame.

    ``point(x) = (center + x @ frame) / |center + x @ frame|`` maps chart
    coordinates to the open hemisphere around the center; the chart pushes
    straight lines to great circles.  ``frame`` has the n frame vectors as
    rows.
    """

    center: np.ndarray
    frame: np.ndarray

    def __post_init__(self):
        c = check_unit(self.center)
        E = np.asarray(self.frame, dtype=float)
        n = c.shape[0] - 1
        if E.shape != (n, n + 1):
            raise DimensionError(f"frame must be ({n}, {n + 1}), got {E.shape}")
        gram = E @ E.T
        if np.max(np.abs(gram - np.eye(n))) > 1e-10 or np.max(np.abs(E @ c)) > 1e-10:
            raise DegenerateInputError("frame must be orthonormal and tangent at the center")
        c = c.copy()
        E = E.copy()
        c.flags.writeable = False
        E.flags.writeable = False
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "frame", E)

    @property
    def n(self) -> int:
        return self.frame.shape[0]

    def point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        q = self.center + x @ self.frame
        return q / np.linalg.norm(q, axis=-1, keepdims=True) if q.ndim > 1 else q / np.linalg.norm(q)

    def coords(self, p) -> np.ndarray:
        p = check_unit(p)
        t = float(p @ self.center)
        if t <= 1e-12:
            raise DegenerateInputError("point is outside the chart hemisphere")
        return (self.frame @ p) / t

    def check_radius(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if np.linalg.norm(x) >= CHART_RADIUS:
            raise DegenerateInputError(
                f"chart coordinates |x| = {np.linalg.norm(x):.3g} outside radius {CHART_RADIUS}"
            )
        return x


def chart_at(p, frame=None) -> GnomonicChart:
    """Gnomonic chart at p with the deterministic tangent frame unless given."""
    p = check_unit(p)
    if frame is None:
        frame = tangent_frame(p)
    return GnomonicChart(p, frame)


# ---------------------------------------------------------------------------
# projective action on points


def phi_T(T: GroupElement, points):
    """Projective action of an invertible matrix on sphere points: Tp / |Tp|.

    A genuine right-to-left homomorphism: phi(T1 T2) = phi(T1) o phi(T2).
    """
    P = np.asarray(points, dtype=float)
    Q = P @ T.matrix.T
    norms = np.linalg.norm(Q, axis=-1, keepdims=True) if Q.ndim > 1 else np.linalg.norm(Q)
    return Q / norms


def dphi_T(T: GroupElement, p, w) -> np.ndarray:
    """Differential of :func:`phi_T` at p applied to a tangent vector w."""
    p = check_unit(p)
    w = np.asarray(w, dtype=float)
    if abs(p @ w) > 1e-10:
        raise DegenerateInputError("w must be tangent to the sphere at p")
    Tp = T.matrix @ p
    Tw = T.matrix @ w
    norm2 = Tp @ Tp
    return (Tw - ((Tw @ Tp) / norm2) * Tp) / math.sqrt(norm2)


def jacobian_density(T: GroupElement, p) -> float:
    """Conformal-weight density of the action at p: |det T|^(4/(n+1)) / |Tp|^4.

    Equals det(Gram(dphi(e_i)))^(2/(n+1)) for any orthonormal tangent frame
    (e_i) at p, which is how the tests cross-check it.
    """
    p = check_unit(p)
    Tp = T.matrix @ p
    return abs(T.det) ** (4.0 / (T.n + 1)) / float(Tp @ Tp) ** 2


def equator_image(T: GroupElement, v: Equator) -> Equator:
    """Equator onto which phi_T maps the equator with normal v.

    The image normal is proportional to T^(-T) v, since <Tp, T^(-T) v> = <p, v>.
    """
    w = np.linalg.solve(T.matrix.T, v.normal)
    return Equator(w / np.linalg.norm(w))


# ---------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights for integration over an equator or a whole sphere."""

    nodes: np.ndarray
    weights: np.ndarray
    domain: str
    order: int
    monte_carlo: bool = False
    seed: int | None = None

    @property
    def total(self) -> float:
        return float(np.sum(self.weights))

    def integrate(self, f) -> float:
        """Integrate a callable on ambient points, or an array of node values."""
        values = np.asarray(f(self.nodes) if callable(f) else f, dtype=float)
        if values.shape != self.weights.shape:
            raise DimensionError("values do not match the quadrature nodes")
        return float(values @ self.weights)

    def to_csv(self, path: str) -> None:
        dim = self.nodes.shape[1]
        header = [f"x{i}" for i in range(dim)] + ["weight"]
        rows = (
            [float(c) for c in node] + [float(w)]
            for node, w in zip(self.nodes, self.weights)
        )
        write_csv(path, header, rows)


def sphere_volume(k: int) -> float:
    """Volume of the unit sphere S^k."""
    return 2.0 * math.pi ** ((k + 1) / 2.0) / math.gamma((k + 1) / 2.0)


def _equator_grid(v: Equator, order: int) -> dict:
    """Product Gauss-Legendre x trapezoid grid on an equator of S^3.

    Returns nodes with their spherical angles and the orthonormal tangent
    vectors (e_theta, e_phi) of the round equator at each node.  Exact for
    spherical polynomials of degree up to 2 * order - 1.
    """
    u = v.basis()
    z, wz = leggauss(order)
    nphi = 2 * order
    phi = 2.0 * math.pi * np.arange(nphi) / nphi
    zz, pp = np.meshgrid(z, phi, indexing="ij")
    zz = zz.reshape(-1)
    pp = pp.reshape(-1)
    st = np.sqrt(1.0 - zz**2)
    ct, cp, sp = zz, np.cos(pp), np.sin(pp)
    nodes = (st * cp)[:, None] * u[0] + (st * sp)[:, None] * u[1] + ct[:, None] * u[2]
    weights = np.repeat(wz, nphi) * (2.0 * math.pi / nphi)
    e_theta = (ct * cp)[:, None] * u[0] + (ct * sp)[:, None] * u[1] - st[:, None] * u[2]
    e_phi = (-sp)[:, None] * u[0] + cp[:, None] * u[1]
    return {
        "basis": u,
        "theta": np.arccos(np.clip(zz, -1.0, 1.0)),
        "phi": pp,
        "nodes": nodes,
        "weights": weights,
        "e_theta": e_theta,
        "e_phi": e_phi,
    }


def equator_quadrature(v: Equator, order: int, *, seed: int = 0) -> QuadratureRule:
    """Quadrature on the round equator with normal v.

    For S^3 this is a deterministic Gauss-Legendre x trapezoid product rule
    whose weights sum to 4 pi exactly.  In other dimensions it falls back to
    seeded Monte Carlo (flagged on the rule), with weights summing to the
    round volume of the equator.
    """
    if order < 1:
        raise DegenerateInputError("quadrature order must be positive")
    if not isinstance(v, Equator):
        v = Equator(np.asarray(v, dtype=float))
    if v.n == 3:
        grid = _equator_grid(v, order)
        return QuadratureRule(grid["nodes"], grid["weights"], "equator", order)
    rng = np.random.default_rng(seed)
    count = max(2 * order * order, 64)
    u = v.basis()
    raw = rng.standard_normal((count, v.n))
    raw /= np.linalg.norm(raw, axis=1, keepdims=True)
    nodes = raw @ u
    weights = np.full(count, sphere_volume(v.n - 1) / count)
    return QuadratureRule(nodes, weights, "equator", order, monte_carlo=True, seed=seed)


def sphere_quadrature(n: int, order: int) -> QuadratureRule:
    """Deterministic product quadrature on all of S^n.

    Built recursively from Gauss-Jacobi rules in the latitude variable, so a
    rule of a given order integrates ambient polynomials of degree up to
    2 * order - 1 exactly.
    """
    if n < 1:
        raise DimensionError("sphere quadrature requires n >= 1")
    if order < 1:
        raise DegenerateInputError("quadrature order must be positive")
    if n == 1:
        m = 2 * order
        ang = 2.0 * math.pi * np.arange(m) / m
        nodes = np.column_stack([np.cos(ang), np.sin(ang)])
        weights = np.full(m, 2.0 * math.pi / m)
        return QuadratureRule(nodes, weights, "sphere", order)
    inner = sphere_quadrature(n - 1, order)
    alpha = (n - 2) / 2.0
    t, wt = roots_jacobi(order, alpha, alpha)
    st = np.sqrt(1.0 - t**2)
    nodes = np.concatenate(
        [
            (st[:, None, None] * inner.nodes[None, :, :]).reshape(-1, n),
            np.repeat(t, inner.nodes.shape[0])[:, None],
        ],
        axis=1,
    )
    weights = (wt[:, None] * inner.weights[None, :]).reshape(-1)
    return QuadratureRule(nodes, weights, "sphere", order)
