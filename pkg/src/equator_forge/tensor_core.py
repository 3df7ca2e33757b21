"""Algebraic curvature tensors on R^(n+1) and the group action on them.

A curvature tensor here is a 4-linear form with the symmetries of a Riemann
tensor: antisymmetry in the first and last pairs, symmetry under swapping the
pairs, and the first Bianchi identity.  The module provides construction and
validation, an orthonormal basis of the space of such tensors, sectional
curvature and a minimum-sectional-curvature probe, the model tensors (constant
curvature and the complex-projective one), the twisted GL(n+1) action, and a
dense JSON interchange format.

Conventions: ``R.coeffs[a, b, c, d]`` is ``R(e_a, e_b, e_c, e_d)``, and the
sectional curvature of the plane spanned by orthonormal ``x, y`` is
``R(x, y, x, y)``.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "DimensionError",
    "TensorSymmetryError",
    "DegenerateInputError",
    "PositivityError",
    "SymmetryReport",
    "CurvatureTensor",
    "GroupElement",
    "SkewMatrix",
    "KillingField",
    "symmetry_residuals",
    "validate",
    "curvature_projection",
    "curv_dim",
    "curv_basis",
    "basis_matrix",
    "basis_coefficients",
    "tensor_from_basis",
    "sectional",
    "sec_min_estimate",
    "sec_brute_force",
    "is_positive",
    "constant_curvature",
    "fubini_study",
    "act",
    "sym_product",
    "killing_matrices",
    "random_positive",
    "save_tensor",
    "load_tensor",
    "TENSOR_FORMAT",
    "MATRIX_FORMAT",
    "save_matrix",
    "load_matrix",
]

TENSOR_FORMAT = "curv-dense-v1"
MATRIX_FORMAT = "matrix-v1"

SYMMETRY_TOL = 1e-12


class DimensionError(ValueError):
    """Array shape does not match the declared dimension."""


class TensorSymmetryError(ValueError):
    """A symmetry residual exceeds its tolerance."""


class DegenerateInputError(ValueError):
    """Degenerate geometric input: zero plane, singular matrix, non-unit vector."""


class PositivityError(ValueError):
    """The positivity probe refused a tensor that must have positive curvature."""


@dataclass(frozen=True)
class SymmetryReport:
    """Max-norm residuals of the four curvature-tensor symmetries."""

    first_pair: float
    second_pair: float
    pair_swap: float
    bianchi: float

    @property
    def max(self) -> float:
        return max(self.first_pair, self.second_pair, self.pair_swap, self.bianchi)

    def as_dict(self) -> dict:
        return {
            "first_pair": self.first_pair,
            "second_pair": self.second_pair,
            "pair_swap": self.pair_swap,
            "bianchi": self.bianchi,
        }


def _as_curv_array(coeffs) -> np.ndarray:
    T = np.asarray(coeffs, dtype=float)
    if T.ndim != 4 or len(set(T.shape)) != 1:
        raise DimensionError(f"expected a hypercubic 4-index array, got shape {T.shape}")
    if T.shape[0] < 3:
        raise DimensionError("need ambient dimension >= 3 (sphere dimension n >= 2)")
    return T


def symmetry_residuals(coeffs) -> SymmetryReport:
    """Residuals of the four defining symmetries, in max norm."""
    T = _as_curv_array(coeffs)
    r1 = np.max(np.abs(T + np.einsum("bacd->abcd", T)))
    r2 = np.max(np.abs(T + np.einsum("abdc->abcd", T)))
    r3 = np.max(np.abs(T - np.einsum("cdab->abcd", T)))
    bianchi = T + np.einsum("acdb->abcd", T) + np.einsum("adbc->abcd", T)
    r4 = np.max(np.abs(bianchi))
    return SymmetryReport(float(r1), float(r2), float(r3), float(r4))


def validate(coeffs) -> SymmetryReport:
    """Shape-check an array and report its symmetry residuals."""
    return symmetry_residuals(coeffs)


def curvature_projection(coeffs) -> np.ndarray:
    """Orthogonal projection of a 4-index array onto the curvature-tensor space.

    Antisymmetrizes both pairs, symmetrizes the pair swap, then removes the
    totally antisymmetric part (the obstruction to the first Bianchi identity).
    Idempotent, and the identity on arrays that already satisfy all four
    symmetries.
    """
    T = _as_curv_array(coeffs)
    T = 0.25 * (
        T
        - np.einsum("bacd->abcd", T)
        - np.einsum("abdc->abcd", T)
        + np.einsum("badc->abcd", T)
    )
    T = 0.5 * (T + np.einsum("cdab->abcd", T))
    cyc = T + np.einsum("acdb->abcd", T) + np.einsum("adbc->abcd", T)
    return T - cyc / 3.0


class CurvatureTensor:
    """Immutable validated curvature tensor on R^(n+1)."""

    __slots__ = ("coeffs", "n")

    def __init__(self, coeffs, *, tol: float = SYMMETRY_TOL):
        T = _as_curv_array(coeffs).copy()
        report = symmetry_residuals(T)
        if report.max > tol:
            raise TensorSymmetryError(
                f"symmetry residuals {report.as_dict()} exceed tolerance {tol:g}"
            )
        T.flags.writeable = False
        object.__setattr__(self, "coeffs", T)
        object.__setattr__(self, "n", T.shape[0] - 1)

    def __setattr__(self, name, value):
        raise AttributeError("CurvatureTensor is immutable")

    def value(self, x, y, z, w) -> float:
        return float(np.einsum("abcd,a,b,c,d", self.coeffs, x, y, z, w))

    def max_norm(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def __repr__(self) -> str:
        return f"CurvatureTensor(n={self.n}, max|R|={self.max_norm():.3g})"


@dataclass(frozen=True)
class GroupElement:
    """Invertible (n+1) x (n+1) matrix acting on tensors and on the sphere."""

    matrix: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {M.shape}")
        if abs(np.linalg.det(M)) <= 1e-12:
            raise DegenerateInputError("matrix is numerically singular")
        object.__setattr__(self, "matrix", M)

    @property
    def n(self) -> int:
        return self.matrix.shape[0] - 1

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def inverse(self) -> "GroupElement":
        return GroupElement(np.linalg.inv(self.matrix))


@dataclass(frozen=True)
class SkewMatrix:
    """Skew-symmetric matrix: a rotation generator on R^(n+1)."""

    matrix: np.ndarray

    def __post_init__(self):
        M = np.asarray(self.matrix, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {M.shape}")
        if np.max(np.abs(M + M.T)) > 1e-14:
            raise TensorSymmetryError("matrix is not skew-symmetric")
        object.__setattr__(self, "matrix", M)

    @property
    def n(self) -> int:
        return self.matrix.shape[0] - 1


def wedge(a, b) -> SkewMatrix:
    """Generator of the rotation in the plane of ``a`` and ``b``: x -> <a,x>b - <b,x>a."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    return SkewMatrix(np.outer(b, a) - np.outer(a, b))


__all__.append("wedge")


# ---------------------------------------------------------------------------
# basis of the space of curvature tensors


def curv_dim(n: int) -> int:
    """Dimension of the space of curvature tensors on R^(n+1)."""
    m = n + 1
    return m * m * (m * m - 1) // 12


@lru_cache(maxsize=None)
def _basis_matrix_cached(n: int) -> np.ndarray:
    if n < 2:
        raise DimensionError("curvature-tensor basis requires n >= 2")
    m = n + 1
    expected = curv_dim(n)
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    rows = []
    for a, (i, j) in enumerate(pairs):
        for i2, j2 in pairs[a:]:
            T = np.zeros((m, m, m, m))
            T[i, j, i2, j2] = 1.0
            raw = curvature_projection(T)
            vec = raw.reshape(-1)
            # incremental Gram-Schmidt against the rows kept so far
            for r in rows:
                vec = vec - (r @ vec) * r
            norm = np.linalg.norm(vec)
            if norm > 1e-10:
                rows.append(vec / norm)
    B = np.array(rows)
    if B.shape[0] != expected:
        raise RuntimeError(
            f"basis construction produced {B.shape[0]} elements, expected {expected}"
        )
    B.flags.writeable = False
    return B


def basis_matrix(n: int) -> np.ndarray:
    """Orthonormal basis of curvature-tensor space as rows of shape ((n+1)^4,)."""
    return _basis_matrix_cached(n)


@lru_cache(maxsize=None)
def _curv_basis_cached(n: int) -> tuple:
    B = basis_matrix(n)
    m = n + 1
    return tuple(CurvatureTensor(row.reshape(m, m, m, m)) for row in B)


def curv_basis(n: int) -> list:
    """Deterministic orthonormal basis of the curvature-tensor space for S^n."""
    return list(_curv_basis_cached(n))


def basis_coefficients(R: CurvatureTensor) -> np.ndarray:
    """Coefficients of ``R`` in the orthonormal basis of :func:`curv_basis`."""
    return basis_matrix(R.n) @ R.coeffs.reshape(-1)


def tensor_from_basis(n: int, coeffs) -> CurvatureTensor:
    """Assemble a tensor from its :func:`curv_basis` coefficient vector."""
    c = np.asarray(coeffs, dtype=float)
    B = basis_matrix(n)
    if c.shape != (B.shape[0],):
        raise DimensionError(f"expected {B.shape[0]} coefficients, got shape {c.shape}")
    m = n + 1
    return CurvatureTensor((c @ B).reshape(m, m, m, m))


# ---------------------------------------------------------------------------
# sectional curvature


def sectional(R: CurvatureTensor, x, y) -> float:
    """Sectional curvature of the plane spanned by ``x`` and ``y``."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    area2 = (x @ x) * (y @ y) - (x @ y) ** 2
    if area2 <= 1e-12:
        raise DegenerateInputError("plane is numerically degenerate")
    return R.value(x, y, x, y) / area2


@dataclass(frozen=True)
class SecMinResult:
    """Outcome of the minimum-sectional-curvature probe."""

    value: float
    x: np.ndarray
    y: np.ndarray


def _orthonormal_pair(rng, m: int) -> np.ndarray:
    while True:
        X = rng.standard_normal((m, 2))
        Q, Rm = np.linalg.qr(X)
        if abs(Rm[0, 0]) > 1e-8 and abs(Rm[1, 1]) > 1e-8:
            return Q * np.sign(np.diag(Rm))


def _retract(X: np.ndarray) -> np.ndarray:
    Q, Rm = np.linalg.qr(X)
    return Q * np.sign(np.diag(Rm))


def sec_min_estimate(
    R: CurvatureTensor,
    *,
    restarts: int = 8,
    iters: int = 300,
    step: float = 0.05,
    seed: int = 0,
    stop_below: float | None = None,
) -> SecMinResult:
    """Estimate the minimum sectional curvature by projected gradient descent.

    Runs ``restarts`` seeded descents over orthonormal pairs (x, y), with a
    fixed initial step and backtracking halving, re-orthonormalizing after
    every step.  Deterministic for a given seed.  ``stop_below`` aborts early
    once any plane with value below that threshold is found (useful when only
    a yes/no comparison is needed).

    Returns
    -------
    SecMinResult
        Best value found and the minimizing orthonormal pair.
    """
    T = R.coeffs
    rng = np.random.default_rng(seed)
    best_val = np.inf
    best_pair = None
    for _ in range(restarts):
        X = _orthonormal_pair(rng, R.n + 1)
        x, y = X[:, 0], X[:, 1]
        f = float(np.einsum("abcd,a,b,c,d", T, x, y, x, y))
        for _ in range(iters):
            gx = 2.0 * np.einsum("abcd,b,c,d->a", T, y, x, y)
            gy = 2.0 * np.einsum("abcd,a,c,d->b", T, x, x, y)
            G = np.column_stack([gx, gy])
            XtG = X.T @ G
            P = G - X @ (0.5 * (XtG + XtG.T))
            gnorm2 = float(np.sum(P * P))
            if gnorm2 < 1e-24:
                break
            alpha = step
            moved = False
            while alpha > 1e-14:
                Xn = _retract(X - alpha * P)
                xn, yn = Xn[:, 0], Xn[:, 1]
                fn = float(np.einsum("abcd,a,b,c,d", T, xn, yn, xn, yn))
                if fn < f - 1e-4 * alpha * gnorm2:
                    X, x, y, f = Xn, xn, yn, fn
                    moved = True
                    break
                alpha *= 0.5
            if not moved:
                break
            if stop_below is not None and f < stop_below:
                return SecMinResult(f, x.copy(), y.copy())
        if f < best_val:
            best_val = f
            best_pair = (x.copy(), y.copy())
    return SecMinResult(float(best_val), best_pair[0], best_pair[1])


def sec_brute_force(R: CurvatureTensor, *, samples: int = 20000, seed: int = 0):
    """Minimum sectional curvature over random planes; slow cross-check oracle."""
    rng = np.random.default_rng(seed)
    m = R.n + 1
    X = rng.standard_normal((samples, m))
    Y = rng.standard_normal((samples, m))
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    Y -= np.sum(Y * X, axis=1, keepdims=True) * X
    norms = np.linalg.norm(Y, axis=1, keepdims=True)
    keep = norms[:, 0] > 1e-8
    X, Y = X[keep], Y[keep] / norms[keep]
    t = np.einsum("abcd,na->nbcd", R.coeffs, X)
    t = np.einsum("nbcd,nb->ncd", t, Y)
    t = np.einsum("ncd,nc->nd", t, X)
    vals = np.einsum("nd,nd->n", t, Y)
    i = int(np.argmin(vals))
    return float(vals[i]), (X[i], Y[i])


@dataclass(frozen=True)
class PositivityCertificate:
    """Result of the positivity probe (a numerical estimate, not a proof)."""

    positive: bool
    min_estimate: float
    margin: float
    x: np.ndarray
    y: np.ndarray


def is_positive(
    R: CurvatureTensor,
    *,
    margin: float = 0.0,
    restarts: int = 8,
    iters: int = 300,
    seed: int = 0,
) -> PositivityCertificate:
    """Probe whether all sectional curvatures exceed ``margin``."""
    res = sec_min_estimate(R, restarts=restarts, iters=iters, seed=seed)
    return PositivityCertificate(res.value > margin, res.value, margin, res.x, res.y)


# ---------------------------------------------------------------------------
# model tensors


def constant_curvature(n: int, c: float = 1.0) -> CurvatureTensor:
    """Tensor of constant sectional curvature ``c`` on R^(n+1)."""
    eye = np.eye(n + 1)
    T = c * (np.einsum("ac,bd->abcd", eye, eye) - np.einsum("ad,bc->abcd", eye, eye))
    return CurvatureTensor(T)


def complex_structure(m: int) -> np.ndarray:
    """Standard complex structure on R^(2m+2), pairing coordinates (0,1), (2,3), ..."""
    dim = 2 * m + 2
    J = np.zeros((dim, dim))
    for a in range(m + 1):
        J[2 * a + 1, 2 * a] = 1.0
        J[2 * a, 2 * a + 1] = -1.0
    return J


__all__.append("complex_structure")


def fubini_study(m: int) -> CurvatureTensor:
    """Curvature tensor of the complex projective model on S^(2m+1).

    Sectional curvatures fill the interval [1, 4]: 4 on complex lines, 1 on
    totally real planes.
    """
    if m < 2:
        raise DimensionError("complex projective model requires m >= 2")
    eye = np.eye(2 * m + 2)
    J = complex_structure(m)
    T = (
        np.einsum("ac,bd->abcd", eye, eye)
        - np.einsum("ad,bc->abcd", eye, eye)
        + np.einsum("ca,db->abcd", J, J)
        - np.einsum("da,cb->abcd", J, J)
        + 2.0 * np.einsum("ba,dc->abcd", J, J)
    )
    return CurvatureTensor(T)


# ---------------------------------------------------------------------------
# group action


def act(R: CurvatureTensor, T: GroupElement) -> CurvatureTensor:
    """Right action of GL(n+1): pull back by ``T`` and rescale by |det T|^(-4/(n+1)).

    The determinant weight makes constant multiples of the identity act
    trivially, so the action descends to projective transformations.  The
    absolute value keeps orientation-reversing elements inside the action
    (they preserve positivity of the sectional curvatures).
    """
    if T.n != R.n:
        raise DimensionError(f"matrix is for n={T.n}, tensor for n={R.n}")
    M = T.matrix
    weight = abs(T.det) ** (-4.0 / (R.n + 1))
    S = weight * np.einsum("abcd,ai,bj,ck,dl->ijkl", R.coeffs, M, M, M, M)
    return CurvatureTensor(S, tol=1e-9 * max(1.0, float(np.max(np.abs(S)))))


# ---------------------------------------------------------------------------
# Killing tensors of rank one pairs, and evaluation of R(p, ., p, .)


class KillingField:
    """Symmetric 2-tensor field on the sphere, evaluated through ambient matrices.

    ``ambient_matrices(P)`` returns, for each row p of P, the symmetric
    (n+1) x (n+1) matrix M(p) with M(p) p = 0 whose restriction to the tangent
    space at p is the tensor.  For the field generated by a curvature tensor
    this is k_p(v, w) = R(p, v, p, w).
    """

    def __init__(self, n: int, batch_fn, source: CurvatureTensor | None = None):
        self.n = n
        self._batch_fn = batch_fn
        self.source = source

    def ambient_matrices(self, points) -> np.ndarray:
        P = np.atleast_2d(np.asarray(points, dtype=float))
        if P.shape[1] != self.n + 1:
            raise DimensionError(f"points must have {self.n + 1} components")
        return self._batch_fn(P)

    def ambient_matrix(self, p) -> np.ndarray:
        return self.ambient_matrices(np.asarray(p, float)[None, :])[0]

    def value(self, p, v, w) -> float:
        M = self.ambient_matrix(p)
        return float(np.asarray(v, float) @ M @ np.asarray(w, float))

    def matrix_in_frame(self, p, frame) -> np.ndarray:
        """Matrix of the tensor in a frame given as rows of tangent vectors."""
        E = np.asarray(frame, float)
        return E @ self.ambient_matrix(p) @ E.T

    def __add__(self, other: "KillingField") -> "KillingField":
        if other.n != self.n:
            raise DimensionError("dimension mismatch")
        f, g = self._batch_fn, other._batch_fn
        return KillingField(self.n, lambda P: f(P) + g(P))

    def __rmul__(self, c: float) -> "KillingField":
        f = self._batch_fn
        return KillingField(self.n, lambda P: float(c) * f(P))


def killing_matrices(R: CurvatureTensor, points) -> np.ndarray:
    """Batched ambient matrices of k_p = R(p, ., p, .) at rows of ``points``."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    return np.einsum("abcd,na,nc->nbd", R.coeffs, P, P)


def sym_product(K: SkewMatrix, L: SkewMatrix) -> KillingField:
    """Symmetric product of rotation generators as a field on the sphere.

    At p the tensor is (v, w) -> <Kp, v><Lp, w> + <Lp, v><Kp, w>.  Fields of
    this kind are constant along great circles, and they span the same space
    as the fields generated by curvature tensors.
    """
    if K.n != L.n:
        raise DimensionError("dimension mismatch between generators")
    KM, LM = K.matrix, L.matrix

    def batch(P):
        KP = P @ KM.T
        LP = P @ LM.T
        M = np.einsum("ni,nj->nij", KP, LP)
        return M + np.swapaxes(M, 1, 2)

    return KillingField(K.n, batch)


# ---------------------------------------------------------------------------
# random tensors with positive curvature


def random_positive(
    n: int,
    seed: int = 0,
    *,
    target_margin: float = 0.1,
    restarts: int = 5,
    iters: int = 150,
):
    """Random curvature tensor with all sectional curvatures above ``target_margin``.

    Draws a unit-norm random direction in curvature-tensor space and walks
    from the round tensor along it, choosing the step by bisection so the
    positivity probe still reports at least the target margin.  Deterministic
    for a given seed.

    Returns
    -------
    (CurvatureTensor, float, float)
        The tensor, the probed minimum sectional curvature, and the step size.
    """
    rng = np.random.default_rng(seed)
    B = basis_matrix(n)
    u = rng.standard_normal(B.shape[0])
    u /= np.linalg.norm(u)
    m = n + 1
    U = (u @ B).reshape(m, m, m, m)
    R0 = constant_curvature(n, 1.0).coeffs

    def probe(eps: float) -> float:
        Reps = CurvatureTensor(R0 + eps * U)
        res = sec_min_estimate(
            Reps, restarts=restarts, iters=iters, seed=seed + 1, stop_below=0.9 * target_margin
        )
        return res.value

    lo, hi = 0.0, 1.0
    while probe(hi) >= target_margin:
        hi *= 2.0
        if hi > 64.0:
            break
    for _ in range(24):
        mid = 0.5 * (lo + hi)
        if probe(mid) >= target_margin:
            lo = mid
        else:
            hi = mid
    eps = lo
    R = CurvatureTensor(R0 + eps * U)
    final = sec_min_estimate(R, restarts=restarts, iters=iters, seed=seed + 1)
    return R, float(final.value), float(eps)


# ---------------------------------------------------------------------------
# JSON interchange


def _atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_tensor(R: CurvatureTensor, path: str) -> None:
    """Write a tensor as dense row-major JSON (format ``curv-dense-v1``)."""
    payload = {
        "format": TENSOR_FORMAT,
        "n": R.n,
        "coeffs": [float(v) for v in R.coeffs.reshape(-1)],
    }
    _atomic_write_text(path, json.dumps(payload) + "\n")


def load_tensor(path: str, *, tol: float = 1e-9) -> CurvatureTensor:
    """Read a ``curv-dense-v1`` tensor file.

    Rejects files whose symmetry residual exceeds ``tol``; accepted arrays are
    projected back onto the exact symmetry subspace so the usual construction
    tolerance holds afterwards.
    """
    with open(path) as fh:
        payload = json.load(fh)
    if not isinstance(payload, dict) or payload.get("format") != TENSOR_FORMAT:
        raise ValueError(f"{path}: not a {TENSOR_FORMAT} tensor file")
    n = payload["n"]
    m = n + 1
    coeffs = np.asarray(payload["coeffs"], dtype=float)
    if coeffs.shape != (m**4,):
        raise DimensionError(f"{path}: expected {m**4} coefficients, got {coeffs.shape}")
    T = coeffs.reshape(m, m, m, m)
    report = symmetry_residuals(T)
    if report.max > tol:
        raise TensorSymmetryError(
            f"{path}: symmetry residual {report.max:.3g} exceeds reader tolerance {tol:g}"
        )
    return CurvatureTensor(curvature_projection(T))


def save_matrix(T: GroupElement, path: str) -> None:
    """Write a group element as JSON (format ``matrix-v1``)."""
    payload = {
        "format": MATRIX_FORMAT,
        "n": T.n,
        "matrix": [[float(v) for v in row] for row in T.matrix],
    }
    _atomic_write_text(path, json.dumps(payload) + "\n")


def load_matrix(path: str) -> GroupElement:
    """Read a ``matrix-v1`` group-element file."""
    with open(path) as fh:
        payload = json.load(fh)
    if not isinstance(payload, dict) or payload.get("format") != MATRIX_FORMAT:
        raise ValueError(f"{path}: not a {MATRIX_FORMAT} matrix file")
    M = np.asarray(payload["matrix"], dtype=float)
    if M.shape != (payload["n"] + 1, payload["n"] + 1):
        raise DimensionError(f"{path}: matrix shape {M.shape} does not match n={payload['n']}")
    return GroupElement(M)
