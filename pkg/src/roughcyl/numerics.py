"""Dense complex linear solves and adaptive Gauss-Kronrod quadrature."""

from __future__ import annotations

import heapq
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .errors import QuadratureError, SingularMatrixError

PIVOT_THRESHOLD = 1e-14


@dataclass(frozen=True)
class ComplexDenseSystem:
    matrix: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=complex)
        b = np.asarray(self.rhs, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"matrix must be square, got shape {a.shape}")
        if b.shape != (a.shape[0],):
            raise ValueError(f"rhs length {b.shape} does not match matrix dimension {a.shape[0]}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("system contains non-finite entries")
        object.__setattr__(self, "matrix", a)
        object.__setattr__(self, "rhs", b)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SolveResult:
    x: np.ndarray
    condition: float          # 1-norm condition estimate from LAPACK gecon
    residual: float           # ||A x - b||_inf / ||b||_inf
    min_pivot_ratio: float    # min |u_ii| / max row magnitude of A


def lu_solve(system: ComplexDenseSystem) -> SolveResult:
    """
    Solve ``A x = b`` with partially pivoted LU.

    Raises :class:`SingularMatrixError` if a pivot falls below
    ``1e-14 * max_i ||A[i, :]||_inf``.
    """
    a = system.matrix
    b = system.rhs
    row_scale = np.max(np.abs(a), axis=1).max()
    if row_scale == 0:
        raise SingularMatrixError("zero matrix", pivot=0.0, threshold=0.0)
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularMatrixError
        warnings.simplefilter("ignore", la.LinAlgWarning)
        lu, piv = la.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    threshold = PIVOT_THRESHOLD * row_scale
    if pivots.min() < threshold:
        k = int(pivots.argmin())
        raise SingularMatrixError(
            f"pivot {k} has magnitude {pivots[k]:.3e} below threshold {threshold:.3e}",
            pivot=float(pivots[k]), threshold=threshold)
    x = la.lu_solve((lu, piv), b, check_finite=False)
    anorm = np.abs(a).sum(axis=0).max()
    gecon = la.get_lapack_funcs("gecon", (lu,))
    rcond, info = gecon(lu, anorm, norm="1")
    cond = np.inf if rcond == 0 else 1.0 / rcond
    bnorm = np.abs(b).max()
    res = np.abs(a @ x - b).max() / (bnorm if bnorm > 0 else 1.0)
    return SolveResult(x=x, condition=float(cond), residual=float(res),
                       min_pivot_ratio=float(pivots.min() / row_scale))


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()

# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_FULL = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes (x = +-0.949, +-0.742, +-0.406, 0)
_GAUSS_FULL[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk15(f, lo, hi):
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    vals = np.asarray(f(mid + half * NODES))
    # vals has shape (15, *component_shape)
    k = np.tensordot(KRONROD_WEIGHTS, vals, axes=(0, 0)) * half
    g = np.tensordot(_GAUSS_FULL, vals, axes=(0, 0)) * half
    return k, np.abs(k - g)


def integrate_1d(f, lo: float, hi: float, spec: QuadratureSpec = DEFAULT_QUADRATURE,
                 points=()):
    """
    Adaptive G7/K15 quadrature of a scalar (real or complex) integrand.

    ``f`` is called with a 1-D array of abscissae and must return an array
    of the same length. Optional ``points`` are interior breakpoints used
    for the initial partition. The error target is
    ``max(abs_tol, rel_tol * |I|)``.

    Returns the integral estimate; raises :class:`QuadratureError` if the
    target is not met within ``spec.max_subdivisions`` bisections.
    """
    if not lo < hi:
        raise ValueError("integration requires lo < hi")
    return integrate_1d_batch(lambda x: np.asarray(f(x))[:, None], lo, hi, spec, points)[0]


def integrate_1d_batch(f, lo: float, hi: float, spec: QuadratureSpec = DEFAULT_QUADRATURE,
                       points=()):
    """
    Adaptive G7/K15 quadrature of a vector-valued integrand.

    ``f(x)`` receives a 1-D array of ``K`` abscissae and returns an array of
    shape ``(K, *shape)``. All components share one partition of
    ``[lo, hi]``; each component must individually satisfy
    ``err <= max(abs_tol, rel_tol * |I|)``.
    """
    if not lo < hi:
        raise ValueError("integration requires lo < hi")
    edges = np.unique(np.concatenate([[lo], [p for p in points if lo < p < hi], [hi]]))
    parts = []
    for a, b in zip(edges[:-1], edges[1:]):
        val, err = _gk15(f, a, b)
        parts.append((a, b, val, err))
    total = sum(p[2] for p in parts)
    total_err = sum(p[3] for p in parts)

    def score(err, target):
        return float(np.max(err / target))

    target = np.maximum(spec.abs_tol, spec.rel_tol * np.abs(total))
    heap = [(-score(e, target), i, a, b, v, e) for i, (a, b, v, e) in enumerate(parts)]
    heapq.heapify(heap)
    counter = len(heap)
    subdivisions = 0
    while True:
        target = np.maximum(spec.abs_tol, spec.rel_tol * np.abs(total))
        if np.all(total_err <= target):
            return total
        if subdivisions >= spec.max_subdivisions:
            worst = float(np.max(total_err - target))
            raise QuadratureError(
                f"no convergence after {subdivisions} subdivisions on [{lo}, {hi}] "
                f"(error excess {worst:.3e})", estimate=total, error=total_err)
        _, _, a, b, val, err = heapq.heappop(heap)
        m = 0.5 * (a + b)
        v1, e1 = _gk15(f, a, m)
        v2, e2 = _gk15(f, m, b)
        total = total - val + v1 + v2
        total_err = total_err - err + e1 + e2
        for a_, b_, v_, e_ in ((a, m, v1, e1), (m, b, v2, e2)):
            heapq.heappush(heap, (-score(e_, target), counter, a_, b_, v_, e_))
            counter += 1
        subdivisions += 1
