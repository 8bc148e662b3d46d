"""Maximal correlation via the Witsenhausen matrix and its SVD.

The normalized joint matrix P~[x, y] = p(x, y) / sqrt(p(x) p(y)) always has
top singular value 1 with singular vectors sqrt(p(x)) and sqrt(p(y)).  The
second singular value is the maximal correlation, and rescaling the second
singular vectors by 1 / sqrt(p) gives optimal zero-mean unit-variance
witnesses.  To keep that structure exact even when the spectrum is
degenerate, the top pair is peeled off analytically before calling the
numerical SVD (see :func:`residual_singular_pairs`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dist import (
    CorrelationReport,
    JointPmf,
    ScoredPair,
    marginal_x,
    marginal_y,
    pair_stats,
)
from .errors import (
    DegenerateMarginal,
    NonFiniteValue,
    NumericalFailure,
    SizeTooLarge,
    ZeroMarginal,
)

_SIZE_LIMIT = 4096
_NULL_WITNESS_TOL = 1e-12


@dataclass(frozen=True)
class SvdBundle:
    """Singular values (descending) with matched orthonormal vector families.

    ``left_vectors[i]`` and ``right_vectors[i]`` are the vectors paired with
    ``singular_values[i]``; each family is orthonormal within 1e-8 and the
    weighted outer-product sum reconstructs the input within 1e-8.
    """

    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.left_vectors.T * self.singular_values) @ \
            self.right_vectors


def witsenhausen_matrix(j: JointPmf) -> np.ndarray:
    """p(x, y) / sqrt(p(x) p(y)); marginals must be strictly positive."""
    px = marginal_x(j)
    py = marginal_y(j)
    if (px <= 0.0).any() or (py <= 0.0).any():
        raise ZeroMarginal("strip zero-mass symbols before normalizing")
    return j.p / np.sqrt(np.outer(px, py))


def _fix_signs(left: np.ndarray, right: np.ndarray) -> None:
    """First coordinate of each left vector that exceeds 1e-12 is made
    positive, flipping the matched right vector along with it."""
    for i in range(left.shape[0]):
        nz = np.nonzero(np.abs(left[i]) > 1e-12)[0]
        if nz.size and left[i, nz[0]] < 0:
            left[i] *= -1.0
            right[i] *= -1.0


def decompose(m) -> SvdBundle:
    """Full thin SVD with a deterministic sign convention."""
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2:
        raise NonFiniteValue("input must be a matrix")
    if not np.isfinite(arr).all():
        raise NonFiniteValue("matrix entries must be finite")
    if arr.size > _SIZE_LIMIT:
        raise SizeTooLarge(f"matrix has more than {_SIZE_LIMIT} entries")
    try:
        u, s, vt = np.linalg.svd(arr, full_matrices=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise NumericalFailure(f"SVD did not converge: {exc}") from exc
    left = np.ascontiguousarray(u.T)
    right = np.ascontiguousarray(vt)
    _fix_signs(left, right)
    return SvdBundle(singular_values=s, left_vectors=left,
                     right_vectors=right)


def residual_singular_pairs(j: JointPmf):
    """Singular pairs of the Witsenhausen matrix below the analytic top pair.

    Deflates the exactly known top pair (1, sqrt(px), sqrt(py)) and
    decomposes the residual, returning ``(values, left, right)`` for the
    remaining min(m, n) - 1 pairs in descending order.  Every pair with a
    positive value is exactly orthogonal to the top pair, which is what
    makes the rescaled witnesses zero-mean.
    """
    mat = witsenhausen_matrix(j)
    u1 = np.sqrt(marginal_x(j))
    w1 = np.sqrt(marginal_y(j))
    residual = mat - np.outer(u1, w1)
    bundle = decompose(residual)
    keep = min(j.shape) - 1
    return (bundle.singular_values[:keep],
            bundle.left_vectors[:keep],
            bundle.right_vectors[:keep])


def _strip_support(j: JointPmf):
    keep_x = [i for i, w in enumerate(marginal_x(j)) if w > 0.0]
    keep_y = [i for i, w in enumerate(marginal_y(j)) if w > 0.0]
    if len(keep_x) < 2 or len(keep_y) < 2:
        raise DegenerateMarginal(
            "maximal correlation needs two support symbols per side"
        )
    if len(keep_x) == j.shape[0] and len(keep_y) == j.shape[1]:
        return j, keep_x, keep_y
    sub = JointPmf(
        x_labels=tuple(j.x_labels[i] for i in keep_x),
        y_labels=tuple(j.y_labels[i] for i in keep_y),
        p=j.p[np.ix_(keep_x, keep_y)],
    )
    return sub, keep_x, keep_y


def maximal_correlation(j: JointPmf) -> CorrelationReport:
    """Second singular value of the Witsenhausen matrix, with witnesses."""
    sub, keep_x, keep_y = _strip_support(j)
    values, left, right = residual_singular_pairs(sub)
    lam2 = float(values[0]) if values.size else 0.0
    if lam2 < -1e-8 or lam2 > 1.0 + 1e-8:
        raise NumericalFailure(
            f"second singular value {lam2!r} outside [0, 1]"
        )
    value = min(max(lam2, 0.0), 1.0)

    witness = None
    if lam2 > _NULL_WITNESS_TOL:
        f_sub = left[0] / np.sqrt(marginal_x(sub))
        g_sub = right[0] / np.sqrt(marginal_y(sub))
        f = np.zeros(j.shape[0])
        g = np.zeros(j.shape[1])
        f[list(keep_x)] = f_sub
        g[list(keep_y)] = g_sub
        witness = ScoredPair(f=f, g=g)
        if pair_stats(j, witness).cov < 0:
            witness = ScoredPair(f=f, g=-g)

    return CorrelationReport(
        measure="maximal_correlation",
        value=value,
        witness=witness,
        diagnostics={
            "mode": "witsenhausen_svd",
            "raw_second_singular_value": lam2,
            "support_shape": sub.shape,
        },
    )
