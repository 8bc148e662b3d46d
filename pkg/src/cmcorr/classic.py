"""Classical correlation measures: Pearson, Spearman, Kendall tau-b, and
the generic two-sample rank-correlation functional they instantiate.

All expectations are exact finite sums over the joint pmf; the two-sample
measures sum over independent outcome pairs drawn from it.  Spearman uses
mid-distribution grades, the tie-consistent discrete analogue of the CDF
transform, and Kendall is the tau-b normalization (the Pearson coefficient
of comparison signs).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dist import JointPmf, ScoredPair, marginal_x, marginal_y, pair_stats
from .errors import (
    MissingValues,
    NotMonotoneComparator,
    ShapeMismatch,
    ZeroVariance,
)

_COMPARATOR_TOL = 1e-12


def _keys(j: JointPmf, side: str) -> np.ndarray:
    """Numeric keys that order a side: embeddings if present, else indices."""
    if side == "x":
        vals, k = j.x_values, j.shape[0]
    else:
        vals, k = j.y_values, j.shape[1]
    if vals is None:
        return np.arange(k, dtype=float)
    return np.asarray(vals, dtype=float)


def pearson(j: JointPmf) -> float:
    """Pearson coefficient of the numerically embedded pair."""
    if j.x_values is None or j.y_values is None:
        raise MissingValues("pearson needs numeric embeddings on both sides")
    stats = pair_stats(j, ScoredPair(f=np.asarray(j.x_values),
                                     g=np.asarray(j.y_values)))
    if stats.var_f <= 0.0 or stats.var_g <= 0.0:
        raise ZeroVariance("an embedded variable is constant on its support")
    return stats.cov / math.sqrt(stats.var_f * stats.var_g)


def grades(marginal) -> np.ndarray:
    """Mid-distribution grades G(i) = sum_{k<i} p(k) + p(i)/2 in index order."""
    w = np.asarray(marginal, dtype=float)
    return np.cumsum(w) - w / 2.0


def _value_grades(weights: np.ndarray, keys: np.ndarray) -> np.ndarray:
    """Mid-distribution grades with respect to the key order, tie-aware."""
    out = np.empty_like(weights)
    for v in np.unique(keys):
        mask = keys == v
        below = float(weights[keys < v].sum())
        out[mask] = below + float(weights[mask].sum()) / 2.0
    return out


def x_grades(j: JointPmf) -> np.ndarray:
    return _value_grades(marginal_x(j), _keys(j, "x"))


def y_grades(j: JointPmf) -> np.ndarray:
    return _value_grades(marginal_y(j), _keys(j, "y"))


def spearman(j: JointPmf) -> float:
    """Pearson coefficient of the grade-transformed pair."""
    stats = pair_stats(j, ScoredPair(f=x_grades(j), g=y_grades(j)))
    if stats.var_f <= 0.0 or stats.var_g <= 0.0:
        raise ZeroVariance("grades are constant on one side")
    return stats.cov / math.sqrt(stats.var_f * stats.var_g)


def kendall_tau_b(j: JointPmf) -> float:
    """Tau-b: E[s1 s2] / sqrt(E[s1^2] E[s2^2]) over i.i.d. outcome pairs.

    s1 = sign(X1 - X2) and s2 = sign(Y1 - Y2); exchange symmetry makes both
    signs zero-mean, so this is their Pearson coefficient.
    """
    sx = np.sign(np.subtract.outer(_keys(j, "x"), _keys(j, "x")))
    sy = np.sign(np.subtract.outer(_keys(j, "y"), _keys(j, "y")))
    px = marginal_x(j)
    py = marginal_y(j)
    es1sq = float(np.einsum("a,c,ac->", px, px, sx * sx))
    es2sq = float(np.einsum("b,d,bd->", py, py, sy * sy))
    if es1sq <= 0.0 or es2sq <= 0.0:
        raise ZeroVariance("one side is almost surely tied")
    es1s2 = float(np.einsum("ab,cd,ac,bd->", j.p, j.p, sx, sy))
    return es1s2 / math.sqrt(es1sq * es2sq)


@dataclass(frozen=True)
class PairComparator:
    """A relative-rank function on outcome pairs of one side.

    ``values[a, b]`` scores how much symbol ``a`` outranks symbol ``b``.
    It must be non-decreasing in ``a`` and non-increasing in ``b`` with
    respect to the side's key order.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ShapeMismatch("comparator must be a square matrix")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)


def sign_comparator(keys) -> PairComparator:
    k = np.asarray(keys, dtype=float)
    return PairComparator(values=np.sign(np.subtract.outer(k, k)))


def difference_comparator(scores) -> PairComparator:
    s = np.asarray(scores, dtype=float)
    return PairComparator(values=np.subtract.outer(s, s))


def _check_comparator(comp: PairComparator, keys: np.ndarray,
                      name: str) -> None:
    vals = comp.values
    if vals.shape[0] != len(keys):
        raise ShapeMismatch(f"{name} comparator size {vals.shape[0]} "
                            f"!= alphabet size {len(keys)}")
    k = len(keys)
    for a in range(k):
        for b in range(k):
            if keys[a] >= keys[b]:
                continue
            # a strictly below b in the key order
            if (vals[a, :] > vals[b, :] + _COMPARATOR_TOL).any():
                raise NotMonotoneComparator(
                    f"{name} comparator is not non-decreasing in its "
                    f"first argument"
                )
            if (vals[:, a] < vals[:, b] - _COMPARATOR_TOL).any():
                raise NotMonotoneComparator(
                    f"{name} comparator is not non-increasing in its "
                    f"second argument"
                )


def pair_rank_correlation(j: JointPmf, fx: PairComparator,
                          gy: PairComparator) -> float:
    """Pearson coefficient of (f(X1, X2), g(Y1, Y2)) for i.i.d. outcome pairs."""
    _check_comparator(fx, _keys(j, "x"), "x")
    _check_comparator(gy, _keys(j, "y"), "y")
    px = marginal_x(j)
    py = marginal_y(j)
    fv, gv = fx.values, gy.values
    mean_f = float(np.einsum("a,c,ac->", px, px, fv))
    mean_g = float(np.einsum("b,d,bd->", py, py, gv))
    var_f = float(np.einsum("a,c,ac->", px, px, fv * fv)) - mean_f ** 2
    var_g = float(np.einsum("b,d,bd->", py, py, gv * gv)) - mean_g ** 2
    if var_f <= 0.0 or var_g <= 0.0:
        raise ZeroVariance("a comparator is almost surely constant")
    cross = float(np.einsum("ab,cd,ac,bd->", j.p, j.p, fv, gv))
    return (cross - mean_f * mean_g) / math.sqrt(var_f * var_g)
