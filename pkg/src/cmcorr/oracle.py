"""Independent brute-force reference for the CMC, used to validate the engine.

The oracle deliberately shares nothing with the exact engine beyond the
moment helpers: no Witsenhausen matrix, no SVD, no merge enumeration.  For
a total order on the response side it sweeps an exhaustive grid of monotone
profiles for one function and answers each with an *exact* best response,
obtained by enumerating the faces of the monotone cone (contiguous block
poolings along the order).  The positive-side face optimum coincides with
the pool-adjacent-violators projection; the negative-side optima are the
negated pooled means, so discordant instances are solved exactly as well.
The best grid points are then polished by alternating exact best responses.
For general posets it grids both sides and takes the best feasible pair.

Every value the oracle reports is the covariance of a feasible monotone
pair, so it can never exceed the true CMC.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .dist import JointPmf, marginal_x, marginal_y, strip_zero_support
from .errors import (
    InputError,
    RequiresTotalOrder,
    ShapeMismatch,
    SizeTooLarge,
    ZeroVariance,
)
from .order import Poset, is_monotone

_TOTAL_SIDE_LIMIT = 5
_POSET_SIDE_LIMIT = 4
_CONST_TOL = 1e-12


@dataclass(frozen=True)
class OracleConfig:
    grid_step: float = 0.05
    refine_iters: int = 25
    restart_count: int = 3
    seed: int = 0  # reserved; the search is exhaustive and deterministic

    def __post_init__(self):
        if not (0.0 < self.grid_step <= 0.5):
            raise InputError("grid_step must lie in (0, 0.5]")
        if self.refine_iters < 0:
            raise InputError("refine_iters must be nonnegative")
        if self.restart_count < 1:
            raise InputError("restart_count must be positive")


def pava_isotonic(targets, weights) -> np.ndarray:
    """Weighted least-squares projection onto non-decreasing sequences.

    Classic pool-adjacent-violators: walk left to right, pooling any block
    whose weighted mean drops below its predecessor's.  Idempotent and
    weighted-mean preserving.
    """
    t = np.asarray(targets, dtype=float)
    w = np.asarray(weights, dtype=float)
    if t.shape != w.shape or t.ndim != 1:
        raise ShapeMismatch("targets and weights must be equal-length vectors")
    if (w <= 0).any():
        raise InputError("weights must be strictly positive")
    # blocks of (weight sum, weighted value sum, member count)
    blocks: list[list[float]] = []
    counts: list[int] = []
    for ti, wi in zip(t, w):
        blocks.append([wi, wi * ti])
        counts.append(1)
        while len(blocks) > 1 and (
            blocks[-1][1] / blocks[-1][0] <
            blocks[-2][1] / blocks[-2][0]
        ):
            w2, s2 = blocks.pop()
            c2 = counts.pop()
            blocks[-1][0] += w2
            blocks[-1][1] += s2
            counts[-1] += c2
    out = np.empty_like(t)
    pos = 0
    for (bw, bs), c in zip(blocks, counts):
        out[pos:pos + c] = bs / bw
        pos += c
    return out


def _require_total(p: Poset) -> list[int]:
    if not p.is_total():
        raise RequiresTotalOrder("this operation needs a total order")
    return p.linear_extension()


def best_response_g(j: JointPmf, f, py: Poset):
    """Best monotone response to ``f`` on the Y side, by cone projection.

    Projects the centered conditional means c(y) = E[f(X) | Y = y] onto the
    non-decreasing cone along the total order; the normalized projection
    maximizes Cov(f / sd(f), g) over monotone unit-variance g whenever the
    projection is non-constant.  Returns ``(g, value)`` or ``None`` when
    the projection is constant (no concordant response exists).
    """
    sigma = _require_total(py)
    f = np.asarray(f, dtype=float)
    px = marginal_x(j)
    py_w = marginal_y(j)
    mean_f = float(px @ f)
    var_f = float(px @ (f - mean_f) ** 2)
    if var_f <= 0.0:
        raise ZeroVariance("f must have positive variance")
    with np.errstate(invalid="ignore", divide="ignore"):
        cond = (j.p.T @ f) / py_w
    cond[py_w == 0.0] = 0.0
    cond -= float(py_w @ cond)
    proj_sorted = pava_isotonic(cond[sigma], py_w[sigma])
    proj = np.empty_like(proj_sorted)
    proj[sigma] = proj_sorted
    if proj.max() - proj.min() <= _CONST_TOL:
        return None
    norm = math.sqrt(float(py_w @ (proj - float(py_w @ proj)) ** 2))
    g = (proj - float(py_w @ proj)) / norm
    value = float((f - mean_f) @ j.p @ g) / math.sqrt(var_f)
    return g, value


def _signed_best_response(c: np.ndarray, w: np.ndarray, sigma: list[int]):
    """Exact max of <g, c>_w over monotone, zero-mean, unit-variance g.

    Enumerates the faces of the monotone cone (contiguous block partitions
    along the order).  Each face's stationary directions are the pooled
    block means of c, positively or negatively scaled; feasible candidates
    are compared exactly.  Returns ``(g, value)`` with ``g = None`` when c
    is degenerate (value 0 is then exact: every response is orthogonal).
    """
    n = len(sigma)
    cw = c[sigma]
    ww = w[sigma]
    best_val = None
    best_vec = None
    for mask in range(2 ** (n - 1)):
        # gap bits select block boundaries; skip the single-block partition
        bounds = [0]
        for gap in range(n - 1):
            if mask >> gap & 1:
                bounds.append(gap + 1)
        bounds.append(n)
        if len(bounds) == 2:
            continue
        pooled = np.empty(n)
        for a, b in zip(bounds[:-1], bounds[1:]):
            bw = ww[a:b].sum()
            pooled[a:b] = (ww[a:b] @ cw[a:b]) / bw
        norm2 = float(ww @ (pooled * pooled))
        if norm2 <= _CONST_TOL ** 2:
            continue
        for sign in (1.0, -1.0):
            vec = sign * pooled
            if (np.diff(vec) < -1e-12).any():
                continue
            val = float(ww @ (vec * cw)) / math.sqrt(norm2)
            if best_val is None or val > best_val:
                best_val = val
                best_vec = vec / math.sqrt(norm2)
    if best_val is None:
        return None, 0.0
    g = np.empty(len(c))
    g[sigma] = best_vec
    return g, best_val


def _monotone_profiles(p: Poset, weights: np.ndarray, step: float):
    """Centered, normalized, deduplicated monotone grid profiles."""
    top = int(math.floor(1.0 / step + 1e-9))
    levels = np.minimum(np.arange(top + 1) * step, 1.0)
    n = p.size
    rows: list[np.ndarray] = []
    if p.is_total():
        sigma = p.linear_extension()
        for combo in itertools.combinations_with_replacement(levels, n):
            row = np.empty(n)
            row[sigma] = combo
            rows.append(row)
    else:
        for combo in itertools.product(levels, repeat=n):
            if is_monotone(combo, p, 0.0):
                rows.append(np.asarray(combo))
    if not rows:
        return np.empty((0, n))
    grid = np.vstack(rows)
    means = grid @ weights
    centered = grid - means[:, None]
    variances = (centered * centered) @ weights
    ok = variances > _CONST_TOL
    normalized = centered[ok] / np.sqrt(variances[ok])[:, None]
    return np.unique(np.round(normalized, 12), axis=0)


def _sweep_and_refine(j: JointPmf, px: Poset, py: Poset,
                      cfg: OracleConfig) -> float:
    """Grid X-side profiles, answer each exactly, refine the best points."""
    px_w = marginal_x(j)
    py_w = marginal_y(j)
    sigma_y = py.linear_extension()
    profiles = _monotone_profiles(px, px_w, cfg.grid_step)
    if profiles.shape[0] == 0:
        raise InputError("no non-constant monotone profile exists")

    cond = profiles @ j.p  # row k: E[f_k(X) 1{Y=y}]
    with np.errstate(invalid="ignore", divide="ignore"):
        cond = cond / py_w
    cond[:, py_w == 0.0] = 0.0
    cond -= (cond @ py_w)[:, None]

    n = py.size
    cw = cond[:, sigma_y]
    ww = py_w[sigma_y]
    best_vals = np.full(profiles.shape[0], -np.inf)
    for mask in range(2 ** (n - 1)):
        bounds = [0]
        for gap in range(n - 1):
            if mask >> gap & 1:
                bounds.append(gap + 1)
        bounds.append(n)
        if len(bounds) == 2:
            continue
        pooled = np.empty_like(cw)
        for a, b in zip(bounds[:-1], bounds[1:]):
            bw = ww[a:b].sum()
            pooled[:, a:b] = ((cw[:, a:b] * ww[a:b]).sum(axis=1) / bw)[:, None]
        norm2 = (pooled * pooled) @ ww
        valid = norm2 > _CONST_TOL ** 2
        raw = (pooled * cw) @ ww
        with np.errstate(invalid="ignore", divide="ignore"):
            scaled = raw / np.sqrt(norm2)
        up = valid & ~(np.diff(pooled, axis=1) < -1e-12).any(axis=1)
        down = valid & ~(np.diff(pooled, axis=1) > 1e-12).any(axis=1)
        if up.any():
            best_vals[up] = np.maximum(best_vals[up], scaled[up])
        if down.any():
            best_vals[down] = np.maximum(best_vals[down], -scaled[down])
    best_vals[best_vals == -np.inf] = 0.0  # degenerate rows answer zero

    order = np.argsort(-best_vals, kind="stable")
    top = order[:cfg.restart_count]
    overall = float(best_vals[top[0]])

    both_total = px.is_total() and py.is_total()
    if not both_total or cfg.refine_iters == 0:
        return overall

    sigma_x = px.linear_extension()
    px_w_x = px_w
    jt = j.p.T
    for k in top:
        f = profiles[k].copy()
        value = float(best_vals[k])
        for _ in range(cfg.refine_iters):
            cond_y = jt @ f
            with np.errstate(invalid="ignore", divide="ignore"):
                cond_y = cond_y / py_w
            cond_y[py_w == 0.0] = 0.0
            cond_y -= float(py_w @ cond_y)
            g, vg = _signed_best_response(cond_y, py_w, sigma_y)
            if g is None:
                break
            cond_x = j.p @ g
            with np.errstate(invalid="ignore", divide="ignore"):
                cond_x = cond_x / px_w_x
            cond_x[px_w_x == 0.0] = 0.0
            cond_x -= float(px_w_x @ cond_x)
            f_new, vf = _signed_best_response(cond_x, px_w_x, sigma_x)
            if f_new is None:
                value = max(value, vg)
                break
            f = f_new
            improved = max(vg, vf)
            if improved <= value + 1e-15:
                value = max(value, improved)
                break
            value = improved
        overall = max(overall, value)
    return overall


def _two_sided_grid(j: JointPmf, px: Poset, py: Poset,
                    cfg: OracleConfig) -> float:
    fx = _monotone_profiles(px, marginal_x(j), cfg.grid_step)
    gy = _monotone_profiles(py, marginal_y(j), cfg.grid_step)
    if fx.shape[0] == 0 or gy.shape[0] == 0:
        raise InputError("no non-constant monotone profile exists")
    best = -np.inf
    chunk = max(1, 10_000_000 // max(gy.shape[0], 1))
    for a in range(0, fx.shape[0], chunk):
        covs = fx[a:a + chunk] @ j.p @ gy.T
        best = max(best, float(covs.max()))
    return best


def grid_oracle(j: JointPmf, px: Poset, py: Poset,
                cfg: OracleConfig = OracleConfig()) -> float:
    """Feasible lower bound on the CMC by exhaustive monotone gridding.

    With a total order on either side the opposite side is swept on a grid
    and answered exactly; otherwise both sides are gridded.  Alphabets are
    capped at 5 symbols per total-order side and 4 per general side.
    """
    js, pxs, pys, _, _ = strip_zero_support(j, px, py)
    for side, total_limit in ((pxs, _TOTAL_SIDE_LIMIT),
                              (pys, _TOTAL_SIDE_LIMIT)):
        limit = total_limit if side.is_total() else _POSET_SIDE_LIMIT
        if side.size > limit:
            raise SizeTooLarge(
                f"oracle limited to {limit} symbols for this order type"
            )
    if pys.is_total():
        return _sweep_and_refine(js, pxs, pys, cfg)
    if pxs.is_total():
        return _sweep_and_refine(js.transpose(), pys, pxs, cfg)
    return _two_sided_grid(js, pxs, pys, cfg)
