"""Adapted second-order ENO-SR interpolation.

Interval labelling from second differences, singularity localization by
intersecting the two linear pieces two intervals away, midpoint prediction,
and the indicator pipeline (X^2 smoothness score, X^3 four-tuple, class by
min-argmin) that the network builders replicate.

Interval convention: interval ``l`` (0-based) is ``[x_l, x_{l+1}]``.  All
indicator arithmetic for interval ``l`` runs in the local coordinates of its
ten-sample window ``samples[l-4 : l+6]`` mapped to nodes 0..9, so the
interval of interest is [4, 5] with midpoint 4.5.  Decisions for the first
and last four intervals are forced to class 1 (plain linear interpolation).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .eno_core import GhostPolicy

DEFAULT_GUARD = 1e-10

#: number of boundary intervals on each side forced to the linear class
BOUNDARY_MARGIN = 4

#: samples needed by one interval's decision
WINDOW = 10

#: local coordinate of the interval-of-interest midpoint inside a window
WINDOW_MID = 4.5


@dataclass(frozen=True)
class LinearPiece:
    """Line a*x + b interpolating both endpoints of one interval."""

    a: float
    b: float

    def __call__(self, x):
        return self.a * np.asarray(x) + self.b


@dataclass(frozen=True)
class IntervalLabels:
    """Per-interval Good/Bad flags; bad[l] refers to [x_l, x_{l+1}]."""

    bad: np.ndarray

    def __len__(self):
        return self.bad.size


@dataclass(frozen=True)
class SrIndicators:
    """Indicator pipeline outputs.

    M, Nplus, Nminus are node-indexed neighbor maxima of |second difference|
    (zero where undefined).  X2 and the (n_intervals, 4) X3 matrix are
    interval-indexed; class entries are 1..4:

    1. Good interval: use the interval's own linear piece.
    2. Bad but the two flanking pieces are parallel: use the own piece.
    3. Bad, midpoint right of the intersection: shift +2.
    4. Bad, midpoint left of the intersection: shift -2.
    """

    M: np.ndarray
    Nplus: np.ndarray
    Nminus: np.ndarray
    X2: np.ndarray
    X3: np.ndarray
    classes: np.ndarray


def second_differences(samples) -> np.ndarray:
    """Centered second differences; boundary nodes carry zero."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or samples.size < 3:
        raise ValueError("need at least three samples")
    out = np.zeros_like(samples)
    out[1:-1] = samples[:-2] - 2.0 * samples[1:-1] + samples[2:]
    return out


def critical_scale(jump: float, second_deriv_sup: float) -> float:
    """Grid size below which the kink interval is guaranteed to be flagged."""
    if second_deriv_sup <= 0:
        raise ValueError("second-derivative bound must be positive (smooth data has no finite critical scale)")
    return abs(jump) / (4.0 * second_deriv_sup)


def intersect(piece_a: LinearPiece, piece_b: LinearPiece, guard: float = DEFAULT_GUARD) -> Optional[float]:
    """Intersection abscissa of two lines, or None when (nearly) parallel."""
    da = piece_a.a - piece_b.a
    tol = guard * max(1.0, abs(piece_a.a), abs(piece_b.a))
    if abs(da) <= tol:
        return None
    return (piece_b.b - piece_a.b) / da


def linear_pieces(samples) -> tuple:
    """Slopes and intercepts (index coordinates) of every interval's chord."""
    samples = np.asarray(samples, dtype=float)
    a = samples[1:] - samples[:-1]
    b = samples[:-1] - a * np.arange(samples.size - 1)
    return a, b


def label_intervals(samples, h: float = 1.0, guard: float = DEFAULT_GUARD) -> IntervalLabels:
    """Flag intervals that may contain a derivative singularity.

    Rule 1 flags the two intervals sharing a node whose |second difference|
    strictly dominates all six neighbors within distance three; rule 2 flags
    an interval whose endpoint differences dominate one-sidedly.  Strict
    comparisons carry the numerical guard: ``x > y`` means ``x - y > guard``.
    The grid spacing ``h`` does not influence the comparisons; it is accepted
    so callers can pass grid metadata along.  Intervals closer than four to
    a boundary stay Good.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.size < WINDOW - 1:
        raise ValueError(f"need at least {WINDOW - 1} samples (rules look three nodes out)")
    del h
    n = samples.size - 1
    d2 = np.abs(second_differences(samples))
    bad = np.zeros(n, dtype=bool)

    # rule 1 per node j in [4, n-4]: strict max over j+-1..3
    nodes = np.arange(4, n - 3)
    if nodes.size:
        neigh = np.stack([d2[nodes + s] for s in (-3, -2, -1, 1, 2, 3)])
        fired = d2[nodes] - neigh.max(axis=0) > guard
        for j in nodes[fired]:
            bad[j - 1] = True
            bad[j] = True

    # rule 2 per interval l in [4, n-5]; endpoints are nodes l and l+1
    ell = np.arange(4, n - 4)
    if ell.size:
        right = d2[ell + 1] - np.maximum(d2[ell + 2], d2[ell + 3]) > guard
        left = d2[ell] - np.maximum(d2[ell - 1], d2[ell - 2]) > guard
        bad[ell[right & left]] = True

    # clamp to the interior range the indicator pipeline covers
    bad[:BOUNDARY_MARGIN] = False
    bad[max(n - BOUNDARY_MARGIN, 0):] = False
    return IntervalLabels(bad)


def _window_pieces(samples, ell):
    """Local-frame (window nodes 0..9) flanking pieces for intervals `ell`."""
    f = np.asarray(samples, dtype=float)
    a_left = f[ell - 1] - f[ell - 2]
    b_left = f[ell - 2] - 2.0 * a_left
    a_right = f[ell + 3] - f[ell + 2]
    b_right = f[ell + 2] - 6.0 * a_right
    return a_left, b_left, a_right, b_right


def sr_indicators(samples, midpoints=None, guard: float = DEFAULT_GUARD) -> SrIndicators:
    """Evaluate the smoothness/localization indicators and the 4-way class.

    ``midpoints`` optionally overrides the per-interval evaluation abscissa,
    given in global index coordinates (default: interval midpoints l + 1/2).
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or samples.size < WINDOW:
        raise ValueError(f"need at least {WINDOW} samples")
    n = samples.size - 1
    if midpoints is not None:
        midpoints = np.asarray(midpoints, dtype=float)
        if midpoints.shape != (n,):
            raise ValueError(f"midpoints must have one entry per interval ({n})")

    d2 = np.abs(second_differences(samples))
    m_arr = np.zeros(n + 1)
    npl = np.zeros(n + 1)
    nmi = np.zeros(n + 1)
    j = np.arange(1, n)
    ok = (j >= 2) & (j <= n - 3)
    npl[j[ok]] = np.maximum(d2[j[ok] + 1], d2[j[ok] + 2])
    ok = (j >= 3) & (j <= n - 1)
    nmi[j[ok]] = np.maximum(d2[j[ok] - 1], d2[j[ok] - 2])
    ok = (j >= 4) & (j <= n - 4)
    jj = j[ok]
    if jj.size:
        stack = np.stack([d2[jj + s] for s in (-3, -2, -1, 1, 2, 3)])
        m_arr[jj] = stack.max(axis=0)

    x2 = np.zeros(n)
    x3 = np.zeros((n, 4))
    classes = np.ones(n, dtype=np.int64)
    ell = np.arange(BOUNDARY_MARGIN, n - BOUNDARY_MARGIN)
    if ell.size:
        min_part = np.minimum(d2[ell + 1] - npl[ell + 1], d2[ell] - nmi[ell])
        x2[ell] = (
            np.maximum(min_part - guard, 0.0)
            + np.maximum(d2[ell + 1] - m_arr[ell + 1] - guard, 0.0)
            + np.maximum(d2[ell] - m_arr[ell] - guard, 0.0)
        )
        a_left, b_left, a_right, b_right = _window_pieces(samples, ell)
        da = np.abs(a_left - a_right)
        db = np.abs(b_left - b_right)
        if midpoints is None:
            xstar = np.full(ell.shape, WINDOW_MID)
        else:
            xstar = midpoints[ell] - (ell - BOUNDARY_MARGIN)
        x3[ell, 0] = x2[ell]
        x3[ell, 1] = da
        x3[ell, 2] = np.maximum(db - xstar * da, 0.0)
        x3[ell, 3] = np.maximum(-db + xstar * da, 0.0)
        classes[ell] = 1 + np.argmin(x3[ell], axis=1)
    return SrIndicators(m_arr, npl, nmi, x2, x3, classes)


def _combine(p_own, p_plus2, p_minus2, alpha, beta):
    """Convex selection p_own + alpha*(p_plus2 - p_own + beta*(p_minus2 - p_plus2)).

    Both prediction routes funnel through this expression so that exact
    agreement between them is a statement about decisions, not float
    association.
    """
    return p_own + alpha * (p_plus2 - p_own + beta * (p_minus2 - p_plus2))


def _midpoint_values(samples):
    """Midpoint values of p_l, p_{l+2}, p_{l-2} for every interval l."""
    f = np.asarray(samples, dtype=float)
    n = f.size - 1
    p_own = 0.5 * (f[:-1] + f[1:])
    p_plus2 = np.full(n, np.nan)
    p_minus2 = np.full(n, np.nan)
    # p_{l+2} evaluated at local 4.5, piece on local nodes (6, 7)
    p_plus2[: n - 3] = 2.5 * f[2:n - 1] - 1.5 * f[3:n]
    # p_{l-2} on local nodes (2, 3)
    p_minus2[2:] = -1.5 * f[0:n - 2] + 2.5 * f[1:n - 1]
    return p_own, p_plus2, p_minus2


def enosr_predict(samples, ghost_policy=GhostPolicy.CONSTANT_EXTRAPOLATE,
                  guard: float = DEFAULT_GUARD, method: str = "rules") -> np.ndarray:
    """Predict the next refinement level with the adapted ENO-SR-2 scheme.

    Even output nodes copy the input; odd nodes take the midpoint value of
    the linear piece selected for their interval.  ``method="rules"`` runs
    the labelling/intersection logic, ``method="formula"`` the equivalent
    Heaviside form of the indicator pipeline; the two agree exactly.  Since
    boundary intervals are forced to plain linear interpolation, the ghost
    policy never influences the output; the parameter is kept for interface
    symmetry with the ENO predictors.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim != 1 or samples.size < 2:
        raise ValueError("need at least two samples")
    del ghost_policy
    n = samples.size - 1
    p_own, p_plus2, p_minus2 = _midpoint_values(samples)
    alpha = np.zeros(n)
    beta = np.zeros(n)
    if n >= 2 * BOUNDARY_MARGIN + 1 and samples.size >= WINDOW:
        interior = np.arange(BOUNDARY_MARGIN, n - BOUNDARY_MARGIN)
        if method == "formula":
            ind = sr_indicators(samples, guard=guard)
            x3 = ind.X3[interior]
            alpha[interior] = np.where(np.minimum(x3[:, 0], x3[:, 1]) > 0.0, 1.0, 0.0)
            beta[interior] = np.where(x3[:, 2] > 0.0, 1.0, 0.0)
        elif method == "rules":
            labels = label_intervals(samples, guard=guard)
            a_left, b_left, a_right, b_right = _window_pieces(samples, interior)
            for k, ell in enumerate(interior):
                if not labels.bad[ell]:
                    continue
                y = intersect(LinearPiece(a_left[k], b_left[k]),
                              LinearPiece(a_right[k], b_right[k]), guard=guard)
                if y is None:
                    continue  # parallel flanks: keep the interval's own piece
                alpha[ell] = 1.0
                beta[ell] = 1.0 if y > WINDOW_MID else 0.0
        else:
            raise ValueError(f"unknown method {method!r}")
    safe_plus2 = np.where(np.isnan(p_plus2), 0.0, p_plus2)
    safe_minus2 = np.where(np.isnan(p_minus2), 0.0, p_minus2)
    mids = _combine(p_own, safe_plus2, safe_minus2, alpha, beta)
    fine = np.empty(2 * n + 1)
    fine[::2] = samples
    fine[1::2] = mids
    return fine
