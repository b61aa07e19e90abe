"""ReLU networks for the adapted ENO-SR-2 decision and regression.

Both nets consume one ten-sample window (local nodes 0..9, interval of
interest [4, 5], evaluation point 4.5) and replicate the indicator pipeline
of :mod:`enonet.eno_sr` with ReLU-expressible primitives:

    |x| = (x)+ + (-x)+        max{a,b} = a + (b-a)+      min{a,b} = a - (a-b)+
    H_eps(x) = ((x)+ - (x-eps)+)/eps
    x*y on [0,1]x[-lam,lam] ~ (y+lam*x-lam)+ - (-y+lam*x-lam)+

The classification net outputs the indicator 4-tuple and classifies by
min-argmin; the regression net emits the approximate prediction where both
Heaviside gates are softened to H_eps and products go through the star
surrogate with lam=16.
"""

from __future__ import annotations

import numpy as np

from ..eno_sr import DEFAULT_GUARD, WINDOW, WINDOW_MID, sr_indicators
from .network import DenseLayer, IDENTITY, MlpNetwork, RELU


def h_eps(x, eps: float):
    """Ramp approximation of the Heaviside function: 0 below 0, 1 above eps."""
    if eps <= 0:
        raise ValueError("eps must be positive (the exact Heaviside is not ReLU-expressible)")
    x = np.asarray(x, dtype=float)
    out = (np.maximum(x, 0.0) - np.maximum(x - eps, 0.0)) / eps
    return float(out) if out.ndim == 0 else out


def star(x, y, lam: float = 16.0):
    """Multiplication surrogate on [0,1] x [-lam, lam]; exact for x in {0,1}."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.maximum(y + lam * x - lam, 0.0) - np.maximum(-y + lam * x - lam, 0.0)
    return float(out) if out.ndim == 0 else out


class _Tape:
    """Accumulates hidden layers; expressions are affine over the frontier."""

    def __init__(self, width):
        self.width = width
        self.layers = []

    def unit(self, i, scale=1.0, const=0.0):
        row = np.zeros(self.width)
        row[i] = scale
        return (row, const)

    @staticmethod
    def lin(terms, const=0.0):
        """terms: iterable of (coef, expr)."""
        row = None
        c = const
        for coef, (r, rc) in terms:
            row = coef * r if row is None else row + coef * r
            c += coef * rc
        return (row, c)

    def relu_layer(self, exprs):
        """Commit one hidden layer computing ReLU of the given expressions."""
        w = np.stack([row for row, _ in exprs])
        b = np.array([c for _, c in exprs])
        self.layers.append(DenseLayer(w, b, RELU))
        self.width = len(exprs)
        return [self.unit(i) for i in range(self.width)]

    def finish(self, exprs, rule):
        w = np.stack([row for row, _ in exprs])
        b = np.array([c for _, c in exprs])
        self.layers.append(DenseLayer(w, b, IDENTITY))
        return MlpNetwork(tuple(self.layers), rule)


def _input_exprs(tape):
    """Window-level pre-expressions shared by both SR nets."""
    w = [tape.unit(i) for i in range(WINDOW)]
    lin = tape.lin
    d = {j: lin([(1.0, w[j - 1]), (-2.0, w[j]), (1.0, w[j + 1])]) for j in range(1, 9)}
    delta_a = lin([(1.0, w[3]), (-1.0, w[2]), (1.0, w[6]), (-1.0, w[7])])
    delta_b = lin([(3.0, w[2]), (-2.0, w[3]), (-7.0, w[6]), (6.0, w[7])])
    p_own = lin([(0.5, w[4]), (0.5, w[5])])
    p_plus2 = lin([(2.5, w[6]), (-1.5, w[7])])
    p_minus2 = lin([(-1.5, w[2]), (2.5, w[3])])
    return w, d, delta_a, delta_b, p_own, p_plus2, p_minus2


def _neg(expr):
    row, c = expr
    return (-row, -c)


def _indicator_trunk(tape, guard, carries):
    """Layers 1-5 computing the X^3 tuple; `carries` are signed expressions
    ferried across every layer as (x)+/(-x)+ pairs.  Returns the four X^3
    expressions plus the carried values, all over the final frontier."""
    lin = tape.lin
    w, d, delta_a, delta_b, _, _, _ = _input_exprs(tape)

    def with_carries(pre, values):
        pairs = []
        for v in values:
            pre.append(v)
            pre.append(_neg(v))
            pairs.append((len(pre) - 2, len(pre) - 1))
        return pairs

    # layer 1: signed differences, slopes/intercept gaps, carried values
    pre = [d[j] for j in range(1, 9)] + [_neg(d[j]) for j in range(1, 9)]
    pre += [delta_a, _neg(delta_a), delta_b, _neg(delta_b)]
    pairs = with_carries(pre, carries)
    z = tape.relu_layer(pre)
    absd = {j: lin([(1.0, z[j - 1]), (1.0, z[7 + j])]) for j in range(1, 9)}
    da = lin([(1.0, z[16]), (1.0, z[17])])
    db = lin([(1.0, z[18]), (1.0, z[19])])
    carried = [lin([(1.0, z[i]), (-1.0, z[j])]) for i, j in pairs]

    # layer 2: first max-tree level; n5 = max(|D6|,|D7|), n4 = max(|D2|,|D3|)
    pre = [
        absd[2], lin([(1.0, absd[3]), (-1.0, absd[2])]),   # -> m5a (= n4 pair)
        absd[4], lin([(1.0, absd[6]), (-1.0, absd[4])]),   # -> m5b
        absd[7], lin([(1.0, absd[8]), (-1.0, absd[7])]),   # -> m5c
        absd[1], lin([(1.0, absd[2]), (-1.0, absd[1])]),   # -> m4a
        absd[3], lin([(1.0, absd[5]), (-1.0, absd[3])]),   # -> m4b
        absd[6], lin([(1.0, absd[7]), (-1.0, absd[6])]),   # -> m4c (= n5 pair)
        absd[5], absd[4], da, db,
    ]
    pairs = with_carries(pre, carried)
    z = tape.relu_layer(pre)
    m5a = lin([(1.0, z[0]), (1.0, z[1])])
    m5b = lin([(1.0, z[2]), (1.0, z[3])])
    m5c = lin([(1.0, z[4]), (1.0, z[5])])
    m4a = lin([(1.0, z[6]), (1.0, z[7])])
    m4b = lin([(1.0, z[8]), (1.0, z[9])])
    m4c = lin([(1.0, z[10]), (1.0, z[11])])
    d5, d4, da, db = z[12], z[13], z[14], z[15]
    carried = [lin([(1.0, z[i]), (-1.0, z[j])]) for i, j in pairs]

    # layer 3: second max level, rule-2 margin difference, s3/s4 localizers
    a_margin = lin([(1.0, d5), (-1.0, m4c)], const=-guard)
    b_margin = lin([(1.0, d4), (-1.0, m5a)], const=-guard)
    pre = [
        m5a, lin([(1.0, m5b), (-1.0, m5a)]),               # -> M5x
        m5c,
        m4a, lin([(1.0, m4b), (-1.0, m4a)]),               # -> M4x
        m4c,
        lin([(1.0, a_margin), (-1.0, b_margin)]),          # (A-B)+
        a_margin, _neg(a_margin),
        d5, d4, da,
        lin([(1.0, db), (-WINDOW_MID, da)]),               # -> s3
        lin([(-1.0, db), (WINDOW_MID, da)]),               # -> s4
    ]
    pairs = with_carries(pre, carried)
    z = tape.relu_layer(pre)
    m5x = lin([(1.0, z[0]), (1.0, z[1])])
    m5c = z[2]
    m4x = lin([(1.0, z[3]), (1.0, z[4])])
    m4c = z[5]
    amb = z[6]
    a_margin = lin([(1.0, z[7]), (-1.0, z[8])])
    d5, d4, da, s3, s4 = z[9], z[10], z[11], z[12], z[13]
    carried = [lin([(1.0, z[i]), (-1.0, z[j])]) for i, j in pairs]

    # layer 4: final max level, rule-2 min as (A - (A-B)+)+
    pre = [
        m5x, lin([(1.0, m5c), (-1.0, m5x)]),               # -> M5
        m4x, lin([(1.0, m4c), (-1.0, m4x)]),               # -> M4
        lin([(1.0, a_margin), (-1.0, amb)]),               # -> (min{A,B})+
        d5, d4, da, s3, s4,
    ]
    pairs = with_carries(pre, carried)
    z = tape.relu_layer(pre)
    m5 = lin([(1.0, z[0]), (1.0, z[1])])
    m4 = lin([(1.0, z[2]), (1.0, z[3])])
    minp = z[4]
    d5, d4, da, s3, s4 = z[5], z[6], z[7], z[8], z[9]
    carried = [lin([(1.0, z[i]), (-1.0, z[j])]) for i, j in pairs]

    # layer 5: rule-1 margins; X^3 tuple becomes available
    pre = [
        lin([(1.0, d5), (-1.0, m5)], const=-guard),
        lin([(1.0, d4), (-1.0, m4)], const=-guard),
        minp, da, s3, s4,
    ]
    pairs = with_carries(pre, carried)
    z = tape.relu_layer(pre)
    x3_1 = lin([(1.0, z[2]), (1.0, z[0]), (1.0, z[1])])
    x3_2 = z[3]
    x3_3 = z[4]
    x3_4 = z[5]
    carried = [lin([(1.0, z[i]), (-1.0, z[j])]) for i, j in pairs]
    return (x3_1, x3_2, x3_3, x3_4), carried


def build_enosr_class_net(guard: float = DEFAULT_GUARD) -> MlpNetwork:
    """Window classifier emitting the X^3 4-tuple; class = min-argmin.

    Exactly replicates `sr_indicators` on the window's own interval, so the
    class-to-shift map is 1,2 -> keep, 3 -> +2, 4 -> -2.
    """
    tape = _Tape(WINDOW)
    (x1, x2, x3, x4), _ = _indicator_trunk(tape, guard, carries=[])
    return tape.finish([x1, x2, x3, x4], "min_argmin")


def build_enosr_regression_net(eps: float, guard: float = DEFAULT_GUARD,
                               lam: float = 16.0) -> MlpNetwork:
    """Pure-ReLU approximate ENO-SR midpoint predictor (one scalar output).

    Softens both selection gates with H_eps and replaces the products by the
    star surrogate, assuming window samples in [-1, 1] so all star arguments
    stay within [-lam, lam] for lam = 16.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    tape = _Tape(WINDOW)
    lin = tape.lin
    # P differences are ferried through the indicator trunk
    _, _, _, _, p_own, p_plus2, p_minus2 = _input_exprs(tape)
    d_plus = lin([(1.0, p_plus2), (-1.0, p_own)])
    d_swap = lin([(1.0, p_minus2), (-1.0, p_plus2)])
    (x1, x2, x3, _), carried = _indicator_trunk(tape, guard, carries=[p_own, d_plus, d_swap])

    # layer 6: min(X1, X2) pieces and the beta ramp input
    pre = [lin([(1.0, x1), (-1.0, x2)]), x1, x3, lin([(1.0, x3)], const=-eps)]
    keep = list(carried)
    for v in keep:
        pre.append(v)
        pre.append(_neg(v))
    z = tape.relu_layer(pre)
    m = lin([(1.0, z[1]), (-1.0, z[0])])
    beta = lin([(1.0 / eps, z[2]), (-1.0 / eps, z[3])])
    p_own = lin([(1.0, z[4]), (-1.0, z[5])])
    d_plus = lin([(1.0, z[6]), (-1.0, z[7])])
    d_swap = lin([(1.0, z[8]), (-1.0, z[9])])

    # layer 7: alpha ramp pieces and the inner star
    pre = [
        lin([(1.0, m)], const=-eps), m,
        lin([(1.0, d_swap), (lam, beta)], const=-lam),
        lin([(-1.0, d_swap), (lam, beta)], const=-lam),
        p_own, _neg(p_own), d_plus, _neg(d_plus),
    ]
    z = tape.relu_layer(pre)
    alpha = lin([(1.0 / eps, z[1]), (-1.0 / eps, z[0])])
    inner = lin([(1.0, z[2]), (-1.0, z[3])])
    p_own = lin([(1.0, z[4]), (-1.0, z[5])])
    d_plus = lin([(1.0, z[6]), (-1.0, z[7])])

    # layer 8: outer star on mid = d_plus + inner
    mid = lin([(1.0, d_plus), (1.0, inner)])
    pre = [
        lin([(1.0, mid), (lam, alpha)], const=-lam),
        lin([(-1.0, mid), (lam, alpha)], const=-lam),
        p_own, _neg(p_own),
    ]
    z = tape.relu_layer(pre)
    out = lin([(1.0, z[2]), (-1.0, z[3]), (1.0, z[0]), (-1.0, z[1])])
    return tape.finish([out], "none")


def enosr_regression_reference(window, eps: float, guard: float = DEFAULT_GUARD,
                               lam: float = 16.0) -> float:
    """Direct scalar evaluation of the approximate ENO-SR prediction formula."""
    window = np.asarray(window, dtype=float)
    if window.shape != (WINDOW,):
        raise ValueError(f"need a window of {WINDOW} samples")
    ind = sr_indicators(window, guard=guard)
    x3 = ind.X3[4]
    alpha = h_eps(min(x3[0], x3[1]), eps)
    beta = h_eps(x3[2], eps)
    p_own = 0.5 * (window[4] + window[5])
    p_plus2 = 2.5 * window[6] - 1.5 * window[7]
    p_minus2 = -1.5 * window[2] + 2.5 * window[3]
    return float(p_own + star(alpha, p_plus2 - p_own + star(beta, p_minus2 - p_plus2, lam), lam))
