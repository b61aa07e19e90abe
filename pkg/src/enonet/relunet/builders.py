"""Compilers emitting exact ReLU networks for ENO stencil selection.

`build_eno_interp_net` follows the general constructive recipe: a layer of
signed undivided differences, a layer of (X+1, X, X-1) ramp triples encoding
"compare and maybe shift" decisions, a path-weight layer whose rows hit the
bias ceiling exactly when the corresponding decision path is consistent with
the input, and a pairwise max tree that reduces each shift bin to one score.
Classification is min-argmax, so ties resolve to the smallest shift, exactly
like the selection loop.

The explicit p=3 / p=4 interpolation nets and the p=2 / p=3 reconstruction
nets use fixed literal weights.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .network import DenseLayer, IDENTITY, MlpNetwork, RELU


def interp_hidden_layer_count(p: int) -> int:
    """Hidden-layer count of the general construction for order p."""
    return p + math.ceil(math.log2(math.comb(p - 2, (p - 2) // 2)))


def _difference_rows(width: int, level: int) -> np.ndarray:
    """Coefficient matrix of the level-th adjacent differences of a width-vector."""
    rows = np.eye(width)
    for _ in range(level):
        rows = rows[1:] - rows[:-1]
    return rows


def build_eno_interp_net(p: int) -> MlpNetwork:
    """Exact ReLU network computing the ENO-p interpolation stencil shift.

    Input width 2p-2, output width p-1; class index == stencil shift.
    """
    if p < 3:
        raise ValueError("general construction needs p >= 3 (p=2 has a single stencil)")
    width_in = 2 * p - 2
    # compared terms: Delta^s positions p-s..p-1 (1-based) for s = 2..p-1
    term_rows = []
    term_index = {}
    for s in range(2, p):
        diff = _difference_rows(width_in, s)
        for m in range(p - s, p):  # 1-based position within Delta^s
            term_index[(s, m)] = len(term_rows)
            term_rows.append(diff[m - 1])
    terms = np.stack(term_rows)
    m_terms = terms.shape[0]
    assert m_terms == p * (p - 1) // 2 - 1

    # hidden layer 1: stacked +/- terms
    w1 = np.vstack([terms, -terms])
    layer1 = DenseLayer(w1, np.zeros(2 * m_terms), RELU)

    # comparison nodes (s, r): X2 = |Delta^s[p-2-r]| - |Delta^s[p-1-r]|
    nodes = [(s, r) for s in range(2, p) for r in range(s - 1)]
    n_nodes = len(nodes)
    assert n_nodes == (p - 2) * (p - 1) // 2
    node_index = {node: q for q, node in enumerate(nodes)}
    w2_tilde = np.zeros((n_nodes, 2 * m_terms))
    for q, (s, r) in enumerate(nodes):
        left = term_index[(s, p - 2 - r)]
        right = term_index[(s, p - 1 - r)]
        for t, sign in ((left, 1.0), (right, -1.0)):
            w2_tilde[q, t] += sign
            w2_tilde[q, m_terms + t] += sign

    # hidden layer 2: ramp triples (X2+1, X2, X2-1)
    w2 = np.vstack([w2_tilde, w2_tilde, w2_tilde])
    b2 = np.concatenate([np.ones(n_nodes), np.zeros(n_nodes), -np.ones(n_nodes)])
    layer2 = DenseLayer(w2, b2, RELU)

    # X3 (H1/H2 values) as an affine map of layer 2
    w3_tilde = np.zeros((2 * n_nodes, 3 * n_nodes))
    b3_tilde = np.concatenate([np.zeros(n_nodes), -np.ones(n_nodes)])
    for q in range(n_nodes):
        w3_tilde[q, q] = 1.0
        w3_tilde[q, n_nodes + q] = -1.0
        w3_tilde[n_nodes + q, n_nodes + q] = 1.0
        w3_tilde[n_nodes + q, 2 * n_nodes + q] = -1.0

    # decision-path rows, ordered by the bin they land in.  A direction
    # string fixes the visited nodes; the consistent certificate puts +1 on
    # the H1 entry of every keep-node and -1 on the H2 entry of every
    # shift-node.  Each row appears 2^(p-2) times so the bin groups have the
    # full 2^(2p-4) rows of the construction.
    n_moves = p - 2
    bins = [[] for _ in range(p - 1)]
    for moves in itertools.product((0, 1), repeat=n_moves):
        row = np.zeros(2 * n_nodes)
        r = 0
        for s, shift in zip(range(2, p), moves):
            q = node_index[(s, r)]
            if shift:
                row[n_nodes + q] = -1.0
                r += 1
            else:
                row[q] = 1.0
        bins[r].append(row)
    dup = 1 << n_moves
    path_rows = []
    group_sizes = []
    for r, rows in enumerate(bins):
        assert len(rows) == math.comb(n_moves, r)
        for row in rows:
            path_rows.extend([row] * dup)
        group_sizes.append(len(rows) * dup)
    w_hat = np.stack(path_rows)
    b_hat = np.full(w_hat.shape[0], float(p - 2))
    assert w_hat.shape[0] == 1 << (2 * p - 4)

    # fold the affine X3 map into the path layer: V = (w_hat @ w3_tilde) Z2 + c
    pre_w = w_hat @ w3_tilde
    pre_b = w_hat @ b3_tilde + b_hat

    layers = [layer1, layer2]
    # pairwise max tree on the nonnegative bin scores
    depth = interp_hidden_layer_count(p) - 2
    values = []  # per bin: list of (row over previous layer, const)
    offset = 0
    for size in group_sizes:
        values.append([(pre_w[offset + i], pre_b[offset + i]) for i in range(size)])
        offset += size
    for _ in range(depth):
        neuron_rows, neuron_bias = [], []
        next_values = []
        for group in values:
            next_group = []
            i = 0
            while i + 1 < len(group):
                (ra, ca), (rb, cb) = group[i], group[i + 1]
                ia = len(neuron_rows)
                neuron_rows.extend([ra, rb - ra])
                neuron_bias.extend([ca, cb - ca])
                next_group.append(("pair", ia))
                i += 2
            if i < len(group):
                ra, ca = group[i]
                ia = len(neuron_rows)
                neuron_rows.append(ra)
                neuron_bias.append(ca)
                next_group.append(("single", ia))
            next_values.append(next_group)
        width = len(neuron_rows)
        layers.append(DenseLayer(np.stack(neuron_rows), np.array(neuron_bias), RELU))
        # re-express carried values over the new layer
        values = []
        for next_group in next_values:
            group = []
            for kind, ia in next_group:
                row = np.zeros(width)
                row[ia] = 1.0
                if kind == "pair":
                    row[ia + 1] = 1.0
                group.append((row, 0.0))
            values.append(group)
    out_rows, out_bias = [], []
    for group in values:
        assert len(group) == 1, "max tree must reduce every bin to one score"
        row, const = group[0]
        out_rows.append(row)
        out_bias.append(const)
    layers.append(DenseLayer(np.stack(out_rows), np.array(out_bias), IDENTITY))
    return MlpNetwork(tuple(layers), "min_argmax")


def build_eno3_explicit() -> MlpNetwork:
    """Literal-weight single-hidden-layer net for the ENO-3 interpolation shift."""
    w1 = np.array([
        [0.0, 1.0, -2.0, 1.0],
        [1.0, -2.0, 1.0, 0.0],
        [0.0, -1.0, 2.0, -1.0],
        [-1.0, 2.0, -1.0, 0.0],
    ])
    w2 = np.array([
        [-1.0, 1.0, -1.0, 1.0],
        [1.0, -1.0, 1.0, -1.0],
    ])
    return MlpNetwork(
        (
            DenseLayer(w1, np.zeros(4), RELU),
            DenseLayer(w2, np.zeros(2), IDENTITY),
        ),
        "min_argmax",
    )


def build_eno4_explicit() -> MlpNetwork:
    """Literal-weight three-hidden-layer net (widths 10, 6, 4) for ENO-4."""
    w1_tilde = np.array([
        [0.0, 0.0, 1.0, -2.0, 1.0, 0.0],
        [0.0, 1.0, -2.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, -1.0, 3.0, -3.0, 1.0],
        [0.0, -1.0, 3.0, -3.0, 1.0, 0.0],
        [-1.0, 3.0, -3.0, 1.0, 0.0, 0.0],
    ])
    w1 = np.vstack([w1_tilde, -w1_tilde])
    w2_half = np.array([
        [-1.0, 1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, -1.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, -1.0, 1.0],
    ])
    w2_tilde = np.hstack([w2_half, w2_half])
    w2 = np.vstack([w2_tilde, -w2_tilde])
    w3 = np.array([
        [1.0, 1.0, 1.0, 0.0, 0.0, 1.0],
        [1.0, 0.0, 1.0, 0.0, 1.0, 1.0],
        [-1.0, 1.0, 0.0, 1.0, 0.0, -1.0],
        [0.0, 1.0, 0.0, 1.0, 1.0, 1.0],
    ])
    w4 = np.array([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])
    return MlpNetwork(
        (
            DenseLayer(w1, np.zeros(10), RELU),
            DenseLayer(w2, np.zeros(6), RELU),
            DenseLayer(w3, np.zeros(4), RELU),
            DenseLayer(w4, np.zeros(3), IDENTITY),
        ),
        "min_argmax",
    )


def build_eno_rec_net(p: int) -> MlpNetwork:
    """Exact ReLU network for the ENO-p reconstruction stencil shift.

    p=2: one hidden layer of width 4 (input 3, output 2).  p=3: hidden widths
    (10, 6, 4) with input 5 and output 4; the reachable shifts are 0..2 and
    the fourth score is a constant floor that never wins the argmax.
    """
    if p == 2:
        w1 = np.array([
            [-1.0, 1.0, 0.0],
            [0.0, -1.0, 1.0],
            [1.0, -1.0, 0.0],
            [0.0, 1.0, -1.0],
        ])
        w2 = np.array([
            [1.0, -1.0, 1.0, -1.0],
            [-1.0, 1.0, -1.0, 1.0],
        ])
        return MlpNetwork(
            (
                DenseLayer(w1, np.zeros(4), RELU),
                DenseLayer(w2, np.zeros(2), IDENTITY),
            ),
            "min_argmax",
        )
    if p == 3:
        # same decision tree as the explicit p=4 interpolation net, driven by
        # first/second differences of the five cell averages
        w1_tilde = np.array([
            [0.0, 0.0, -1.0, 1.0, 0.0],
            [0.0, -1.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, -2.0, 1.0],
            [0.0, 1.0, -2.0, 1.0, 0.0],
            [1.0, -2.0, 1.0, 0.0, 0.0],
        ])
        w1 = np.vstack([w1_tilde, -w1_tilde])
        w2_half = np.array([
            [-1.0, 1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, -1.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, -1.0, 1.0],
        ])
        w2_tilde = np.hstack([w2_half, w2_half])
        w2 = np.vstack([w2_tilde, -w2_tilde])
        w3 = np.array([
            [1.0, 1.0, 1.0, 0.0, 0.0, 1.0],
            [1.0, 0.0, 1.0, 0.0, 1.0, 1.0],
            [-1.0, 1.0, 0.0, 1.0, 0.0, -1.0],
            [0.0, 1.0, 0.0, 1.0, 1.0, 1.0],
        ])
        w4 = np.array([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 0.0, 0.0],
        ])
        b4 = np.array([0.0, 0.0, 0.0, -1.0])
        return MlpNetwork(
            (
                DenseLayer(w1, np.zeros(10), RELU),
                DenseLayer(w2, np.zeros(6), RELU),
                DenseLayer(w3, np.zeros(4), RELU),
                DenseLayer(w4, b4, IDENTITY),
            ),
            "min_argmax",
        )
    raise ValueError("reconstruction networks are provided for p in {2, 3}")
