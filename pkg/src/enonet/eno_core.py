"""Classic ENO machinery.

Undivided differences, stencil-shift selection for interpolation and
reconstruction, the fixed interpolation/reconstruction coefficient tables
(exact rationals, extended to arbitrary order by a Lagrange generator),
grid-level prediction between nested meshes, and input scaling.

Conventions
-----------
Grids are uniform with nodes ``x_i = c + i*h``.  Interval ``i`` (1-based in
the math, handled 0-based in code as "interval with left node ``i``") is
``[x_{i-1}, x_i]``.  An interpolation stencil with shift ``r`` for interval
``i`` starts at node ``i-1-r`` and contains both interval endpoints for
``0 <= r <= p-2``.  A reconstruction stencil with shift ``r`` for cell ``i``
starts at cell ``i-r``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


class GhostPolicy(str, enum.Enum):
    """How ghost values beyond the domain boundary are prescribed."""

    CONSTANT_EXTRAPOLATE = "constant"
    REFLECT = "reflect"
    PERIODIC = "periodic"


def _as_policy(policy) -> GhostPolicy:
    if isinstance(policy, GhostPolicy):
        return policy
    return GhostPolicy(policy)


class StencilKind(str, enum.Enum):
    INTERPOLATION = "interpolation"
    RECONSTRUCTION = "reconstruction"


@dataclass(frozen=True)
class GridHierarchy:
    """Nested uniform grids on [c, d] with N_k = 2^k * N0 cells at level k."""

    c: float
    d: float
    n0: int
    levels: int
    ghost: GhostPolicy = GhostPolicy.CONSTANT_EXTRAPOLATE

    def __post_init__(self):
        if not self.d > self.c:
            raise ValueError(f"domain right {self.d} must exceed left {self.c}")
        if self.n0 < 1:
            raise ValueError("coarsest cell count must be positive")
        if self.levels < 0:
            raise ValueError("level count must be non-negative")
        object.__setattr__(self, "ghost", _as_policy(self.ghost))

    def n_cells(self, k: int) -> int:
        self._check_level(k)
        return self.n0 * (1 << k)

    def spacing(self, k: int) -> float:
        return (self.d - self.c) / self.n_cells(k)

    def nodes(self, k: int) -> np.ndarray:
        return np.linspace(self.c, self.d, self.n_cells(k) + 1)

    def _check_level(self, k: int):
        if not 0 <= k <= self.levels:
            raise ValueError(f"level {k} outside [0, {self.levels}]")


@dataclass(frozen=True)
class StencilInput:
    """Raw samples feeding a single stencil-selection decision."""

    values: np.ndarray
    p: int
    kind: StencilKind = StencilKind.INTERPOLATION

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "kind", StencilKind(self.kind))
        if self.p < 2:
            raise ValueError("order p must be at least 2")
        expected = 2 * self.p - 2 if self.kind is StencilKind.INTERPOLATION else 2 * self.p - 1
        if values.shape != (expected,):
            raise ValueError(
                f"{self.kind.value} stencil for p={self.p} needs length {expected}, "
                f"got shape {values.shape}"
            )

    def shift(self) -> int:
        if self.kind is StencilKind.INTERPOLATION:
            return eno_interp_shift(self.values, self.p)
        return eno_rec_shift(self.values, self.p)


@dataclass(frozen=True)
class DifferenceTable:
    """Newton undivided differences; rows[s][j] = Delta^s_j, rows[0] is the input."""

    rows: list = field(default_factory=list)

    def __getitem__(self, s: int) -> np.ndarray:
        return self.rows[s]

    @property
    def depth(self) -> int:
        return len(self.rows) - 1


@dataclass(frozen=True)
class StencilShift:
    r: int


def undivided_differences(values, depth: int) -> DifferenceTable:
    """Iterated adjacent differences: row s = row (s-1)[1:] - row (s-1)[:-1]."""
    values = np.asarray(values, dtype=float)
    if values.ndim != 1:
        raise ValueError("values must be one-dimensional")
    if depth >= values.size:
        raise ValueError(f"depth {depth} must be below input length {values.size}")
    if depth < 0:
        raise ValueError("depth must be non-negative")
    rows = [values]
    for _ in range(depth):
        prev = rows[-1]
        rows.append(prev[1:] - prev[:-1])
    return DifferenceTable(rows)


def eno_interp_shift(values, p: int) -> int:
    """Left stencil shift for ENO-p interpolation, 0 <= r <= p-2.

    Follows the selection loop exactly: starting from r=0, at difference
    level ``s`` (s = 2..p-1) the shift is incremented iff the next-left
    undivided difference is strictly smaller in magnitude than the current
    one.  Ties never shift.
    """
    return int(eno_interp_shift_batch(np.asarray(values, dtype=float)[None, :], p)[0])


def eno_interp_shift_batch(stencils, p: int) -> np.ndarray:
    """Vectorized :func:`eno_interp_shift` for an (n, 2p-2) sample batch."""
    stencils = np.asarray(stencils, dtype=float)
    if p < 2:
        raise ValueError("order p must be at least 2")
    if stencils.ndim != 2 or stencils.shape[1] != 2 * p - 2:
        raise ValueError(f"interpolation stencils for p={p} need width {2 * p - 2}")
    n = stencils.shape[0]
    r = np.zeros(n, dtype=np.int64)
    diff = stencils
    rows = np.arange(n)
    for s in range(1, p):
        diff = diff[:, 1:] - diff[:, :-1]
        if s < 2:
            continue
        mag = np.abs(diff)
        # 1-based positions p-2-r and p-1-r -> 0-based p-3-r and p-2-r
        left = mag[rows, p - 3 - r]
        right = mag[rows, p - 2 - r]
        r += (left < right).astype(np.int64)
    return r


def eno_rec_shift(values, p: int) -> int:
    """Left stencil shift for ENO-p reconstruction, 0 <= r <= p-1."""
    return int(eno_rec_shift_batch(np.asarray(values, dtype=float)[None, :], p)[0])


def eno_rec_shift_batch(stencils, p: int) -> np.ndarray:
    """Vectorized :func:`eno_rec_shift` for an (n, 2p-1) sample batch."""
    stencils = np.asarray(stencils, dtype=float)
    if p < 2:
        raise ValueError("order p must be at least 2")
    if stencils.ndim != 2 or stencils.shape[1] != 2 * p - 1:
        raise ValueError(f"reconstruction stencils for p={p} need width {2 * p - 1}")
    n = stencils.shape[0]
    r = np.zeros(n, dtype=np.int64)
    diff = stencils
    rows = np.arange(n)
    for s in range(1, p):
        diff = diff[:, 1:] - diff[:, :-1]
        mag = np.abs(diff)
        # 1-based positions p-1-r and p-r -> 0-based p-2-r and p-1-r
        left = mag[rows, p - 2 - r]
        right = mag[rows, p - 1 - r]
        r += (left < right).astype(np.int64)
    return r


# ---------------------------------------------------------------------------
# Coefficient tables.  Hard-coded exact rationals for p <= 4; higher orders
# come from the Lagrange generator below (which must reproduce these rows).

_INTERP_TABLE = {
    (2, 0): (Fraction(1, 2), Fraction(1, 2)),
    (3, 0): (Fraction(3, 8), Fraction(3, 4), Fraction(-1, 8)),
    (3, 1): (Fraction(-1, 8), Fraction(3, 4), Fraction(3, 8)),
    (4, 0): (Fraction(5, 16), Fraction(15, 16), Fraction(-5, 16), Fraction(1, 16)),
    (4, 1): (Fraction(-1, 16), Fraction(9, 16), Fraction(9, 16), Fraction(-1, 16)),
    (4, 2): (Fraction(1, 16), Fraction(-5, 16), Fraction(15, 16), Fraction(5, 16)),
}

# The printed p=4, s=0 row starts with 1/4 here: the j=0 entry must make the
# row sum to one, which pins it to +1/4 (the Lagrange generator agrees).
_REC_TABLE = {
    (2, -1): (Fraction(3, 2), Fraction(-1, 2)),
    (2, 0): (Fraction(1, 2), Fraction(1, 2)),
    (2, 1): (Fraction(-1, 2), Fraction(3, 2)),
    (3, -1): (Fraction(11, 6), Fraction(-7, 6), Fraction(1, 3)),
    (3, 0): (Fraction(1, 3), Fraction(5, 6), Fraction(-1, 6)),
    (3, 1): (Fraction(-1, 6), Fraction(5, 6), Fraction(1, 3)),
    (3, 2): (Fraction(1, 3), Fraction(-7, 6), Fraction(11, 6)),
    (4, -1): (Fraction(25, 12), Fraction(-23, 12), Fraction(13, 12), Fraction(-1, 4)),
    (4, 0): (Fraction(1, 4), Fraction(13, 12), Fraction(-5, 12), Fraction(1, 12)),
    (4, 1): (Fraction(-1, 12), Fraction(7, 12), Fraction(7, 12), Fraction(-1, 12)),
    (4, 2): (Fraction(1, 12), Fraction(-5, 12), Fraction(13, 12), Fraction(-1, 4)),
    (4, 3): (Fraction(-1, 4), Fraction(13, 12), Fraction(-23, 12), Fraction(25, 12)),
}


def lagrange_interp_coeffs(p: int, r: int) -> tuple:
    """Exact midpoint-interpolation weights for stencil nodes i-1-r+j, j=0..p-1.

    Lagrange basis on integer nodes m_j = -1 - r + j (relative to node i),
    evaluated at the interval midpoint -1/2.
    """
    if p < 2:
        raise ValueError("order p must be at least 2")
    if not 0 <= r <= p - 2:
        raise ValueError(f"interpolation shift {r} outside [0, {p - 2}]")
    nodes = [Fraction(-1 - r + j) for j in range(p)]
    x = Fraction(-1, 2)
    coeffs = []
    for j in range(p):
        w = Fraction(1)
        for l in range(p):
            if l != j:
                w *= (x - nodes[l]) / (nodes[j] - nodes[l])
        coeffs.append(w)
    return tuple(coeffs)


def lagrange_rec_coeffs(p: int, s: int) -> tuple:
    """Exact right-face reconstruction weights for cells i-s+j, j=0..p-1.

    Derived by interpolating the primitive at the p+1 cell interfaces of the
    stencil and differentiating at x_{i+1/2}.
    """
    if p < 2:
        raise ValueError("order p must be at least 2")
    if not -1 <= s <= p - 1:
        raise ValueError(f"reconstruction shift row {s} outside [-1, {p - 1}]")
    # interface positions (relative to cell center i, in units of h)
    xi = [Fraction(2 * (-s + j) - 1, 2) for j in range(p + 1)]
    x = Fraction(1, 2)
    dl = []
    for j in range(p + 1):
        denom = Fraction(1)
        for l in range(p + 1):
            if l != j:
                denom *= xi[j] - xi[l]
        num = Fraction(0)
        for q in range(p + 1):
            if q == j:
                continue
            term = Fraction(1)
            for l in range(p + 1):
                if l != j and l != q:
                    term *= x - xi[l]
            num += term
        dl.append(num / denom)
    return tuple(sum(dl[j] for j in range(m + 1, p + 1)) for m in range(p))


def interp_coeffs_exact(p: int, r: int) -> tuple:
    if p < 2:
        raise ValueError("order p must be at least 2")
    if not 0 <= r <= p - 2:
        raise ValueError(f"interpolation shift {r} outside [0, {p - 2}]")
    if (p, r) in _INTERP_TABLE:
        return _INTERP_TABLE[(p, r)]
    return lagrange_interp_coeffs(p, r)


def rec_coeffs_exact(p: int, s: int) -> tuple:
    if p < 2:
        raise ValueError("order p must be at least 2")
    if not -1 <= s <= p - 1:
        raise ValueError(f"reconstruction shift row {s} outside [-1, {p - 1}]")
    if (p, s) in _REC_TABLE:
        return _REC_TABLE[(p, s)]
    return lagrange_rec_coeffs(p, s)


def interp_coeffs(p: int, r: int) -> np.ndarray:
    """Midpoint prediction weights C^p_{r,j} as binary floats."""
    return np.array([float(c) for c in interp_coeffs_exact(p, r)])


def rec_coeffs(p: int, s: int) -> np.ndarray:
    """Right-face reconstruction weights as binary floats (row s of the table)."""
    return np.array([float(c) for c in rec_coeffs_exact(p, s)])


def _interp_coeff_matrix(p: int) -> np.ndarray:
    return np.stack([interp_coeffs(p, r) for r in range(p - 1)])


def _rec_coeff_matrix(p: int) -> np.ndarray:
    # row index s+1 holds the shift-s coefficients, s = -1..p-1
    return np.stack([rec_coeffs(p, s) for s in range(-1, p)])


# ---------------------------------------------------------------------------
# Ghost padding and grid-level prediction.


def ghost_pad_nodes(values, width: int, policy) -> np.ndarray:
    """Extend nodal data by `width` ghost nodes on each side."""
    values = np.asarray(values, dtype=float)
    policy = _as_policy(policy)
    if width == 0:
        return values
    n = values.size - 1
    if policy is GhostPolicy.CONSTANT_EXTRAPOLATE:
        return np.pad(values, width, mode="edge")
    if policy is GhostPolicy.REFLECT:
        return np.pad(values, width, mode="reflect")
    # periodic with period n: f_{-m} = f_{n-m}, f_{n+m} = f_m
    if width > n:
        raise ValueError("periodic padding wider than one period")
    left = values[n - width:n]
    right = values[1:width + 1]
    return np.concatenate([left, values, right])


def ghost_pad_cells(values, width: int, policy) -> np.ndarray:
    """Extend cell data (averages / point values at centers) by ghost cells."""
    values = np.asarray(values, dtype=float)
    policy = _as_policy(policy)
    if width == 0:
        return values
    if policy is GhostPolicy.CONSTANT_EXTRAPOLATE:
        return np.pad(values, width, mode="edge")
    if policy is GhostPolicy.REFLECT:
        return np.pad(values, width, mode="symmetric")
    return np.pad(values, width, mode="wrap")


def predict_fine_level(coarse, p: int, ghost_policy=GhostPolicy.CONSTANT_EXTRAPOLATE,
                       shift_fn=None) -> np.ndarray:
    """Predict level k+1 node values from level k via ENO-p interpolation.

    Even fine nodes copy the coarse values; each odd node (an interval
    midpoint) is predicted from the stencil selected for its interval.
    ``shift_fn`` optionally replaces the selection rule: it receives the
    (n, 2p-2) window batch and returns per-interval shifts (used to drive
    the prediction with a network classifier).
    """
    coarse = np.asarray(coarse, dtype=float)
    if coarse.ndim != 1 or coarse.size < 2:
        raise ValueError("coarse data must hold at least two nodes")
    if p < 2:
        raise ValueError("order p must be at least 2")
    n = coarse.size - 1
    padded = ghost_pad_nodes(coarse, p - 2, ghost_policy)
    # window for interval i spans nodes i-p+1 .. i+p-2 (2p-2 samples)
    windows = sliding_window_view(padded, 2 * p - 2)  # windows[i-1] is interval i's
    if p == 2:
        mids = 0.5 * (coarse[:-1] + coarse[1:])
    else:
        if shift_fn is None:
            shifts = eno_interp_shift_batch(windows, p)
        else:
            shifts = np.asarray(shift_fn(windows), dtype=np.int64)
            if shifts.shape != (n,) or shifts.min() < 0 or shifts.max() > p - 2:
                raise ValueError("shift_fn must return one shift in [0, p-2] per interval")
        coeff = _interp_coeff_matrix(p)[shifts]  # (n, p)
        # stencil of interval i starts at node i-1-r -> padded index i-1-r+(p-2)
        starts = np.arange(n) + (p - 2) - shifts
        idx = starts[:, None] + np.arange(p)[None, :]
        samples = padded[idx]
        mids = np.einsum("ij,ij->i", coeff, samples)
    fine = np.empty(2 * n + 1)
    fine[::2] = coarse
    fine[1::2] = mids
    return fine


def reconstruct_interfaces(averages, p: int, ghost_policy=GhostPolicy.CONSTANT_EXTRAPOLATE):
    """Per-cell interface values from cell averages via ENO-p reconstruction.

    Returns ``(left, right)`` where ``right[i]`` approximates the function at
    x_{i+1/2} and ``left[i]`` at x_{i-1/2}, both from cell i's stencil.
    """
    averages = np.asarray(averages, dtype=float)
    if averages.ndim != 1 or averages.size < 1:
        raise ValueError("cell data must hold at least one cell")
    if p < 2:
        raise ValueError("order p must be at least 2")
    n = averages.size
    padded = ghost_pad_cells(averages, p - 1, ghost_policy)
    windows = sliding_window_view(padded, 2 * p - 1)  # windows[i] is cell i's
    shifts = eno_rec_shift_batch(windows, p)
    table = _rec_coeff_matrix(p)
    coeff_right = table[shifts + 1]
    coeff_left = table[shifts]
    starts = (p - 1) - shifts
    idx = starts[:, None] + np.arange(p)[None, :] + np.arange(n)[:, None]
    samples = padded[idx]
    right = np.einsum("ij,ij->i", coeff_right, samples)
    left = np.einsum("ij,ij->i", coeff_left, samples)
    return left, right


def scale_input(x) -> np.ndarray:
    """Affinely map samples into [-1, 1] (componentwise over the last axis).

    The zero vector maps to the all-ones vector; any constant vector is
    treated the same way since the map is undefined when max equals min.
    """
    x = np.asarray(x, dtype=float)
    a = x.min(axis=-1, keepdims=True)
    b = x.max(axis=-1, keepdims=True)
    span = b - a
    degenerate = span == 0.0
    safe = np.where(degenerate, 1.0, span)
    scaled = (2.0 * x - (b + a)) / safe
    return np.where(degenerate, 1.0, scaled)
