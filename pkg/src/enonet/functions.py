"""Named benchmark functions used by the experiments and the CLI.

Piecewise definitions take the left-closed branch at interior breakpoints
(``0.5 <= x < 1.5`` etc.); the sources leave the single-point values open,
so any convention only moves isolated samples.
"""

from __future__ import annotations

import numpy as np

PI6 = np.pi / 6.0


def q_jump_oscillation(x):
    """Piecewise test signal on [0, 3]: ramp, high-frequency sine burst,
    downward parabola, constant — with jumps between the branches."""
    x = np.asarray(x, dtype=float)
    return np.select(
        [x < 0.5, x < 1.5, x < 2.5],
        [-x, 3.0 * np.sin(10.0 * np.pi * x), -20.0 * (x - 2.0) ** 2],
        default=3.0,
    )


def f_kink(x):
    """Continuous on [0, 1] with a derivative jump at pi/6: linear left
    branch -2(x - pi/6), quadratic right branch (x - pi/6)^2."""
    x = np.asarray(x, dtype=float)
    return np.where(x < PI6, -2.0 * (x - PI6), (x - PI6) ** 2)


def f_smooth(x):
    """sin(x), the smooth companion of :func:`f_kink`."""
    return np.sin(np.asarray(x, dtype=float))


def sine_wave(x):
    """One full sine period on [0, 1]."""
    return np.sin(2.0 * np.pi * np.asarray(x, dtype=float))


def disk_frame(x, y):
    """2D piecewise-constant pattern on [0,1]^2: -10 inside the centered
    disk of radius 0.15, 30 outside the |. - 0.5| <= 0.8 box, 40 between."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    disk = (x - 0.5) ** 2 + (y - 0.5) ** 2 < 0.0225
    frame = (np.abs(x - 0.5) > 0.8) | (np.abs(y - 0.5) > 0.8)
    return np.where(disk, -10.0, np.where(frame, 30.0, 40.0))


def sine_family(q: int, n: int) -> np.ndarray:
    """Sampled mode sin((q+1) pi l / n), l = 0..n."""
    l = np.arange(n + 1)
    return np.sin((q + 1) * np.pi * l / n)


FUNCTIONS_1D = {
    "q62": (q_jump_oscillation, (0.0, 3.0)),
    "f1": (f_kink, (0.0, 1.0)),
    "f2": (f_smooth, (0.0, 1.0)),
    "sine": (sine_wave, (0.0, 1.0)),
}

FUNCTIONS_2D = {
    "q64": (disk_frame, (0.0, 1.0), (0.0, 1.0)),
}


def get_function_1d(name: str):
    try:
        return FUNCTIONS_1D[name]
    except KeyError:
        raise ValueError(f"unknown function {name!r}; choose from {sorted(FUNCTIONS_1D)}") from None


def get_function_2d(name: str):
    try:
        return FUNCTIONS_2D[name]
    except KeyError:
        raise ValueError(f"unknown function {name!r}; choose from {sorted(FUNCTIONS_2D)}") from None
