"""Gauss-Legendre building blocks shared by the solvers.

Everything here is deterministic: node sets depend only on the segment
list and the order, never on runtime state.
"""

from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre


@lru_cache(maxsize=64)
def gl_rule(order):
    """Gauss-Legendre nodes/weights on [-1, 1], cached."""
    x, w = legendre.leggauss(int(order))
    return x, w


def segment_rule(lo, hi, interior_points=(), order=32, min_per_seg=8):
    """Composite GL rule on [lo, hi] split at the given interior points.

    `order` is the total node budget; each segment gets nodes in
    proportion to its length (at least `min_per_seg`).  Returns
    (nodes, weights).
    """
    cuts = [lo] + [float(p) for p in sorted(interior_points) if lo < p < hi] + [hi]
    nseg = len(cuts) - 1
    length = hi - lo
    xs, ws = [], []
    for a, b in zip(cuts[:-1], cuts[1:]):
        n = max(min_per_seg, int(round(order * (b - a) / length)))
        gx, gw = gl_rule(n)
        xs.append((a + b) / 2 + (b - a) / 2 * gx)
        ws.append((b - a) / 2 * gw)
    if nseg == 1:
        gx, gw = gl_rule(order)
        return (lo + hi) / 2 + (hi - lo) / 2 * gx, (hi - lo) / 2 * gw
    return np.concatenate(xs), np.concatenate(ws)


def geometric_panels(lo, hi, toward, levels, order=16):
    """Composite GL rule on [lo, hi] with panels geometrically refined
    toward the endpoint `toward` (must equal lo or hi).

    Useful for integrands with mild endpoint singularities (log, sqrt')
    or sharp exponential decay at one end.
    """
    span = hi - lo
    fracs = [1.0] + [2.0 ** (-k) for k in range(1, levels + 1)] + [0.0]
    gx, gw = gl_rule(order)
    xs, ws = [], []
    for f_hi, f_lo in zip(fracs[:-1], fracs[1:]):
        if toward == lo:
            a, b = lo + f_lo * span, lo + f_hi * span
        else:
            a, b = hi - f_hi * span, hi - f_lo * span
        xs.append((a + b) / 2 + (b - a) / 2 * gx)
        ws.append((b - a) / 2 * gw)
    return np.concatenate(xs), np.concatenate(ws)
