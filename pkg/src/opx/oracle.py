"""Brute-force ground truth for the varying-weight orthogonal polynomials.

Discretizes d nu_N = e^{-N V(x)} dx on a composite Gauss-Legendre grid
and runs the Stieltjes procedure with full reorthogonalization.  The
iteration works on weight-absorbed vectors p_k(x_i) sqrt(w_i), which
stay O(1) everywhere and make the Gram matrix the plain dot product, so
no overflow occurs even at the n_max cap of 128.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GrowthError, NumericalError
from .fields import ExternalField
from .quadrature import gl_rule

N_MAX_CAP = 128
_TAIL_FACTOR = 1e-30
_POINTS_PER_PANEL = 16


@dataclass(frozen=True)
class QuadratureGrid:
    nodes: np.ndarray
    weights: np.ndarray          # includes the e^{-N V} factor
    plain_weights: np.ndarray    # bare GL weights, for d x integrals
    truncation_radius: float
    node_count: int


@dataclass(frozen=True)
class RecurrenceTable:
    a: np.ndarray                # diagonal coefficients a_0 .. a_{n_max-1}
    b: np.ndarray                # off-diagonal b_1 .. b_{n_max} (b[0] unused, 0)
    m0: float
    n_max: int


def _tail_ok(field, N, n_max, L, m0_scale):
    logtail = -N * float(field.v(L)) + 2 * n_max * math.log(L) + math.log(2 * L)
    return logtail < math.log(_TAIL_FACTOR * m0_scale)


def build_grid(field: ExternalField, N: int, n_max: int,
               nodes_per_unit=None) -> QuadratureGrid:
    """Composite GL grid on [-L, L] with L from the weight tail bound.

    The density default scales with max(N, n_max): the integrands are
    degree ~2 n_max polynomials oscillating on the scale 1/(N psi), and
    16-point panels need roughly two panels per oscillation to reach
    1e-12.  Panel edges snap to field kinks.
    """
    if N < 1 or n_max < 1:
        raise DomainError("need N >= 1 and n_max >= 1")
    if n_max > N_MAX_CAP:
        raise DomainError(f"n_max capped at {N_MAX_CAP} in double precision")
    if nodes_per_unit is None:
        nodes_per_unit = max(40, 2 * max(N, n_max))
    # crude mass scale for the tail bound: weight near its minimum
    xs = np.linspace(-field.growth_hint, field.growth_hint, 2001)
    vmin = float(np.min(field.v(xs)))
    m0_scale = math.exp(-N * vmin) * 1e-3
    L = None
    cand = field.growth_hint
    while cand <= 50.0:
        if _tail_ok(field, N, n_max, cand, m0_scale):
            L = cand
            break
        cand += 0.5
    if L is None:
        raise GrowthError("tail bound unsatisfiable for L <= 50; field grows too slowly")

    width = _POINTS_PER_PANEL / nodes_per_unit
    edges = set(np.arange(-L, L + width / 2, width).tolist())
    edges.add(float(L))
    for k in field.kinks:
        if -L < k < L:
            edges.add(float(k))
    edges = np.array(sorted(edges))
    gx, gw = gl_rule(_POINTS_PER_PANEL)
    mid = (edges[1:] + edges[:-1])[:, None] / 2
    half = (edges[1:] - edges[:-1])[:, None] / 2
    nodes = (mid + half * gx).ravel()
    wts = (half * gw).ravel()
    weights = wts * np.exp(-N * np.asarray(field.v(nodes), dtype=float))
    # nodes whose weight underflows to exactly zero contribute nothing to
    # any weighted sum; dropping them keeps every stored weight strictly
    # positive without changing a single integral
    keep = weights > 0.0
    return QuadratureGrid(nodes=nodes[keep], weights=weights[keep],
                          plain_weights=wts[keep],
                          truncation_radius=L, node_count=int(keep.sum()))


def stieltjes(grid: QuadratureGrid, n_max: int) -> RecurrenceTable:
    """Three-term recurrence coefficients by the discretized Stieltjes
    procedure with full reorthogonalization (twice per step)."""
    if grid.node_count < 4 * n_max:
        raise DomainError("node_count must be at least 4 * n_max")
    w = grid.weights
    x = grid.nodes
    m0 = float(w.sum())
    sq = np.sqrt(w)
    Q = np.empty((x.size, n_max + 1))
    Q[:, 0] = sq / math.sqrt(m0)
    a = np.zeros(n_max)
    b = np.zeros(n_max + 1)
    for k in range(n_max):
        a[k] = float(x @ (Q[:, k] * Q[:, k]))
        q = (x - a[k]) * Q[:, k]
        if k > 0:
            q -= b[k] * Q[:, k - 1]
        for _ in range(2):
            q -= Q[:, :k + 1] @ (Q[:, :k + 1].T @ q)
        nrm2 = float(q @ q)
        if not nrm2 > 0:
            raise NumericalError(f"lost positivity at step {k}; increase node density")
        b[k + 1] = math.sqrt(nrm2)
        Q[:, k + 1] = q / b[k + 1]
    return RecurrenceTable(a=a, b=b, m0=m0, n_max=n_max)


def eval_poly(table: RecurrenceTable, n: int, z):
    """(p_n(z), p_n'(z), log kappa_{n,n}^2) by forward recurrence.

    Scaling is tracked explicitly so intermediate values cannot
    overflow; the returned p_n/p_n' are plain doubles (inf only if the
    true value exceeds the double range).
    """
    if n > table.n_max:
        raise DomainError("n exceeds table n_max")
    z = np.asarray(z)
    scalar = z.ndim == 0
    zf = np.atleast_1d(z).astype(complex)
    logk2 = -math.log(table.m0) - 2 * float(np.sum(np.log(table.b[1:n + 1])))
    pm = np.zeros_like(zf)
    p = np.full_like(zf, 1 / math.sqrt(table.m0))
    dpm = np.zeros_like(zf)
    dp = np.zeros_like(zf)
    logsc = np.zeros(zf.shape)
    for k in range(n):
        bk = table.b[k] if k > 0 else 0.0
        pn = ((zf - table.a[k]) * p - bk * pm) / table.b[k + 1]
        dpn = (p + (zf - table.a[k]) * dp - bk * dpm) / table.b[k + 1]
        pm, p, dpm, dp = p, pn, dp, dpn
        mag = np.maximum(np.abs(p), np.abs(dp))
        big = mag > 1e120
        if np.any(big):
            fac = np.where(big, mag, 1.0)
            pm, p = pm / fac, p / fac
            dpm, dp = dpm / fac, dp / fac
            logsc += np.where(big, np.log(fac), 0.0)
    p_out = p * np.exp(logsc)
    dp_out = dp * np.exp(logsc)
    if scalar:
        return complex(p_out[0]), complex(dp_out[0]), logk2
    return p_out, dp_out, logk2


def weighted_poly_values(table: RecurrenceTable, field: ExternalField,
                         N: int, x, k_max: int):
    """Matrix q[k, j] = p_k(x_j) e^{-N V(x_j)/2} for k = 0..k_max.

    The weighted values stay O(1) on and near the support, which is what
    the kernel assembly needs.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    half = np.exp(-N * np.asarray(field.v(x), dtype=float) / 2)
    q = np.empty((k_max + 1, x.size))
    q[0] = half / math.sqrt(table.m0)
    if k_max >= 1:
        q[1] = (x - table.a[0]) * q[0] / table.b[1]
    for k in range(1, k_max):
        q[k + 1] = ((x - table.a[k]) * q[k] - table.b[k] * q[k - 1]) / table.b[k + 1]
    return q


def cd_kernel(table: RecurrenceTable, field: ExternalField, N: int, x, y):
    """Reproducing kernel K_N(x,y) = e^{-N(V(x)+V(y))/2} sum_{k<N} p_k(x) p_k(y).

    Off the diagonal the Christoffel-Darboux identity is used; on the
    diagonal the derivative (confluent) form.
    """
    if N > table.n_max:
        raise DomainError("N exceeds table n_max")
    xs = float(x)
    ys = float(y)
    bN = table.b[N]
    if xs != ys:
        q = weighted_poly_values(table, field, N, np.array([xs, ys]), N)
        num = q[N, 0] * q[N - 1, 1] - q[N - 1, 0] * q[N, 1]
        return float(bN * num / (xs - ys))
    # confluent form: b_N (q_N'(x) q_{N-1}(x) - q_{N-1}'(x) q_N(x)), where
    # the weight factors cancel between the two terms
    pN, dpN, _ = eval_poly(table, N, xs)
    pN1, dpN1, _ = eval_poly(table, N - 1, xs)
    w = math.exp(-N * float(field.v(xs)))
    return float(bN * w * (dpN.real * pN1.real - dpN1.real * pN.real))


def kernel_matrix(table: RecurrenceTable, field: ExternalField, N: int, x):
    """K_N on a vector of points, via the stable weighted sum."""
    q = weighted_poly_values(table, field, N, x, N - 1)
    return q.T @ q
