"""Rescaled-kernel limits and Fredholm-determinant gap probabilities.

The finite-N reproducing kernel comes from the oracle (Stieltjes table),
so every comparison here is independent of the closed-form asymptotics
module.  Bulk rescaling uses N psi(a); edge rescaling uses the Airy
scale (lambda N)^{2/3} shared with the asymptotics context.
"""

import math
from dataclasses import dataclass

import numpy as np

from .equilibrium import EquilibriumMeasure
from .errors import DomainError, ResolutionError
from .fields import ExternalField
from .oracle import RecurrenceTable, build_grid, stieltjes, weighted_poly_values
from .quadrature import gl_rule
from .special import airy_kernel, sine_kernel

AIRY_CUTOFF = 12.0  # kernel decays like e^{-(4/3)u^{3/2}}; tail < 1e-12


@dataclass(frozen=True)
class KernelHandle:
    """A symmetric kernel with a documented diagonal rule.

    kind is one of "sine", "airy", "finite_n"; call evaluates K(x, y) on
    numpy arrays (broadcast), including x == y.
    """
    kind: str
    evaluate: object

    def __call__(self, x, y):
        return self.evaluate(x, y)


def sine_handle():
    return KernelHandle(kind="sine", evaluate=sine_kernel)


def airy_handle():
    return KernelHandle(kind="airy", evaluate=airy_kernel)


def finite_handle(table: RecurrenceTable, field: ExternalField, N: int):
    """K_N(x, y) from the recurrence table, via the stable weighted sum.

    Broadcasts elementwise like a ufunc: pass x[:, None], y[None, :] for
    a full matrix.
    """
    if N > table.n_max:
        raise DomainError("N exceeds table n_max")

    def evaluate(x, y):
        xb, yb = np.broadcast_arrays(np.asarray(x, dtype=float),
                                     np.asarray(y, dtype=float))
        shape = xb.shape
        xf, yf = xb.ravel(), yb.ravel()
        pts, inv = np.unique(np.concatenate([xf, yf]), return_inverse=True)
        q = weighted_poly_values(table, field, N, pts, N - 1)
        qx = q[:, inv[:xf.size]]
        qy = q[:, inv[xf.size:]]
        out = np.sum(qx * qy, axis=0).reshape(shape)
        return float(out) if out.ndim == 0 else out

    return KernelHandle(kind="finite_n", evaluate=evaluate)


def bulk_rescaled(table, field, N, eq: EquilibriumMeasure, a, u, v):
    """K_N(a + u/(N psi(a)), a + v/(N psi(a))) / (N psi(a))."""
    pa = eq.psi(a)
    if not pa > 0:
        raise DomainError("bulk rescaling needs psi(a) > 0")
    scale = N * pa
    K = finite_handle(table, field, N)
    return np.asarray(K(a + np.asarray(u) / scale, a + np.asarray(v) / scale)) / scale


def edge_rescaled(table, field, N, ctx_lambda, beta, u, v):
    """(lambda N)^{-2/3} K_N(beta + u (lambda N)^{-2/3}, beta + v (lambda N)^{-2/3})."""
    s = (ctx_lambda * N) ** (2 / 3)
    K = finite_handle(table, field, N)
    return np.asarray(K(beta + np.asarray(u) / s, beta + np.asarray(v) / s)) / s


def fredholm_det(kernel: KernelHandle, interval, quad_n: int = 40,
                 check_refinement: bool = True):
    """Nystrom value of det(I - K) on the interval.

    Gauss-Legendre nodes; the symmetrized matrix sqrt(w) K sqrt(w) is
    diagonalized and the determinant assembled as prod(1 - lambda_i).
    With check_refinement the order is doubled and 1e-8 agreement
    enforced.
    """
    lo, hi = interval
    if hi == math.inf:
        if kernel.kind != "airy":
            raise DomainError("infinite interval supported for the airy kernel only")
        hi = max(lo, 0.0) + AIRY_CUTOFF
    if hi <= lo:
        return 1.0

    def value(m):
        gx, gw = gl_rule(m)
        x = (lo + hi) / 2 + (hi - lo) / 2 * gx
        w = (hi - lo) / 2 * gw
        K = np.asarray(kernel(x[:, None], x[None, :]))
        sw = np.sqrt(w)
        G = sw[:, None] * K * sw[None, :]
        evals = np.linalg.eigvalsh((G + G.T) / 2)
        return float(np.prod(1.0 - evals))

    v1 = value(quad_n)
    if check_refinement:
        v2 = value(2 * quad_n)
        if abs(v1 - v2) > 1e-8:
            raise ResolutionError(f"Fredholm determinant unstable: {v1} vs {v2}")
        return v2
    return v1


def gap_convergence(field: ExternalField, c: float, N_list, s: float,
                    eq: EquilibriumMeasure = None, a: float = None,
                    lambda_edge: float = None, quad_n: int = 40):
    """Finite-N gap probabilities against their sine / Airy limits.

    Bulk: determinant of the rescaled kernel on (0, s) at the point a
    (default: center of the support) versus the sine-kernel value.
    Edge: largest-eigenvalue law F_{(a_s, inf)} with
    a_s = beta + s (lambda N)^{-2/3} versus the Airy-kernel value.
    """
    from .equilibrium import solve as _solve  # local to avoid cycle at import

    if eq is None:
        eq = _solve(field, c)
    if a is None:
        a = (eq.alpha + eq.beta) / 2
    if lambda_edge is None:
        lambda_edge = 0.75 * (-eq.h_beta_prime_at_beta())

    sine_val = fredholm_det(sine_handle(), (0.0, s), quad_n) if s > 0 else 1.0
    airy_val = fredholm_det(airy_handle(), (s, math.inf), quad_n)
    rows = []
    for N in N_list:
        grid = build_grid(field, N, N + 2)
        table = stieltjes(grid, N + 2)
        pa = eq.psi(a)
        scale = N * pa
        bulkK = finite_handle(table, field, N)

        def rescaled_bulk(u, v, _K=bulkK, _a=a, _s=scale):
            return np.asarray(_K(_a + np.asarray(u) / _s, _a + np.asarray(v) / _s)) / _s

        Kb = KernelHandle(kind="finite_n", evaluate=rescaled_bulk)
        gap_bulk = fredholm_det(Kb, (0.0, s), quad_n) if s > 0 else 1.0

        es = (lambda_edge * N) ** (2 / 3)

        def rescaled_edge(u, v, _K=bulkK, _b=eq.beta, _s=es):
            return np.asarray(_K(_b + np.asarray(u) / _s, _b + np.asarray(v) / _s)) / _s

        Ke = KernelHandle(kind="finite_n", evaluate=rescaled_edge)
        gap_edge = fredholm_det(Ke, (s, s + AIRY_CUTOFF), quad_n)
        rows.append({
            "N": int(N),
            "bulk_gap": gap_bulk,
            "bulk_limit": sine_val,
            "bulk_dev": abs(gap_bulk - sine_val),
            "edge_gap": gap_edge,
            "edge_limit": airy_val,
            "edge_dev": abs(gap_edge - airy_val),
        })
    devs_b = [r["bulk_dev"] for r in rows]
    devs_e = [r["edge_dev"] for r in rows]
    return {
        "s": s,
        "a": a,
        "rows": rows,
        "bulk_dev_decreasing": all(x >= y for x, y in zip(devs_b, devs_b[1:])),
        "edge_dev_decreasing": all(x >= y for x, y in zip(devs_e, devs_e[1:])),
    }
