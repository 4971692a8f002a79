"""Airy evaluation for complex argument, plus overflow-safe scaled forms.

Backed by scipy.special (AMOS zairy), which meets the accuracy contract
(absolute error well below 1e-12 for |xi| <= 40 on the principal sector
and sector-correct values elsewhere).  The scaled variant factors out
exp((2/3) xi^{3/2}) so the parametrix can combine exponents analytically
instead of multiplying huge and tiny doubles.
"""

import numpy as np
import scipy.special as _sp

from .errors import DomainError

_TWO_THIRDS = 2.0 / 3.0


def airy(xi):
    """(Ai(xi), Ai'(xi)) for real or complex xi, |xi| <= 1e4.

    Values may underflow to 0 for large positive real part; use
    airy_scaled there.
    """
    xi = np.asarray(xi)
    if np.any(np.abs(xi) > 1e4):
        raise DomainError("airy: |xi| <= 1e4 required")
    ai, aip, _, _ = _sp.airy(xi)
    if xi.ndim == 0:
        return complex(ai) if np.iscomplexobj(ai) else float(ai), \
               complex(aip) if np.iscomplexobj(aip) else float(aip)
    return ai, aip


def airy_scaled(xi):
    """(ai, aip, scale) with Ai(xi) = ai * exp(scale) and
    Ai'(xi) = aip * exp(scale), scale = -(2/3) xi^{3/2} (principal power).

    The returned ai/aip are O(algebraic) in |xi|, so the pair is usable
    far beyond the plain-value overflow threshold.
    """
    xi = np.asarray(xi, dtype=complex)
    ai, aip, _, _ = _sp.airye(xi)
    scale = -_TWO_THIRDS * xi ** 1.5
    if xi.ndim == 0:
        return complex(ai), complex(aip), complex(scale)
    return ai, aip, scale


def airy_kernel(u, v):
    """(Ai(u)Ai'(v) - Ai(v)Ai'(u)) / (u - v), with the confluent diagonal
    value Ai'(u)^2 - u Ai(u)^2."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    au, apu, _, _ = _sp.airy(u)
    av, apv, _, _ = _sp.airy(v)
    d = u - v
    off = np.where(d == 0.0, 1.0, d)
    k = (au * apv - av * apu) / off
    diag = apu ** 2 - u * au ** 2
    out = np.where(d == 0.0, diag, k)
    return float(out) if out.ndim == 0 else out


def sine_kernel(u, v):
    """sin(pi(u-v)) / (pi(u-v)), 1 on the diagonal."""
    d = np.asarray(u, dtype=float) - np.asarray(v, dtype=float)
    out = np.sinc(d)
    return float(out) if out.ndim == 0 else out
