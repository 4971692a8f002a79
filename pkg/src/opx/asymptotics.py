"""Closed-form large-degree asymptotics for the orthogonal polynomials.

Everything is expressed through the first column of the 2x2 matrix
whose (1,1) entry is p_n/kappa_{n,n} and whose (2,1) entry is
-2 pi i kappa_{n-1,n-1} p_{n-1}:

    bulk_axis / bulk_upper -- oscillatory formulas on and just above the
        support, with the arcsine phase and the amplitude
        a(z) = sqrt(beta-alpha) / ((z-alpha)(beta-z))^{1/4};
    edge -- the Airy profile at the soft edge, in the variable
        zeta = (lambda n)^{2/3} (z - beta);
    model_parametrix -- the piecewise global model (outer algebraic
        matrix plus Airy-built local blocks in squares at the endpoints);
    kappa_log -- leading coefficient asymptotics.

Exponentially large prefactors are returned as an explicit `log_scale`
so nothing overflows at desk scale (n up to a few hundred).
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .equilibrium import EquilibriumMeasure
from .errors import BranchError, DomainError, RegimeError
from .special import airy, airy_scaled

_SQRT2PI = math.sqrt(2 * math.pi)
_ROT = cmath.exp(2j * math.pi / 3)

# crossover between the one-exponential and two-term bulk forms, in
# units of 1/n of imaginary distance from the axis
_BULK_CROSSOVER = 5.0


@dataclass(frozen=True)
class PolyPairEval:
    """First-column pair, scaled: entry * exp(log_scale) is the true value."""
    a11: complex
    a21: complex
    log_scale: float


class AsymptoticContext:
    """Per-(n, N) constants and formula evaluators on top of a solved
    equilibrium measure (which fixes c = N/n)."""

    def __init__(self, eq: EquilibriumMeasure, n: int, N: int = None, delta: float = None):
        if n < 1:
            raise DomainError("need n >= 1")
        if N is None:
            N = round(eq.c * n)
        if abs(N / n - eq.c) > 1e-9:
            raise DomainError(f"N/n = {N/n} does not match the measure ratio c = {eq.c}")
        self.eq = eq
        self.n = int(n)
        self.N = int(N)
        self.delta = float(delta) if delta is not None else (eq.beta - eq.alpha) / 8
        self.h_beta_prime_beta = eq.h_beta_prime_at_beta()
        self.h_alpha_prime_alpha = eq.h_alpha_prime_at_alpha()
        self.lambda_edge = 0.75 * (-self.h_beta_prime_beta)
        self.w_beta = ((0.75 * (-self.h_beta_prime_beta)) ** (1 / 6)
                       * (eq.beta - eq.alpha) ** 0.25)
        self.delta_n = n ** (-1 / 3) * math.log(n)

    # -- scalar building blocks -------------------------------------------

    def gamma(self, z, side=None):
        """Fourth root of (z-beta)/(z-alpha), analytic off the support,
        tending to 1 at infinity.  On (alpha, beta) a side is required."""
        eq = self.eq
        z = complex(z)
        if z.imag == 0.0 and eq.alpha < z.real < eq.beta:
            if side not in ("plus", "minus"):
                raise BranchError("gamma on the cut needs side='plus' or 'minus'")
            z = complex(z.real, 1e-300 if side == "plus" else -1e-300)
        return ((z - eq.beta) / (z - eq.alpha)) ** 0.25

    def amplitude(self, z):
        """a(z) = sqrt(beta-alpha) / ((z-alpha)^{1/4} (beta-z)^{1/4})."""
        eq = self.eq
        return math.sqrt(eq.beta - eq.alpha) / ((z - eq.alpha) ** 0.25 * (eq.beta - z) ** 0.25)

    def phase_arcsin(self, z):
        """arcsin((2z - alpha - beta)/(beta - alpha)), the arcsine phase."""
        eq = self.eq
        w = (2 * z - eq.alpha - eq.beta) / (eq.beta - eq.alpha)
        if isinstance(w, complex):
            return complex(np.arcsin(w))
        return math.asin(w)

    def u_beta(self, z):
        return (-self.h_beta_prime_beta) ** (2 / 3) * (complex(z) - self.eq.beta)

    def u_alpha(self, z):
        return self.h_alpha_prime_alpha ** (2 / 3) * (self.eq.alpha - complex(z))

    # -- leading coefficients ------------------------------------------------

    def kappa_log(self):
        """(log kappa_{n,n}^2, log kappa_{n-1,n-1}^2) leading asymptotics."""
        eq = self.eq
        span = eq.beta - eq.alpha
        base = -self.n * eq.ell
        return (math.log(2 / (span * math.pi)) + base,
                math.log(span / (8 * math.pi)) + base)

    # -- model parametrix -----------------------------------------------------

    def in_square(self, z, which):
        eq = self.eq
        center = eq.alpha if which == "alpha" else eq.beta
        return (abs(z.real - center) <= self.delta) and (abs(z.imag) <= self.delta)

    def model_parametrix(self, z, side=None):
        """Piecewise global model: outer algebraic matrix away from the
        endpoints, Airy-built local blocks inside the squares of side
        2*delta centered at alpha and beta.  det = 1 everywhere."""
        z = complex(z)
        if self.in_square(z, "beta"):
            return self._airy_block(z, "beta")
        if self.in_square(z, "alpha"):
            return self._airy_block(z, "alpha")
        g = self.gamma(z, side=side)
        d11 = 0.5 * (g + 1 / g)
        d12 = (g - 1 / g) / 2j
        return np.array([[d11, d12], [-d12, d11]])

    def _airy_block(self, z, which):
        n = self.n
        if which == "beta":
            u = self.u_beta(z)
        else:
            u = self.u_alpha(z)
        M = _sector_matrix(u, n)
        # columns of M e^{n u^{3/2} sigma3 / 2}, exponents combined analytically
        nu32 = 0.5 * n * u ** 1.5
        col_exp = np.array([nu32, -nu32])
        M = M * np.exp(col_exp)[None, :]
        g = self.gamma(z, side=None if z.imag != 0 or not (self.eq.alpha < z.real < self.eq.beta)
                       else "plus")
        U = np.array([[cmath.exp(-1j * math.pi / 4), cmath.exp(1j * math.pi / 4)],
                      [cmath.exp(1j * math.pi / 4), cmath.exp(-1j * math.pi / 4)]]) / math.sqrt(2)
        if which == "beta":
            pre = _diag_pow(4 / (3 * n), 1 / 6) @ _diag_pow(g, 1.0) @ _diag_pow(u, -0.25)
            return _SQRT2PI * U @ pre @ M
        sigma2 = np.array([[0, -1j], [1j, 0]])
        sigma3 = np.array([[1, 0], [0, -1]])
        pre = _diag_pow(3 * n / 4, 1 / 6) @ _diag_pow(g, 1.0) @ _diag_pow(u, 0.25)
        return -_SQRT2PI * U @ pre @ sigma2 @ M @ sigma3

    # -- bulk formulas ---------------------------------------------------------

    def _bulk_window_check(self, x):
        eq = self.eq
        if not (eq.alpha + self.delta <= x <= eq.beta - self.delta):
            raise RegimeError("x outside the bulk window [alpha+delta, beta-delta]")

    def bulk_axis(self, x):
        """Leading oscillatory pair on the support axis."""
        x = float(x)
        self._bulk_window_check(x)
        eq, n = self.eq, self.n
        th = eq.theta(x)
        va = self.phase_arcsin(x)
        amp = self.amplitude(x)
        log_scale = n * (eq.c * float(eq.field.v(x)) + eq.ell) / 2
        a11 = amp * math.cos(0.5 * (n * th - va))
        a21 = -1j * amp * math.sin(0.5 * (n * th + va)) * math.exp(-n * eq.ell)
        return PolyPairEval(a11=complex(a11), a21=complex(a21), log_scale=log_scale)

    def bulk_upper(self, z):
        """Pair in the open upper bulk strip 0 < y < delta.

        For y above the crossover 5/n the single-exponential form (with
        the full log-transform) is used; below it, the two-term
        cosine/sine form with the linearized phase."""
        z = complex(z)
        x, y = z.real, z.imag
        self._bulk_window_check(x)
        if not (0 < y < self.delta):
            raise RegimeError("z outside the upper bulk strip 0 < Im z < delta")
        eq, n = self.eq, self.n
        gz = eq.g(z)
        if y > _BULK_CROSSOVER / n:
            va = self.phase_arcsin(z)
            amp = self.amplitude(z)
            log_scale = n * gz.real
            osc = cmath.exp(1j * n * gz.imag)
            a11 = 0.5 * amp * cmath.exp(-1j * va / 2) * osc
            a21 = -0.5 * amp * cmath.exp(1j * va / 2) * osc * math.exp(-n * eq.ell)
            return PolyPairEval(a11=a11, a21=a21, log_scale=log_scale)
        th = eq.theta(x)
        thp = eq.theta_prime(x)
        va = self.phase_arcsin(x)
        amp = self.amplitude(x)
        phase = n * (gz.imag - th / 2)
        log_scale = n * gz.real + n * thp * y / 2
        arg = complex(0.5 * n * th, 0.5 * n * thp * y)
        a11 = amp * cmath.cos(arg - va / 2) * cmath.exp(1j * phase)
        a21 = -1j * amp * cmath.sin(arg + va / 2) * cmath.exp(1j * phase) * math.exp(-n * eq.ell)
        return PolyPairEval(a11=a11, a21=a21, log_scale=log_scale)

    # -- edge formulas -----------------------------------------------------------

    def edge(self, zeta):
        """Airy profile at the beta edge for bounded zeta, Im zeta >= 0."""
        zeta = complex(zeta)
        if abs(zeta) > 8:
            raise RegimeError("edge formula restricted to |zeta| <= 8")
        if zeta.imag < 0:
            raise RegimeError("edge formula covers Im zeta >= 0 (conjugate below)")
        eq, n = self.eq, self.n
        ai, _ = airy(zeta)
        expo = n ** (1 / 3) * eq.c * float(eq.field.v1(eq.beta)) \
            * self.lambda_edge ** (-2 / 3) * zeta / 2
        log_scale = n * (eq.c * float(eq.field.v(eq.beta)) + eq.ell) / 2 + expo.real
        osc = cmath.exp(1j * expo.imag)
        base = n ** (1 / 6) * math.sqrt(math.pi) * self.w_beta * ai * osc
        return PolyPairEval(a11=base, a21=-1j * base * math.exp(-n * eq.ell),
                            log_scale=log_scale)

    def edge_z(self, zeta):
        """Physical point corresponding to the edge variable zeta."""
        return self.eq.beta + (self.lambda_edge * self.n) ** (-2 / 3) * complex(zeta)

    # -- derivatives ----------------------------------------------------------------

    def bulk_derivative_axis(self, x):
        """d/dx of the leading bulk pair; same log_scale convention."""
        x = float(x)
        self._bulk_window_check(x)
        eq, n = self.eq, self.n
        th = eq.theta(x)
        thp = eq.theta_prime(x)
        va = self.phase_arcsin(x)
        vap = 1 / math.sqrt((x - eq.alpha) * (eq.beta - x))
        amp = self.amplitude(x)
        ampp = amp * (-0.25) * (1 / (x - eq.alpha) - 1 / (eq.beta - x))
        pref = n * eq.c * float(eq.field.v1(x)) / 2
        log_scale = n * (eq.c * float(eq.field.v(x)) + eq.ell) / 2
        cosv = math.cos(0.5 * (n * th - va))
        sinv = math.sin(0.5 * (n * th - va))
        d11 = pref * amp * cosv + ampp * cosv - amp * sinv * 0.5 * (n * thp - vap)
        coss = math.cos(0.5 * (n * th + va))
        sins = math.sin(0.5 * (n * th + va))
        d21 = -1j * (pref * amp * sins + ampp * sins + amp * coss * 0.5 * (n * thp + vap)) \
            * math.exp(-n * eq.ell)
        return complex(d11), complex(d21), log_scale

    def edge_derivative(self, zeta):
        """d/dzeta of the leading edge pair at real zeta."""
        zeta = float(zeta)
        if abs(zeta) > 8:
            raise RegimeError("edge formula restricted to |zeta| <= 8")
        eq, n = self.eq, self.n
        ai, aip = airy(zeta)
        slope = n ** (1 / 3) * eq.c * float(eq.field.v1(eq.beta)) * self.lambda_edge ** (-2 / 3) / 2
        log_scale = n * (eq.c * float(eq.field.v(eq.beta)) + eq.ell) / 2 + slope * zeta
        bracket = n ** (1 / 6) * math.sqrt(math.pi) * self.w_beta * (slope * ai + aip)
        return complex(bracket), complex(-1j * bracket * math.exp(-n * eq.ell)), log_scale


def _diag_pow(x, p):
    xc = complex(x)
    return np.array([[xc ** p, 0], [0, xc ** (-p)]])


def _sector_matrix(u, n):
    """Airy block M(u) with exp(-(2/3) xi^{3/2}) scaling removed per entry
    and re-attached analytically (xi = (3n/4)^{2/3} u).  Sector chosen by
    arg(u); exact boundary rays raise BranchError."""
    xi = (3 * n / 4) ** (2 / 3) * complex(u)
    a = cmath.phase(complex(u))
    quarter = math.pi / 4
    for ray in (-3 * quarter, -quarter, 3 * quarter, math.pi):
        if a == ray:
            raise BranchError("arg(u) on a sector boundary; nudge z off the ray")

    # entries: (rotation power of e^{2 pi i/3}, phase factor exponent)
    if -quarter < a < 3 * quarter:
        spec = [(0, -3j * math.pi / 4), (-1, 11j * math.pi / 12),
                (0, -1j * math.pi / 4), (-1, 1j * math.pi / 12)]
        use = ["p", "p", "a", "a"]
    elif 3 * quarter < a <= math.pi:
        spec = [(1, -5j * math.pi / 12), (-1, 11j * math.pi / 12),
                (1, -7j * math.pi / 12), (-1, 1j * math.pi / 12)]
        use = ["p", "p", "a", "a"]
    elif -math.pi < a < -3 * quarter:
        spec = [(-1, 11j * math.pi / 12), (1, 7j * math.pi / 12),
                (-1, 1j * math.pi / 12), (1, 5j * math.pi / 12)]
        use = ["p", "p", "a", "a"]
    else:
        spec = [(0, -3j * math.pi / 4), (1, 7j * math.pi / 12),
                (0, -1j * math.pi / 4), (1, 5j * math.pi / 12)]
        use = ["p", "p", "a", "a"]

    vals = []
    for (rp, ph), kind in zip(spec, use):
        arg = xi * _ROT ** rp
        ai, aip, sc = airy_scaled(arg)
        v = (aip if kind == "p" else ai) * cmath.exp(ph + sc)
        vals.append(v)
    return np.array([[vals[0], vals[1]], [vals[2], vals[3]]])
