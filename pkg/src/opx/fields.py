"""External fields V defining varying weights e^{-N V(x)}.

A field is stored as the triple (v, v1, v2) of callables for the
potential and its first two derivatives, plus metadata used by the
solvers: convexity, smoothness class, a growth hint that bounds where
the weight is numerically negligible, and the locations of any kinks
in v2 (quadrature rules split panels there).
"""

import re
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from .errors import CatalogError, ValidationError

ANALYTIC = "analytic"
C2_LIPSCHITZ = "c2_lipschitz"


@dataclass(frozen=True)
class ExternalField:
    id: str
    v: Callable
    v1: Callable
    v2: Callable
    convex: bool
    smoothness_class: str
    growth_hint: float
    kinks: tuple = dc_field(default=())

    def check_consistency(self, n_grid=1000, rel_tol=1e-6):
        """Validate the (v, v1, v2) triple on a grid over
        [-growth_hint, growth_hint].

        Checks that a centered difference of v reproduces v1, that v2
        difference quotients stay bounded (Lipschitz second derivative),
        and, for convex fields, that v2 > 0 away from kinks.  Raises
        ValidationError on failure.
        """
        lo, hi = -self.growth_hint, self.growth_hint
        x = np.linspace(lo, hi, n_grid)
        h = 1e-6 * (hi - lo)
        fd1 = (self.v(x + h) - self.v(x - h)) / (2 * h)
        scale = np.maximum(np.abs(self.v1(x)), 1.0)
        if not np.all(np.abs(fd1 - self.v1(x)) <= 2e-5 * scale + rel_tol * scale):
            raise ValidationError(f"field {self.id!r}: v1 inconsistent with v")
        if self.convex:
            v2x = self.v2(x)
            interior = np.ones_like(x, dtype=bool)
            for k in self.kinks:
                interior &= np.abs(x - k) > 2 * h
            if np.any(v2x[interior] <= 0):
                raise ValidationError(f"field {self.id!r}: v2 not positive on convexity domain")
        dq = np.abs(np.diff(self.v2(x)) / np.diff(x))
        if not np.all(np.isfinite(dq)):
            raise ValidationError(f"field {self.id!r}: v2 difference quotients unbounded")
        return True


_QUARTIC_RE = re.compile(r"^quartic\(([^)]*)\)$")
_C2LIP_RE = re.compile(r"^c2lip\(([^,)]*),([^)]*)\)$")


def _gue():
    return ExternalField(
        id="gue",
        v=lambda x: np.asarray(x) ** 2,
        v1=lambda x: 2 * np.asarray(x),
        v2=lambda x: 2 * np.ones_like(np.asarray(x, dtype=float)),
        convex=True,
        smoothness_class=ANALYTIC,
        growth_hint=8.0,
    )


def _quartic(gamma):
    # One-cut regularity for x^4 - g x^2 at c=1 requires g < 2; beyond
    # that the support splits and the single-interval machinery breaks.
    if not gamma < 2.0:
        raise ValidationError(f"quartic({gamma}): need gamma < 2 for single-interval support")
    g = float(gamma)
    return ExternalField(
        id=f"quartic({gamma:g})",
        v=lambda x: np.asarray(x) ** 4 - g * np.asarray(x) ** 2,
        v1=lambda x: 4 * np.asarray(x) ** 3 - 2 * g * np.asarray(x),
        v2=lambda x: 12 * np.asarray(x) ** 2 - 2 * g,
        convex=g <= 0,
        smoothness_class=ANALYTIC,
        growth_hint=4.0,
    )


def _c2lip(a, c0):
    # V = x^2/2 + c0 * max(0, x-a)^3 has a Lipschitz second derivative
    # with a jump in V''' at x=a, i.e. it is C^2 but not C^3.
    if c0 < 0:
        raise ValidationError(f"c2lip({a},{c0}): need c0 >= 0 for convexity")
    a, c0 = float(a), float(c0)

    def ramp(x):
        return np.maximum(0.0, np.asarray(x, dtype=float) - a)

    return ExternalField(
        id=f"c2lip({a:g},{c0:g})",
        v=lambda x: 0.5 * np.asarray(x, dtype=float) ** 2 + c0 * ramp(x) ** 3,
        v1=lambda x: np.asarray(x, dtype=float) + 3 * c0 * ramp(x) ** 2,
        v2=lambda x: 1.0 + 6 * c0 * ramp(x),
        convex=True,
        smoothness_class=C2_LIPSCHITZ,
        growth_hint=8.0,
        kinks=(a,),
    )


def builtin(field_id: str) -> ExternalField:
    """Look up a field in the catalog.

    Accepted ids: "gue", "quartic(<gamma>)", "c2lip(<a>,<c0>)".
    """
    fid = field_id.strip().replace(" ", "")
    if fid == "gue":
        return _gue()
    m = _QUARTIC_RE.match(fid)
    if m:
        try:
            gamma = float(m.group(1))
        except ValueError:
            raise CatalogError(f"bad quartic parameter: {field_id!r}")
        return _quartic(gamma)
    m = _C2LIP_RE.match(fid)
    if m:
        try:
            a, c0 = float(m.group(1)), float(m.group(2))
        except ValueError:
            raise CatalogError(f"bad c2lip parameters: {field_id!r}")
        return _c2lip(a, c0)
    raise CatalogError(f"unknown field id: {field_id!r}")
