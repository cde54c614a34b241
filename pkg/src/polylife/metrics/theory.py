"""Representational-capacity worked fixture: linear approximators against a
family of polynomial targets.

States are uniform on [0, 1]; a policy is a line through the origin and the
per-state error is the absolute difference to the target.  Two lines suffice
for the four targets at tolerance 0.25: the unit line fits the two large
quadratics (expected error 1/6) but not the small ones (0.493), while the
0.01-slope line fits the small ones at 1/600.
"""

from __future__ import annotations

from scipy.integrate import quad

POLYNOMIAL_TARGETS = {
    "f1": lambda s: -(s**2) + 2.0 * s,
    "f2": lambda s: s**2,
    "f3": lambda s: -0.01 * s**2 + 0.02 * s,
    "f4": lambda s: 0.01 * s**2,
}


def linear_fit_expected_error(coef: float, target) -> float:
    """E_{s ~ U[0,1]} |coef * s - target(s)| by numerical quadrature."""
    value, _ = quad(lambda s: abs(coef * s - target(s)), 0.0, 1.0, limit=200)
    return value
