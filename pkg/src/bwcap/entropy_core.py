"""Single-mode private-capacity bounds for the lossy bosonic wiretap channel.

The channel is a beam splitter of transmissivity eta mixing the sender's
mode with vacuum; the eavesdropper collects everything that misses the
receiver.  Under a mean-photon-number budget nbar per use, the private
capacity is sandwiched between two closed-form expressions built from the
thermal-state entropy

    g(x) = (1 + x) ln(1 + x) - x ln x,

namely the achievable rate g(eta*nbar) - g((1-eta)*nbar) and the converse
g((2*eta - 1)*nbar), both zero for eta <= 1/2.  Everything here is a pure
function of its arguments; values are in nats unless converted through
:class:`BoundValue`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "BoundValue",
    "LN2",
    "asymptotic_coefficients",
    "capacity_infinite",
    "g_entropy",
    "lower_bound_single",
    "photon_efficiency",
    "upper_bound_single",
    "validate_photon_budget",
    "validate_transmissivity",
]

LN2 = math.log(2.0)


@dataclass(frozen=True)
class BoundValue:
    """A nonnegative information quantity stored in nats.

    The bits view is always nats / ln 2; no rounding or caching.
    """

    nats: float

    def __post_init__(self):
        if not math.isfinite(self.nats) or self.nats < 0.0:
            raise DomainError(f"bound value must be finite and >= 0, got {self.nats}")

    @property
    def bits(self) -> float:
        return self.nats / LN2

    def in_unit(self, unit: str) -> float:
        if unit == "nats":
            return self.nats
        if unit == "bits":
            return self.bits
        raise DomainError(f"unknown unit {unit!r}, expected 'nats' or 'bits'")


def validate_transmissivity(eta: float) -> float:
    """Check eta is a finite power fraction in [0, 1] and return it as float."""
    eta = float(eta)
    if not math.isfinite(eta) or eta < 0.0 or eta > 1.0:
        raise DomainError(f"transmissivity must lie in [0, 1], got {eta}")
    return eta


def validate_photon_budget(nbar: float) -> float:
    """Check nbar is a finite mean photon number >= 0 and return it as float."""
    nbar = float(nbar)
    if not math.isfinite(nbar) or nbar < 0.0:
        raise DomainError(f"photon budget must be finite and >= 0, got {nbar}")
    return nbar


def g_entropy(x: float) -> float:
    """Entropy in nats of a thermal state with mean photon number x.

    g(x) = (1 + x) ln(1 + x) - x ln x, with g(0) = 0 taken exactly.
    Strictly increasing and concave for x > 0.  Direct evaluation is
    accurate at double precision; no series switch-over is needed because
    the two terms have matched magnitude.
    """
    x = float(x)
    if not math.isfinite(x) or x < 0.0:
        raise DomainError(f"g_entropy requires finite x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    return (1.0 + x) * math.log1p(x) - x * math.log(x)


def lower_bound_single(eta: float, nbar: float) -> BoundValue:
    """Achievable private rate g(eta*nbar) - g((1-eta)*nbar), zero for eta <= 1/2."""
    eta = validate_transmissivity(eta)
    nbar = validate_photon_budget(nbar)
    if eta <= 0.5:
        return BoundValue(0.0)
    value = g_entropy(eta * nbar) - g_entropy((1.0 - eta) * nbar)
    # monotonicity of g makes this >= 0 in exact arithmetic; clamp rounding dust
    return BoundValue(max(0.0, value))


def upper_bound_single(eta: float, nbar: float) -> BoundValue:
    """Converse bound g((2*eta - 1)*nbar), zero for eta <= 1/2."""
    eta = validate_transmissivity(eta)
    nbar = validate_photon_budget(nbar)
    if eta <= 0.5:
        return BoundValue(0.0)
    return BoundValue(g_entropy((2.0 * eta - 1.0) * nbar))


def capacity_infinite(eta: float) -> float:
    """Infinite-photon private capacity max{0, ln(eta) - ln(1 - eta)} in nats.

    Diverges at eta = 1; that case returns positive infinity rather than
    raising, since the limit is the meaningful answer.
    """
    eta = validate_transmissivity(eta)
    if eta == 1.0:
        return math.inf
    if eta <= 0.5:
        return 0.0
    return math.log(eta) - math.log1p(-eta)


def _xlog_term(x: float) -> float:
    # x * (1 + ln(1/x)) with the x ln(1/x) -> 0 limit at x = 0
    if x == 0.0:
        return 0.0
    return x - x * math.log(x)


def asymptotic_coefficients(eta: float) -> tuple[float, float]:
    """Linear-term coefficients bracketing the small-nbar capacity expansion.

    For eta in (1/2, 1], the capacity behaves like
    (2*eta - 1) * nbar * ln(1/nbar) + c * nbar where c lies between

        lower = eta*(1 + ln(1/eta)) - (1-eta)*(1 + ln(1/(1-eta)))
        upper = (2*eta - 1)*(1 + ln(1/(2*eta - 1)))

    Returns (lower, upper).  Outside the positive-rate regime the bracket
    is not defined, so eta <= 1/2 raises.
    """
    eta = validate_transmissivity(eta)
    if eta <= 0.5:
        raise DomainError(f"asymptotic coefficients need eta > 1/2, got {eta}")
    lower = _xlog_term(eta) - _xlog_term(1.0 - eta)
    upper = _xlog_term(2.0 * eta - 1.0)
    return lower, upper


def photon_efficiency(bound, nbar: float, unit: str = "nats") -> float:
    """Information per transmitted photon: bound / nbar in 'nats' or 'bits'.

    `bound` may be a :class:`BoundValue` or a plain value in nats.
    """
    nbar = validate_photon_budget(nbar)
    if nbar == 0.0:
        raise DomainError("photon efficiency is undefined at nbar = 0")
    if not isinstance(bound, BoundValue):
        bound = BoundValue(float(bound))
    return bound.in_unit(unit) / nbar
