"""Photon-number allocation across parallel single-mode wiretap channels.

A multi-mode channel with per-mode transmissivities eta_1..eta_m and a
total budget of nbar photons per use achieves the sum of single-mode
bounds, maximized over how the budget is split.  The per-mode bounds are
strictly concave and increasing in the budget (for eta > 1/2) with a
marginal rate that diverges at zero budget, so the optimum is an interior
water-filling point: all modes with eta > 1/2 share a common marginal rate
lambda, and modes with eta <= 1/2 get nothing.

`allocate` solves this by bisecting on lambda, inverting the marginal rate
per mode; `allocate_bruteforce` is an independent exhaustive grid search
over the budget simplex, kept as the validation oracle for the optimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .entropy_core import BoundValue, g_entropy, validate_photon_budget
from .errors import ConvergenceError, DomainError
from .mode_algebra import ModeSpectrum

__all__ = [
    "Allocation",
    "BoundKind",
    "allocate",
    "allocate_bruteforce",
    "asymptotic_multimode",
    "marginal_rate",
    "multi_mode_bound",
]


class BoundKind(Enum):
    """Which single-mode bound the allocation objective sums."""

    LOWER = "lower"
    UPPER = "upper"

    @classmethod
    def from_string(cls, name: str) -> "BoundKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise DomainError(f"unknown bound kind {name!r}, expected 'lower' or 'upper'") from None


@dataclass(frozen=True)
class Allocation:
    """Per-mode budgets (aligned with the input spectrum), achieved value,
    and the common marginal rate lambda (0 when no mode is active)."""

    budgets: np.ndarray
    value: BoundValue
    lagrange_multiplier: float


def _spectrum_values(etas) -> np.ndarray:
    if isinstance(etas, ModeSpectrum):
        values = etas.etas
    else:
        values = np.atleast_1d(np.asarray(etas, dtype=float))
    if values.ndim != 1 or values.size < 1:
        raise DomainError("spectrum must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(values)) or values.min() < 0.0 or values.max() > 1.0:
        raise DomainError(f"transmissivities must lie in [0, 1], got {values}")
    return values


def _bound_nats(eta: float, nbar: float, kind: BoundKind) -> float:
    # scalar fast path shared by the optimizer and the oracle
    if eta <= 0.5 or nbar == 0.0:
        return 0.0
    if kind is BoundKind.LOWER:
        return max(0.0, g_entropy(eta * nbar) - g_entropy((1.0 - eta) * nbar))
    return g_entropy((2.0 * eta - 1.0) * nbar)


def marginal_rate(eta: float, nbar: float, kind: BoundKind = BoundKind.LOWER) -> float:
    """Derivative of the single-mode bound with respect to the photon budget.

    Lower: eta*ln(1 + 1/(eta*nbar)) - (1-eta)*ln(1 + 1/((1-eta)*nbar))
    Upper: (2*eta - 1)*ln(1 + 1/((2*eta - 1)*nbar))

    Positive, strictly decreasing in nbar, divergent as nbar -> 0+.
    Requires eta > 1/2 and nbar > 0.
    """
    eta = float(eta)
    nbar = float(nbar)
    if not math.isfinite(eta) or eta <= 0.5 or eta > 1.0:
        raise DomainError(f"marginal rate needs eta in (1/2, 1], got {eta}")
    if not math.isfinite(nbar) or nbar <= 0.0:
        raise DomainError(f"marginal rate needs nbar > 0, got {nbar}")
    return _marginal(eta, nbar, kind)


def _marginal(eta: float, nbar: float, kind: BoundKind) -> float:
    if kind is BoundKind.LOWER:
        value = eta * math.log1p(1.0 / (eta * nbar))
        rest = 1.0 - eta
        if rest > 0.0:
            value -= rest * math.log1p(1.0 / (rest * nbar))
        return value
    t = 2.0 * eta - 1.0
    return t * math.log1p(1.0 / (t * nbar))


_BUDGET_FLOOR = 1e-290
_INNER_ITERS = 64
_OUTER_CAP = 200


def _invert_marginal(eta: float, lam: float, kind: BoundKind, scale: float) -> float:
    """Budget at which the mode's marginal rate equals lam.

    Returns 0.0 when the solution is below the representable floor (a mode
    so weak that its water level is effectively dry).  `scale` sets the
    initial bracket guess, typically the total budget.
    """
    hi = scale
    steps = 0
    while _marginal(eta, hi, kind) > lam:
        hi *= 4.0
        steps += 1
        if steps > 600:
            raise ConvergenceError(f"marginal inversion bracket blew up (eta={eta}, lam={lam})")
    lo = hi
    while _marginal(eta, lo, kind) < lam:
        lo *= 0.25
        if lo < _BUDGET_FLOOR:
            return 0.0
    if lo == hi:
        return lo
    for _ in range(_INNER_ITERS):
        mid = math.sqrt(lo) * math.sqrt(hi)
        if _marginal(eta, mid, kind) > lam:
            lo = mid
        else:
            hi = mid
    return math.sqrt(lo) * math.sqrt(hi)


def allocate(etas, nbar: float, kind: BoundKind = BoundKind.LOWER, tol: float = 1e-10) -> Allocation:
    """Optimal split of nbar photons across modes for the chosen bound.

    Modes with eta <= 1/2 receive exactly zero.  Among the rest, the
    (strictly concave, separable) objective is maximized by equalizing the
    per-mode marginal rates: an outer bisection on the common rate lambda,
    with each mode's budget found by inverting its own marginal-rate
    curve.  Stops when the budgets sum to nbar within tol (relative).

    Equal transmissivities receive bit-identical budgets, since their
    inversions run the same arithmetic.
    """
    values = _spectrum_values(etas)
    nbar = validate_photon_budget(nbar)
    m = values.size
    budgets = np.zeros(m)
    active = [i for i in range(m) if values[i] > 0.5]
    if not active or nbar == 0.0:
        return Allocation(budgets, BoundValue(0.0), 0.0)

    if len(active) == 1:
        i = active[0]
        budgets[i] = nbar
        return Allocation(
            budgets,
            BoundValue(_bound_nats(values[i], nbar, kind)),
            _marginal(values[i], nbar, kind),
        )

    act = [float(values[i]) for i in active]
    lam_lo = min(_marginal(e, nbar, kind) for e in act)  # sum of budgets >= nbar
    lam_hi = max(_marginal(e, nbar * 1e-12, kind) for e in act)  # sum << nbar
    lam = lam_hi
    shares = None
    for _ in range(_OUTER_CAP):
        lam = 0.5 * (lam_lo + lam_hi)
        shares = [_invert_marginal(e, lam, kind, nbar) for e in act]
        total = math.fsum(shares)
        if abs(total - nbar) <= tol * nbar:
            break
        if total > nbar:
            lam_lo = lam
        else:
            lam_hi = lam
    else:
        raise ConvergenceError(
            f"allocation bisection did not reach |sum - nbar| <= {tol:g}*nbar in "
            f"{_OUTER_CAP} iterations (etas={list(values)}, nbar={nbar}, kind={kind.value}, "
            f"last sum={math.fsum(shares)}, lambda bracket=[{lam_lo}, {lam_hi}])"
        )

    scale = nbar / math.fsum(shares)
    for i, share in zip(active, shares):
        budgets[i] = share * scale
    value = math.fsum(_bound_nats(values[i], budgets[i], kind) for i in active)
    return Allocation(budgets, BoundValue(max(0.0, value)), lam)


def multi_mode_bound(etas, nbar: float, kind: BoundKind = BoundKind.LOWER) -> BoundValue:
    """Best achievable sum of per-mode bounds under the total budget."""
    return allocate(etas, nbar, kind).value


def allocate_bruteforce(
    etas, nbar: float, kind: BoundKind = BoundKind.LOWER, grid_step: float = 1e-3
) -> Allocation:
    """Exhaustive search over the budget simplex on a regular grid.

    The simplex {sum of budgets = nbar} is discretized into multiples of
    nbar * grid_step (so grid_step is relative to the budget), every
    composition is evaluated, and the best grid point is returned, with
    ties broken toward the lexicographically smallest budget vector.
    Exponential in the number of modes; restricted to m <= 4.  This is the
    validation oracle for `allocate` and shares only the single-mode bound
    formula with it, not the optimization route.
    """
    values = _spectrum_values(etas)
    nbar = validate_photon_budget(nbar)
    if values.size > 4:
        raise DomainError(f"bruteforce grid search is limited to m <= 4 modes, got {values.size}")
    if not (0.0 < grid_step <= 0.5):
        raise DomainError(f"grid_step must lie in (0, 0.5], got {grid_step}")

    m = values.size
    budgets = np.zeros(m)
    active = [i for i in range(m) if values[i] > 0.5]
    if not active or nbar == 0.0:
        return Allocation(budgets, BoundValue(0.0), 0.0)

    steps = max(1, round(1.0 / grid_step))
    grid = np.linspace(0.0, nbar, steps + 1)
    tables = [
        np.array([_bound_nats(values[i], b, kind) for b in grid]) for i in active
    ]

    ma = len(active)
    if ma == 1:
        best = (steps,)
    elif ma == 2:
        totals = tables[0] + tables[1][::-1]
        j0 = int(np.argmax(totals))  # first max = smallest leading budget
        best = (j0, steps - j0)
    elif ma == 3:
        best_value = -math.inf
        best = None
        for j0 in range(steps + 1):
            rem = steps - j0
            totals = tables[0][j0] + tables[1][: rem + 1] + tables[2][rem::-1]
            j1 = int(np.argmax(totals))
            if totals[j1] > best_value:
                best_value = float(totals[j1])
                best = (j0, j1, rem - j1)
    else:
        best_value = -math.inf
        best = None
        for j0 in range(steps + 1):
            for j1 in range(steps + 1 - j0):
                rem = steps - j0 - j1
                totals = tables[0][j0] + tables[1][j1] + tables[2][: rem + 1] + tables[3][rem::-1]
                j2 = int(np.argmax(totals))
                if totals[j2] > best_value:
                    best_value = float(totals[j2])
                    best = (j0, j1, j2, rem - j2)

    for i, j in zip(active, best):
        budgets[i] = grid[j]
    value = math.fsum(_bound_nats(values[i], budgets[i], kind) for i in active)
    # report the marginal rate at the best-funded mode as the water level
    funded = [i for i in active if budgets[i] > 0.0]
    lam = max(_marginal(values[i], budgets[i], kind) for i in funded) if funded else 0.0
    return Allocation(budgets, BoundValue(max(0.0, value)), lam)


def asymptotic_multimode(etas, nbar: float) -> float:
    """Leading small-budget term (2*eta_max - 1) * nbar * ln(1/nbar) in nats.

    In the low-photon limit the optimal allocation concentrates on the
    single best mode, so only the largest transmissivity enters.  Requires
    nbar > 0 and at least one mode with eta > 1/2.
    """
    values = _spectrum_values(etas)
    nbar = float(nbar)
    if not math.isfinite(nbar) or nbar <= 0.0:
        raise DomainError(f"asymptotic form needs nbar > 0, got {nbar}")
    eta_max = float(values.max())
    if eta_max <= 0.5:
        raise DomainError(
            f"asymptotic form needs a mode with eta > 1/2, largest is {eta_max}"
        )
    return -(2.0 * eta_max - 1.0) * nbar * math.log(nbar)
