"""Random-channel ensembles and second-moment capacity bounds.

When the channel block T_ab fluctuates (atmospheric turbulence being the
motivating case), the coherent-scenario rate is the expectation of the
multi-mode lower bound over realizations, with the photon budget re-split
per realization.  Convexity and Schur-convexity of that bound give a chain
of inequalities ending in a quantity that needs only the second-moment
matrix E[T_ab^H T_ab]:

    E[bound(eigenvalues)] >= E[bound(diagonal)] >= bound(E diagonal),

and the eigenvalue basis of the second-moment matrix gives the tightest
such bound.

No physical turbulence model ships here: the built-in ensembles
(`haar_subblock`, `randomized_spectrum`, `deterministic`) are synthetic
stand-ins that make the inequality chain testable.  Anything that maps a
sample index to a contraction matrix can be used instead: pass a callable
``index -> matrix`` wherever an :class:`EnsembleSpec` is accepted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .allocation import BoundKind, allocate
from .entropy_core import BoundValue, validate_photon_budget
from .errors import DomainError
from .mode_algebra import (
    clamp_unit_interval,
    haar_from_generator,
    hermitian_eigen,
    matrix_from_json_dict,
    matrix_to_json_dict,
)

__all__ = [
    "EnsembleSpec",
    "MonteCarloEstimate",
    "SecondMomentMatrix",
    "majorizes",
    "monte_carlo_lower",
    "sample_channel",
    "second_moment",
    "turbulence_lower_bound",
]

_SEED_MASK = 2**64 - 1
_KINDS = ("deterministic", "haar_subblock", "randomized_spectrum")


def _normalize_kind(kind: str) -> str:
    flat = str(kind).strip().lower().replace("_", "").replace("-", "")
    for canonical in _KINDS:
        if flat == canonical.replace("_", ""):
            return canonical
    raise DomainError(f"unknown ensemble kind {kind!r}, expected one of {_KINDS}")


@dataclass(frozen=True)
class EnsembleSpec:
    """Description of a random-channel distribution, sampled by index.

    Kinds
    -----
    deterministic
        Always returns the fixed contraction `t_ab`.
    haar_subblock
        The top-left k x m block of an n x n Haar-random unitary.
    randomized_spectrum
        Transmissivities drawn uniformly in [base_etas +- jitter] (clipped
        to [0, 1]), then conjugated by a Haar-random unitary when
        `conjugation` is "haar", or left diagonal when "none".

    Sample `index` uses a generator keyed on (seed, index), so draws are
    reproducible and independent of evaluation order.
    """

    kind: str
    seed: int = 0
    t_ab: np.ndarray | None = None
    n: int | None = None
    m: int | None = None
    k: int | None = None
    base_etas: np.ndarray | None = None
    jitter: float = 0.0
    conjugation: str = "haar"

    def __post_init__(self):
        object.__setattr__(self, "kind", _normalize_kind(self.kind))
        object.__setattr__(self, "seed", int(self.seed) & _SEED_MASK)
        if self.kind == "deterministic":
            if self.t_ab is None:
                raise DomainError("deterministic ensemble needs t_ab")
            t = np.asarray(self.t_ab, dtype=complex)
            if t.ndim != 2 or not np.all(np.isfinite(t.real)) or not np.all(np.isfinite(t.imag)):
                raise DomainError("t_ab must be a finite 2-d matrix")
            w, _ = hermitian_eigen(t.conj().T @ t)
            norm = math.sqrt(max(0.0, float(w[0])))
            if norm > 1.0 + 1e-10:
                raise DomainError(f"t_ab must be a contraction, operator norm {norm} > 1")
            object.__setattr__(self, "t_ab", t)
        elif self.kind == "haar_subblock":
            if self.n is None or self.m is None or self.k is None:
                raise DomainError("haar_subblock ensemble needs n, m, k")
            n, m, k = int(self.n), int(self.m), int(self.k)
            if n < 1 or not (1 <= m <= n) or not (1 <= k <= n):
                raise DomainError(f"need 1 <= m, k <= n, got n={n}, m={m}, k={k}")
            object.__setattr__(self, "n", n)
            object.__setattr__(self, "m", m)
            object.__setattr__(self, "k", k)
        else:
            if self.base_etas is None:
                raise DomainError("randomized_spectrum ensemble needs base_etas")
            base = np.atleast_1d(np.asarray(self.base_etas, dtype=float))
            if base.ndim != 1 or base.size < 1 or base.min() < 0.0 or base.max() > 1.0:
                raise DomainError("base_etas must be transmissivities in [0, 1]")
            if not (0.0 <= float(self.jitter) <= 1.0):
                raise DomainError(f"jitter must lie in [0, 1], got {self.jitter}")
            if self.conjugation not in ("haar", "none"):
                raise DomainError(f"conjugation must be 'haar' or 'none', got {self.conjugation!r}")
            object.__setattr__(self, "base_etas", base)
            object.__setattr__(self, "jitter", float(self.jitter))

    # -- wire format --------------------------------------------------------

    def to_json_dict(self) -> dict:
        if self.kind == "deterministic":
            params = {"t_ab": matrix_to_json_dict(self.t_ab)}
        elif self.kind == "haar_subblock":
            params = {"n": self.n, "m": self.m, "k": self.k}
        else:
            params = {
                "base_etas": self.base_etas.tolist(),
                "jitter": self.jitter,
                "conjugation": self.conjugation,
            }
        return {"kind": self.kind, "params": params, "seed": self.seed}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "EnsembleSpec":
        try:
            kind = _normalize_kind(doc["kind"])
            params = dict(doc.get("params", {}))
            seed = int(doc.get("seed", 0))
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed ensemble document: {exc}") from exc
        if kind == "deterministic":
            if "t_ab" not in params:
                raise DomainError("deterministic ensemble document needs params.t_ab")
            return cls(kind=kind, seed=seed, t_ab=matrix_from_json_dict(params["t_ab"]))
        if kind == "haar_subblock":
            return cls(kind=kind, seed=seed, n=params.get("n"), m=params.get("m"), k=params.get("k"))
        return cls(
            kind=kind,
            seed=seed,
            base_etas=params.get("base_etas"),
            jitter=params.get("jitter", 0.0),
            conjugation=params.get("conjugation", "haar"),
        )


def _rng_for(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def sample_channel(spec: EnsembleSpec, index: int) -> np.ndarray:
    """Draw the T_ab realization for one sample index (deterministic)."""
    if index < 0:
        raise DomainError(f"sample index must be >= 0, got {index}")
    if spec.kind == "deterministic":
        return spec.t_ab.copy()
    rng = _rng_for(spec.seed, index)
    if spec.kind == "haar_subblock":
        return haar_from_generator(spec.n, rng)[: spec.k, : spec.m]
    base = spec.base_etas
    shift = spec.jitter * rng.uniform(-1.0, 1.0, size=base.size)
    etas = np.clip(base + shift, 0.0, 1.0)
    roots = np.sqrt(etas)
    if spec.conjugation == "none":
        return np.diag(roots).astype(complex)
    w = haar_from_generator(base.size, rng)
    return roots[:, None] * w.conj().T


def _sampler_for(spec):
    if isinstance(spec, EnsembleSpec):
        return lambda i: sample_channel(spec, i)
    if callable(spec):
        return lambda i: np.asarray(spec(i), dtype=complex)
    raise DomainError(f"expected an EnsembleSpec or a callable sampler, got {type(spec)!r}")


@dataclass(frozen=True)
class SecondMomentMatrix:
    """Streaming estimate of E[T_ab^H T_ab] with per-entry standard errors.

    `standard_error` is the largest per-entry standard error; the full map
    is in `entry_std_error`.  The matrix is Hermitian by construction.
    """

    matrix: np.ndarray
    n_samples: int
    standard_error: float
    entry_std_error: np.ndarray = field(repr=False, compare=False, default=None)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        defect = float(np.linalg.norm(m - m.conj().T))
        if defect > 1e-12 * max(1.0, float(np.linalg.norm(m))):
            raise DomainError(f"second-moment matrix must be Hermitian, defect {defect:.3e}")
        object.__setattr__(self, "matrix", m)


def second_moment(spec, n_samples: int) -> SecondMomentMatrix:
    """Streaming mean of T_ab^H T_ab over `n_samples` indexed draws.

    One-pass mean/variance per entry; requires n_samples >= 2 so the
    variance is defined.
    """
    if n_samples < 2:
        raise DomainError(f"second-moment estimation needs n_samples >= 2, got {n_samples}")
    draw = _sampler_for(spec)
    mean = None
    msq = None
    for i in range(n_samples):
        t = draw(i)
        gram = t.conj().T @ t
        if mean is None:
            mean = np.zeros_like(gram)
            msq = np.zeros(gram.shape)
        delta = gram - mean
        mean += delta / (i + 1)
        msq += (delta.conjugate() * (gram - mean)).real
    entry_var = msq / (n_samples - 1)
    entry_se = np.sqrt(entry_var / n_samples)
    mean = 0.5 * (mean + mean.conj().T)
    return SecondMomentMatrix(
        matrix=mean,
        n_samples=n_samples,
        standard_error=float(entry_se.max()),
        entry_std_error=entry_se,
    )


def turbulence_lower_bound(moment, nbar: float, basis: str = "eigen") -> BoundValue:
    """Capacity lower bound from the second-moment matrix alone.

    basis="diagonal" uses the diagonal entries as effective per-mode
    transmissivities; basis="eigen" uses the eigenvalues, which majorize
    the diagonal and therefore can only tighten the bound.
    """
    matrix = moment.matrix if isinstance(moment, SecondMomentMatrix) else np.asarray(moment, dtype=complex)
    nbar = validate_photon_budget(nbar)
    basis = str(basis).strip().lower()
    if basis == "diagonal":
        mu = clamp_unit_interval(np.diag(matrix).real, tol=1e-8)
    elif basis == "eigen":
        w, _ = hermitian_eigen(matrix)
        mu = clamp_unit_interval(w, tol=1e-8)
    else:
        raise DomainError(f"basis must be 'diagonal' or 'eigen', got {basis!r}")
    return allocate(mu, nbar, BoundKind.LOWER).value


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Sample mean and normal-approximation uncertainty of a Monte Carlo run."""

    mean: float
    std_error: float
    n_samples: int
    confidence_95: tuple[float, float]


def monte_carlo_lower(spec, nbar: float, n_samples: int) -> MonteCarloEstimate:
    """Mean of the per-realization allocated lower bound, in nats.

    For each sample index: draw T_ab, take the eigenvalues of T_ab^H T_ab
    as the realized mode spectrum, re-optimize the photon split for that
    spectrum (the budget constraint holds per use, whatever the
    realization), and average.  Samples are reduced in index order, so
    results are bit-identical across runs.  Requires n_samples >= 30 for
    the normal-approximation interval to be meaningful.
    """
    if n_samples < 30:
        raise DomainError(f"Monte Carlo estimation needs n_samples >= 30, got {n_samples}")
    nbar = validate_photon_budget(nbar)
    draw = _sampler_for(spec)
    mean = 0.0
    msq = 0.0
    for i in range(n_samples):
        try:
            t = draw(i)
            w, _ = hermitian_eigen(t.conj().T @ t)
            mu = clamp_unit_interval(w)
            value = allocate(mu, nbar, BoundKind.LOWER).value.nats
        except Exception as exc:
            raise type(exc)(f"sample {i} failed: {exc}") from exc
        delta = value - mean
        mean += delta / (i + 1)
        msq += delta * (value - mean)
    std_error = math.sqrt(msq / (n_samples - 1) / n_samples)
    return MonteCarloEstimate(
        mean=mean,
        std_error=std_error,
        n_samples=n_samples,
        confidence_95=(mean - 1.96 * std_error, mean + 1.96 * std_error),
    )


def majorizes(a, b, tol: float = 1e-10) -> bool:
    """Whether vector a majorizes vector b.

    True iff, after sorting both descending, every prefix sum of a is at
    least the matching prefix sum of b (within tol) and the totals agree
    within tol.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if a.shape != b.shape or a.ndim != 1:
        raise DomainError(f"majorization compares equal-length vectors, got {a.shape} vs {b.shape}")
    pa = np.cumsum(np.sort(a)[::-1])
    pb = np.cumsum(np.sort(b)[::-1])
    if abs(pa[-1] - pb[-1]) > tol:
        return False
    return bool(np.all(pa >= pb - tol))
