"""Dense complex-matrix utilities for the multi-mode beam-splitter channel.

A multi-mode lossless channel is a (k+l) x (k+l) unitary transition matrix
acting on m sender modes plus k+l-m vacuum modes; the receiver sees the
first k outputs and the eavesdropper the remaining l.  The top-left k x m
block t_ab determines everything that matters: the eigenvalues of
t_ab^H t_ab are the transmissivities of an equivalent bank of independent
single-mode beam splitters.

This module provides the block bookkeeping, a self-contained cyclic Jacobi
eigensolver for Hermitian matrices, Haar-distributed unitary sampling, and
first/second-moment propagation through the two-splitter degraded cascade.
Matrices are plain ``numpy`` complex arrays throughout.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = [
    "CascadeMoments",
    "DEFAULT_CLAMP_TOL",
    "DEFAULT_UNITARITY_TOL",
    "ModeSpectrum",
    "UnitaryTransition",
    "cascade_moments",
    "clamp_unit_interval",
    "degraded_splitter",
    "haar_from_generator",
    "haar_unitary",
    "hermitian_eigen",
    "load_matrix",
    "matrix_from_json_dict",
    "matrix_to_json_dict",
    "mode_decompose",
    "unitarity_residual",
    "validate_unitary",
]

DEFAULT_UNITARITY_TOL = 1e-10
DEFAULT_CLAMP_TOL = 1e-10


def _as_complex_matrix(t) -> np.ndarray:
    t = np.asarray(t, dtype=complex)
    if t.ndim != 2:
        raise DomainError(f"expected a 2-d matrix, got shape {t.shape}")
    if not np.all(np.isfinite(t.real)) or not np.all(np.isfinite(t.imag)):
        raise DomainError("matrix entries must be finite")
    return t


def unitarity_residual(t) -> float:
    """Frobenius norm of t^H t - I for a square matrix."""
    t = _as_complex_matrix(t)
    n, m = t.shape
    if n != m:
        raise DomainError(f"unitarity is defined for square matrices, got {t.shape}")
    return float(np.linalg.norm(t.conj().T @ t - np.eye(n)))


def validate_unitary(t, tol: float = DEFAULT_UNITARITY_TOL) -> tuple[bool, float]:
    """Return (passed, residual) where residual = ||t^H t - I||_F."""
    residual = unitarity_residual(t)
    return residual <= tol, residual


@dataclass(frozen=True)
class UnitaryTransition:
    """A (k+l) x (k+l) unitary transition matrix with its block partition.

    m sender modes enter alongside k+l-m vacuum modes; the first k output
    rows belong to the receiver and the last l to the eavesdropper.
    Validates squareness, partition consistency and unitarity on
    construction.
    """

    t: np.ndarray
    m: int
    k: int
    l: int
    unitarity_tol: float = DEFAULT_UNITARITY_TOL

    def __post_init__(self):
        t = _as_complex_matrix(self.t)
        object.__setattr__(self, "t", t)
        m, k, l = self.m, self.k, self.l
        if min(m, k, l) < 1:
            raise DomainError(f"mode counts must be positive, got m={m}, k={k}, l={l}")
        n = k + l
        if t.shape != (n, n):
            raise DomainError(f"transition matrix must be {(n, n)} for k={k}, l={l}, got {t.shape}")
        if m > n:
            raise DomainError(f"m={m} sender modes cannot exceed k+l={n}")
        passed, residual = validate_unitary(t, self.unitarity_tol)
        if not passed:
            raise DomainError(
                f"transition matrix is not unitary: residual {residual:.3e} > tol {self.unitarity_tol:.1e}"
            )

    @property
    def t_ab(self) -> np.ndarray:
        """k x m block: sender modes to receiver outputs."""
        return self.t[: self.k, : self.m]

    @property
    def t_vb(self) -> np.ndarray:
        """k x (k+l-m) block: vacuum modes to receiver outputs."""
        return self.t[: self.k, self.m :]

    @property
    def t_ae(self) -> np.ndarray:
        """l x m block: sender modes to eavesdropper outputs."""
        return self.t[self.k :, : self.m]

    @property
    def t_ve(self) -> np.ndarray:
        """l x (k+l-m) block: vacuum modes to eavesdropper outputs."""
        return self.t[self.k :, self.m :]


def clamp_unit_interval(values, tol: float = DEFAULT_CLAMP_TOL) -> np.ndarray:
    """Clamp near-boundary values into [0, 1]; reject violations beyond tol.

    Eigenvalues of a contraction gram matrix live in [0, 1] exactly;
    anything outside by more than `tol` signals bad input rather than
    rounding, so it raises instead of clamping.
    """
    values = np.asarray(values, dtype=float)
    if np.any(values < -tol) or np.any(values > 1.0 + tol):
        raise DomainError(
            f"values outside [-{tol:.1e}, 1+{tol:.1e}]: min={values.min()}, max={values.max()}"
        )
    return np.clip(values, 0.0, 1.0)


@dataclass(frozen=True)
class ModeSpectrum:
    """Per-mode transmissivities, sorted descending, clamped to [0, 1].

    `completeness_residual`, when present, is the Frobenius defect of
    t_ab^H t_ab + t_ae^H t_ae = I, i.e. how exactly receiver and
    eavesdropper gram matrices account for all transmitted power.
    """

    etas: np.ndarray
    completeness_residual: float | None = field(default=None, compare=False)

    def __post_init__(self):
        etas = np.asarray(self.etas, dtype=float)
        if etas.ndim != 1 or etas.size < 1:
            raise DomainError("spectrum must be a non-empty 1-d sequence")
        etas = clamp_unit_interval(etas)
        etas = np.sort(etas)[::-1].copy()
        object.__setattr__(self, "etas", etas)

    def __len__(self) -> int:
        return self.etas.size


# ---------------------------------------------------------------------------
# Hermitian eigensolver (cyclic Jacobi with complex rotations)
# ---------------------------------------------------------------------------

_JACOBI_SWEEP_CAP = 100
_JACOBI_OFFDIAG_FACTOR = 1e-14
_HERMITIAN_TOL = 1e-10


def _offdiag_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def hermitian_eigen(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    h : array_like
        Square matrix, Hermitian to within 1e-10 (relative to its norm);
        it is symmetrized as (h + h^H)/2 before solving.

    Returns
    -------
    (eigenvalues, eigenvectors)
        Real eigenvalues sorted descending, and a unitary matrix whose
        columns are the matching eigenvectors, so that
        V diag(w) V^H reconstructs h.

    Each rotation diagonalizes one 2x2 principal submatrix exactly; sweeps
    repeat until the off-diagonal Frobenius norm falls below 1e-14 times
    the matrix norm (at most 100 sweeps, which random and structured
    matrices never approach).
    """
    a = _as_complex_matrix(h)
    n, m = a.shape
    if n != m:
        raise DomainError(f"eigendecomposition needs a square matrix, got {a.shape}")
    norm_h = float(np.linalg.norm(a))
    herm_defect = float(np.linalg.norm(a - a.conj().T))
    if herm_defect > _HERMITIAN_TOL * max(1.0, norm_h):
        raise DomainError(
            f"matrix is not Hermitian: ||h - h^H||_F = {herm_defect:.3e} exceeds tolerance"
        )
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    if n == 1 or norm_h == 0.0:
        w = np.diag(a).real.copy()
        order = np.argsort(-w)
        return w[order], v[:, order]

    target = _JACOBI_OFFDIAG_FACTOR * norm_h
    skip_below = target / max(1.0, n)
    converged = False
    for _ in range(_JACOBI_SWEEP_CAP):
        if _offdiag_norm(a) <= target:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= skip_below:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                # strip the phase so the 2x2 block is real symmetric
                phase = apq / r
                theta = 0.5 * math.atan2(2.0 * r, aqq - app)
                c = math.cos(theta)
                s = math.sin(theta)
                # rotation acting on columns (p, q); conjugated by the phase
                g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                a[:, [p, q]] = a[:, [p, q]] @ g
                a[[p, q], :] = g.conj().T @ a[[p, q], :]
                v[:, [p, q]] = v[:, [p, q]] @ g
                # the rotation zeroes this pair by construction
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    if not converged and _offdiag_norm(a) > target:
        raise ConvergenceError(
            f"Jacobi eigensolver did not converge in {_JACOBI_SWEEP_CAP} sweeps "
            f"(off-diagonal norm {_offdiag_norm(a):.3e}, target {target:.3e})"
        )

    w = np.diag(a).real.copy()
    order = np.argsort(-w)
    return w[order], v[:, order].copy()


def mode_decompose(u: UnitaryTransition, tol: float = DEFAULT_UNITARITY_TOL) -> ModeSpectrum:
    """Reduce a multi-mode transition to its parallel single-mode spectrum.

    Returns the eigenvalues of t_ab^H t_ab (clamped to [0, 1], descending)
    together with the power-completeness residual
    ||t_ab^H t_ab + t_ae^H t_ae - I||_F, which must not exceed `tol`; a
    larger residual means the block partition is inconsistent with the
    matrix.
    """
    gram_b = u.t_ab.conj().T @ u.t_ab
    gram_e = u.t_ae.conj().T @ u.t_ae
    residual = float(np.linalg.norm(gram_b + gram_e - np.eye(u.m)))
    if residual > tol:
        raise DomainError(
            f"receiver and eavesdropper gram matrices do not close to identity: "
            f"residual {residual:.3e} > tol {tol:.1e}"
        )
    w, _ = hermitian_eigen(gram_b)
    return ModeSpectrum(w, completeness_residual=residual)


# ---------------------------------------------------------------------------
# Degraded beam-splitter cascade
# ---------------------------------------------------------------------------


def degraded_splitter(eta: float) -> float:
    """Transmissivity (1 - eta)/eta of the second splitter in the cascade.

    Passing the receiver's mode through a splitter of this value hands the
    tap output a state identical to the eavesdropper's, which is what makes
    the channel degraded.  Only defined for eta > 1/2, where the result
    lies in [0, 1).
    """
    eta = float(eta)
    if not math.isfinite(eta) or eta <= 0.5 or eta > 1.0:
        raise DomainError(f"degraded cascade needs eta in (1/2, 1], got {eta}")
    return (1.0 - eta) / eta


@dataclass(frozen=True)
class CascadeMoments:
    """Mean photon numbers (and coherent amplitudes) through the cascade.

    n_a -> splitter(eta) -> n_b (receiver) + n_e (first tap)
    n_b -> splitter(eta') -> n_e_prime (second tap) + n_c (residual)

    Conservation holds exactly by construction: n_b + n_e = n_a and
    n_c + n_e_prime = n_b.
    """

    eta: float
    n_a: float
    n_b: float
    n_e: float
    n_c: float
    n_e_prime: float
    mean_e: complex | None = None
    mean_e_prime: complex | None = None


def cascade_moments(eta: float, n_a: float, alpha: complex | None = None) -> CascadeMoments:
    """Propagate first and second moments through the two-splitter cascade.

    The residual mode keeps n_c = (2*eta - 1) * n_a photons, and for a
    coherent input of amplitude alpha the two tap amplitudes coincide:
    sqrt(1-eta)*alpha directly, and sqrt(eta') * sqrt(eta) * alpha through
    the cascade.  Requires eta > 1/2; if alpha is given, |alpha|^2 must
    equal n_a.
    """
    eta = float(eta)
    if not math.isfinite(eta) or eta <= 0.5 or eta > 1.0:
        raise DomainError(f"cascade is defined for eta in (1/2, 1], got {eta}")
    n_a = float(n_a)
    if not math.isfinite(n_a) or n_a < 0.0:
        raise DomainError(f"input photon number must be finite and >= 0, got {n_a}")

    n_b = eta * n_a
    n_e = n_a - n_b  # exact conservation at the first splitter
    n_c = (2.0 * eta - 1.0) * n_a
    n_e_prime = n_b - n_c  # exact conservation at the second splitter

    mean_e = mean_e_prime = None
    if alpha is not None:
        alpha = complex(alpha)
        if abs(abs(alpha) ** 2 - n_a) > 1e-9 * max(1.0, n_a):
            raise DomainError(
                f"coherent amplitude inconsistent with photon number: |alpha|^2 = "
                f"{abs(alpha) ** 2}, n_a = {n_a}"
            )
        eta_prime = degraded_splitter(eta)
        mean_b = math.sqrt(eta) * alpha
        mean_e = math.sqrt(1.0 - eta) * alpha
        mean_e_prime = math.sqrt(eta_prime) * mean_b

    return CascadeMoments(
        eta=eta,
        n_a=n_a,
        n_b=n_b,
        n_e=n_e,
        n_c=n_c,
        n_e_prime=n_e_prime,
        mean_e=mean_e,
        mean_e_prime=mean_e_prime,
    )


# ---------------------------------------------------------------------------
# Haar-random unitaries
# ---------------------------------------------------------------------------


def haar_from_generator(n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw an n x n Haar-distributed unitary from an existing generator.

    Complex standard-Gaussian matrix, QR factorization, then rescaling of
    each column by the phase of the corresponding diagonal entry of R.
    Without that correction QR output is not Haar.
    """
    if n < 1:
        raise DomainError(f"matrix size must be >= 1, got {n}")
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return q


def haar_unitary(n: int, seed: int) -> np.ndarray:
    """Deterministic Haar-random n x n unitary for a 64-bit seed."""
    rng = np.random.default_rng(np.random.SeedSequence(int(seed) & (2**64 - 1)))
    return haar_from_generator(n, rng)


# ---------------------------------------------------------------------------
# Matrix file formats
# ---------------------------------------------------------------------------


def matrix_to_json_dict(t) -> dict:
    """Encode a complex matrix as {rows, cols, re, im} with row-major lists."""
    t = _as_complex_matrix(t)
    return {
        "rows": t.shape[0],
        "cols": t.shape[1],
        "re": t.real.ravel().tolist(),
        "im": t.imag.ravel().tolist(),
    }


def matrix_from_json_dict(doc: dict) -> np.ndarray:
    """Decode the {rows, cols, re, im} representation back into an array."""
    try:
        rows = int(doc["rows"])
        cols = int(doc["cols"])
        re = np.asarray(doc["re"], dtype=float)
        im = np.asarray(doc["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed matrix document: {exc}") from exc
    if rows < 1 or cols < 1 or re.size != rows * cols or im.size != rows * cols:
        raise DomainError(
            f"matrix document has {re.size} re / {im.size} im entries, expected rows*cols = {rows * cols}"
        )
    return (re + 1j * im).reshape(rows, cols)


def load_matrix(path: str) -> tuple[np.ndarray, dict | None]:
    """Load a complex matrix from a .json or .csv file.

    JSON files use the {rows, cols, re, im} layout and may carry extra
    keys (e.g. a block partition {m, k, l}), returned as the second
    element.  CSV files hold one row per line with cells parseable by
    ``complex()``, e.g. ``0.5+0.5j``; no partition metadata.
    """
    if path.endswith(".csv"):
        rows = []
        with open(path, newline="") as fh:
            for record in csv.reader(fh):
                if not record:
                    continue
                rows.append([complex(cell.strip().replace(" ", "")) for cell in record])
        if not rows or len({len(r) for r in rows}) != 1:
            raise DomainError(f"CSV matrix in {path} is empty or ragged")
        return np.array(rows, dtype=complex), None
    with open(path) as fh:
        doc = json.load(fh)
    matrix = matrix_from_json_dict(doc)
    meta = {key: doc[key] for key in ("m", "k", "l") if key in doc}
    return matrix, meta or None
