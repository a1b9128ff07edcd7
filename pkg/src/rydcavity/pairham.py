"""Two-atom Hamiltonian in the two-excitation subspace and its perturbative shifts.

The full basis is |df1>, |fd1>, |ff2>, |pf0>, |fp0>, |dd0> (atom 1, atom 2,
photon number).  The reduced basis assumes identical couplings at both sites
and keeps only the exchange-symmetric combinations.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ContractViolation, DegeneracyError, PerturbativeWarning
from .params import PerturbativeReport, PhysicalParams, cavity_coupling, validate_perturbative

__all__ = [
    "Detunings",
    "PairHamiltonian",
    "PerturbationResult",
    "EffectiveInteraction",
    "FULL_BASIS",
    "REDUCED_BASIS",
    "build_full",
    "build_reduced",
    "eigenvalues_sym",
    "dressed_shift",
    "rs_perturbation_order4",
    "perturbation_generic",
    "perturbation_closed_form",
    "effective_pair_interaction",
]

FULL_BASIS = ("df1", "fd1", "ff2", "pf0", "fp0", "dd0")
REDUCED_BASIS = ("(df1+fd1)/sqrt2", "ff2", "(pf0+fp0)/sqrt2", "dd0")
SQRT2 = math.sqrt(2.0)


class Detunings(NamedTuple):
    """Minimal energy frame: anything with these three attributes works."""

    omega_d: float
    delta: float
    Delta: float


@dataclass(frozen=True)
class PairHamiltonian:
    matrix: np.ndarray
    basis_labels: tuple
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.matrix.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def index(self, label: str) -> int:
        return self.basis_labels.index(label)


@dataclass(frozen=True)
class PerturbationResult:
    dE1: float
    dE2: float
    dE3: float
    dE4: float
    pair_interaction: float | None = None
    stark_shift: tuple | None = None

    @property
    def dE_total(self) -> float:
        return self.dE1 + self.dE2 + self.dE3 + self.dE4


def _sym_set(H, i, j, v):
    H[i, j] = v
    H[j, i] = v


def build_full(params, U, J, g1a, g1b, g2a, g2b) -> PairHamiltonian:
    """6x6 matrix of the pair in the basis :data:`FULL_BASIS`.

    ``params`` needs ``omega_d``, ``delta`` and ``Delta`` (a
    :class:`~rydcavity.params.PhysicalParams` or :class:`Detunings`).
    """
    wd, d, D = params.omega_d, params.delta, params.Delta
    two = 2.0 * wd
    H = np.diag([two - d, two - d, two - 2.0 * d, two - D, two - D, two]).astype(float)
    _sym_set(H, 0, 1, J)
    _sym_set(H, 0, 2, SQRT2 * g1a)
    _sym_set(H, 0, 3, g1b)
    _sym_set(H, 0, 5, g2a)
    _sym_set(H, 1, 2, SQRT2 * g2a)
    _sym_set(H, 1, 4, g2b)
    _sym_set(H, 1, 5, g1a)
    _sym_set(H, 3, 5, U)
    _sym_set(H, 4, 5, U)
    snap = dict(omega_d=wd, delta=d, Delta=D, g1a=g1a, g1b=g1b, g2a=g2a, g2b=g2b, U=U, J=J)
    return PairHamiltonian(H, FULL_BASIS, snap)


def build_reduced(params, U, J, ga, gb) -> PairHamiltonian:
    """4x4 matrix in the exchange-symmetric basis :data:`REDUCED_BASIS`."""
    wd, d, D = params.omega_d, params.delta, params.Delta
    two = 2.0 * wd
    H = np.diag([two - d + J, two - 2.0 * d, two - D, two]).astype(float)
    _sym_set(H, 0, 1, 2.0 * ga)
    _sym_set(H, 0, 2, gb)
    _sym_set(H, 0, 3, SQRT2 * ga)
    _sym_set(H, 2, 3, SQRT2 * U)
    snap = dict(omega_d=wd, delta=d, Delta=D, g1a=ga, g1b=gb, g2a=ga, g2b=gb, U=U, J=J)
    return PairHamiltonian(H, REDUCED_BASIS, snap)


def _jacobi(A, tol_rel=1e-14, max_sweeps=100):
    """Cyclic Jacobi rotations; returns (eigenvalues, eigenvectors as columns)."""
    A = np.array(A, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    # a common diagonal offset does not change the eigenvectors; removing it keeps
    # the stopping test relative to the spread of the spectrum
    shift = float(np.mean(np.diag(A)))
    A[np.diag_indices(n)] -= shift
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return np.full(n, shift), V
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = math.sqrt(np.sum(A[offdiag] ** 2))
        if off <= tol_rel * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                diff = float(A[q, q] - A[p, p])
                if abs(apq) * 1e100 < abs(diff):
                    t = float(apq) / diff  # small-angle limit, avoids overflow in theta^2
                else:
                    theta = diff / (2.0 * float(apq))
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # A <- R^T A R with R the (p, q) rotation
                ap = A[:, p].copy()
                aq = A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap = A[p, :].copy()
                aq = A[q, :].copy()
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        raise ArithmeticError("Jacobi iteration did not converge")
    return np.diag(A) + shift, V


def eigenvalues_sym(H, vectors: bool = False):
    """Sorted eigenvalues (and optionally eigenvector columns) of a small symmetric matrix."""
    A = H.matrix if isinstance(H, PairHamiltonian) else np.asarray(H, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ContractViolation(f"expected a square matrix, got shape {A.shape}")
    if A.shape[0] > 8:
        raise ContractViolation("eigenvalues_sym is meant for dimension <= 8")
    if not np.array_equal(A, A.T):
        raise ContractViolation("matrix is not exactly symmetric")
    w, V = _jacobi(A)
    order = np.argsort(w, kind="stable")
    w, V = w[order], V[:, order]
    return (w, V) if vectors else w


def dressed_shift(H: PairHamiltonian, label: str = "dd0", min_overlap: float = 0.5):
    """Exact energy shift of the eigenstate continuously connected to ``label``.

    Returns ``(shift, overlap)`` where the eigenvector is the one with maximal
    overlap |<label|v>|^2.
    """
    k = H.index(label)
    ref = H.matrix[k, k]
    # measure energies from the bare level so that small shifts keep full precision
    w, V = eigenvalues_sym(H.matrix - ref * np.eye(H.dim), vectors=True)
    overlaps = V[k, :] ** 2
    j = int(np.argmax(overlaps))
    if overlaps[j] < min_overlap:
        raise ArithmeticError(f"no eigenvector overlaps |{label}> by more than {min_overlap}")
    return float(w[j]), float(overlaps[j])


def rs_perturbation_order4(H0_diag, V_matrix, target_index: int, degeneracy_tol: float = 1e-9,
                           labels=None) -> PerturbationResult:
    """Non-degenerate Rayleigh-Schroedinger shifts up to fourth order.

    Requires a vanishing first-order shift (V[t, t] == 0).  States whose gap to the
    target is below ``degeneracy_tol`` times the largest gap raise
    :class:`DegeneracyError`.
    """
    E = np.asarray(H0_diag, dtype=float)
    V = np.asarray(V_matrix, dtype=float)
    t = target_index
    if V[t, t] != 0.0:
        raise ContractViolation("first-order shift must vanish (V[t, t] != 0)")
    others = np.array([n for n in range(len(E)) if n != t])
    gaps = E[t] - E[others]
    big = np.max(np.abs(gaps)) if len(gaps) else 0.0
    for n, gap in zip(others, gaps):
        if abs(gap) <= degeneracy_tol * big:
            name = (lambda i: labels[i] if labels else i)
            raise DegeneracyError(name(t), name(int(n)), gap)
    v = V[t, others]
    W = V[np.ix_(others, others)]
    a = v / gaps
    dE2 = float(v @ a)
    dE3 = float(a @ W @ a)
    dE4 = float(a @ W @ (W @ a / gaps)) - dE2 * float(a @ a)
    return PerturbationResult(0.0, dE2, dE3, dE4)


def perturbation_generic(H: PairHamiltonian, target: str = "dd0", degeneracy_tol: float = 1e-9):
    """Generic fourth-order shift of ``target`` with H0 = diag(H)."""
    M = H.matrix
    H0 = np.diag(M).copy()
    V = M - np.diag(H0)
    return rs_perturbation_order4(H0, V, H.index(target), degeneracy_tol, labels=H.basis_labels)


def _pair_terms(d, D, U, J, g1a, g1b, g2a, g2b):
    """Two-body interaction of the effective Hamiltonian (terms of order e^4)."""
    half = (
        U * U / D
        + U * (g1a * g2b + g1b * g2a) / (D * d)
        + ((g1a * g2b) ** 2 + (g1b * g2a) ** 2) / (2.0 * D * d * d)
        + J * g1a * g2a / (d * d)
        + (g1a * g2a) ** 2 / d**3
    )
    return 2.0 * half


def perturbation_closed_form(params, U, J, g1a, g1b, g2a, g2b) -> PerturbationResult:
    """Closed-form second- to fourth-order shifts of |dd0>, with the Stark and pair split."""
    d, D = params.delta, params.Delta
    dE2 = g1a**2 / d + g2a**2 / d + 2.0 * U**2 / D
    dE3 = 2.0 * (g1a * g2b + g2a * g1b) * U / (D * d) + 2.0 * g1a * g2a * J / d**2
    dE4 = (
        ((g1a * g2b) ** 2 + (g2a * g1b) ** 2) / (d**2 * D)
        + 2.0 * g1a**2 * g2a**2 / d**3
        - 2.0 * U**2 * (g1a**2 + g2a**2) / (D * d) * (1.0 / D + 1.0 / d)
        + U**2 * (g1b**2 + g2b**2) / (D**2 * d)
        - 4.0 * U**4 / D**3
        - g1a**4 / d**3
        - g2a**4 / d**3
        + 2.0 * J * U * (g1a * g1b + g2a * g2b) / (d**2 * D)
        + (g1a**2 + g2a**2) * J**2 / d**3
    )
    stark = tuple(g**2 / d - g**4 / d**3 for g in (g1a, g2a))
    pair = _pair_terms(d, D, U, J, g1a, g1b, g2a, g2b)
    return PerturbationResult(0.0, dE2, dE3, dE4, pair_interaction=pair, stark_shift=stark)


@dataclass(frozen=True)
class EffectiveInteraction:
    value: float
    gate: PerturbativeReport

    def __float__(self):
        return float(self.value)


def effective_pair_interaction(params: PhysicalParams, U: float, J: float, g1a=None, g1b=None,
                               g2a=None, g2b=None, threshold: float = 10.0) -> EffectiveInteraction:
    """Pair energy U~ of two d-atoms (both orderings of the cavity cross terms included).

    Missing couplings are computed from ``params`` with the default mode amplitude.
    A failed perturbative gate is reported on the result and as a warning.
    """
    ga = cavity_coupling(params, "a") if g1a is None or g2a is None else None
    gb = cavity_coupling(params, "b") if g1b is None or g2b is None else None
    g1a = ga if g1a is None else g1a
    g2a = ga if g2a is None else g2a
    g1b = gb if g1b is None else g1b
    g2b = gb if g2b is None else g2b
    gmax = max(abs(g1a), abs(g2a), abs(g1b), abs(g2b))
    gate = validate_perturbative(params, U, J, threshold=threshold, g=gmax)
    if not gate.passed:
        warnings.warn(f"perturbative gate failed: {gate.failing()}", PerturbativeWarning, stacklevel=2)
    value = _pair_terms(params.delta, params.Delta, U, J, g1a, g1b, g2a, g2b)
    return EffectiveInteraction(value, gate)
