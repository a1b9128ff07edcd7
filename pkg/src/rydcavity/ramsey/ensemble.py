"""Exact pair products and Monte-Carlo ensemble averages of G(tau).

Random numbers come from numpy's Philox-4x64 counter-based generator.  Each
realization ``i`` owns the stream ``SeedSequence(seed, spawn_key=(i,))`` and
uniform doubles are formed from raw 64-bit words as ``(w >> 11) * 2**-53``, so
positions depend only on ``(seed, i)`` and not on the numpy version, worker
count or scheduling order.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import DomainError, PreconditionError
from ..potential import PotentialCoefficients

__all__ = [
    "MODES",
    "RamseyConfig",
    "EnsembleRealization",
    "RamseySeries",
    "sphere_radius",
    "sample_positions",
    "pair_potential_matrix",
    "g_exact",
    "g_per_atom",
    "monte_carlo_contrast",
    "MAX_PACKING_FRACTION",
]

MODES = ("full", "dipole_plus_constant", "all_to_all", "free_space")
MAX_PACKING_FRACTION = 0.3
_MAX_RETRIES_PER_ATOM = 10_000


@dataclass(frozen=True)
class RamseyConfig:
    """Ensemble and sequence settings; ``p_g`` defaults to ``1 - p_d``.

    ``probe="all"`` averages the pair product over every atom of the sphere;
    ``probe="center"`` pins atom 0 at the origin and reports only its product,
    which removes the surface contribution of the finite sample.
    """

    p_d: float
    N: int
    density: float
    tau: tuple
    realizations: int = 1
    seed: int = 0
    mode: str = "full"
    blockade_radius: float = 0.0
    p_g: float | None = None
    probe: str = "all"
    workers: int = 1

    def __post_init__(self):
        if self.p_g is None:
            object.__setattr__(self, "p_g", 1.0 - self.p_d)
        object.__setattr__(self, "tau", tuple(float(t) for t in np.atleast_1d(self.tau)))
        if not 0.0 <= self.p_d <= 1.0:
            raise PreconditionError(f"p_d must lie in [0, 1], got {self.p_d}")
        if abs(self.p_g + self.p_d - 1.0) > 1e-12:
            raise PreconditionError(f"p_g + p_d must equal 1, got {self.p_g + self.p_d}")
        if int(self.N) != self.N or self.N < 2:
            raise PreconditionError(f"N must be an integer >= 2, got {self.N}")
        if not self.density > 0:
            raise PreconditionError(f"density must be positive, got {self.density}")
        if self.realizations < 1:
            raise PreconditionError("need at least one realization")
        if not 0 <= self.seed < 2**64:
            raise PreconditionError("seed must be a 64-bit unsigned integer")
        if self.mode not in MODES:
            raise PreconditionError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.blockade_radius < 0:
            raise PreconditionError("blockade_radius must be >= 0")
        if self.probe not in ("all", "center"):
            raise PreconditionError(f"probe must be 'all' or 'center', got {self.probe!r}")
        if any(t < 0 for t in self.tau):
            raise PreconditionError("tau grid must be non-negative")

    @property
    def sphere_radius(self) -> float:
        return sphere_radius(self.N, self.density)

    @property
    def packing_fraction(self) -> float:
        return self.N * (0.5 * self.blockade_radius / self.sphere_radius) ** 3

    def digest(self, coeffs: PotentialCoefficients | None = None) -> str:
        """sha256 of the canonical JSON of this config (and the coefficients)."""
        payload = {k: v for k, v in asdict(self).items() if k != "workers"}
        if coeffs is not None:
            payload["coeffs"] = [coeffs.C0, coeffs.C3, coeffs.C6]
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()


@dataclass(frozen=True)
class EnsembleRealization:
    positions: np.ndarray
    seed: int
    index: int
    rejected_count: int = 0


@dataclass
class RamseySeries:
    """Aggregated G(tau) over realizations.

    ``G`` is the mean of the complex factor, ``contrast = |G|``; ``mean_contrast``
    is the mean of the per-realization moduli and ``contrast_stderr`` its
    standard error (0 for a single realization).  ``phase`` is the unwrapped
    argument of ``G``; ``phase_flags`` marks grid points where the unwrapping is
    ambiguous (step near pi or vanishing contrast).
    """

    tau: np.ndarray
    G: np.ndarray
    contrast: np.ndarray
    mean_contrast: np.ndarray
    contrast_stderr: np.ndarray
    phase: np.ndarray
    phase_flags: np.ndarray
    G_realizations: np.ndarray
    config_hash: str = ""
    metadata: dict = field(default_factory=dict)


def sphere_radius(N: int, density: float) -> float:
    """Radius of the sphere holding N atoms at ``density``: (3N / (4 pi n))^(1/3)."""
    return (3.0 * N / (4.0 * math.pi * density)) ** (1.0 / 3.0)


class _Uniform:
    """Uniform doubles in [0, 1) from a Philox stream, buffered."""

    def __init__(self, seed: int, index: int):
        ss = np.random.SeedSequence(seed, spawn_key=(index,))
        self._bg = np.random.Philox(ss)
        self._buf = np.empty(0)
        self._pos = 0

    def take(self, n: int) -> np.ndarray:
        if self._pos + n > self._buf.size:
            raw = self._bg.random_raw(max(4096, n))
            fresh = (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53
            self._buf = np.concatenate((self._buf[self._pos:], fresh))
            self._pos = 0
        out = self._buf[self._pos:self._pos + n]
        self._pos += n
        return out


def _to_sphere(u: np.ndarray, radius: float) -> np.ndarray:
    """Map rows of three uniforms to uniform points in a ball."""
    r = radius * np.cbrt(u[:, 0])
    cos_t = 2.0 * u[:, 1] - 1.0
    sin_t = np.sqrt(np.maximum(0.0, 1.0 - cos_t * cos_t))
    phi = 2.0 * math.pi * u[:, 2]
    return np.column_stack((r * sin_t * np.cos(phi), r * sin_t * np.sin(phi), r * cos_t))


def sample_positions(N: int, density: float, seed: int, index: int = 0,
                     blockade_radius: float = 0.0, center_first: bool = False) -> EnsembleRealization:
    """Draw N homogeneous positions in the sphere of radius (3N / (4 pi n))^(1/3).

    With ``blockade_radius > 0`` every candidate closer than r_B to an accepted
    atom is redrawn.  ``center_first`` places atom 0 at the origin.
    """
    R = sphere_radius(N, density)
    if N * (0.5 * blockade_radius / R) ** 3 > MAX_PACKING_FRACTION:
        raise DomainError(f"blockade radius {blockade_radius} um is infeasible at this density "
                          f"(packing fraction > {MAX_PACKING_FRACTION})")
    rng = _Uniform(seed, index)
    if blockade_radius == 0.0:
        pos = _to_sphere(rng.take(3 * N).reshape(N, 3), R)
        if center_first:
            pos[0] = 0.0
        return EnsembleRealization(pos, seed, index, 0)
    rb2 = blockade_radius * blockade_radius
    pos = np.empty((N, 3))
    start = 0
    if center_first:
        pos[0] = 0.0
        start = 1
    rejected = 0
    for i in range(start, N):
        for _ in range(_MAX_RETRIES_PER_ATOM):
            cand = _to_sphere(rng.take(3).reshape(1, 3), R)[0]
            if i == 0 or np.min(np.sum((pos[:i] - cand) ** 2, axis=1)) >= rb2:
                pos[i] = cand
                break
            rejected += 1
        else:
            raise DomainError("could not place atom outside the blockade radius; lower r_B")
    return EnsembleRealization(pos, seed, index, rejected)


def _interaction(r, c: PotentialCoefficients, mode: str):
    if mode not in MODES:
        raise PreconditionError(f"mode must be one of {MODES}, got {mode!r}")
    if mode == "all_to_all":
        return np.full_like(r, c.C0)
    inv3 = 1.0 / (r * r * r)
    if mode == "free_space":
        return c.C6 * inv3 * inv3
    if mode == "dipole_plus_constant":
        return c.C0 + c.C3 * inv3
    return c.C0 + c.C3 * inv3 + c.C6 * inv3 * inv3


def pair_potential_matrix(positions, coeffs: PotentialCoefficients, mode: str = "full",
                          rows=None) -> tuple[np.ndarray, np.ndarray]:
    """U~(r_jk) for probe atoms ``rows`` (default all) against every atom.

    Returns the matrix, zero on self pairs, and the boolean self-pair mask.
    """
    pos = np.asarray(positions, dtype=float)
    if pos.ndim != 2 or pos.shape[1] != 3:
        raise PreconditionError("positions must have shape (N, 3)")
    rows = np.arange(len(pos)) if rows is None else np.asarray(rows)
    diff = pos[rows, None, :] - pos[None, :, :]
    r = np.sqrt(np.sum(diff * diff, axis=-1))
    self_mask = rows[:, None] == np.arange(len(pos))[None, :]
    if np.any((r == 0) & ~self_mask):
        raise DomainError("coincident atoms: pair distance is zero")
    r = np.where(self_mask, 1.0, r)
    U = _interaction(r, coeffs, mode)
    return np.where(self_mask, 0.0, U), self_mask


def g_per_atom(positions, coeffs: PotentialCoefficients, p_g: float, p_d: float, tau,
               mode: str = "full", rows=None) -> np.ndarray:
    """G_j(tau) = prod_{k != j} (p_g + p_d exp(i U~_jk tau)); shape (len(tau), len(rows))."""
    U, self_mask = pair_potential_matrix(positions, coeffs, mode, rows)
    taus = np.atleast_1d(np.asarray(tau, dtype=float))
    out = np.empty((taus.size, U.shape[0]), dtype=complex)
    for i, t in enumerate(taus):
        f = p_g + p_d * np.exp(1j * U * t)
        f[self_mask] = 1.0
        out[i] = np.prod(f, axis=1)
    return out


def g_exact(positions, coeffs: PotentialCoefficients, p_g: float, p_d: float, tau,
            mode: str = "full", probe: str = "all"):
    """Pair product G(tau) for fixed positions, averaged over probe atoms.

    ``probe="all"`` averages G_j over every atom j, ``probe="center"`` returns
    G_0 alone.  Scalar ``tau`` gives a complex scalar.
    """
    if abs(p_g + p_d - 1.0) > 1e-12 or not 0 <= p_d <= 1:
        raise PreconditionError("need 0 <= p_d <= 1 and p_g + p_d = 1")
    rows = None if probe == "all" else np.array([0])
    if probe not in ("all", "center"):
        raise PreconditionError(f"probe must be 'all' or 'center', got {probe!r}")
    G = g_per_atom(positions, coeffs, p_g, p_d, tau, mode, rows).mean(axis=1)
    return complex(G[0]) if np.ndim(tau) == 0 else G


def _one_realization(args):
    cfg, coeffs, index = args
    real = sample_positions(cfg.N, cfg.density, cfg.seed, index, cfg.blockade_radius,
                            center_first=cfg.probe == "center")
    G = g_exact(real.positions, coeffs, cfg.p_g, cfg.p_d, np.asarray(cfg.tau), cfg.mode, cfg.probe)
    return index, G, real.rejected_count


def _phase_flags(G):
    step = np.abs(np.diff(np.angle(G)))
    wrapped = np.minimum(step, 2 * math.pi - step)
    flags = np.zeros(G.shape, dtype=bool)
    flags[1:] = wrapped > 0.9 * math.pi
    flags |= np.abs(G) < 1e-12
    return flags


def monte_carlo_contrast(cfg: RamseyConfig, coeffs: PotentialCoefficients) -> RamseySeries:
    """Average G(tau) over ``cfg.realizations`` independent ensembles.

    Realizations are distributed over ``cfg.workers`` processes; results are
    stored by realization index, so the output does not depend on scheduling.
    """
    if cfg.packing_fraction > MAX_PACKING_FRACTION:
        raise DomainError(f"blockade radius infeasible: packing fraction {cfg.packing_fraction:.3f} "
                          f"> {MAX_PACKING_FRACTION}")
    jobs = [(cfg, coeffs, i) for i in range(cfg.realizations)]
    if cfg.workers > 1 and cfg.realizations > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_one_realization, jobs))
    else:
        results = [_one_realization(j) for j in jobs]
    tau = np.asarray(cfg.tau)
    per = np.empty((cfg.realizations, tau.size), dtype=complex)
    rejected = 0
    for index, G, rej in results:
        per[index] = G
        rejected += rej
    G = per.mean(axis=0)
    moduli = np.abs(per)
    R = cfg.realizations
    stderr = moduli.std(axis=0, ddof=1) / math.sqrt(R) if R > 1 else np.zeros(tau.size)
    phase = np.unwrap(np.angle(G))
    meta = {"rejected_count": rejected, "sphere_radius": cfg.sphere_radius}
    if cfg.mode in ("full", "dipole_plus_constant"):
        meta["phase_caveat"] = "continuum phase has no finite large-N limit for r^-3 interactions"
    return RamseySeries(tau=tau, G=G, contrast=np.abs(G), mean_contrast=moduli.mean(axis=0),
                        contrast_stderr=stderr, phase=phase, phase_flags=_phase_flags(G),
                        G_realizations=per, config_hash=cfg.digest(coeffs), metadata=meta)
