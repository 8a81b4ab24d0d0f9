"""Core state containers: density matrices, probability vectors, tolerances.

Every container is immutable (the wrapped arrays are flagged read-only) and
every function here is pure.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class StateError(ValueError):
    """Raised for malformed input (shape, NaN/Inf, out-of-range values)."""


class InvalidDensityMatrix(StateError):
    """A matrix failed one of the density-matrix invariants.

    ``invariant`` is one of ``"hermitian"``, ``"trace"``, ``"psd"`` and
    ``magnitude`` is the size of the violation.
    """

    def __init__(self, invariant: str, magnitude: float):
        self.invariant = invariant
        self.magnitude = float(magnitude)
        super().__init__(f"{invariant} violated (magnitude {self.magnitude:.3e})")


@dataclass(frozen=True)
class ToleranceConfig:
    tol_herm: float = 1e-9
    tol_trace: float = 1e-9
    tol_psd: float = 1e-9
    tol_norm: float = 1e-9

    def __post_init__(self):
        for name in ("tol_herm", "tol_trace", "tol_psd", "tol_norm"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise StateError(f"{name} must be strictly positive, got {value!r}")

    def replace(self, **overrides) -> "ToleranceConfig":
        unknown = set(overrides) - {"tol_herm", "tol_trace", "tol_psd", "tol_norm"}
        if unknown:
            raise StateError(f"unknown tolerance keys: {sorted(unknown)}")
        values = {k: getattr(self, k) for k in ("tol_herm", "tol_trace", "tol_psd", "tol_norm")}
        values.update({k: float(v) for k, v in overrides.items()})
        return ToleranceConfig(**values)


DEFAULT_TOL = ToleranceConfig()


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DensityMatrix:
    """Validated N x N density matrix. Build it with :func:`validate_density`."""

    entries: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __getitem__(self, idx):
        return self.entries[idx]

    def __eq__(self, other):
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return self.entries.shape == other.entries.shape and bool(
            np.array_equal(self.entries, other.entries)
        )

    def __hash__(self):
        return hash(self.entries.tobytes())


@dataclass(frozen=True)
class ProbabilityVector:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise StateError("probability vector must be one-dimensional and non-empty")
        if not np.all(np.isfinite(v)):
            raise StateError("probability vector contains NaN or Inf")
        object.__setattr__(self, "values", _frozen(v))

    def check(self, cfg: ToleranceConfig = DEFAULT_TOL) -> None:
        if np.any(self.values < -cfg.tol_psd):
            raise StateError(f"negative probability {self.values.min():.3e}")
        total = self.values.sum()
        if abs(total - 1.0) > cfg.tol_norm:
            raise StateError(f"probabilities sum to {total!r}, not 1")

    def __len__(self):
        return self.values.size


def as_square_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise StateError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 2:
        raise StateError("dimension must be at least 2")
    if not np.all(np.isfinite(a)):
        raise StateError("matrix contains NaN or Inf entries")
    return a


def diagnose_density(m, cfg: ToleranceConfig = DEFAULT_TOL) -> Optional[InvalidDensityMatrix]:
    """Return the first violated invariant as an exception object, or None."""
    a = as_square_matrix(m)
    herm = np.max(np.abs(a - a.conj().T))
    if herm > cfg.tol_herm:
        return InvalidDensityMatrix("hermitian", herm)
    trace = abs(np.trace(a) - 1.0)
    if trace > cfg.tol_trace:
        return InvalidDensityMatrix("trace", trace)
    lam_min = _eigvalsh(0.5 * (a + a.conj().T))[-1]
    if lam_min < -cfg.tol_psd:
        return InvalidDensityMatrix("psd", -lam_min)
    return None


def validate_density(m, cfg: ToleranceConfig = DEFAULT_TOL) -> DensityMatrix:
    """Accept ``m`` as a density matrix or raise :class:`InvalidDensityMatrix`.

    The input is never repaired: no symmetrisation, renormalisation or
    projection onto the positive cone is applied to the stored entries.
    """
    problem = diagnose_density(m, cfg)
    if problem is not None:
        raise problem
    return DensityMatrix(_frozen(as_square_matrix(m)))


def eigvals_2x2(a: np.ndarray) -> np.ndarray:
    """Closed-form eigenvalues of (a stack of) 2x2 Hermitian matrices, descending."""
    a = np.asarray(a)
    d1 = a[..., 0, 0].real
    d2 = a[..., 1, 1].real
    off = np.abs(a[..., 1, 0])
    mean = 0.5 * (d1 + d2)
    rad = np.hypot(0.5 * (d1 - d2), off)
    return np.stack([mean + rad, mean - rad], axis=-1)


def _eigvalsh(a: np.ndarray) -> np.ndarray:
    if a.shape[-1] == 2:
        return eigvals_2x2(a)
    return np.linalg.eigvalsh(a)[..., ::-1]


def hermitian_eigenvalues(rho: DensityMatrix) -> np.ndarray:
    """Real eigenvalues in descending order (closed form for N = 2)."""
    return _eigvalsh(np.asarray(rho.entries))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    lam = hermitian_eigenvalues(rho)
    lam = lam[lam > 0]
    return float(-np.sum(lam * np.log(lam)))


def random_density(dim: int, rng: np.random.Generator, rank: Optional[int] = None) -> DensityMatrix:
    """Random density matrix from a complex Ginibre matrix (Hilbert-Schmidt measure)."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T) / np.trace(rho).real
    return validate_density(rho)


def maximally_mixed(dim: int) -> DensityMatrix:
    return validate_density(np.eye(dim) / dim)


def pure_state(vec) -> DensityMatrix:
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return validate_density(np.outer(v, v.conj()))


# JSON representation shared by the CLI and all file I/O.

def matrix_to_json(m) -> dict:
    a = np.asarray(m, dtype=complex)
    return {
        "dim": int(a.shape[0]),
        "re": [[float(x) for x in row] for row in a.real],
        "im": [[float(x) for x in row] for row in a.imag],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        dim = int(obj["dim"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise StateError(f"malformed matrix JSON: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise StateError(f"matrix JSON declares dim {dim} but holds {re.shape} / {im.shape}")
    return re + 1j * im
