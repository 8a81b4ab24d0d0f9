"""Density matrices as sets of classical-coin probabilities.

A qudit density matrix of dimension N is carried by N**2 - 1 probabilities:

* ``p1[j,k]``, ``p2[j,k]`` for every pair j > k, with
  ``rho[j,k] = (p1 - 1/2) + i (p2 - 1/2)``;
* ``p3[j]`` for j >= 2, with ``rho[j,j] = 1 - p3``;

and ``rho[1,1] = 1 - sum_{j>=2} rho[j,j]``.  Indices are 1-based in the
public API and in every file format.

The probabilities belong to "artificial qubits": for the pair (j, k) the
2x2 matrix ``[[1 - rho_jj, rho_kj], [rho_jk, rho_jj]]`` is a qubit density
matrix whenever rho is one, and its spin-up probabilities along x, y, z are
exactly ``(p1[j,k], p2[j,k], p3[j])``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from .statespace import (
    DEFAULT_TOL,
    DensityMatrix,
    StateError,
    ToleranceConfig,
    as_square_matrix,
    eigvals_2x2,
    validate_density,
)

PROB_SLACK = 1e-12


def _check_prob(name: str, value: float) -> float:
    value = float(value)
    if not np.isfinite(value) or value < -PROB_SLACK or value > 1 + PROB_SLACK:
        raise StateError(f"{name} = {value!r} is not a probability")
    return value


@dataclass(frozen=True)
class QubitTriple:
    """Spin-up probabilities along x, y and z."""

    p1: float
    p2: float
    p3: float

    def __post_init__(self):
        for name in ("p1", "p2", "p3"):
            object.__setattr__(self, name, _check_prob(name, getattr(self, name)))

    def as_array(self) -> np.ndarray:
        return np.array([self.p1, self.p2, self.p3])

    def __iter__(self):
        return iter((self.p1, self.p2, self.p3))


@dataclass(frozen=True)
class QuditProbabilityTable:
    dim: int
    offdiag: Dict[Tuple[int, int], Tuple[float, float]]
    diag: Dict[int, float]

    def __post_init__(self):
        n = int(self.dim)
        if n < 2:
            raise StateError("dimension must be at least 2")
        want_off = {(j, k) for j in range(2, n + 1) for k in range(1, j)}
        if set(self.offdiag) != want_off:
            raise StateError(f"offdiag must hold exactly the pairs j>k for N={n}")
        if set(self.diag) != set(range(2, n + 1)):
            raise StateError(f"diag must hold exactly j = 2..{n}")
        off = {
            (j, k): (_check_prob(f"p1[{j},{k}]", p1), _check_prob(f"p2[{j},{k}]", p2))
            for (j, k), (p1, p2) in sorted(self.offdiag.items())
        }
        diag = {j: _check_prob(f"p3[{j}]", p3) for j, p3 in sorted(self.diag.items())}
        object.__setattr__(self, "dim", n)
        object.__setattr__(self, "offdiag", off)
        object.__setattr__(self, "diag", diag)

    def __len__(self):
        return 2 * len(self.offdiag) + len(self.diag)

    @property
    def rho11(self) -> float:
        return 1.0 - sum(1.0 - p3 for p3 in self.diag.values())

    def probabilities(self) -> np.ndarray:
        """All N**2 - 1 probabilities in canonical order: off-diagonal pairs
        (p1, p2) sorted by (j, k), then p3 for j = 2..N."""
        out = [p for pair in self.offdiag.values() for p in pair]
        out.extend(self.diag.values())
        return np.array(out)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "offdiag": [
                {"j": j, "k": k, "p1": p1, "p2": p2} for (j, k), (p1, p2) in self.offdiag.items()
            ],
            "diag": [{"j": j, "p3": p3} for j, p3 in self.diag.items()],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "QuditProbabilityTable":
        try:
            off = {(int(e["j"]), int(e["k"])): (e["p1"], e["p2"]) for e in obj["offdiag"]}
            diag = {int(e["j"]): e["p3"] for e in obj["diag"]}
            return cls(int(obj["dim"]), off, diag)
        except (KeyError, TypeError) as exc:
            raise StateError(f"malformed probability table JSON: {exc}") from exc


# Qubit case.

def qubit_matrix(p1, p2, p3) -> np.ndarray:
    """Qubit matrix from spin-up probabilities; broadcasts over array inputs."""
    p1, p2, p3 = np.broadcast_arrays(*(np.asarray(p, dtype=float) for p in (p1, p2, p3)))
    out = np.empty(p1.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = p3
    out[..., 1, 1] = 1.0 - p3
    out[..., 0, 1] = (p1 - 0.5) - 1j * (p2 - 0.5)
    out[..., 1, 0] = (p1 - 0.5) + 1j * (p2 - 0.5)
    return out


def qubit_to_density(t: QubitTriple, cfg: ToleranceConfig = DEFAULT_TOL) -> DensityMatrix:
    """Qubit density matrix; raises InvalidDensityMatrix for triples outside the ball."""
    return validate_density(qubit_matrix(t.p1, t.p2, t.p3), cfg)


def density_to_qubit(rho: DensityMatrix) -> QubitTriple:
    a = np.asarray(rho.entries)
    if a.shape != (2, 2):
        raise StateError(f"expected a 2x2 density matrix, got {a.shape}")
    return QubitTriple(a[1, 0].real + 0.5, a[1, 0].imag + 0.5, a[0, 0].real)


def ball_margin(p) -> np.ndarray:
    """Squared distance of (..., 3) probability triples from (1/2, 1/2, 1/2)."""
    p = np.asarray(p, dtype=float)
    return np.sum((p - 0.5) ** 2, axis=-1)


def check_qubit_ball(t: QubitTriple, cfg: ToleranceConfig = DEFAULT_TOL) -> Tuple[bool, float]:
    """Return (admissible, sum_k (p_k - 1/2)**2); admissible iff the sum is <= 1/4."""
    margin = float(ball_margin(t.as_array()))
    return margin <= 0.25 + cfg.tol_psd, margin


def qubit_min_eigenvalue(p) -> np.ndarray:
    """Smallest eigenvalue of the qubit matrix for (..., 3) triples."""
    p = np.asarray(p, dtype=float)
    return eigvals_2x2(qubit_matrix(p[..., 0], p[..., 1], p[..., 2]))[..., 1]


# General N.

def table_to_matrix(t: QuditProbabilityTable) -> np.ndarray:
    n = t.dim
    rho = np.zeros((n, n), dtype=complex)
    for (j, k), (p1, p2) in t.offdiag.items():
        z = (p1 - 0.5) + 1j * (p2 - 0.5)
        rho[j - 1, k - 1] = z
        rho[k - 1, j - 1] = np.conj(z)
    for j, p3 in t.diag.items():
        rho[j - 1, j - 1] = 1.0 - p3
    rho[0, 0] = 1.0 - sum(rho[j, j].real for j in range(1, n))
    return rho


def table_to_density(t: QuditProbabilityTable, cfg: ToleranceConfig = DEFAULT_TOL) -> DensityMatrix:
    """Density matrix of a table.  Hermiticity and unit trace hold by
    construction; positivity does not, and a non-positive result raises."""
    return validate_density(table_to_matrix(t), cfg)


def matrix_to_table(m) -> QuditProbabilityTable:
    """Inverse of :func:`table_to_matrix` for any Hermitian unit-trace matrix
    whose coin probabilities land in [0, 1]."""
    a = as_square_matrix(m)
    n = a.shape[0]
    off = {
        (j, k): (a[j - 1, k - 1].real + 0.5, a[j - 1, k - 1].imag + 0.5)
        for j in range(2, n + 1)
        for k in range(1, j)
    }
    diag = {j: 1.0 - a[j - 1, j - 1].real for j in range(2, n + 1)}
    return QuditProbabilityTable(n, off, diag)


def density_to_table(rho: DensityMatrix) -> QuditProbabilityTable:
    return matrix_to_table(rho.entries)


def embed_corner(rho: DensityMatrix, pad: int, corner: str = "top-left") -> DensityMatrix:
    """Zero-pad rho by ``pad`` rows/columns, leaving it in the named corner."""
    if pad < 1:
        raise StateError("pad must be at least 1")
    n = rho.dim
    out = np.zeros((n + pad, n + pad), dtype=complex)
    if corner == "top-left":
        out[:n, :n] = rho.entries
    elif corner == "bottom-right":
        out[pad:, pad:] = rho.entries
    else:
        raise StateError(f"unknown corner {corner!r}")
    return validate_density(out)


def artificial_qubit_matrix(m, j: int, k: int) -> np.ndarray:
    a = np.asarray(m)
    if not (1 <= k < j <= a.shape[0]):
        raise StateError(f"pair ({j},{k}) is not j > k within 1..{a.shape[0]}")
    rjj = a[j - 1, j - 1].real
    return np.array([[1.0 - rjj, a[k - 1, j - 1]], [a[j - 1, k - 1], rjj]], dtype=complex)


def artificial_qubits(rho: DensityMatrix) -> Dict[Tuple[int, int], DensityMatrix]:
    """Artificial qubit for every pair j > k, keyed by (j, k) in sorted order.

    For a qutrit the pairs (3,1) and (2,1) give the partial traces of the
    top-left embedding into C^4; pair (3,2) uses the same rule rather than
    the bottom-right trace, so its z probability is always 1 - rho_jj.
    """
    n = rho.dim
    return {
        (j, k): validate_density(artificial_qubit_matrix(rho.entries, j, k))
        for j in range(2, n + 1)
        for k in range(1, j)
    }


def partial_trace_qubits(rho4: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Reduced 2x2 matrices of a 4x4 matrix viewed as a two-qubit state
    (basis order |00>, |01>, |10>, |11>).  Returns (first, second)."""
    r = np.asarray(rho4, dtype=complex).reshape(2, 2, 2, 2)
    return np.einsum("ajbj->ab", r), np.einsum("jajb->ab", r)


def qutrit_partial_traces(rho: DensityMatrix) -> Dict[str, np.ndarray]:
    """R(1)..R(4): one-qubit reductions of the top-left and bottom-right
    4x4 embeddings of a qutrit (viewed as two-qubit states)."""
    if rho.dim != 3:
        raise StateError("qutrit_partial_traces needs a 3x3 density matrix")
    top = np.asarray(embed_corner(rho, 1, "top-left").entries)
    bottom = np.asarray(embed_corner(rho, 1, "bottom-right").entries)
    a1, b1 = partial_trace_qubits(top)
    a2, b2 = partial_trace_qubits(bottom)
    # R1 = [[r11+r22, r13], [r31, r33]]   R2 = [[r11+r33, r12], [r21, r22]]
    # R3 = [[r11, r13], [r31, r22+r33]]   R4 = [[r22, r23], [r32, r11+r33]]
    return {"R1": a1, "R2": b1, "R3": a2, "R4": b2}


@dataclass(frozen=True)
class EntryBoundViolation:
    j: int
    k: int
    kind: str
    value: float


def check_entry_bounds(rho: DensityMatrix, tol: float = 1e-9):
    """List violations of Re rho_jk + 1/2 >= 0 and Im rho_jk <= 1/2 (j != k)."""
    a = np.asarray(rho.entries)
    n = a.shape[0]
    out = []
    for j in range(n):
        for k in range(n):
            if j == k:
                continue
            re_margin = a[j, k].real + 0.5
            im_margin = 0.5 - a[j, k].imag
            if re_margin < -tol:
                out.append(EntryBoundViolation(j + 1, k + 1, "re+1/2>=0", re_margin))
            if im_margin < -tol:
                out.append(EntryBoundViolation(j + 1, k + 1, "im<=1/2", im_margin))
    return out
