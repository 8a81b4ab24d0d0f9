"""Spin tomograms w(m | n) = (u(n) rho u(n)^dagger)_mm.

Conventions
-----------
Basis order is m = +j, j-1, ..., -j, so for a qubit index 0 is spin up.

The direction n = (sin t cos f, sin t sin f, cos t) is reached from the z
axis by R(f, t) = exp(-i f Jz) exp(-i t Jy) (Euler angles (f, t, 0)).
The tomogram uses u(n) = R(f, t)^dagger = exp(i t Jy) exp(i f Jz), so
that w(m | n) is the probability of spin projection m along n:

    u_{m m'} = exp(i m' f) d^j_{m' m}(t)

with d^j the real Wigner small-d matrix.  With this choice the qubit
tomogram for m = +1/2 equals n . (p - (1/2, 1/2, 1/2)) + 1/2.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, sqrt

import numpy as np

from .qudit_prob import QubitTriple
from .statespace import DensityMatrix, ProbabilityVector, StateError


def _two_j(j) -> int:
    tj = Fraction(j) * 2
    if tj.denominator != 1 or tj < 0:
        raise StateError(f"spin j must be a non-negative half-integer, got {j!r}")
    return int(tj)


@dataclass(frozen=True)
class Direction:
    theta: float
    phi: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= np.pi):
            raise StateError(f"theta must lie in [0, pi], got {self.theta!r}")
        if not np.isfinite(self.phi):
            raise StateError("phi must be finite")
        object.__setattr__(self, "phi", float(self.phi) % (2 * np.pi))

    @property
    def vector(self) -> np.ndarray:
        st = np.sin(self.theta)
        return np.array([st * np.cos(self.phi), st * np.sin(self.phi), np.cos(self.theta)])

    @classmethod
    def from_vector(cls, v) -> "Direction":
        v = np.asarray(v, dtype=float)
        v = v / np.linalg.norm(v)
        return cls(float(np.arccos(np.clip(v[2], -1.0, 1.0))), float(np.arctan2(v[1], v[0])))


@dataclass(frozen=True)
class SpinTomogram:
    j: Fraction
    direction: Direction
    w: ProbabilityVector

    @property
    def m_values(self) -> np.ndarray:
        tj = _two_j(self.j)
        return np.arange(tj, -tj - 1, -2) / 2


@lru_cache(maxsize=None)
def _small_d_terms(two_j: int):
    """Coefficient table for d^j_{m'm}(beta) as a sum of
    c * cos(beta/2)**a * sin(beta/2)**b; returns (row, col, c, a, b) arrays."""
    rows, cols, coef, pc, ps = [], [], [], [], []
    f = [factorial(i) for i in range(2 * two_j + 2)]
    for r in range(two_j + 1):          # m' = j - r
        for c in range(two_j + 1):      # m  = j - c
            jpmp, jmmp = two_j - r, r   # j + m', j - m'
            jpm, jmm = two_j - c, c
            norm = sqrt(f[jpm] * f[jmm] * f[jpmp] * f[jmmp])
            # d^j_{m'm} = sum_s (-1)^(m'-m+s) sqrt(...) /
            #   ((j+m-s)! s! (m'-m+s)! (j-m'-s)!) cos^(2j+m-m'-2s) sin^(m'-m+2s)
            dmm = c - r                 # m' - m
            for s in range(max(0, -dmm), min(jpm, jmmp) + 1):
                sign = -1 if (dmm + s) % 2 else 1
                rows.append(r)
                cols.append(c)
                coef.append(sign * norm / (f[jpm - s] * f[s] * f[dmm + s] * f[jmmp - s]))
                pc.append(two_j - dmm - 2 * s)
                ps.append(dmm + 2 * s)
    return (np.array(rows), np.array(cols), np.array(coef), np.array(pc), np.array(ps))


def small_d(j, beta: float) -> np.ndarray:
    """Wigner small-d matrix d^j_{m'm}(beta), rows m', columns m, both descending."""
    tj = _two_j(j)
    rows, cols, coef, pc, ps = _small_d_terms(tj)
    c, s = np.cos(beta / 2), np.sin(beta / 2)
    out = np.zeros((tj + 1, tj + 1))
    np.add.at(out, (rows, cols), coef * c ** pc * s ** ps)
    return out


def rotation_matrix(j, d: Direction) -> np.ndarray:
    """Unitary u(n) of spin j for the direction d (see module docstring)."""
    tj = _two_j(j)
    m = np.arange(tj, -tj - 1, -2) / 2
    # u_{m m'} = exp(i m' phi) d_{m' m}(theta)
    return small_d(j, d.theta).T * np.exp(1j * m * d.phi)[np.newaxis, :]


def spin_tomogram(rho: DensityMatrix, d: Direction) -> SpinTomogram:
    n = rho.dim
    j = Fraction(n - 1, 2)
    u = rotation_matrix(j, d)
    a = np.asarray(rho.entries)
    w = np.einsum("mi,ik,mk->m", u, a, u.conj()).real
    return SpinTomogram(j, d, ProbabilityVector(w))


def qubit_tomogram_affine(t: QubitTriple, d: Direction) -> float:
    """Probability of spin +1/2 along d from the coin probabilities."""
    return float(d.vector @ (t.as_array() - 0.5) + 0.5)


def tomogram_csv_row(tomo: SpinTomogram) -> list:
    return [float(tomo.j), tomo.direction.theta, tomo.direction.phi, *tomo.w.values.tolist()]
