"""Shannon entropies, the partition tool and entry-wise entropic inequalities.

All entropies are in nats.  0 ln 0 = 0; a relative-entropy term x ln(x/0)
with x > 0 is +inf and is reported, not raised.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.special import entr, rel_entr

from .qudit_prob import QubitTriple, check_entry_bounds
from .statespace import DEFAULT_TOL, DensityMatrix, ProbabilityVector, StateError, ToleranceConfig

INEQ_TOL = 1e-9


def _as_probs(p, cfg: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    if isinstance(p, ProbabilityVector):
        p = p.values
    a = np.asarray(p, dtype=float)
    if not np.all(np.isfinite(a)):
        raise StateError("distribution contains NaN or Inf")
    if np.any(a < 0):
        raise StateError(f"negative probability {a.min():.3e}")
    if abs(a.sum() - 1.0) > cfg.tol_norm:
        raise StateError(f"distribution sums to {a.sum()!r}, not 1")
    return a


def shannon_entropy(p, cfg: ToleranceConfig = DEFAULT_TOL) -> float:
    """H = -sum p ln p over any array shape."""
    return float(entr(_as_probs(p, cfg)).sum())


def binary_entropy(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return entr(x) + entr(1.0 - x)


@dataclass(frozen=True)
class PartitionSpec:
    """Row-major bijection s <-> (j_1, ..., j_M), all indices 1-based."""

    factors: Tuple[int, ...]

    def __post_init__(self):
        f = tuple(int(n) for n in self.factors)
        if not f or any(n < 1 for n in f):
            raise StateError(f"factor sizes must be positive, got {self.factors!r}")
        object.__setattr__(self, "factors", f)

    @property
    def size(self) -> int:
        return math.prod(self.factors)

    def split(self, s: int) -> Tuple[int, ...]:
        if not 1 <= s <= self.size:
            raise StateError(f"flat index {s} outside 1..{self.size}")
        return tuple(int(i) + 1 for i in np.unravel_index(s - 1, self.factors))

    def join(self, js: Sequence[int]) -> int:
        if len(js) != len(self.factors) or any(not 1 <= j <= n for j, n in zip(js, self.factors)):
            raise StateError(f"index tuple {tuple(js)} does not fit {self.factors}")
        return int(np.ravel_multi_index([j - 1 for j in js], self.factors)) + 1


@dataclass(frozen=True)
class JointDistribution:
    values: np.ndarray

    def __post_init__(self):
        a = _as_probs(self.values)
        a = np.array(a, copy=True)
        a.setflags(write=False)
        object.__setattr__(self, "values", a)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.values.shape

    def marginal(self, axis: int) -> np.ndarray:
        other = tuple(i for i in range(self.values.ndim) if i != axis)
        return self.values.sum(axis=other)


def partition(p, spec: PartitionSpec) -> JointDistribution:
    """Reshape a flat distribution row-major into spec.factors, padding with zeros."""
    a = _as_probs(p).ravel()
    if a.size > spec.size:
        raise StateError(f"{a.size} outcomes do not fit a partition of size {spec.size}")
    padded = np.zeros(spec.size)
    padded[: a.size] = a
    return JointDistribution(padded.reshape(spec.factors))


def mutual_information(jd: JointDistribution) -> float:
    """I = H(1) + H(2) - H(1,2) for a two-factor joint distribution."""
    if jd.values.ndim != 2:
        raise StateError("mutual information needs exactly two factors")
    h1 = entr(jd.marginal(0)).sum()
    h2 = entr(jd.marginal(1)).sum()
    return float(h1 + h2 - entr(jd.values).sum())


def fc_partition_spec(n_outcomes: int) -> PartitionSpec:
    """Split n = 2k + j into (k, j), j in {0, 1}."""
    return PartitionSpec((-(-n_outcomes // 2), 2))


def fc_information(table, fc_trunc_tol: float = 1e-6) -> float:
    """Shannon information between k and j for n = 2k + j over renormalised
    Franck-Condon factors."""
    probs = np.asarray(table.probs, dtype=float)
    mass = probs.sum()
    if mass < 1.0 - fc_trunc_tol:
        raise StateError(f"truncated table carries mass {mass:.9f}; raise n_max")
    probs = probs / mass
    return mutual_information(partition(probs, fc_partition_spec(probs.size)))


# Entry-wise inequalities for a density matrix.

def _offdiag_pairs(n: int) -> List[Tuple[int, int]]:
    return [(j, k) for j in range(n) for k in range(n) if j != k]


def qudit_entry_inequalities(rho: DensityMatrix, tol: float = INEQ_TOL) -> List[dict]:
    """Every entry-wise inequality for rho, one report per index combination.

    Names:
      entry-real           Re rho_jk + 1/2 >= 0
      entry-imag           Im rho_jk <= 1/2
      relative-offdiag     D((1/2 -+ Im rho_jk) || (1/2 -+ Im rho_j'k')) >= 0
      relative-diag-minus  rho_jj ln(rho_jj / (1/2 - Im rho_j'k)) + (1 - rho_jj) ln((1 - rho_jj) / (1/2 + Im rho_j'k)) >= 0
      relative-diag-plus   same with the signs swapped
      binary-entropy       0 <= h(1/2 + Im rho_jk) <= ln 2
    Indices are 1-based; values may be +inf.
    """
    a = np.asarray(rho.entries)
    n = a.shape[0]
    pairs = _offdiag_pairs(n)
    im = np.array([a[j, k].imag for j, k in pairs])
    lo, hi = 0.5 - im, 0.5 + im
    diag = np.clip(np.real(np.diag(a)), 0.0, 1.0)
    out: List[dict] = []

    def report(name, indices, value, ok):
        out.append({"name": name, "indices": [int(i) + 1 for i in indices], "value": float(value), "pass": bool(ok)})

    for j, k in pairs:
        re_margin = a[j, k].real + 0.5
        im_margin = 0.5 - a[j, k].imag
        report("entry-real", (j, k), re_margin, re_margin >= -tol)
        report("entry-imag", (j, k), im_margin, im_margin >= -tol)

    rel = rel_entr(lo[:, None], lo[None, :]) + rel_entr(hi[:, None], hi[None, :])
    for a_idx, (j, k) in enumerate(pairs):
        for b_idx, (jp, kp) in enumerate(pairs):
            v = rel[a_idx, b_idx]
            report("relative-offdiag", (j, k, jp, kp), v, v >= -tol)

    minus = rel_entr(diag[:, None], lo[None, :]) + rel_entr(1 - diag[:, None], hi[None, :])
    plus = rel_entr(diag[:, None], hi[None, :]) + rel_entr(1 - diag[:, None], lo[None, :])
    for j in range(n):
        for b_idx, (jp, kp) in enumerate(pairs):
            report("relative-diag-minus", (j, jp, kp), minus[j, b_idx], minus[j, b_idx] >= -tol)
            report("relative-diag-plus", (j, jp, kp), plus[j, b_idx], plus[j, b_idx] >= -tol)

    h = binary_entropy(np.clip(hi, 0.0, 1.0))
    for idx, (j, k) in enumerate(pairs):
        report("binary-entropy", (j, k), h[idx], -tol <= h[idx] <= math.log(2) + tol)
    return out


def failed(reports: List[dict]) -> List[dict]:
    return [r for r in reports if not r["pass"]]


def entry_bounds_consistent(rho: DensityMatrix, tol: float = INEQ_TOL) -> bool:
    """The entry-bound reports agree with qudit_prob.check_entry_bounds."""
    ours = [r for r in qudit_entry_inequalities(rho, tol) if r["name"].startswith("entry-") and not r["pass"]]
    return len(ours) == len(check_entry_bounds(rho, tol))


# Qubit entropies.

def qubit_coin_entropy(t: QubitTriple) -> float:
    """Sum of the three coin entropies h(p_1) + h(p_2) + h(p_3)."""
    return float(binary_entropy(t.as_array()).sum())


def qubit_von_neumann(t: QubitTriple, cfg: ToleranceConfig = DEFAULT_TOL) -> float:
    """-(1/2 + r) ln(1/2 + r) - (1/2 - r) ln(1/2 - r), r = |p - (1/2, 1/2, 1/2)|."""
    r = float(np.sqrt(np.sum((t.as_array() - 0.5) ** 2)))
    if r > 0.5 + cfg.tol_psd:
        raise StateError(f"triple lies outside the ball (r = {r:.6f} > 1/2)")
    r = min(r, 0.5)
    return float(entr(0.5 + r) + entr(0.5 - r))
