"""Parametric oscillator H = p**2/2 + omega(t)**2 q**2/2 with omega(0) = 1.

Everything is driven by the complex solution eps(t) of
eps'' + omega(t)**2 eps = 0 with eps(0) = 1, eps'(0) = i.  Its Wronskian
eps' eps* - eps'* eps = 2i is the commutator [A(t), A(t)^dagger] = 1 of the
linear integrals of motion

    A(t) = (i / sqrt 2) (eps p - eps' q),   A(t)^dagger = (-i / sqrt 2) (eps* p - eps'* q).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from .cv_tomography import UniformGrid, WaveFunction
from .statespace import StateError

WRONSKIAN_TOL = 1e-9
FC_TRUNC_TOL = 1e-6
N_MAX_STATE = 12
FC_N_MAX = 64
STATE_GRID = UniformGrid(-10.0, 10.0, 1024)
# Phase-space window, in units of the state's own width, kept after every
# ladder step; outside it the exact state is below double precision.
LADDER_MARGIN = 7.0


class IntegrationError(StateError):
    """Step-size collapse or loss of the Wronskian invariant."""


class BranchTrackingError(StateError):
    """The phase of eps(t) cannot be followed continuously on the stored grid."""


class TruncationWarning(UserWarning):
    pass


# Frequency profiles.

@dataclass(frozen=True)
class FrequencyProfile:
    """omega(t) for t >= 0.

    kind = "constant":          omega = 1.
    kind = "sudden-jump":       omega = 1 at t = 0 and values[i] for
                                times[i] < t <= times[i+1] (times ascending, >= 0).
    kind = "smooth-tabulated":  samples (times, values) with times[0] = 0 and
                                values[0] = 1, interpolated "linear" or "cubic".
    """

    kind: str = "constant"
    times: Tuple[float, ...] = ()
    values: Tuple[float, ...] = ()
    interpolation: str = "cubic"

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.kind == "constant":
            if self.times or self.values:
                raise StateError("a constant profile takes no samples")
        elif self.kind == "sudden-jump":
            if not self.times or len(self.times) != len(self.values):
                raise StateError("sudden-jump needs matching, non-empty times and values")
            if self.times[0] < 0 or any(b <= a for a, b in zip(self.times, self.times[1:])):
                raise StateError("jump times must be ascending and non-negative")
        elif self.kind == "smooth-tabulated":
            if len(self.times) < 2 or len(self.times) != len(self.values):
                raise StateError("smooth-tabulated needs at least two (t, omega) samples")
            if self.times[0] != 0.0 or self.values[0] != 1.0:
                raise StateError("smooth-tabulated profile must start at omega(0) = 1")
            if any(b <= a for a, b in zip(self.times, self.times[1:])):
                raise StateError("sample times must be strictly ascending")
            if self.interpolation not in ("linear", "cubic"):
                raise StateError(f"unknown interpolation {self.interpolation!r}")
        else:
            raise StateError(f"unknown profile kind {self.kind!r}")
        if any(v <= 0 for v in self.values):
            raise StateError("omega must stay positive")

    @property
    def piecewise_constant(self) -> bool:
        return self.kind in ("constant", "sudden-jump")

    @property
    def t_max(self) -> float:
        return self.times[-1] if self.kind == "smooth-tabulated" else math.inf

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return self.times

    def _spline(self):
        cached = self.__dict__.get("_cached_spline")
        if cached is None:
            if self.interpolation == "cubic":
                cached = CubicSpline(self.times, self.values)
            else:
                t, v = np.array(self.times), np.array(self.values)
                cached = lambda s: np.interp(s, t, v)  # noqa: E731
            self.__dict__["_cached_spline"] = cached
        return cached

    def omega(self, t: float) -> float:
        if t < 0:
            raise StateError("profiles are defined for t >= 0")
        if self.kind == "constant" or t == 0.0:
            return 1.0
        if self.kind == "sudden-jump":
            idx = int(np.searchsorted(self.times, t, side="left")) - 1
            return 1.0 if idx < 0 else self.values[idx]
        if t > self.t_max:
            raise StateError(f"t = {t} beyond the tabulated range {self.t_max}")
        w = float(self._spline()(t))
        if w <= 0:
            raise StateError(f"interpolated omega({t}) = {w} is not positive")
        return w

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.kind != "constant":
            out["times"] = list(self.times)
            out["values"] = list(self.values)
        if self.kind == "smooth-tabulated":
            out["interpolation"] = self.interpolation
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "FrequencyProfile":
        extra = set(obj) - {"kind", "times", "values", "interpolation"}
        if extra:
            raise StateError(f"unknown profile keys {sorted(extra)}")
        return cls(
            obj.get("kind", "constant"),
            tuple(obj.get("times", ())),
            tuple(obj.get("values", ())),
            obj.get("interpolation", "cubic"),
        )


def sudden_jump(omega1: float, at: float = 0.0) -> FrequencyProfile:
    return FrequencyProfile("sudden-jump", (at,), (omega1,))


# Integration.

def wronskian(eps, epsdot):
    return epsdot * np.conj(eps) - np.conj(epsdot) * eps


def _harmonic_step(y: np.ndarray, w: float, tau: float) -> np.ndarray:
    c, s = math.cos(w * tau), math.sin(w * tau)
    return np.array([y[0] * c + y[1] * s / w, -y[0] * w * s + y[1] * c])


# Dormand-Prince 5(4) tableau.
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


@dataclass
class _Stepper:
    profile: FrequencyProfile
    rtol: float = 1e-12
    atol: float = 1e-14
    wronskian_tol: float = WRONSKIAN_TOL
    h: float = 1e-2
    h_min: float = 1e-12

    def rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        w = self.profile.omega(t)
        return np.array([y[1], -w * w * y[0]])

    def advance(self, t0: float, y0: np.ndarray, t1: float) -> np.ndarray:
        t, y = t0, y0
        while t < t1:
            h = min(self.h, t1 - t)
            while True:
                if h < self.h_min:
                    raise IntegrationError(f"step size collapsed at t = {t}")
                k = np.empty((7, 2), dtype=complex)
                for i in range(7):
                    yi = y + h * (np.dot(_A[i], k[:i]) if i else 0)
                    k[i] = self.rhs(min(t + _C[i] * h, t1), yi)
                y5 = y + h * (_B5 @ k)
                y4 = y + h * (_B4 @ k)
                err = np.max(np.abs(y5 - y4) / (self.atol + self.rtol * np.maximum(np.abs(y), np.abs(y5))))
                drift = abs(wronskian(y5[0], y5[1]) - 2j)
                if err <= 1.0 and drift <= self.wronskian_tol:
                    break
                shrink = 0.9 * err ** -0.2 if err > 1.0 else 0.5
                h *= min(0.5, max(0.1, shrink))
            t, y = (t1 if t + h >= t1 else t + h), y5
            self.h = h * min(5.0, max(1.0, 0.9 * max(err, 1e-10) ** -0.2))
        return y


def _propagate(profile: FrequencyProfile, t0: float, y0: np.ndarray, t1: float, stepper=None) -> np.ndarray:
    """State (eps, eps') at t1 from the state at t0 <= t1."""
    if t1 == t0:
        return y0
    if profile.piecewise_constant:
        y, t = y0, t0
        for b in [b for b in profile.breakpoints if t0 < b < t1] + [t1]:
            y = _harmonic_step(y, profile.omega(0.5 * (t + b)) if b > t else 1.0, b - t)
            t = b
        return y
    if t1 > profile.t_max:
        raise StateError(f"t = {t1} beyond the tabulated range {profile.t_max}")
    stepper = stepper or _Stepper(profile)
    y, t = y0, t0
    for b in [b for b in profile.breakpoints if t0 < b < t1] + [t1]:
        y = stepper.advance(t, y, b)
        t = b
    return y


@dataclass(frozen=True)
class EpsilonTrajectory:
    t: np.ndarray = field(repr=False)
    eps: np.ndarray = field(repr=False)
    epsdot: np.ndarray = field(repr=False)
    profile: FrequencyProfile = FrequencyProfile()

    @property
    def wronskian_residual(self) -> np.ndarray:
        return np.abs(wronskian(self.eps, self.epsdot) - 2j)

    @property
    def phase(self) -> np.ndarray:
        """arg eps(t), continued from arg eps(0) = 0."""
        return np.unwrap(np.angle(self.eps))

    def branch_ok(self) -> bool:
        steps = np.abs(np.angle(self.eps[1:] / self.eps[:-1]))
        return bool(steps.size == 0 or steps.max() < 0.5 * np.pi)

    def at(self, t: float) -> Tuple[complex, complex, float]:
        """(eps, eps', continuous arg eps) at any t inside the stored range."""
        if t < self.t[0] or t > self.t[-1] + 1e-12:
            raise StateError(f"t = {t} outside the trajectory [0, {self.t[-1]}]")
        if not self.branch_ok():
            raise BranchTrackingError("phase of eps jumps by more than pi/2 between samples; reduce dt")
        i = int(np.searchsorted(self.t, t, side="right")) - 1
        i = min(max(i, 0), self.t.size - 1)
        base = np.array([self.eps[i], self.epsdot[i]])
        y = base if self.t[i] == t else _propagate(self.profile, float(self.t[i]), base, float(t))
        step = float(np.angle(y[0] / self.eps[i]))
        if abs(step) >= 0.5 * np.pi:
            raise BranchTrackingError("phase of eps jumps by more than pi/2 inside a sample step")
        return complex(y[0]), complex(y[1]), float(self.phase[i] + step)

    def rows(self):
        res = self.wronskian_residual
        header = [["t", "re_eps", "im_eps", "re_epsdot", "im_epsdot", "wronskian_residual"]]
        return header + [
            [float(t), e.real, e.imag, d.real, d.imag, float(r)]
            for t, e, d, r in zip(self.t, self.eps, self.epsdot, res)
        ]


def integrate_epsilon(
    profile: FrequencyProfile,
    t_end: float,
    dt: float,
    wronskian_tol: float = WRONSKIAN_TOL,
    rtol: float = 1e-12,
) -> EpsilonTrajectory:
    """Sample eps(t), eps'(t) on t = 0, dt, 2 dt, ..., t_end.

    Piecewise-constant profiles are propagated in closed form between jumps;
    tabulated profiles use an adaptive Dormand-Prince 5(4) pair whose steps
    are also rejected when they move the Wronskian away from 2i by more than
    ``wronskian_tol``.
    """
    if dt <= 0 or t_end < 0:
        raise StateError("need dt > 0 and t_end >= 0")
    n = int(math.floor(t_end / dt + 1e-9)) + 1
    ts = dt * np.arange(n)
    if ts[-1] < t_end - 1e-12:
        ts = np.append(ts, t_end)
    y = np.array([1.0 + 0j, 1j])
    out = np.empty((ts.size, 2), dtype=complex)
    out[0] = y
    stepper = None if profile.piecewise_constant else _Stepper(profile, rtol=rtol, wronskian_tol=wronskian_tol)
    if profile.kind == "constant":
        out[:, 0] = np.cos(ts) + 1j * np.sin(ts)
        out[:, 1] = -np.sin(ts) + 1j * np.cos(ts)
    else:
        for i in range(1, ts.size):
            y = _propagate(profile, float(ts[i - 1]), y, float(ts[i]), stepper)
            out[i] = y
    traj = EpsilonTrajectory(ts, out[:, 0], out[:, 1], profile)
    drift = traj.wronskian_residual.max()
    if drift > wronskian_tol:
        raise IntegrationError(f"Wronskian drifted by {drift:.3e} (tolerance {wronskian_tol:.1e})")
    return traj


# States.

def _momentum_op(values: np.ndarray, step: float) -> np.ndarray:
    k = 2 * np.pi * np.fft.fftfreq(values.size, d=step)
    return np.fft.ifft(k * np.fft.fft(values))


def _sqrt_inv(eps: complex, phase: float) -> complex:
    """eps**-1/2 on the branch continued along the trajectory."""
    return abs(eps) ** -0.5 * complex(math.cos(-0.5 * phase), math.sin(-0.5 * phase))


def ground_state(traj: EpsilonTrajectory, t: float, grid: UniformGrid = STATE_GRID,
                 quad_tol: float = FC_TRUNC_TOL) -> WaveFunction:
    """psi_0(x, t) = pi**-1/4 eps**-1/2 exp(i eps' x**2 / (2 eps))."""
    eps, epsdot, phase = traj.at(t)
    x = grid.points
    psi = WaveFunction.on_grid(
        grid, np.pi ** -0.25 * _sqrt_inv(eps, phase) * np.exp(1j * epsdot / eps * x ** 2 / 2)
    )
    return psi.check_normalized(quad_tol)


def apply_annihilation(eps: complex, epsdot: complex, psi: WaveFunction) -> np.ndarray:
    """A(t) psi on the grid with a spectral momentum operator."""
    a = psi.amplitudes
    return (1j / math.sqrt(2)) * (eps * _momentum_op(a, psi.grid.step) - epsdot * psi.x * a)


def apply_creation(eps: complex, epsdot: complex, psi: WaveFunction) -> np.ndarray:
    a = psi.amplitudes
    return (-1j / math.sqrt(2)) * (
        np.conj(eps) * _momentum_op(a, psi.grid.step) - np.conj(epsdot) * psi.x * a
    )


def _window(values: np.ndarray, grid: UniformGrid, x_half: float, k_half: float) -> np.ndarray:
    k = 2 * np.pi * np.fft.fftfreq(values.size, d=grid.step)
    spec = np.fft.fft(values)
    spec[np.abs(k) > k_half] = 0.0
    out = np.fft.ifft(spec)
    out[np.abs(grid.points) > x_half] = 0.0
    return out


def _ladder_states(traj, n, t, grid):
    """psi_0..psi_n by repeated A^dagger / sqrt(k) on the grid."""
    eps, epsdot, _ = traj.at(t)
    states = [ground_state(traj, t, grid)]
    for k in range(1, n + 1):
        raised = apply_creation(eps, epsdot, states[-1]) / math.sqrt(k)
        reach = math.sqrt(2 * k + 1) + LADDER_MARGIN
        raised = _window(raised, grid, abs(eps) * reach, abs(epsdot) * reach)
        states.append(WaveFunction.on_grid(grid, raised))
    return states


def _recurrence_states(traj, n, t, grid):
    """psi_0..psi_n from x psi_k = (eps* sqrt(k) psi_{k-1} + eps sqrt(k+1) psi_{k+1}) / sqrt 2,
    which follows from q = (eps* A + eps A^dagger) / sqrt 2."""
    eps, _, _ = traj.at(t)
    x = grid.points
    prev = np.zeros(grid.n, dtype=complex)
    cur = np.asarray(ground_state(traj, t, grid).amplitudes)
    out = [cur]
    for k in range(n):
        prev, cur = cur, (math.sqrt(2) * x * cur - np.conj(eps) * math.sqrt(k) * prev) / (
            eps * math.sqrt(k + 1)
        )
        out.append(cur)
    return [WaveFunction.on_grid(grid, a) for a in out]


def fock_states(traj: EpsilonTrajectory, n: int, t: float, grid: UniformGrid = STATE_GRID,
                method: str = "ladder"):
    """psi_0(., t) .. psi_n(., t).

    ``method="ladder"`` applies the grid operator A^dagger n times (spectral
    derivative, filtered to the state's phase-space window after each step)
    and is limited to n <= 12.  ``method="recurrence"`` uses the derivative-free
    three-term recurrence, which stays stable for large n.
    """
    if n < 0:
        raise StateError("n must be non-negative")
    if method == "ladder":
        if n > N_MAX_STATE:
            raise StateError(f"ladder construction is limited to n <= {N_MAX_STATE}")
        return _ladder_states(traj, n, t, grid)
    if method == "recurrence":
        return _recurrence_states(traj, n, t, grid)
    raise StateError(f"unknown method {method!r}")


def fock_state(traj: EpsilonTrajectory, n: int, t: float, grid: UniformGrid = STATE_GRID,
               method: str = "ladder", norm_tol: float = FC_TRUNC_TOL) -> WaveFunction:
    """psi_n(x, t) = (A^dagger(t))**n psi_0(x, t) / sqrt(n!)."""
    psi = fock_states(traj, n, t, grid, method)[-1]
    residual = abs(psi.norm() - 1.0)
    if residual > norm_tol:
        raise StateError(f"psi_{n} has norm residual {residual:.2e}; the grid is too coarse or small")
    return psi


def hermite_closed_form(traj: EpsilonTrajectory, n: int, t: float, grid: UniformGrid = STATE_GRID) -> WaveFunction:
    """psi_0 (eps*/eps)**(n/2) H_n(x/|eps|) / sqrt(2**n n!), phases continued along the trajectory."""
    from scipy.special import eval_hermite

    eps, _, phase = traj.at(t)
    psi0 = ground_state(traj, t, grid).amplitudes
    x = grid.points
    ratio = complex(math.cos(-n * phase), math.sin(-n * phase))
    norm = math.sqrt(2.0 ** n * math.factorial(n))
    return WaveFunction.on_grid(grid, psi0 * ratio * eval_hermite(n, x / abs(eps)) / norm)


def overlap(a: WaveFunction, b: WaveFunction) -> complex:
    """<a|b> by trapezoidal quadrature on the shared grid.

    Real and imaginary parts are summed separately so that
    overlap(b, a) == overlap(a, b).conjugate() holds bit for bit.
    """
    if a.grid != b.grid:
        raise StateError("states live on different grids")
    w = a.grid.weights()
    ar, ai = a.amplitudes.real, a.amplitudes.imag
    br, bi = b.amplitudes.real, b.amplitudes.imag
    re = np.sum(w * (ar * br + ai * bi))
    im = np.sum(w * (ar * bi - ai * br))
    return complex(re, im)


# Franck-Condon factors.

@dataclass(frozen=True)
class FranckCondonTable:
    m: int
    t: float
    probs: np.ndarray = field(repr=False)

    @property
    def n_max(self) -> int:
        return self.probs.size - 1

    @property
    def truncation_mass(self) -> float:
        return float(self.probs.sum())

    def rows(self):
        return [["m", "n", "t", "P"]] + [
            [self.m, n, self.t, float(p)] for n, p in enumerate(self.probs)
        ]


def franck_condon(traj: EpsilonTrajectory, m: int, t: float, n_max: int = FC_N_MAX,
                  grid: UniformGrid = STATE_GRID, fc_trunc_tol: float = FC_TRUNC_TOL) -> FranckCondonTable:
    """P_m(n, t) = |<m, 0 | n, t>|**2 for n = 0..n_max by grid quadrature.

    Both families of states come from the three-term recurrence; the ladder
    construction agrees with it to ~1e-9 for n <= 12 but cannot reach n = 64.
    """
    if not 0 <= m <= N_MAX_STATE:
        raise StateError(f"m must lie in 0..{N_MAX_STATE}")
    initial = fock_states(traj, m, 0.0, grid, "recurrence")[m]
    evolved = fock_states(traj, n_max, t, grid, "recurrence")
    amps = np.array([overlap(initial, psi) for psi in evolved])
    table = FranckCondonTable(m, float(t), np.abs(amps) ** 2)
    deficit = 1.0 - table.truncation_mass
    if deficit > fc_trunc_tol:
        warnings.warn(
            f"Franck-Condon mass deficit {deficit:.2e} exceeds {fc_trunc_tol:.0e}; raise n_max",
            TruncationWarning,
            stacklevel=2,
        )
    return table


def ground_overlap_closed_form(eps: complex, epsdot: complex) -> float:
    """P_0(0, t) = 2 / |eps - i eps'|."""
    return 2.0 / abs(eps - 1j * epsdot)


# Ground-like state tomogram.

def gaussian_tomogram(traj: EpsilonTrajectory, t: float, mu: float, nu: float) -> Tuple[float, float]:
    """(mean, variance) of w_0(X | mu, nu) for the ground-like state.

    The covariance term is the signed mu nu Re(eps' eps*); its magnitude equals
    sqrt(|eps' eps*|**2 - 1) because Im(eps' eps*) = 1.
    """
    if mu == 0 and nu == 0:
        raise StateError("mu and nu cannot both vanish")
    eps, epsdot, _ = traj.at(t)
    var = (
        abs(eps) ** 2 * mu ** 2 / 2
        + abs(epsdot) ** 2 * nu ** 2 / 2
        + mu * nu * (epsdot * np.conj(eps)).real
    )
    return 0.0, float(var)


def gaussian_density(X, variance: float) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return np.exp(-X ** 2 / (2 * variance)) / math.sqrt(2 * math.pi * variance)


def trajectory_from_samples(t: Sequence[float], eps: Sequence[complex], epsdot: Sequence[complex],
                            profile: Optional[FrequencyProfile] = None) -> EpsilonTrajectory:
    return EpsilonTrajectory(
        np.asarray(t, dtype=float), np.asarray(eps, dtype=complex),
        np.asarray(epsdot, dtype=complex), profile or FrequencyProfile(),
    )
