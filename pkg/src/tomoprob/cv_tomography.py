"""Continuous-variable tomography on finite grids (units hbar = m = 1).

Normalisation follows the convention (1/2pi) * int W dq dp = 1, so the
vacuum has W(q, p) = 2 exp(-q**2 - p**2), and the symplectic tomogram is

    w(X | mu, nu) = (1/2pi) int W(q, p) delta(X - mu q - nu p) dq dp.

Pure-state tomograms are evaluated from the fractional Fourier form with the
quadratic phase kept in the integrand.  When |mu| > |nu| the phase
mu y**2 / (2 nu) is too fast for the position grid, so the same integral is
taken over the momentum wave function instead, using the exact identity
w[psi](X | mu, nu) = w[phi](X | nu, -mu) with phi the Fourier transform of
psi.  Inversion is ramp-filtered back-projection over optical angles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage
from scipy.interpolate import CubicSpline, make_interp_spline

from .statespace import StateError

QUAD_TOL = 1e-6
NU_EPS = 1e-6
EDGE_TOL = 1e-8


class GridError(StateError):
    """The grid is too coarse or too small for the requested transform."""


@dataclass(frozen=True)
class UniformGrid:
    start: float
    stop: float
    n: int

    def __post_init__(self):
        if self.n < 2 or not self.stop > self.start:
            raise GridError(f"bad grid [{self.start}, {self.stop}] with {self.n} points")

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.n)

    @property
    def step(self) -> float:
        return (self.stop - self.start) / (self.n - 1)

    def weights(self) -> np.ndarray:
        w = np.full(self.n, self.step)
        w[0] = w[-1] = 0.5 * self.step
        return w

    def to_json(self) -> dict:
        return {"start": self.start, "stop": self.stop, "n": self.n}


@dataclass(frozen=True)
class CVConfig:
    x_grid: UniformGrid = UniformGrid(-8.0, 8.0, 512)
    q_grid: UniformGrid = UniformGrid(-6.0, 6.0, 256)
    p_grid: UniformGrid = UniformGrid(-6.0, 6.0, 256)
    n_theta: int = 180
    nu_eps: float = NU_EPS
    quad_tol: float = QUAD_TOL


DEFAULT_CV = CVConfig()


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class WaveFunction:
    x_min: float
    x_max: float
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex)
        if a.ndim != 1 or a.size < 2:
            raise StateError("amplitudes must be a one-dimensional array")
        if not np.all(np.isfinite(a)):
            raise StateError("amplitudes contain NaN or Inf")
        object.__setattr__(self, "amplitudes", _readonly(a))

    @property
    def grid(self) -> UniformGrid:
        return UniformGrid(self.x_min, self.x_max, self.amplitudes.size)

    @property
    def n_points(self) -> int:
        return self.amplitudes.size

    @property
    def x(self) -> np.ndarray:
        return self.grid.points

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.grid.weights() * np.abs(self.amplitudes) ** 2)))

    def check_normalized(self, tol: float = 1e-9) -> "WaveFunction":
        residual = abs(self.norm() - 1.0)
        if residual > tol:
            raise GridError(f"wave function norm is off by {residual:.3e}")
        return self

    @classmethod
    def on_grid(cls, grid: UniformGrid, values) -> "WaveFunction":
        return cls(grid.start, grid.stop, values)

    def __call__(self, y) -> np.ndarray:
        return sinc_interpolate(self, y)


@dataclass(frozen=True)
class PhaseSpaceGrid:
    q: UniformGrid
    p: UniformGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.q.n, self.p.n):
            raise GridError(f"values shape {v.shape} does not match grid {(self.q.n, self.p.n)}")
        object.__setattr__(self, "values", _readonly(v))

    def normalization(self) -> float:
        return float(self.q.weights() @ self.values @ self.p.weights() / (2 * np.pi))

    @cached_property
    def _spline_coefficients(self) -> np.ndarray:
        return ndimage.spline_filter(self.values, order=5, mode="mirror")

    def interpolate(self, q, p) -> np.ndarray:
        """Quintic-spline value of W at arbitrary (q, p); zero outside the grid."""
        q, p = np.broadcast_arrays(np.asarray(q, dtype=float), np.asarray(p, dtype=float))
        iq = (q - self.q.start) / self.q.step
        ip = (p - self.p.start) / self.p.step
        out = ndimage.map_coordinates(
            self._spline_coefficients, [iq.ravel(), ip.ravel()], order=5, mode="mirror", prefilter=False
        ).reshape(q.shape)
        outside = (iq < 0) | (iq > self.q.n - 1) | (ip < 0) | (ip > self.p.n - 1)
        out[outside] = 0.0
        return out

    def edge_fraction(self) -> float:
        v = np.abs(self.values)
        edge = max(v[0].max(), v[-1].max(), v[:, 0].max(), v[:, -1].max())
        return float(edge / max(v.max(), 1e-300))


@dataclass(frozen=True)
class SymplecticTomogram:
    mu: float
    nu: float
    X: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "X", _readonly(np.asarray(self.X, dtype=float)))
        object.__setattr__(self, "values", _readonly(np.asarray(self.values, dtype=float)))

    def normalization(self) -> float:
        return float(np.trapezoid(self.values, self.X))

    @property
    def normalization_residual(self) -> float:
        return abs(self.normalization() - 1.0)

    @property
    def mean(self) -> float:
        return float(np.trapezoid(self.X * self.values, self.X) / self.normalization())

    @property
    def variance(self) -> float:
        m = self.mean
        return float(np.trapezoid((self.X - m) ** 2 * self.values, self.X) / self.normalization())

    def check(self, quad_tol: float = QUAD_TOL) -> "SymplecticTomogram":
        if self.values.min() < -quad_tol:
            raise GridError(f"tomogram has negative values down to {self.values.min():.3e}")
        if self.normalization_residual > quad_tol:
            raise GridError(f"tomogram normalisation off by {self.normalization_residual:.3e}")
        return self


# Reference states.

def hermite_function(n: int, x) -> np.ndarray:
    """Normalised oscillator eigenfunction H_n(x) exp(-x**2/2) / sqrt(2**n n! sqrt(pi))."""
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)
    cur = np.pi ** -0.25 * np.exp(-0.5 * x ** 2)
    for k in range(n):
        prev, cur = cur, np.sqrt(2.0 / (k + 1)) * x * cur - np.sqrt(k / (k + 1)) * prev
    return cur


def hermite_state(n: int, grid: UniformGrid = DEFAULT_CV.x_grid) -> WaveFunction:
    return WaveFunction.on_grid(grid, hermite_function(n, grid.points))


def coherent_state(q0: float, p0: float, grid: UniformGrid = DEFAULT_CV.x_grid) -> WaveFunction:
    """Vacuum displaced to (q0, p0)."""
    x = grid.points
    return WaveFunction.on_grid(
        grid, np.pi ** -0.25 * np.exp(-0.5 * (x - q0) ** 2 + 1j * p0 * x)
    )


# Band-limited interpolation.

def sinc_interpolate(psi: WaveFunction, y) -> np.ndarray:
    """Whittaker-Shannon interpolation of the samples; zero outside the grid."""
    y = np.asarray(y, dtype=float)
    flat = y.ravel()
    g = psi.grid
    out = np.zeros(flat.size, dtype=complex)
    inside = (flat >= g.start) & (flat <= g.stop)
    idx = np.nonzero(inside)[0]
    x = g.points
    for chunk in np.array_split(idx, max(1, idx.size // 2048 + 1)):
        if chunk.size:
            out[chunk] = np.sinc((flat[chunk, None] - x[None, :]) / g.step) @ psi.amplitudes
    return out.reshape(y.shape)


def _shifted_reversed(psi: WaveFunction, shifts: np.ndarray) -> np.ndarray:
    """Rows r: samples of psi(x_max + x_min - x_k + shifts[r]) for every k.

    Computed as a band-limited shift of the reversed, zero-padded samples
    (the reversal flips the direction of the shift)."""
    a = psi.amplitudes[::-1]
    n = a.size
    size = 2 * n
    spec = np.fft.fft(a, size)
    k = 2 * np.pi * np.fft.fftfreq(size, d=psi.grid.step)
    out = np.fft.ifft(spec[None, :] * np.exp(-1j * k[None, :] * shifts[:, None]), axis=1)[:, :n]
    return out


# Wigner function and its inverse to a density kernel.

def wigner_from_psi(
    psi: WaveFunction,
    q_grid: UniformGrid = DEFAULT_CV.q_grid,
    p_grid: UniformGrid = DEFAULT_CV.p_grid,
    quad_tol: float = QUAD_TOL,
) -> PhaseSpaceGrid:
    """W(q, p) = int psi(q + u/2) psi*(q - u/2) exp(-i p u) du.

    Substituting y = q + u/2 gives 2 int psi(y) psi*(2q - y) exp(-2ip(y - q)) dy;
    psi*(2q - y) on the sample points is a band-limited shift of the reversed
    samples.  Raises GridError when the result is not normalised.
    """
    g = psi.grid
    y = g.points
    q = q_grid.points
    p = p_grid.points
    if abs(psi.norm() - 1.0) > quad_tol:
        raise GridError(f"wave function is not normalised (norm {psi.norm():.9f})")
    # psi(2q - y_k) = psi(x_max - k dy + (2q - x_min - x_max)) = reversed psi shifted
    shifts = 2 * q - (g.start + g.stop)
    partner = _shifted_reversed(psi, shifts)
    # Points 2q - y_k that fall outside the sample window carry only interpolation ringing.
    outside = np.abs(2 * q[:, None] - y[None, :] - 0.5 * (g.start + g.stop)) > 0.5 * (g.stop - g.start)
    partner[outside] = 0.0
    prod = psi.amplitudes[None, :] * partner.conj() * g.weights()[None, :]
    kernel = np.exp(-2j * np.outer(y, p))
    w = 2 * (prod @ kernel) * np.exp(2j * np.outer(q, p))
    imag = np.abs(w.imag).max()
    if imag > 1e-10 * max(1.0, np.abs(w.real).max()):
        raise GridError(f"Wigner function has imaginary residue {imag:.3e}")
    out = PhaseSpaceGrid(q_grid, p_grid, w.real)
    residual = abs(out.normalization() - 1.0)
    if residual > quad_tol:
        raise GridError(
            f"Wigner normalisation off by {residual:.3e}; the phase-space grid does not cover the state"
        )
    return out


def _check_decay(W: PhaseSpaceGrid):
    frac = W.edge_fraction()
    if frac > EDGE_TOL:
        raise GridError(f"Wigner function is {frac:.2e} of its peak on the grid boundary")


def density_kernel_from_wigner(W: PhaseSpaceGrid):
    """rho(x, x') = (1/2pi) int W((x + x')/2, p) exp(ip(x - x')) dp.

    Returns (x, rho) with x equal to the q points of the grid.  Midpoints that
    fall between q nodes use a quintic spline along q.
    """
    _check_decay(W)
    q = W.q.points
    p = W.p.points
    n = q.size
    s_max = q[-1] - q[0]
    if s_max * W.p.step > np.pi:
        raise GridError("momentum grid step aliases the largest separation x - x'")
    q_half = np.linspace(q[0], q[-1], 2 * n - 1)
    w_half = make_interp_spline(q, W.values, k=5, axis=0)(q_half)
    w_half[::2] = W.values
    s_vals = W.q.step * np.arange(-(n - 1), n)
    fourier = np.exp(1j * np.outer(p, s_vals)) * W.p.weights()[:, None]
    k_half = (w_half @ fourier) / (2 * np.pi)
    a = np.arange(n)
    rho = k_half[a[:, None] + a[None, :], (a[:, None] - a[None, :]) + n - 1]
    return q.copy(), rho


# Tomograms.

def _bandwidth(values: np.ndarray, step: float, rel: float = 1e-8) -> float:
    spec = np.abs(np.fft.fft(values))
    k = np.abs(2 * np.pi * np.fft.fftfreq(values.size, d=step))
    significant = spec > rel * spec.max()
    return float(k[significant].max()) if significant.any() else 0.0


def momentum_wavefunction(psi: WaveFunction, p_grid: Optional[UniformGrid] = None) -> WaveFunction:
    """phi(p) = (2pi)**-1/2 int psi(y) exp(-i p y) dy by direct quadrature."""
    g = psi.grid
    if p_grid is None:
        half = 0.5 * (g.stop - g.start)
        p_grid = UniformGrid(-half, half, g.n)
    if p_grid.stop > 0.9 * np.pi / g.step:
        raise GridError("momentum grid exceeds the Nyquist limit of the position grid")
    kernel = np.exp(-1j * np.outer(p_grid.points, g.points)) * g.weights()[None, :]
    return WaveFunction.on_grid(p_grid, kernel @ psi.amplitudes / np.sqrt(2 * np.pi))


def _fractional_integral(psi: WaveFunction, mu: float, nu: float, X: np.ndarray) -> np.ndarray:
    g = psi.grid
    y = g.points
    top = abs(mu / nu) * max(abs(g.start), abs(g.stop)) + np.abs(X).max() / abs(nu)
    top += _bandwidth(psi.amplitudes, g.step)
    if top > 0.9 * np.pi / g.step:
        raise GridError(
            f"phase of the fractional Fourier integrand ({top:.1f}) is undersampled on this grid"
        )
    phase = np.exp(1j * mu * y ** 2 / (2 * nu)) * psi.amplitudes * g.weights()
    amp = np.exp(-1j * np.outer(X, y) / nu) @ phase
    return np.abs(amp) ** 2 / (2 * np.pi * abs(nu))


def symplectic_tomogram_pure(
    psi: WaveFunction, mu: float, nu: float, X, nu_eps: float = NU_EPS
) -> SymplecticTomogram:
    """w(X | mu, nu) = |int psi(y) exp(i mu y**2/(2 nu) - i X y / nu) dy|**2 / (2 pi |nu|)."""
    X = np.atleast_1d(np.asarray(X, dtype=float))
    mu, nu = float(mu), float(nu)
    if abs(mu) <= nu_eps and abs(nu) <= nu_eps:
        raise StateError("mu and nu cannot both vanish")
    if abs(nu) <= nu_eps:
        # delta limit: distribution of mu q
        values = np.abs(sinc_interpolate(psi, X / mu)) ** 2 / abs(mu)
    elif abs(mu) <= abs(nu):
        values = _fractional_integral(psi, mu, nu, X)
    else:
        values = _fractional_integral(momentum_wavefunction(psi), nu, -mu, X)
    return SymplecticTomogram(mu, nu, X, values)


def optical_tomogram(psi: WaveFunction, theta: float, X, nu_eps: float = NU_EPS) -> SymplecticTomogram:
    """Homodyne distribution of X = q cos(theta) + p sin(theta)."""
    return symplectic_tomogram_pure(psi, math.cos(theta), math.sin(theta), X, nu_eps)


def radon_tomogram_from_wigner(W: PhaseSpaceGrid, mu: float, nu: float, X) -> SymplecticTomogram:
    """Line integrals of W along X = mu q + nu p, with measure dq dp / 2pi.

    The line is parametrised by the q nodes when |nu| >= |mu| and by the p
    nodes otherwise; W is read off a quintic spline along the line.
    """
    _check_decay(W)
    X = np.atleast_1d(np.asarray(X, dtype=float))
    mu, nu = float(mu), float(nu)
    if mu == 0.0 and nu == 0.0:
        raise StateError("mu and nu cannot both vanish")
    if abs(nu) >= abs(mu):
        nodes, weights = W.q.points, W.q.weights()
        cross = (X[:, None] - mu * nodes[None, :]) / nu
        vals = W.interpolate(nodes[None, :], cross)
        scale = abs(nu)
    else:
        nodes, weights = W.p.points, W.p.weights()
        cross = (X[:, None] - nu * nodes[None, :]) / mu
        vals = W.interpolate(cross, nodes[None, :])
        scale = abs(mu)
    values = vals @ weights / (2 * np.pi * scale)
    return SymplecticTomogram(mu, nu, X, values)


def mix_tomograms(weights: Sequence[float], tomograms: Sequence[SymplecticTomogram]) -> SymplecticTomogram:
    """Tomogram of a mixture: convex combination of tomograms on a common X grid."""
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
        raise StateError("mixture weights must be a probability vector")
    first = tomograms[0]
    for t in tomograms[1:]:
        if (t.mu, t.nu) != (first.mu, first.nu) or not np.array_equal(t.X, first.X):
            raise StateError("tomograms must share (mu, nu) and the X grid")
    values = sum(wi * t.values for wi, t in zip(w, tomograms))
    return SymplecticTomogram(first.mu, first.nu, first.X, values)


# Inversion.

def ramp_filter(values: np.ndarray, step: float) -> np.ndarray:
    """(2pi)**-2 int |k| w^(k) exp(ikX) dk for rows of samples, via the
    band-limited spatial ramp kernel (h0 = 1/(4 d**2), h_odd = -1/(pi n d)**2)."""
    values = np.atleast_2d(values)
    n = values.shape[-1]
    size = 1 << int(np.ceil(np.log2(2 * n)))
    idx = np.arange(size)
    idx = np.where(idx < size // 2, idx, idx - size)
    h = np.zeros(size)
    h[0] = 0.25 / step ** 2
    odd = idx % 2 == 1
    h[odd] = -1.0 / (np.pi * idx[odd] * step) ** 2
    filtered = np.fft.ifft(np.fft.fft(values, size, axis=-1) * np.fft.fft(h)[None, :], axis=-1)
    # h is the impulse response of |f| with f in cycles per unit X
    return filtered.real[:, :n] * step


def wigner_from_tomogram(
    thetas,
    X,
    values,
    q_grid: UniformGrid = DEFAULT_CV.q_grid,
    p_grid: UniformGrid = DEFAULT_CV.p_grid,
    min_angles: int = DEFAULT_CV.n_theta,
) -> PhaseSpaceGrid:
    """Reconstruct W from optical tomograms w(X | theta) on uniform angles in [0, pi).

    Every symplectic pair (mu, nu) = lambda (cos t, sin t) reduces to the
    optical circle by w(X | lambda mu, lambda nu) = w(X / lambda | mu, nu) / lambda,
    so the (X, mu, nu) integral collapses to filtered back-projection:
    W(q, p) = int_0^pi g_t(q cos t + p sin t) dt with g_t the ramp-filtered
    tomogram.
    """
    thetas = np.asarray(thetas, dtype=float)
    X = np.asarray(X, dtype=float)
    values = np.atleast_2d(np.asarray(values, dtype=float))
    n_theta = thetas.size
    if n_theta < min_angles:
        raise GridError(f"{n_theta} projection angles given, at least {min_angles} required")
    if values.shape != (n_theta, X.size):
        raise GridError(f"values shape {values.shape} != ({n_theta}, {X.size})")
    dtheta = np.pi / n_theta
    if np.abs(np.diff(thetas) - dtheta).max(initial=0.0) > 1e-9 or abs(thetas[0]) > 1e-12:
        raise GridError("angles must be uniform on [0, pi) starting at 0")
    dX = np.diff(X)
    if np.abs(dX - dX[0]).max() > 1e-9 * abs(dX[0]):
        raise GridError("X samples must be uniform")
    edge = max(np.abs(values[:, 0]).max(), np.abs(values[:, -1]).max()) / np.abs(values).max()
    if edge > 1e-6:
        raise GridError(f"tomograms are {edge:.1e} of their peak at the ends of the X grid")
    g = ramp_filter(values, dX[0]) * 2 * np.pi
    q = q_grid.points[:, None]
    p = p_grid.points[None, :]
    out = np.zeros((q_grid.n, p_grid.n))
    for t, row in zip(thetas, g):
        spline = CubicSpline(X, row)
        pos = q * math.cos(t) + p * math.sin(t)
        inside = (pos >= X[0]) & (pos <= X[-1])
        out[inside] += spline(pos[inside])
    return PhaseSpaceGrid(q_grid, p_grid, out * dtheta)


def optical_tomogram_set(psi: WaveFunction, X, n_theta: int = DEFAULT_CV.n_theta):
    """Pure-state optical tomograms on n_theta uniform angles in [0, pi)."""
    thetas = np.arange(n_theta) * np.pi / n_theta
    return thetas, np.array([optical_tomogram(psi, t, X).values for t in thetas])


def density_kernel_from_tomogram(thetas, X, values, q_grid=DEFAULT_CV.q_grid, p_grid=DEFAULT_CV.p_grid):
    """Position-space density kernel reconstructed from optical tomograms."""
    return density_kernel_from_wigner(wigner_from_tomogram(thetas, X, values, q_grid, p_grid))


# Export.

def tomogram_rows(t: SymplecticTomogram):
    return [["X", "value"]] + [[x, v] for x, v in zip(t.X.tolist(), t.values.tolist())]


def wigner_rows(W: PhaseSpaceGrid):
    rows = [["q", "p", "value"]]
    for q, row in zip(W.q.points.tolist(), W.values.tolist()):
        rows.extend([q, p, v] for p, v in zip(W.p.points.tolist(), row))
    return rows


def tomogram_metadata(t: SymplecticTomogram) -> dict:
    return {
        "mu": t.mu,
        "nu": t.nu,
        "X": {"start": float(t.X[0]), "stop": float(t.X[-1]), "n": int(t.X.size)},
        "normalization_residual": t.normalization_residual,
    }


def wigner_metadata(W: PhaseSpaceGrid) -> dict:
    return {
        "q": W.q.to_json(),
        "p": W.p.to_json(),
        "normalization_residual": abs(W.normalization() - 1.0),
    }
