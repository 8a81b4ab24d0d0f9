import math
import warnings

import numpy as np
import pytest
from scipy.integrate import quad, solve_ivp
from scipy.special import eval_hermite

from tomoprob.cv_tomography import UniformGrid, hermite_function, symplectic_tomogram_pure
from tomoprob.parosc import (
    STATE_GRID,
    BranchTrackingError,
    FrequencyProfile,
    IntegrationError,
    TruncationWarning,
    apply_annihilation,
    fock_state,
    fock_states,
    franck_condon,
    gaussian_tomogram,
    ground_overlap_closed_form,
    ground_state,
    hermite_closed_form,
    integrate_epsilon,
    overlap,
    sudden_jump,
    wronskian,
)
from tomoprob.statespace import StateError

CONST = FrequencyProfile()
JUMP = sudden_jump(2.0)


def smooth_profile():
    t = np.linspace(0, 100, 801)
    return FrequencyProfile("smooth-tabulated", tuple(t), tuple(1 + 0.5 * np.sin(0.3 * t) ** 2))


@pytest.fixture(scope="module")
def jump_traj():
    return integrate_epsilon(JUMP, 5.0, 0.05)


@pytest.fixture(scope="module")
def const_traj():
    return integrate_epsilon(CONST, 10.0, 0.05)


def test_profile_validation():
    assert CONST.omega(3.0) == 1.0
    assert JUMP.omega(0.0) == 1.0 and JUMP.omega(1e-9) == 2.0
    with pytest.raises(StateError):
        FrequencyProfile("smooth-tabulated", (0.0, 1.0), (2.0, 1.0))
    with pytest.raises(StateError):
        FrequencyProfile("sudden-jump", (1.0,), (-1.0,))
    with pytest.raises(StateError):
        FrequencyProfile("warp")
    with pytest.raises(StateError):
        FrequencyProfile("smooth-tabulated", (0.0, 1.0), (1.0, 1.0)).omega(2.0)


def test_profile_json_round_trip():
    for prof in (CONST, JUMP, smooth_profile()):
        assert FrequencyProfile.from_json(prof.to_json()) == prof
    with pytest.raises(StateError):
        FrequencyProfile.from_json({"kind": "constant", "extra": 1})


def test_constant_trajectory(const_traj):
    t = const_traj.t
    np.testing.assert_allclose(const_traj.eps, np.cos(t) + 1j * np.sin(t), atol=1e-14)
    assert const_traj.eps[0] == 1 and const_traj.epsdot[0] == 1j


def test_jump_trajectory(jump_traj):
    t = jump_traj.t
    np.testing.assert_allclose(jump_traj.eps, np.cos(2 * t) + 0.5j * np.sin(2 * t), atol=1e-13)


def test_late_jump_against_solve_ivp():
    prof = sudden_jump(0.5, at=1.0)
    traj = integrate_epsilon(prof, 4.0, 0.5)

    def rhs(t, y):
        w = prof.omega(t)
        return [y[1], -w * w * y[0]]

    ref = solve_ivp(rhs, (0, 4), [1 + 0j, 1j], t_eval=traj.t, rtol=1e-12, atol=1e-13, max_step=0.01)
    np.testing.assert_allclose(traj.eps, ref.y[0], atol=1e-9)


def test_smooth_trajectory_against_solve_ivp():
    prof = smooth_profile()
    traj = integrate_epsilon(prof, 20.0, 0.25)
    sp = prof._spline()
    ref = solve_ivp(lambda t, y: [y[1], -sp(t) ** 2 * y[0]], (0, 20), [1 + 0j, 1j],
                    t_eval=traj.t, method="DOP853", rtol=1e-13, atol=1e-14)
    np.testing.assert_allclose(traj.eps, ref.y[0], atol=1e-8)


def test_smooth_flat_profile_is_harmonic():
    prof = FrequencyProfile("smooth-tabulated", (0.0, 5.0, 10.0), (1.0, 1.0, 1.0), "linear")
    traj = integrate_epsilon(prof, 10.0, 0.1)
    np.testing.assert_allclose(traj.eps, np.exp(1j * traj.t), atol=1e-9)


@pytest.mark.parametrize("prof", [CONST, JUMP, sudden_jump(3.0, at=2.0), smooth_profile()])
def test_wronskian_conserved(prof):
    traj = integrate_epsilon(prof, 100.0, 0.1)
    assert traj.wronskian_residual.max() <= 1e-9
    prod = traj.epsdot * np.conj(traj.eps)
    assert np.abs(np.abs(prod) ** 2 - 1 - prod.real ** 2).max() <= 1e-9


def test_wronskian_function():
    assert wronskian(1.0 + 0j, 1j) == 2j


def test_integration_rejects_impossible_tolerance():
    with pytest.raises(IntegrationError):
        integrate_epsilon(smooth_profile(), 1.0, 0.5, wronskian_tol=-1.0)


def test_bad_step():
    with pytest.raises(StateError):
        integrate_epsilon(CONST, 1.0, 0.0)


def test_at_outside_range(const_traj):
    with pytest.raises(StateError):
        const_traj.at(11.0)


def test_branch_tracking_flagged():
    coarse = integrate_epsilon(CONST, 10.0, 2.0)
    assert not coarse.branch_ok()
    with pytest.raises(BranchTrackingError):
        coarse.at(5.0)


def test_ground_state_at_zero(const_traj):
    psi = ground_state(const_traj, 0.0)
    np.testing.assert_allclose(psi.amplitudes, np.pi ** -0.25 * np.exp(-psi.x ** 2 / 2), atol=1e-15)


def test_ground_state_phase_is_continuous(const_traj):
    # exp(-i t/2) rather than the principal square root of exp(-i t)
    psi = ground_state(const_traj, 4.0)
    i0 = np.argmin(np.abs(psi.x))
    assert psi.amplitudes[i0] == pytest.approx(np.pi ** -0.25 * np.exp(-2j) * np.exp(-psi.x[i0] ** 2 / 2), abs=1e-12)


def test_ground_state_modulus_constant_frequency(const_traj):
    for t in (0.7, 3.3, 9.1):
        psi = ground_state(const_traj, t)
        np.testing.assert_allclose(np.abs(psi.amplitudes), np.pi ** -0.25 * np.exp(-psi.x ** 2 / 2), atol=1e-13)


def test_ground_state_width_after_jump(jump_traj):
    t = np.pi / 4
    eps, _, _ = jump_traj.at(t)
    psi = ground_state(jump_traj, t)
    dens = np.abs(psi.amplitudes) ** 2
    var = np.sum(psi.grid.weights() * psi.x ** 2 * dens)
    assert var == pytest.approx(abs(eps) ** 2 / 2, abs=1e-10)
    assert abs(eps) ** 2 / 2 == pytest.approx(0.125)


def test_ground_state_is_annihilated(jump_traj):
    for t in (0.0, 0.4, 1.3, 4.2):
        eps, epsdot, _ = jump_traj.at(t)
        psi = ground_state(jump_traj, t)
        a = apply_annihilation(eps, epsdot, psi)
        assert np.sqrt(np.sum(psi.grid.weights() * np.abs(a) ** 2)) <= 1e-6


def test_interpolated_time(jump_traj):
    eps, epsdot, _ = jump_traj.at(0.123)
    assert eps == pytest.approx(math.cos(0.246) + 0.5j * math.sin(0.246), abs=1e-14)


def test_fock_states_at_zero(jump_traj):
    x = STATE_GRID.points
    for n in range(7):
        np.testing.assert_allclose(fock_state(jump_traj, n, 0.0).amplitudes, hermite_function(n, x), atol=1e-9)


def test_fock_modulus_constant_frequency(const_traj):
    x = STATE_GRID.points
    for n in (1, 4, 9):
        psi = fock_state(const_traj, n, 2.7)
        np.testing.assert_allclose(np.abs(psi.amplitudes), np.abs(hermite_function(n, x)), atol=1e-8)


def _squeezed_hermite(eps, n, x):
    # branch: arg eps stays in (-pi, pi) for the times used here
    psi0 = np.pi ** -0.25 * eps ** -0.5 * np.exp(1j * _epsdot_over_eps(eps) * x ** 2 / 2)
    return psi0 * (np.conj(eps) / eps) ** (n / 2) * eval_hermite(n, x / abs(eps)) / math.sqrt(2 ** n * math.factorial(n))


def _epsdot_over_eps(eps):
    # jump to omega = 2: eps = cos 2t + (i/2) sin 2t, epsdot = -2 sin 2t + i cos 2t
    t = 0.5 * math.atan2(2 * eps.imag, eps.real)
    return (-2 * math.sin(2 * t) + 1j * math.cos(2 * t)) / eps


@pytest.mark.parametrize("t", [0.3, np.pi / 4, 0.7])
def test_fock_two_matches_closed_form(jump_traj, t):
    eps, _, _ = jump_traj.at(t)
    x = STATE_GRID.points
    ref = _squeezed_hermite(eps, 2, x)
    assert np.abs(fock_state(jump_traj, 2, t).amplitudes - ref).max() <= 1e-6


@pytest.mark.parametrize("t", [0.3, 1.0, 3.7])
def test_operator_route_matches_closed_form(jump_traj, t):
    ladder = fock_states(jump_traj, 12, t)
    for n in range(13):
        ref = hermite_closed_form(jump_traj, n, t).amplitudes
        assert np.abs(ladder[n].amplitudes - ref).max() <= 1e-7


def test_recurrence_matches_operator_route(jump_traj):
    a = fock_states(jump_traj, 12, 2.2)
    b = fock_states(jump_traj, 12, 2.2, method="recurrence")
    for u, v in zip(a, b):
        assert np.abs(u.amplitudes - v.amplitudes).max() <= 1e-7


@pytest.mark.parametrize("t", [0.0, 0.9, 2.5])
def test_gram_matrix(jump_traj, t):
    states = fock_states(jump_traj, 6, t)
    gram = np.array([[overlap(a, b) for b in states] for a in states])
    assert np.abs(gram - np.eye(7)).max() <= 1e-6


def test_fock_limits(jump_traj):
    with pytest.raises(StateError):
        fock_state(jump_traj, 13, 0.5)
    with pytest.raises(StateError):
        fock_states(jump_traj, 2, 0.5, method="magic")


def test_fock_coarse_grid_diagnostic(jump_traj):
    with pytest.raises(StateError):
        fock_state(jump_traj, 10, 1.0, grid=UniformGrid(-3.0, 3.0, 256))


def test_overlap_needs_same_grid(jump_traj):
    a = ground_state(jump_traj, 0.0)
    b = ground_state(jump_traj, 0.0, UniformGrid(-9, 9, 512))
    with pytest.raises(StateError):
        overlap(a, b)


def test_fc_identity_for_constant_frequency(const_traj):
    for m in range(5):
        for t in (1.1, 7.9):
            probs = franck_condon(const_traj, m, t).probs
            assert np.abs(probs - np.eye(65)[m]).max() <= 1e-10


def _p00_quadrature(t):
    eps = math.cos(2 * t) + 0.5j * math.sin(2 * t)
    epsdot = -2 * math.sin(2 * t) + 1j * math.cos(2 * t)
    # the global phase of eps**-1/2 drops out of |overlap|**2
    f = lambda x: np.pi ** -0.5 * eps ** -0.5 * np.exp(-x ** 2 / 2 + 1j * epsdot / eps * x ** 2 / 2)  # noqa: E731
    re = quad(lambda x: f(x).real, -np.inf, np.inf, epsabs=1e-14)[0]
    im = quad(lambda x: f(x).imag, -np.inf, np.inf, epsabs=1e-14)[0]
    return re * re + im * im


@pytest.mark.parametrize("t", [0.2, np.pi / 4, 1.3, 2.9])
def test_p00_closed_form(jump_traj, t):
    eps, epsdot, _ = jump_traj.at(t)
    closed = ground_overlap_closed_form(eps, epsdot)
    assert closed == pytest.approx(_p00_quadrature(t), abs=1e-10)
    assert franck_condon(jump_traj, 0, t).probs[0] == pytest.approx(closed, abs=1e-6)


@pytest.mark.parametrize("m", range(5))
def test_fc_completeness(jump_traj, m):
    table = franck_condon(jump_traj, m, 1.7)
    assert table.truncation_mass >= 1 - 1e-6
    assert table.truncation_mass <= 1 + 1e-9
    assert table.probs.min() >= 0


def test_fc_parity(jump_traj):
    probs = franck_condon(jump_traj, 0, 0.8).probs
    assert probs[1::2].max() <= 1e-20
    probs = franck_condon(jump_traj, 1, 0.8).probs
    assert probs[0::2].max() <= 1e-20


def test_fc_conjugation_symmetry(jump_traj):
    init = fock_states(jump_traj, 3, 0.0, method="recurrence")[3]
    for n, psi in enumerate(fock_states(jump_traj, 10, 1.1, method="recurrence")):
        a = overlap(init, psi)
        b = overlap(psi, init)
        assert abs(a) ** 2 == abs(b) ** 2
        assert a == np.conj(b)


def test_fc_truncation_warning(jump_traj):
    with pytest.warns(TruncationWarning):
        franck_condon(jump_traj, 0, 0.8, n_max=2)


def test_fc_rows(jump_traj):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        table = franck_condon(jump_traj, 0, 0.8, n_max=4)
    rows = table.rows()
    assert rows[0] == ["m", "n", "t", "P"] and len(rows) == 6


@pytest.mark.parametrize("mu, nu", [(1.0, 0.0), (0.0, 1.0), (0.3, -2.0)])
def test_gaussian_tomogram_at_zero(jump_traj, mu, nu):
    assert gaussian_tomogram(jump_traj, 0.0, mu, nu) == (0.0, pytest.approx((mu ** 2 + nu ** 2) / 2, abs=1e-15))


def test_gaussian_tomogram_constant_frequency(const_traj):
    for t in np.linspace(0, 10, 11):
        assert gaussian_tomogram(const_traj, t, 1.0, 0.0)[1] == pytest.approx(0.5, abs=1e-14)


def test_gaussian_tomogram_matches_sampled(jump_traj):
    rng = np.random.default_rng(5)
    for t in (0.4, 1.1, 2.0):
        psi = ground_state(jump_traj, t)
        for _ in range(4):
            mu, nu = rng.uniform(-1.5, 1.5, 2)
            _, var = gaussian_tomogram(jump_traj, t, mu, nu)
            X = np.linspace(-1, 1, 401) * 10 * math.sqrt(var)
            sampled = symplectic_tomogram_pure(psi, mu, nu, X)
            assert sampled.variance == pytest.approx(var, abs=1e-5)
            assert var > 0


def test_gaussian_tomogram_rejects_zero(jump_traj):
    with pytest.raises(StateError):
        gaussian_tomogram(jump_traj, 0.5, 0.0, 0.0)


def test_trajectory_rows(const_traj):
    rows = const_traj.rows()
    assert rows[0] == ["t", "re_eps", "im_eps", "re_epsdot", "im_epsdot", "wronskian_residual"]
    assert rows[1][:5] == [0.0, 1.0, 0.0, 0.0, 1.0]
