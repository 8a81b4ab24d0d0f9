from fractions import Fraction

import numpy as np
import pytest
from scipy.linalg import expm

from tomoprob.qudit_prob import QubitTriple, qubit_to_density
from tomoprob.spin_tomography import (
    Direction,
    qubit_tomogram_affine,
    rotation_matrix,
    small_d,
    spin_tomogram,
    tomogram_csv_row,
)
from tomoprob.statespace import StateError, maximally_mixed, random_density, validate_density

SPINS = [Fraction(k, 2) for k in range(1, 8)]


def spin_ops(j):
    """Jy, Jz in the m-descending basis from the ladder operator."""
    m = np.arange(float(j), -float(j) - 1, -1)
    jp = np.diag(np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1)), 1)
    return (jp - jp.T) / 2j, np.diag(m)


def random_direction(rng):
    return Direction.from_vector(rng.normal(size=3))


def test_direction_vector(rng):
    for _ in range(100):
        d = random_direction(rng)
        assert abs(np.linalg.norm(d.vector) - 1) <= 1e-14
    with pytest.raises(StateError):
        Direction(-0.1, 0.0)
    assert Direction(0.5, 2 * np.pi + 0.25).phi == pytest.approx(0.25)


@pytest.mark.parametrize("j", SPINS)
def test_identity_at_pole(j):
    np.testing.assert_allclose(rotation_matrix(j, Direction(0.0, 0.0)), np.eye(int(2 * j + 1)), atol=1e-15)


def test_half_spin_equator():
    u = rotation_matrix(Fraction(1, 2), Direction(np.pi / 2, 0.0))
    np.testing.assert_allclose(np.abs(u), np.full((2, 2), 1 / np.sqrt(2)), atol=1e-15)


@pytest.mark.parametrize("j", SPINS)
def test_matches_matrix_exponential(j, rng):
    jy, jz = spin_ops(float(j))
    for _ in range(10):
        d = random_direction(rng)
        ref = expm(1j * d.theta * jy) @ expm(1j * d.phi * jz)
        np.testing.assert_allclose(rotation_matrix(j, d), ref, atol=1e-12)


@pytest.mark.parametrize("j", SPINS)
def test_unitary(j, rng):
    n = int(2 * j + 1)
    for _ in range(20):
        u = rotation_matrix(j, random_direction(rng))
        assert np.max(np.abs(u @ u.conj().T - np.eye(n))) <= 1e-12


@pytest.mark.parametrize("j", SPINS)
def test_y_rotation_composition(j, rng):
    for _ in range(10):
        a, b = rng.uniform(0, np.pi / 2, 2)
        lhs = rotation_matrix(j, Direction(a, 0.0)) @ rotation_matrix(j, Direction(b, 0.0))
        np.testing.assert_allclose(lhs, rotation_matrix(j, Direction(a + b, 0.0)), atol=1e-12)


def test_small_d_spin_one():
    b = 0.7
    c, s = np.cos(b), np.sin(b)
    ref = np.array(
        [
            [(1 + c) / 2, -s / np.sqrt(2), (1 - c) / 2],
            [s / np.sqrt(2), c, -s / np.sqrt(2)],
            [(1 - c) / 2, s / np.sqrt(2), (1 + c) / 2],
        ]
    )
    np.testing.assert_allclose(small_d(1, b), ref, atol=1e-15)


def test_invalid_spin():
    with pytest.raises(StateError):
        small_d(Fraction(1, 3), 0.1)
    with pytest.raises(StateError):
        rotation_matrix(-1, Direction(0, 0))


@pytest.mark.parametrize("n", [2, 3, 4, 5, 8])
def test_maximally_mixed_uniform(n, rng):
    for _ in range(5):
        w = spin_tomogram(maximally_mixed(n), random_direction(rng)).w.values
        np.testing.assert_allclose(w, np.full(n, 1 / n), atol=1e-15)


def test_spin_up_tomograms():
    rho = validate_density(np.diag([1.0, 0.0]))
    np.testing.assert_allclose(spin_tomogram(rho, Direction(0, 0)).w.values, [1, 0], atol=1e-15)
    np.testing.assert_allclose(spin_tomogram(rho, Direction(np.pi / 2, 1.1)).w.values, [0.5, 0.5], atol=1e-15)


@pytest.mark.parametrize(
    "triple, d, expected",
    [
        ((0.5, 0.5, 0.5), Direction(1.0, 2.0), 0.5),
        ((0.5, 0.5, 1.0), Direction(0.0, 0.0), 1.0),
        ((0.5, 0.5, 1.0), Direction(np.pi / 3, 0.0), 0.75),
    ],
)
def test_affine_examples(triple, d, expected):
    assert qubit_tomogram_affine(QubitTriple(*triple), d) == pytest.approx(expected, abs=1e-15)


def test_affine_matches_rotation(rng):
    for _ in range(200):
        v = rng.normal(size=3)
        v *= rng.uniform() ** (1 / 3) * 0.5 / np.linalg.norm(v)
        t = QubitTriple(*(v + 0.5))
        rho = qubit_to_density(t)
        for _ in range(10):
            d = random_direction(rng)
            assert abs(spin_tomogram(rho, d).w.values[0] - qubit_tomogram_affine(t, d)) <= 1e-12


def test_axis_probabilities_are_coin_probabilities(rng):
    rho = random_density(2, rng)
    from tomoprob.qudit_prob import density_to_qubit

    t = density_to_qubit(rho)
    axes = [Direction(np.pi / 2, 0.0), Direction(np.pi / 2, np.pi / 2), Direction(0.0, 0.0)]
    got = [spin_tomogram(rho, d).w.values[0] for d in axes]
    np.testing.assert_allclose(got, t.as_array(), atol=1e-14)


@pytest.mark.parametrize("j", SPINS)
def test_normalization_and_positivity(j, rng):
    n = int(2 * j + 1)
    for _ in range(100):
        tomo = spin_tomogram(random_density(n, rng), random_direction(rng))
        assert abs(tomo.w.values.sum() - 1) <= 1e-10
        assert tomo.w.values.min() >= -1e-12


def test_csv_row_layout():
    tomo = spin_tomogram(maximally_mixed(3), Direction(0.3, 0.2))
    row = tomogram_csv_row(tomo)
    assert row[:3] == [1.0, 0.3, 0.2] and len(row) == 6
    np.testing.assert_array_equal(tomo.m_values, [1, 0, -1])
