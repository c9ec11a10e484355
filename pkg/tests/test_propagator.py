import math

import numpy as np
import pytest

from checkerboard.errors import AliasingError
from checkerboard.geometry import volume_per_point
from checkerboard.propagator import (
    continuum_convergence_study,
    continuum_prefactor,
    frobenius_mass,
    halving_sequence,
    kernel_dp,
    kernel_fourier,
    kernel_fourier_table,
    kernel_pathsum,
    max_deviation,
    operator_norm_mass,
    prefactor_identity_residual,
    triple_equivalence,
)
from checkerboard.spin import IDENTITY, projector

TOL = 1e-12
E = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]


def test_kernel_at_t0_is_identity():
    k = kernel_dp(0)
    assert list(k.entries) == [(0, 0, 0, 0)]
    np.testing.assert_allclose(k.get((0, 0, 0, 0)), IDENTITY)


def test_kernel_dp_examples():
    k1 = kernel_dp(1)
    for i, e in enumerate(E, start=1):
        np.testing.assert_allclose(k1.get(e), 0.5 * projector(i), atol=TOL)
    k2 = kernel_dp(2)
    np.testing.assert_allclose(k2.get((1, 1, 0, 0)),
                               0.25 * (projector(2) @ projector(1) + projector(1) @ projector(2)),
                               atol=TOL)


@pytest.mark.parametrize("t", range(13))
def test_kernel_sum_is_identity(t):
    np.testing.assert_allclose(kernel_dp(t).total(), IDENTITY, atol=TOL)


def test_kernel_support():
    k = kernel_dp(3)
    assert all(min(d) >= 0 and sum(d) == 3 for d in k.entries)
    assert len(k.entries) == 20


def test_pathsum_examples():
    np.testing.assert_allclose(kernel_pathsum((2, 0, 0, 0)), 0.25 * projector(1), atol=TOL)
    assert np.max(np.abs(kernel_pathsum((1, 1, 0, 0)) - kernel_dp(2).get((1, 1, 0, 0)))) < 1e-14
    assert np.max(np.abs(kernel_pathsum((1, 1, 1, 1)) - kernel_dp(4).get((1, 1, 1, 1)))) < 1e-13
    np.testing.assert_allclose(kernel_pathsum((1, -1, 0, 0)), 0)


def test_fourier_examples():
    for i, e in enumerate(E, start=1):
        np.testing.assert_allclose(kernel_fourier(e, 1, 2), 0.5 * projector(i), atol=TOL)
    assert np.max(np.abs(kernel_fourier((1, 1, 1, 1), 4, 5) - kernel_dp(4).get((1, 1, 1, 1)))) < 1e-10
    np.testing.assert_allclose(kernel_fourier((2, -1, 0, 0), 1), 0)


def test_fourier_grid_must_not_alias():
    with pytest.raises(AliasingError):
        kernel_fourier((1, 1, 1, 1), 4, 4)
    with pytest.raises(AliasingError):
        kernel_fourier_table(3, 3)


def test_fourier_larger_grid_agrees():
    assert max_deviation(kernel_fourier_table(3, 7), kernel_dp(3)) < 1e-12


@pytest.mark.parametrize("t", range(1, 6))
@pytest.mark.parametrize("chirality", ["right", "left"])
def test_triple_equivalence(t, chirality):
    assert triple_equivalence(t, chirality).worst < 1e-10


def test_frobenius_mass_contracts():
    masses = [frobenius_mass(kernel_dp(t)) for t in range(13)]
    assert masses[0] == 2 and abs(masses[1] - 1) < TOL
    assert all(b <= a + TOL for a, b in zip(masses, masses[1:]))


def test_frobenius_mass_parseval_oracle():
    # mean of ||A(theta)^t||_F^2 over the torus, estimated on an exact grid
    from checkerboard.spectral import amplification, grid_values

    t = 3
    # |A^t|^2 has modes up to 2t; a grid of 2t + 1 is exact for its mean
    g2 = grid_values(2 * t + 1)
    th2 = np.stack(np.meshgrid(g2, g2, g2, g2, indexing="ij"), -1).reshape(-1, 4)
    A2 = amplification(th2)
    P2 = np.broadcast_to(IDENTITY, A2.shape).copy()
    for _ in range(t):
        P2 = P2 @ A2
    mean = float(np.mean(np.sum(np.abs(P2) ** 2, axis=(-1, -2))))
    assert abs(mean - frobenius_mass(kernel_dp(t))) < 1e-12


def test_operator_norm_mass_is_not_monotone():
    masses = [operator_norm_mass(kernel_dp(t)) for t in range(4)]
    assert masses[0] == pytest.approx(1.0)
    assert masses[1] > masses[0]


def test_prefactor_identity():
    for eps in (0.01, 0.3, 2.0):
        assert abs(continuum_prefactor(eps) - volume_per_point(3 * eps)) < 1e-12 * volume_per_point(3 * eps)
        assert prefactor_identity_residual(eps) < TOL


def test_convergence_zero_k():
    rep = continuum_convergence_study([0, 0, 0], halving_sequence(0.5, 3))
    assert all(d == 0 for d in rep.deviations)


def test_convergence_study():
    rep = continuum_convergence_study([0.3, 0.2, 0.1], halving_sequence(0.5, 5))
    assert len(rep.epsilons) == 6
    assert rep.monotone
    assert rep.fitted_order >= 1
    assert all(o >= 1 for o in rep.orders)
    rows = list(rep.rows())
    assert math.isnan(rows[0]["fitted_order"])


def test_convergence_rejects_bad_sequence():
    with pytest.raises(ValueError):
        continuum_convergence_study([0.3, 0.2, 0.1], [0.1, 0.2])
