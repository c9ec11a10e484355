import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from checkerboard.errors import NotOnLatticeError
from checkerboard.geometry import (
    LatticeScales,
    Mode,
    check_direction,
    embed,
    face_null_normal,
    invert,
    jacobian,
    minkowski,
    step_vectors,
    tetrad,
    volume_per_point,
    wavevector_to_lattice,
)

TOL = 1e-12


def test_tetrad_components():
    n = tetrad().vectors
    np.testing.assert_allclose(n[3], [0, 0, 1], atol=TOL)
    np.testing.assert_allclose(n[0], [2 * math.sqrt(2) / 3, 0, -1 / 3], atol=TOL)
    assert abs(n[0] @ n[1] + 1 / 3) < TOL
    np.testing.assert_allclose(n.sum(axis=0), 0, atol=TOL)


@pytest.mark.parametrize("mode", list(Mode))
def test_tetrad_invariants(mode):
    n = tetrad(mode).spatial
    k = mode.ndir
    np.testing.assert_allclose(np.linalg.norm(n, axis=1), 1, atol=TOL)
    gram = n @ n.T
    off = gram[~np.eye(k, dtype=bool)]
    np.testing.assert_allclose(off, -1 / mode.spatial_dim, atol=TOL)
    np.testing.assert_allclose(n.T @ n, (k / mode.spatial_dim) * np.eye(mode.spatial_dim), atol=TOL)
    assert all(v <= TOL for v in tetrad(mode).residuals().values())


def test_planar_pair_dot_is_minus_half():
    n = tetrad(Mode.PLANAR).spatial
    for i, j in itertools.combinations(range(3), 2):
        assert abs(n[i] @ n[j] + 0.5) < TOL


def test_direction_range():
    assert check_direction(4) == 4
    with pytest.raises(ValueError):
        check_direction(4, Mode.PLANAR)
    with pytest.raises(ValueError):
        check_direction(0)


def test_step_vectors_examples():
    N = step_vectors(3.0).vectors
    np.testing.assert_allclose(N[3], [1, 0, 0, 3], atol=TOL)
    assert abs(minkowski(N[0], N[0]) + 8) < TOL
    np.testing.assert_allclose(N[:, 0], 1)


@given(st.floats(0.1, 10))
def test_step_vectors_sum_any_alpha(alpha):
    np.testing.assert_allclose(step_vectors(alpha).vectors.sum(axis=0), [4, 0, 0, 0], atol=1e-10)


def test_step_vectors_reject_nonpositive_alpha():
    with pytest.raises(ValueError):
        step_vectors(0.0)


def test_sum_of_three_step_vectors_is_null_at_alpha_3():
    N = step_vectors(3.0).vectors
    for face in itertools.combinations(range(4), 3):
        s = N[list(face)].sum(axis=0)
        assert abs(minkowski(s, s)) < TOL


def test_face_null_normal_examples():
    fn = face_null_normal((1, 2, 3), 3.0)
    np.testing.assert_allclose(fn.normal, [3, 0, 0, -3], atol=TOL)
    assert abs(fn.norm2) < TOL
    assert max(map(abs, fn.inner_products)) < TOL
    assert abs(minkowski(fn.normal, step_vectors(3.0).vectors[0])) < TOL
    # oracle: 9 - alpha^2 at alpha = 1
    assert abs(face_null_normal((1, 2, 3), 1.0).norm2 - 8) < TOL


@pytest.mark.parametrize("face", list(itertools.combinations(range(1, 5), 3)))
def test_every_face_is_null_at_alpha_3(face):
    fn = face_null_normal(face, 3.0)
    assert abs(fn.norm2) < TOL and max(map(abs, fn.inner_products)) < TOL


def test_face_needs_distinct_directions():
    with pytest.raises(ValueError):
        face_null_normal((1, 1, 2))


def test_embed_examples():
    np.testing.assert_allclose(embed((1, 0, 0, 0)), step_vectors(3.0).vectors[0], atol=TOL)
    np.testing.assert_allclose(embed((1, 1, 1, 1)), [4, 0, 0, 0], atol=TOL)


def test_embed_invert_roundtrip(rng):
    N = step_vectors(3.0).vectors
    for _ in range(200):
        counts = tuple(int(c) for c in rng.integers(-20, 20, size=4))
        x = embed(counts, epsilon=0.3)
        assert invert(x, epsilon=0.3) == counts
        # independent oracle: linear solve
        np.testing.assert_allclose(np.linalg.solve(N.T, x / 0.3), counts, atol=1e-9)


def test_invert_off_lattice():
    with pytest.raises(NotOnLatticeError):
        invert([0.5, 0.1, 0.0, 0.0])


def test_wavevector_to_lattice(rng):
    np.testing.assert_allclose(wavevector_to_lattice([1, 0, 0, 0]), [1, 1, 1, 1], atol=TOL)
    N = step_vectors(3.0).vectors
    for _ in range(50):
        k = rng.normal(size=4)
        kj = wavevector_to_lattice(k)
        np.testing.assert_allclose(np.linalg.solve(N, kj), k, atol=TOL)


def test_jacobian():
    assert abs(jacobian() - 48 * math.sqrt(3)) < 1e-10
    assert abs(jacobian() - 83.1384) < 1e-4
    assert abs(jacobian() - abs(np.linalg.det(step_vectors(3.0).vectors))) < 1e-10


def test_volume_per_point():
    assert abs(volume_per_point(1.0) - 16 / (3 * math.sqrt(3))) < TOL
    assert abs(volume_per_point(1.0) - 3.0792) < 1e-4
    eps = 0.37
    assert abs(volume_per_point(3 * eps) - 48 * math.sqrt(3) * eps**3) < TOL
    assert abs(volume_per_point(2.4) - 8 * volume_per_point(1.2)) < 1e-10


def test_lattice_scales():
    sc = LatticeScales(0.25)
    assert sc.a == 0.75
    assert abs(sc.vp - volume_per_point(0.75)) < TOL
    assert abs(sc.cube_edge - 2 * 0.75 / math.sqrt(3)) < TOL
    with pytest.raises(ValueError):
        LatticeScales(-1.0)
