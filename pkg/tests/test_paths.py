import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from checkerboard.errors import EnumerationCapError
from checkerboard.geometry import Mode
from checkerboard.paths import (
    PLANAR_BEND_FACTORS,
    PathStats,
    amplitude_bend_rule,
    amplitude_matrix,
    apply_string,
    chirality_sequences,
    dirac_path_amplitude,
    displacement_of,
    end_cap_factor,
    enumerate_paths,
    loop_bend_phase,
    majorana_path_tokens,
    matrix_element,
    parse_path,
    path_stats,
    path_string,
    planar_amplitudes,
    planar_bend_factors,
    reduce_conjugation_string,
    scalar_amplitude,
    winding_number,
)
from checkerboard.spin import IDENTITY, Chirality, PhaseRule, PlanarRule, anti_projector, projector

TOL = 1e-12
S3 = math.sqrt(3)

paths4 = st.lists(st.integers(1, 4), min_size=1, max_size=7).map(tuple)
paths3 = st.lists(st.integers(1, 3), min_size=1, max_size=8).map(tuple)


def test_enumeration_counts():
    assert len(list(enumerate_paths(1))) == 4
    assert sorted(enumerate_paths(displacement=(1, 1, 0, 0))) == [(1, 2), (2, 1)]
    assert len(list(enumerate_paths(displacement=(1, 1, 1, 1)))) == 24
    assert len(list(enumerate_paths(displacement=(2, 1, 0, 1)))) == 12
    assert len(list(enumerate_paths(3, mode=Mode.PLANAR))) == 27


def test_enumeration_errors():
    with pytest.raises(EnumerationCapError):
        list(enumerate_paths(11))
    with pytest.raises(ValueError):
        list(enumerate_paths(displacement=(1, -1, 0, 0)))
    with pytest.raises(ValueError):
        list(enumerate_paths())


def test_path_string_roundtrip():
    assert parse_path("1342") == (1, 3, 4, 2)
    assert path_string((1, 3, 4, 2)) == "1342"
    assert displacement_of((1, 3, 4, 1)) == (2, 0, 1, 1)


def test_amplitude_matrix_examples():
    for i in range(1, 5):
        np.testing.assert_allclose(amplitude_matrix((i,) * 5), projector(i) / 32, atol=TOL)
    np.testing.assert_allclose(amplitude_matrix((1, 2)), 0.25 * projector(2) @ projector(1), atol=TOL)
    total = sum(amplitude_matrix(p) for p in enumerate_paths(4))
    np.testing.assert_allclose(total, IDENTITY, atol=TOL)


def test_path_stats_examples():
    assert path_stats((2, 2, 2)) == PathStats(3, 0, 0)
    assert path_stats((1, 3)) == PathStats(2, 1, 1)
    assert path_stats((1, 4)) == PathStats(2, 1, 0)
    assert path_stats((3, 1)).handed_excess == -1


@given(paths4)
def test_path_stats_bounds(path):
    s = path_stats(path)
    assert 0 <= s.n_bends <= s.n_steps - 1
    assert abs(s.handed_excess) <= s.n_bends


def test_bend_rule_examples():
    assert abs(amplitude_bend_rule(PathStats(2, 1, 1)) - 1j / S3 / 4) < TOL
    assert abs(amplitude_bend_rule(PathStats(5, 0, 0)) - 2.0**-5) < TOL
    assert abs(amplitude_bend_rule(PathStats(2, 1, 1), "left") + 1j / S3 / 4) < TOL


def test_scalar_amplitude_examples():
    for i in range(1, 5):
        assert abs(scalar_amplitude((i,), i, i) - 0.5) < TOL
    s = scalar_amplitude((1, 3), 1, 3)
    assert abs(s - matrix_element((1, 3), 1, 3)) < TOL
    assert abs(s - amplitude_bend_rule(path_stats((1, 3)))) < TOL


@pytest.mark.parametrize("chirality", list(Chirality))
def test_three_calculi_agree_exhaustively(chirality):
    for n in range(1, 5):
        for path in enumerate_paths(n):
            m = matrix_element(path, path[0], path[-1], PhaseRule.RULE_B, chirality)
            assert abs(scalar_amplitude(path, path[0], path[-1], "B", chirality) - m) < TOL
            assert abs(amplitude_bend_rule(path_stats(path), chirality) - m) < TOL


@settings(max_examples=200)
@given(paths4, st.integers(1, 4), st.integers(1, 4), st.sampled_from(list(PhaseRule)),
       st.sampled_from(list(Chirality)))
def test_scalar_chain_equals_matrix_element(path, a, b, rule, chirality):
    assert abs(scalar_amplitude(path, a, b, rule, chirality)
               - matrix_element(path, a, b, rule, chirality)) < TOL


@given(paths4, st.integers(1, 4), st.integers(1, 4))
def test_left_is_conjugate_of_right(path, a, b):
    r = scalar_amplitude(path, a, b, "B", "right")
    l = scalar_amplitude(path, a, b, "B", "left")
    assert abs(l - np.conj(r)) < TOL


@given(paths4)
def test_magnitude_is_rule_independent(path):
    a = scalar_amplitude(path, path[0], path[-1], "A")
    b = scalar_amplitude(path, path[0], path[-1], "B")
    assert abs(abs(a) - abs(b)) < TOL


@given(paths4, st.integers(1, 4), st.integers(1, 4))
def test_end_caps_factor_out(path, a, b):
    full = scalar_amplitude(path, a, b)
    interior = amplitude_bend_rule(path_stats(path))
    assert abs(full - end_cap_factor(path, a, b) * interior) < TOL


def test_planar_single_bend_factors():
    assert abs(planar_bend_factors((1, 3), PlanarRule.CHIRAL_PLUS)[0] - np.exp(1j * np.pi / 3) / 2) < TOL
    assert abs(planar_bend_factors((1, 3), PlanarRule.CHIRAL_MINUS)[0] - np.exp(-1j * np.pi / 3) / 2) < TOL
    assert abs(planar_bend_factors((1, 2), PlanarRule.CHIRAL_PLUS)[0] - np.exp(-1j * np.pi / 3) / 2) < TOL
    for turn in [(1, 2), (1, 3), (2, 3), (3, 2)]:
        assert abs(planar_bend_factors(turn, PlanarRule.SYMMETRIC)[0] + 0.5) < TOL
    assert abs(planar_amplitudes((1, 3), PlanarRule.SYMMETRIC) - (2 / 3) ** 2 * -0.5) < TOL
    assert abs(PLANAR_BEND_FACTORS[PlanarRule.SYMMETRIC] + 0.5) < TOL


@given(paths3, st.sampled_from(list(PlanarRule)))
def test_planar_bend_moduli_and_projector_products(path, variant):
    factors = planar_bend_factors(path, variant)
    assert all(abs(abs(f) - 0.5) < TOL for f in factors)
    amp = planar_amplitudes(path, variant)
    assert abs(amp - matrix_element(path, path[0], path[-1], variant)) < TOL
    assert abs(abs(amp) - (2 / 3) ** len(path) * 2.0 ** -len(factors)) < TOL


@given(paths3)
def test_planar_symmetric_is_minus_two_power(path):
    b = path_stats(path, Mode.PLANAR).n_bends
    amp = planar_amplitudes(path, PlanarRule.SYMMETRIC, step_weight=0.5)
    assert abs(amp - 2.0 ** -len(path) * (-2.0) ** -b) < TOL
    # the projector product uses weight 1/2 per step here as well
    m = matrix_element(path, path[0], path[-1], PlanarRule.SYMMETRIC, step_weight=0.5)
    assert abs(amp - m) < TOL


LOOPS = [
    (1, 3, 2),               # one clockwise turn of the direction, 3 bends
    (1, 2, 3),               # counter-clockwise
    (1, 3, 2, 1, 3, 2),      # two turns, 6 bends
    (1, 2, 1, 3, 2),         # one net turn with a back-and-forth pair, 5 bends
]


@pytest.mark.parametrize("cycle", LOOPS)
@pytest.mark.parametrize("variant", list(PlanarRule))
def test_closed_loops_give_sign_per_winding(cycle, variant):
    n = winding_number(cycle)
    assert n == int(n)
    assert abs(loop_bend_phase(cycle, variant) - (-1) ** int(n)) < TOL


def test_winding_orientation():
    assert winding_number((1, 3, 2)) == -1
    assert winding_number((1, 2, 3)) == 1
    assert winding_number((1, 2, 1, 3, 2)) == -1


def test_dirac_path_amplitude_same_direction_flip_vanishes():
    # a chirality change between two steps along the same direction gives Pbar_i P_i = 0
    for i in range(1, 5):
        m = dirac_path_amplitude((i, i), ("right", "right", "left"), 0.3, 0.5)
        np.testing.assert_allclose(m, 0, atol=TOL)


def test_dirac_three_step_terms():
    g = 1j * 0.5 * 0.4
    P = projector
    Pb = anti_projector
    path = (1, 2, 3)
    R, L = Chirality.RIGHT, Chirality.LEFT
    expect = {
        (R, R, R, R): P(3) @ P(2) @ P(1),
        (L, R, R, R): g * P(3) @ P(2) @ P(1),
        (L, L, R, R): g * P(3) @ P(2) @ Pb(1),
        (L, L, L, R): g * P(3) @ Pb(2) @ Pb(1),
        (R, L, R, R): g**2 * P(3) @ P(2) @ Pb(1),
        (R, R, L, R): g**2 * P(3) @ Pb(2) @ P(1),
        (L, L, R, L): g**2 * Pb(3) @ P(2) @ Pb(1),
        (R, L, L, R): g**2 * P(3) @ Pb(2) @ Pb(1),
        (L, R, L, R): g**3 * P(3) @ Pb(2) @ P(1),
    }
    for seq, m in expect.items():
        np.testing.assert_allclose(dirac_path_amplitude(path, seq, 0.4, 0.5), m / 8, atol=TOL)
    assert len(list(chirality_sequences(3, final="right"))) == 8


def _random_tokens(rng, n):
    out = []
    for _ in range(n):
        r = rng.integers(4)
        if r == 0:
            out.append(("C",))
        elif r == 1:
            out.append(("s", complex(*rng.normal(size=2))))
        else:
            out.append(("P" if r == 2 else "Pbar", int(rng.integers(1, 5))))
    return out


def test_reduced_strings_match_direct_application(rng):
    for _ in range(1000):
        tokens = _random_tokens(rng, int(rng.integers(1, 9)))
        psi = rng.normal(size=2) + 1j * rng.normal(size=2)
        red = reduce_conjugation_string(tokens)
        np.testing.assert_allclose(red.apply(psi), apply_string(tokens, psi), atol=1e-12)
        assert all(t[0] != "C" for t in red.projectors)


def test_two_conjugations_on_a_path():
    eps, m = 0.5, 0.3
    path = (1, 2, 3, 4)
    tokens = majorana_path_tokens(path, (0, 2), m, eps)
    red = reduce_conjugation_string(tokens)
    assert not red.leading_c
    # conjugation precedes steps 0 and 2, so steps 0 and 1 lie between the
    # two insertions and carry barred projectors
    assert red.projectors == (("P", 4), ("P", 3), ("Pbar", 2), ("Pbar", 1))
    # C^2 = -1 with i eps m conjugated once by the antilinear C
    assert abs(red.coefficient - (-(eps * m) ** 2)) < TOL
    formal = reduce_conjugation_string(tokens, antilinear_scalars=False)
    assert abs(formal.coefficient - (eps * m) ** 2) < TOL
    psi = np.array([0.3, 0.7j])
    np.testing.assert_allclose(red.apply(psi), apply_string(tokens, psi), atol=TOL)
