"""Lattice paths and their amplitudes.

A path is a tuple of direction labels (1-based) in the order the steps are
taken. Two amplitude calculi are provided: the ordered projector product
(the ground truth) and the scalar spinor chain, whose interior factors give
the bend rule i^T 3^(-B/2) 2^(-N).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import EnumerationCapError
from .geometry import Mode, check_direction
from .spin import (
    IDENTITY,
    Chirality,
    PhaseRule,
    PlanarRule,
    chiral_projector,
    charge_conjugate,
    eigenspinor,
    parse_rule,
    transition,
)

DEFAULT_CAP = 10

# RuleB transitions with phase +i; the reverses carry -i
RIGHT_HANDED_BENDS = frozenset({(1, 3), (3, 2), (2, 1)})


def parse_path(text: str) -> tuple:
    return tuple(int(c) for c in str(text).strip())


def path_string(path: Sequence[int]) -> str:
    return "".join(str(i) for i in path)


def _distinct_orderings(counts):
    total = sum(counts)
    if total == 0:
        yield ()
        return
    for j, c in enumerate(counts):
        if c:
            rest = list(counts)
            rest[j] -= 1
            for tail in _distinct_orderings(rest):
                yield (j + 1,) + tail


def enumerate_paths(n_steps: int | None = None, displacement: Sequence[int] | None = None,
                    mode=Mode.FOUR_D, cap: int = DEFAULT_CAP) -> Iterator[tuple]:
    """All step sequences of a given length, or all orderings of a displacement.

    Paths come out in lexicographic order.
    """
    mode = Mode.parse(mode)
    if (n_steps is None) == (displacement is None):
        raise ValueError("give exactly one of n_steps or displacement")
    if displacement is not None:
        counts = [int(c) for c in displacement]
        if len(counts) != mode.ndir:
            raise ValueError(f"displacement needs {mode.ndir} counts")
        if min(counts) < 0:
            raise ValueError("path displacements need non-negative step counts")
        n = sum(counts)
    else:
        n = int(n_steps)
        if n < 0:
            raise ValueError("number of steps must be non-negative")
    if n > cap:
        raise EnumerationCapError(f"{n} steps exceeds the enumeration cap of {cap}")
    if displacement is not None:
        return _distinct_orderings(counts)
    return itertools.product(range(1, mode.ndir + 1), repeat=n)


def displacement_of(path: Sequence[int], mode=Mode.FOUR_D) -> tuple:
    mode = Mode.parse(mode)
    counts = [0] * mode.ndir
    for i in path:
        counts[check_direction(i, mode) - 1] += 1
    return tuple(counts)


def amplitude_matrix(path: Sequence[int], chirality=Chirality.RIGHT, mode=Mode.FOUR_D,
                     step_weight: float | None = None) -> np.ndarray:
    """w^N Q_{i_N} ... Q_{i_1}; w = 1/2 in 4D and 2/3 in 2+1 unless overridden."""
    mode = Mode.parse(mode)
    w = mode.step_weight if step_weight is None else step_weight
    M = IDENTITY.copy()
    for i in path:
        M = chiral_projector(i, chirality, mode) @ M
    return w ** len(path) * M


@dataclass(frozen=True)
class PathStats:
    n_steps: int
    n_bends: int
    handed_excess: int


def turn_sign(frm: int, to: int, mode=Mode.FOUR_D) -> int:
    """+1 for a right-handed bend, -1 for left-handed, 0 for none.

    In 4D, bends involving the preferred direction 4 count as 0. In 2+1 the
    sign is +1 for clockwise turns (1 -> 3 -> 2 -> 1).
    """
    if frm == to:
        return 0
    if (frm, to) in RIGHT_HANDED_BENDS:
        return 1
    if (to, frm) in RIGHT_HANDED_BENDS:
        return -1
    return 0


def path_stats(path: Sequence[int], mode=Mode.FOUR_D) -> PathStats:
    path = tuple(path)
    pairs = list(zip(path, path[1:]))
    bends = sum(1 for a, b in pairs if a != b)
    excess = sum(turn_sign(a, b, mode) for a, b in pairs)
    return PathStats(len(path), bends, excess)


def amplitude_bend_rule(stats: PathStats, chirality=Chirality.RIGHT) -> complex:
    """i^(+-T) 3^(-B/2) 2^(-N), the sign following the chirality."""
    t = stats.handed_excess * Chirality.parse(chirality).sign
    return (1j ** (t % 4)) * 3.0 ** (-stats.n_bends / 2) * 2.0 ** (-stats.n_steps)


def scalar_amplitude(path: Sequence[int], in_dir: int, out_dir: int, rule=PhaseRule.RULE_B,
                     chirality=Chirality.RIGHT, step_weight: float | None = None) -> complex:
    """w^N <out|i_N> <i_N|i_{N-1}> ... <i_1|in> as a product of transitions."""
    rule = parse_rule(rule)
    mode = Mode.PLANAR if isinstance(rule, PlanarRule) else Mode.FOUR_D
    w = mode.step_weight if step_weight is None else step_weight
    chain = (in_dir,) + tuple(path) + (out_dir,)
    amp = complex(w ** len(path))
    for a, b in zip(chain, chain[1:]):
        amp *= transition(a, b, rule, chirality)
    return amp


def matrix_element(path: Sequence[int], in_dir: int, out_dir: int, rule=PhaseRule.RULE_B,
                   chirality=Chirality.RIGHT, step_weight: float | None = None) -> complex:
    """<out| amplitude_matrix(path) |in> with the rule's eigenspinors."""
    rule = parse_rule(rule)
    mode = Mode.PLANAR if isinstance(rule, PlanarRule) else Mode.FOUR_D
    M = amplitude_matrix(path, chirality, mode, step_weight)
    bra = eigenspinor(out_dir, rule, chirality)
    ket = eigenspinor(in_dir, rule, chirality)
    return complex(np.vdot(bra, M @ ket))


def end_cap_factor(path: Sequence[int], in_dir: int, out_dir: int, rule=PhaseRule.RULE_B,
                   chirality=Chirality.RIGHT) -> complex:
    """Transitions joining the ingoing and outgoing spinors to the path ends."""
    return (transition(in_dir, path[0], rule, chirality)
            * transition(path[-1], out_dir, rule, chirality))


# ---------------------------------------------------------------------------
# 2+1 dimensions

PLANAR_BEND_FACTORS = {
    PlanarRule.CHIRAL_PLUS: 0.5 * np.exp(1j * np.pi / 3),
    PlanarRule.CHIRAL_MINUS: 0.5 * np.exp(-1j * np.pi / 3),
    PlanarRule.SYMMETRIC: -0.5 + 0j,
}


def planar_bend_factors(path: Sequence[int], variant=PlanarRule.SYMMETRIC) -> list:
    """Transition amplitude at each bend of a planar path."""
    variant = parse_rule(variant)
    return [transition(a, b, variant) for a, b in zip(path, path[1:]) if a != b]


def planar_amplitudes(path: Sequence[int], variant=PlanarRule.SYMMETRIC,
                      step_weight: float | None = None) -> complex:
    """Planar spinor-chain amplitude with end spinors on the first and last step.

    The default per-step weight is 2/3, the value for which the planar
    one-step rule leaves a constant field unchanged; pass 0.5 for the
    2^(-N) normalisation.
    """
    path = tuple(path)
    for i in path:
        check_direction(i, Mode.PLANAR)
    return scalar_amplitude(path, path[0], path[-1], variant, Chirality.RIGHT, step_weight)


def winding_number(cycle: Sequence[int]) -> float:
    """Turns of the step direction around a closed direction cycle.

    ``cycle`` lists the directions in order; the last bend returns to the
    first. Every planar bend turns by 120 degrees.
    """
    cycle = tuple(cycle)
    closed = cycle + cycle[:1]
    degrees = sum(-120 * turn_sign(a, b, Mode.PLANAR) for a, b in zip(closed, closed[1:]))
    return degrees / 360.0


def loop_bend_phase(cycle: Sequence[int], variant=PlanarRule.SYMMETRIC) -> complex:
    """Product of bend factors around a closed cycle, normalised to unit modulus."""
    cycle = tuple(cycle)
    closed = cycle + cycle[:1]
    prod = complex(1.0)
    for a, b in zip(closed, closed[1:]):
        if a != b:
            t = transition(a, b, variant)
            prod *= t / abs(t)
    return prod


# ---------------------------------------------------------------------------
# mass terms: per-step chirality choices and charge-conjugation strings


def dirac_path_amplitude(path: Sequence[int], chiralities: Sequence, mass: float,
                         epsilon: float = 1.0) -> np.ndarray:
    """Matrix amplitude of a Dirac path with a chirality label per slice.

    ``chiralities`` has len(path) + 1 entries: the source component, then the
    component after each step. A step into chirality c applies c's projector;
    a change of chirality across a step costs i * epsilon * m.
    """
    chir = [Chirality.parse(c) for c in chiralities]
    if len(chir) != len(path) + 1:
        raise ValueError("need one chirality per time slice")
    g = 1j * epsilon * mass
    M = IDENTITY.copy()
    for k, i in enumerate(path):
        M = chiral_projector(i, chir[k + 1]) @ M
        if chir[k + 1] is not chir[k]:
            M = g * M
    return 0.5 ** len(path) * M


def chirality_sequences(n_steps: int, final=None):
    """All source-plus-step chirality labellings, optionally with a fixed final one."""
    for seq in itertools.product((Chirality.RIGHT, Chirality.LEFT), repeat=n_steps + 1):
        if final is None or seq[-1] is Chirality.parse(final):
            yield seq


def apply_string(tokens: Sequence, psi) -> np.ndarray:
    """Apply an operator string right to left.

    Tokens are ("P", i), ("Pbar", i), ("C",) or ("s", complex scalar); the
    rightmost token acts first and C acts antilinearly.
    """
    v = np.asarray(psi, dtype=complex)
    for tok in reversed(tokens):
        kind = tok[0]
        if kind == "P":
            v = chiral_projector(tok[1], Chirality.RIGHT) @ v
        elif kind == "Pbar":
            v = chiral_projector(tok[1], Chirality.LEFT) @ v
        elif kind == "C":
            v = charge_conjugate(v)
        elif kind == "s":
            v = tok[1] * v
        else:
            raise ValueError(f"unknown token {tok!r}")
    return v


@dataclass(frozen=True)
class ReducedString:
    """coefficient * [C] * (product of P / Pbar), all C's moved to the left."""

    coefficient: complex
    projectors: tuple
    leading_c: bool

    def apply(self, psi) -> np.ndarray:
        tokens = (("C",),) if self.leading_c else ()
        return self.coefficient * apply_string(tokens + self.projectors, psi)


def reduce_conjugation_string(tokens: Sequence, antilinear_scalars: bool = True) -> ReducedString:
    """Move every C to the left using C P = Pbar C and C^2 = -1.

    A projector is barred once per C originally to its right. With
    ``antilinear_scalars`` each scalar is also conjugated once per C to its
    left, as the antilinear action requires; without it scalars are pulled
    out untouched (purely formal bookkeeping).
    """
    n_c = sum(1 for t in tokens if t[0] == "C")
    coeff = complex(1.0)
    projectors = []
    c_left = 0
    for tok in tokens:
        kind = tok[0]
        c_right = n_c - c_left - (1 if kind == "C" else 0)
        if kind == "C":
            c_left += 1
        elif kind == "s":
            s = complex(tok[1])
            coeff *= np.conj(s) if antilinear_scalars and c_left % 2 else s
        else:
            barred = (kind == "Pbar") != (c_right % 2 == 1)
            projectors.append(("Pbar" if barred else "P", tok[1]))
    coeff *= (-1) ** (n_c // 2)
    return ReducedString(coeff, tuple(projectors), n_c % 2 == 1)


def majorana_path_tokens(path: Sequence[int], insertions: Sequence[int], mass: float,
                         epsilon: float = 1.0, variant="conjugate_then_propagate") -> list:
    """Token string of one Majorana path with conjugations at the given steps.

    ``insertions`` are 0-based step indices. The 1/2 step weights are left out.
    """
    g = 1j * epsilon * mass
    tokens = []
    for k, i in enumerate(path):
        step = [("P", i)]
        if k in insertions:
            if variant == "conjugate_then_propagate":
                step = [("P", i), ("s", g), ("C",)]
            else:
                step = [("s", g), ("C",), ("P", i)]
        tokens = step + tokens
    return tokens


def dirac_expansion(n_steps: int, r_spinor, l_spinor, mass: float, epsilon: float = 1.0,
                    cap: int = DEFAULT_CAP):
    """R and L slices after n steps from a delta source, by explicit path sums.

    Every direction path is combined with every per-slice chirality labelling.
    """
    src = {Chirality.RIGHT: np.asarray(r_spinor, dtype=complex),
           Chirality.LEFT: np.asarray(l_spinor, dtype=complex)}
    out = {Chirality.RIGHT: {}, Chirality.LEFT: {}}
    for path in enumerate_paths(n_steps, cap=cap):
        d = displacement_of(path)
        for seq in chirality_sequences(n_steps):
            v = dirac_path_amplitude(path, seq, mass, epsilon) @ src[seq[0]]
            bucket = out[seq[-1]]
            bucket[d] = bucket.get(d, 0) + v
    return out[Chirality.RIGHT], out[Chirality.LEFT]


def majorana_expansion(n_steps: int, spinor, mass: float, epsilon: float = 1.0,
                       variant="conjugate_then_propagate", cap: int = DEFAULT_CAP,
                       max_insertions: int | None = None) -> dict:
    """Majorana slice after n steps from a delta source, by explicit C insertions.

    Each (path, insertion set) term is reduced with the C-moving rules before
    it is applied, so agreement with the step rule checks those rules too.
    """
    psi = np.asarray(spinor, dtype=complex)
    weight = 0.5 ** n_steps
    out = {}
    for path in enumerate_paths(n_steps, cap=cap):
        d = displacement_of(path)
        for k in range(n_steps + 1):
            if max_insertions is not None and k > max_insertions:
                break
            for ins in itertools.combinations(range(n_steps), k):
                red = reduce_conjugation_string(
                    majorana_path_tokens(path, ins, mass, epsilon, variant))
                out[d] = out.get(d, 0) + weight * red.apply(psi)
    return out
