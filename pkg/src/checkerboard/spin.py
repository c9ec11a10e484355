"""Two-component spinor algebra on the tetrahedral direction set.

Spinors are complex arrays of shape (2,), spin matrices complex arrays of
shape (2, 2). Charge conjugation is antilinear and is therefore only ever
applied as a function (conjugate, then multiply by i*sigma_2), never stored
as a matrix.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .geometry import Mode, check_direction, tetrad

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])
# i * sigma_2 is real, so C psi = I_SIGMA_Y @ conj(psi)
I_SIGMA_Y = 1j * SIGMA_Y

for _m in (IDENTITY, SIGMA_X, SIGMA_Y, SIGMA_Z, PAULI, I_SIGMA_Y):
    _m.flags.writeable = False


class Chirality(str, enum.Enum):
    RIGHT = "right"
    LEFT = "left"

    @classmethod
    def parse(cls, value) -> "Chirality":
        if isinstance(value, Chirality):
            return value
        text = str(value).strip().lower()
        if text in ("r", "right"):
            return cls.RIGHT
        if text in ("l", "left"):
            return cls.LEFT
        raise ValueError(f"unknown chirality {value!r}")

    @property
    def sign(self) -> int:
        return 1 if self is Chirality.RIGHT else -1

    def flipped(self) -> "Chirality":
        return Chirality.LEFT if self is Chirality.RIGHT else Chirality.RIGHT


class PhaseRule(str, enum.Enum):
    """Phase choices for the four tetrahedral eigenspinors.

    RULE_A puts phase pi/2 on the preferred spinor |4>, RULE_B uses zero
    phases everywhere.
    """

    RULE_A = "A"
    RULE_B = "B"


class PlanarRule(str, enum.Enum):
    """Phase choices for the three planar eigenspinors."""

    CHIRAL_PLUS = "chiral_plus"
    CHIRAL_MINUS = "chiral_minus"
    SYMMETRIC = "symmetric"


def parse_rule(value):
    if isinstance(value, (PhaseRule, PlanarRule)):
        return value
    text = str(value).strip()
    for enum_cls in (PhaseRule, PlanarRule):
        for member in enum_cls:
            if text in (member.value, member.name, member.name.lower()):
                return member
    if text.upper() in ("A", "B"):
        return PhaseRule(text.upper())
    raise ValueError(f"unknown phase rule {value!r}")


def sigma_dot(v) -> np.ndarray:
    """v . sigma for a real 3-vector v."""
    return np.tensordot(np.asarray(v, dtype=float), PAULI, axes=1)


def projector(i: int, mode: Mode | str = Mode.FOUR_D) -> np.ndarray:
    """P_i = (1 + n_i . sigma) / 2."""
    mode = Mode.parse(mode)
    n = tetrad(mode).vectors[check_direction(i, mode) - 1]
    return 0.5 * (IDENTITY + sigma_dot(n))


def anti_projector(i: int, mode: Mode | str = Mode.FOUR_D) -> np.ndarray:
    """The orthogonal projector (1 - n_i . sigma) / 2."""
    mode = Mode.parse(mode)
    n = tetrad(mode).vectors[check_direction(i, mode) - 1]
    return 0.5 * (IDENTITY - sigma_dot(n))


def chiral_projector(i: int, chirality=Chirality.RIGHT, mode=Mode.FOUR_D) -> np.ndarray:
    if Chirality.parse(chirality) is Chirality.RIGHT:
        return projector(i, mode)
    return anti_projector(i, mode)


def projector_stack(chirality=Chirality.RIGHT, mode=Mode.FOUR_D) -> np.ndarray:
    """All chiral projectors stacked, shape (ndir, 2, 2)."""
    mode = Mode.parse(mode)
    return np.stack([chiral_projector(i, chirality, mode) for i in range(1, mode.ndir + 1)])


def weighted_projector(i: int, alpha: float, mode=Mode.FOUR_D, chirality=Chirality.RIGHT) -> np.ndarray:
    """(1 + s (d/alpha) n_i . sigma) / 2, with d the spatial dimension.

    At the marginal step speed (alpha = d) this is the plain projector.
    """
    mode = Mode.parse(mode)
    n = tetrad(mode).vectors[check_direction(i, mode) - 1]
    s = Chirality.parse(chirality).sign
    return 0.5 * (IDENTITY + s * (mode.spatial_dim / alpha) * sigma_dot(n))


def sigma_identity_residual(alpha: float | None = None, mode: Mode | str = Mode.FOUR_D) -> float:
    """Max entry residual of sigma^mu = w * sum_i W_i N_i^mu, mu = 0..d.

    w is the per-step weight (1/2 in 4D, 2/3 in 2+1) and W_i the weighted
    projector for step speed ``alpha``.
    """
    from .geometry import step_vectors

    mode = Mode.parse(mode)
    if alpha is None:
        alpha = mode.default_alpha
    if not alpha > 0:
        raise ValueError(f"step speed alpha must be positive, got {alpha}")
    N = step_vectors(alpha, mode).vectors
    sigma_mu = [IDENTITY] + [PAULI[a] for a in range(mode.spatial_dim)]
    worst = 0.0
    for mu, target in enumerate(sigma_mu):
        total = sum(weighted_projector(i + 1, alpha, mode) * N[i, mu] for i in range(mode.ndir))
        worst = max(worst, float(np.max(np.abs(mode.step_weight * total - target))))
    return worst


def charge_conjugate(psi) -> np.ndarray:
    """C psi = i sigma_2 psi*; acts on the leading axis of psi."""
    return np.tensordot(I_SIGMA_Y, np.conj(np.asarray(psi, dtype=complex)), axes=1)


def conjugation_relations_residual(mode: Mode | str = Mode.FOUR_D) -> float:
    """Max residual of C^2 = -1, C P_i = Pbar_i C and P_i C = C Pbar_i.

    C is antilinear, so the relations are checked on the real basis
    {e0, e1, i e0, i e1} of C^2, which determines a real-linear map.
    """
    mode = Mode.parse(mode)
    basis = [np.array(v, dtype=complex) for v in ([1, 0], [0, 1], [1j, 0], [0, 1j])]
    worst = 0.0
    for psi in basis:
        worst = max(worst, float(np.max(np.abs(charge_conjugate(charge_conjugate(psi)) + psi))))
        for i in range(1, mode.ndir + 1):
            P, Pb = projector(i, mode), anti_projector(i, mode)
            lhs = charge_conjugate(P @ psi)
            worst = max(worst, float(np.max(np.abs(lhs - Pb @ charge_conjugate(psi)))))
            lhs = P @ charge_conjugate(psi)
            worst = max(worst, float(np.max(np.abs(lhs - charge_conjugate(Pb @ psi)))))
    return worst


_OMEGA = np.exp(2j * np.pi / 3)


def _right_eigenspinor(i: int, rule) -> np.ndarray:
    if isinstance(rule, PhaseRule):
        check_direction(i, Mode.FOUR_D)
        if i == 4:
            phase = 1j if rule is PhaseRule.RULE_A else 1.0
            return np.array([phase, 0.0], dtype=complex)
        azimuth = _OMEGA ** (i - 1)
        return np.array([1.0, math.sqrt(2.0) * azimuth], dtype=complex) / math.sqrt(3.0)
    check_direction(i, Mode.PLANAR)
    q = (1.0, _OMEGA, np.conj(_OMEGA))[i - 1]
    if rule is PlanarRule.CHIRAL_PLUS:
        v = (1.0, q)
    elif rule is PlanarRule.CHIRAL_MINUS:
        v = (np.conj(q), 1.0)
    else:
        v = (q, np.conj(q))
    return np.array(v, dtype=complex) / math.sqrt(2.0)


def eigenspinor(i: int, rule=PhaseRule.RULE_B, chirality=Chirality.RIGHT) -> np.ndarray:
    """Unit eigenspinor of the chiral projector for direction ``i``.

    A PlanarRule selects the 2+1 spinors. Left-handed spinors are the charge
    conjugates of the right-handed ones.
    """
    rule = parse_rule(rule)
    psi = _right_eigenspinor(i, rule)
    if Chirality.parse(chirality) is Chirality.LEFT:
        psi = charge_conjugate(psi)
    return psi


def mode_of_rule(rule) -> Mode:
    return Mode.PLANAR if isinstance(parse_rule(rule), PlanarRule) else Mode.FOUR_D


def transition(frm: int, to: int, rule=PhaseRule.RULE_B, chirality=Chirality.RIGHT) -> complex:
    """Spin transition amplitude <to|from>."""
    return complex(np.vdot(eigenspinor(to, rule, chirality), eigenspinor(frm, rule, chirality)))


def transition_table(rule=PhaseRule.RULE_B, chirality=Chirality.RIGHT) -> np.ndarray:
    """table[a, b] = <b+1|a+1>, i.e. row = from, column = to."""
    n = mode_of_rule(rule).ndir
    return np.array([[transition(a, b, rule, chirality) for b in range(1, n + 1)]
                     for a in range(1, n + 1)])


@dataclass(frozen=True)
class PhaseCertificate:
    exponent_coefficients: tuple
    product: complex
    required: complex
    consistent: bool
    numeric_spot_check: float


def phase_impossibility_certificate(seed: int = 0) -> PhaseCertificate:
    """Why no choice of delta_1..3 swaps the right- and left-handed bend rules.

    The rules would swap only if each of e^{i(d1-d2)}, e^{i(d2-d3)},
    e^{i(d3-d1)} equalled -1, but their product is identically 1 while the
    product of three -1's is -1.
    """
    factors = ((1, -1, 0), (0, 1, -1), (-1, 0, 1))
    total = tuple(sum(col) for col in zip(*factors))
    # all-zero exponent coefficients: the product is 1 for every delta
    product = 1.0 + 0j if all(c == 0 for c in total) else complex("nan")
    deltas = np.random.default_rng(seed).uniform(-np.pi, np.pi, size=(100, 3))
    numeric = np.prod([np.exp(1j * deltas @ np.array(f)) for f in factors], axis=0)
    required = (-1.0 + 0j) ** 3
    return PhaseCertificate(
        exponent_coefficients=total,
        product=product,
        required=required,
        consistent=bool(abs(product - required) < 1e-12),
        numeric_spot_check=float(np.max(np.abs(numeric - product))),
    )
