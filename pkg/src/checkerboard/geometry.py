"""Geometry of the time-diagonal hypercubic lattice.

Sites are addressed by integer step counts ``(N^1, ..., N^d)``, one per
step direction; a site reached after ``t`` steps has counts summing to ``t``.
No spatial (fcc) coordinates are needed for evolution, only for embedding.

Directions are labelled 1..4 (1..3 in the planar 2+1 mode) throughout the
public API. Internally they index arrays from 0.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvariantViolation, NotOnLatticeError

Counts = tuple  # tuple[int, ...]; one non-negative step count per direction

CONSTRUCTOR_TOL = 1e-12
LATTICE_TOL = 1e-9


class Mode(str, enum.Enum):
    FOUR_D = "4d"
    PLANAR = "2+1"

    @classmethod
    def parse(cls, value) -> "Mode":
        if isinstance(value, Mode):
            return value
        text = str(value).strip().lower()
        if text in ("4d", "3+1", "4"):
            return cls.FOUR_D
        if text in ("2+1", "3d", "3", "planar"):
            return cls.PLANAR
        raise ValueError(f"unknown dimension mode {value!r}")

    @property
    def ndir(self) -> int:
        return 4 if self is Mode.FOUR_D else 3

    @property
    def spatial_dim(self) -> int:
        return self.ndir - 1

    @property
    def default_alpha(self) -> float:
        return 3.0 if self is Mode.FOUR_D else 2.0

    @property
    def step_weight(self) -> float:
        """Per-step weight w in Psi'(x) = w * sum_i Q_i Psi(x - step_i)."""
        return 2.0 / self.ndir


def check_direction(i: int, mode: Mode = Mode.FOUR_D) -> int:
    if not isinstance(i, (int, np.integer)) or not 1 <= i <= mode.ndir:
        raise ValueError(f"direction {i!r} out of range 1..{mode.ndir} for mode {mode.value}")
    return int(i)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Tetrad:
    """Unit spatial step directions.

    ``vectors`` always has three columns; planar directions carry z = 0 so
    the same Pauli algebra applies in both modes.
    """

    vectors: np.ndarray
    mode: Mode = Mode.FOUR_D

    @property
    def spatial(self) -> np.ndarray:
        return self.vectors[:, : self.mode.spatial_dim]

    def residuals(self) -> dict:
        v = self.vectors
        d = self.mode.spatial_dim
        pair = -1.0 / d
        gram = v @ v.T
        off = gram[~np.eye(len(v), dtype=bool)]
        basis = self.spatial.T @ self.spatial
        return {
            "unit_norm": float(np.max(np.abs(np.diag(gram) - 1.0))),
            "sum_zero": float(np.max(np.abs(v.sum(axis=0)))),
            "pair_dot": float(np.max(np.abs(off - pair))),
            "basis_sum": float(np.max(np.abs(basis - (len(v) / d) * np.eye(d)))),
        }

    def self_test(self, tol: float = CONSTRUCTOR_TOL) -> dict:
        res = self.residuals()
        for name, value in res.items():
            if value > tol:
                raise InvariantViolation(f"geometry.tetrad.{name}", f"residual {value:.3e}")
        return res


@functools.lru_cache(maxsize=None)
def tetrad(mode: Mode | str = Mode.FOUR_D) -> Tetrad:
    mode = Mode.parse(mode)
    if mode is Mode.FOUR_D:
        r2, r6 = math.sqrt(2.0), math.sqrt(6.0)
        vecs = [
            [2 * r2 / 3, 0.0, -1.0 / 3],
            [-r2 / 3, r6 / 3, -1.0 / 3],
            [-r2 / 3, -r6 / 3, -1.0 / 3],
            [0.0, 0.0, 1.0],
        ]
    else:
        h = math.sqrt(3.0) / 2
        vecs = [[1.0, 0.0, 0.0], [-0.5, h, 0.0], [-0.5, -h, 0.0]]
    t = Tetrad(_frozen(vecs), mode)
    t.self_test()
    return t


@dataclass(frozen=True)
class StepVectors:
    """Spacetime step vectors N_i = (1, alpha * n_i), one row per direction."""

    alpha: float
    vectors: np.ndarray
    mode: Mode = Mode.FOUR_D


def step_vectors(alpha: float | None = None, mode: Mode | str = Mode.FOUR_D) -> StepVectors:
    mode = Mode.parse(mode)
    if alpha is None:
        alpha = mode.default_alpha
    if not alpha > 0:
        raise ValueError(f"step speed alpha must be positive, got {alpha}")
    n = tetrad(mode).spatial
    vecs = np.hstack([np.ones((mode.ndir, 1)), alpha * n])
    return StepVectors(float(alpha), _frozen(vecs), mode)


def minkowski(u, v) -> float:
    """Inner product with signature (+, -, -, ...)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(u[0] * v[0] - np.dot(u[1:], v[1:]))


@dataclass(frozen=True)
class FaceNormal:
    face: tuple
    normal: np.ndarray
    norm2: float
    inner_products: tuple


def face_null_normal(face: Sequence[int], alpha: float | None = None,
                     mode: Mode | str = Mode.FOUR_D) -> FaceNormal:
    """Sum of the step vectors spanning a face of the step cone.

    The face is null exactly when this sum is a null vector Minkowski
    orthogonal to every vector spanning the face, which happens only at the
    marginal step speed (3 in 4D, 2 in 2+1).
    """
    mode = Mode.parse(mode)
    face = tuple(int(i) for i in face)
    if len(face) != mode.ndir - 1 or len(set(face)) != len(face):
        raise ValueError(f"a face needs {mode.ndir - 1} distinct directions, got {face}")
    for i in face:
        check_direction(i, mode)
    sv = step_vectors(alpha, mode)
    k = sum(sv.vectors[i - 1] for i in face)
    return FaceNormal(
        face=face,
        normal=_frozen(k),
        norm2=minkowski(k, k),
        inner_products=tuple(minkowski(k, sv.vectors[i - 1]) for i in face),
    )


def volume_per_point(a: float) -> float:
    """Spatial volume per fcc site for step length ``a``."""
    if not a > 0:
        raise ValueError(f"step length must be positive, got {a}")
    return 16.0 / (3.0 * math.sqrt(3.0)) * a**3


@dataclass(frozen=True)
class LatticeScales:
    epsilon: float
    alpha: float = 3.0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"time step must be positive, got {self.epsilon}")
        if not self.alpha > 0:
            raise ValueError(f"step speed must be positive, got {self.alpha}")

    @property
    def a(self) -> float:
        return self.alpha * self.epsilon

    @property
    def cube_edge(self) -> float:
        # a is half the diagonal of a constituent cube
        return 2.0 * self.a / math.sqrt(3.0)

    @property
    def vp(self) -> float:
        return volume_per_point(self.a)


def embed(counts: Sequence[int], epsilon: float = 1.0, alpha: float | None = None,
          mode: Mode | str = Mode.FOUR_D) -> np.ndarray:
    """Spacetime displacement epsilon * sum_j N^j N_j."""
    mode = Mode.parse(mode)
    counts = np.asarray(counts, dtype=float)
    if counts.shape != (mode.ndir,):
        raise ValueError(f"expected {mode.ndir} step counts, got shape {counts.shape}")
    return epsilon * counts @ step_vectors(alpha, mode).vectors


def invert(x, epsilon: float = 1.0, alpha: float | None = None,
           mode: Mode | str = Mode.FOUR_D, tol: float = LATTICE_TOL) -> Counts:
    """Recover integer step counts from a spacetime displacement."""
    mode = Mode.parse(mode)
    basis = step_vectors(alpha, mode).vectors
    coeffs = np.linalg.solve(basis.T, np.asarray(x, dtype=float) / epsilon)
    rounded = np.rint(coeffs)
    err = float(np.max(np.abs(coeffs - rounded)))
    if err > tol:
        raise NotOnLatticeError(
            f"displacement is off the lattice: step counts {coeffs.tolist()} "
            f"deviate from integers by {err:.3e}"
        )
    return tuple(int(c) for c in rounded)


def wavevector_to_lattice(k_mu, alpha: float = 3.0, mode: Mode | str = Mode.FOUR_D) -> np.ndarray:
    """Contract a wave covector with each step vector: k_j = k_mu N_j^mu."""
    return step_vectors(alpha, mode).vectors @ np.asarray(k_mu, dtype=float)


def jacobian(alpha: float = 3.0, mode: Mode | str = Mode.FOUR_D) -> float:
    """|d k_j / d k_mu|; equals 48 sqrt(3) for the 4D lattice at alpha = 3."""
    return float(abs(np.linalg.det(step_vectors(alpha, mode).vectors)))
