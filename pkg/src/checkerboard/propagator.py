"""The lattice retarded propagator by three independent routes.

* ``kernel_dp``: evolve a matrix-valued delta source t steps.
* ``kernel_pathsum``: brute-force sum of projector products over orderings.
* ``kernel_fourier``: exact DFT extraction of the Fourier coefficient of
  A(theta)^N, a trigonometric polynomial with modes 0..N in each angle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AliasingError
from .evolution import SliceField, step_weyl
from .geometry import Mode, volume_per_point
from .paths import DEFAULT_CAP, amplitude_matrix, enumerate_paths
from .spectral import amplification, dispersion, grid_values
from .spin import IDENTITY, Chirality


@dataclass
class KernelTable:
    time_step: int
    entries: dict                     # counts -> (2, 2) complex
    chirality: Chirality = Chirality.RIGHT

    def get(self, counts) -> np.ndarray:
        return self.entries.get(tuple(counts), np.zeros((2, 2), dtype=complex))

    def total(self) -> np.ndarray:
        return sum(self.entries.values(), np.zeros((2, 2), dtype=complex))

    def to_json(self) -> dict:
        rows = []
        for key in sorted(self.entries):
            m = self.entries[key]
            rows.append({"counts": list(key),
                         "matrix": [[float(z.real), float(z.imag)] for z in m.reshape(-1)]})
        return {"t": self.time_step, "chirality": self.chirality.value, "entries": rows}


def kernel_dp(t: int, chirality=Chirality.RIGHT, mode=Mode.FOUR_D) -> KernelTable:
    if t < 0:
        raise ValueError("time step must be non-negative")
    mode = Mode.parse(mode)
    f = SliceField(0, {(0,) * mode.ndir: IDENTITY.copy()}, chirality, mode)
    for _ in range(t):
        f = step_weyl(f)
    return KernelTable(t, f.values, f.chirality)


def kernel_pathsum(displacement, chirality=Chirality.RIGHT, cap: int = DEFAULT_CAP) -> np.ndarray:
    counts = tuple(int(c) for c in displacement)
    if min(counts) < 0:
        return np.zeros((2, 2), dtype=complex)
    total = np.zeros((2, 2), dtype=complex)
    for path in enumerate_paths(displacement=counts, cap=cap):
        total = total + amplitude_matrix(path, chirality)
    return total


def _fourier_coefficients(n_steps: int, grid: int, chirality) -> np.ndarray:
    g = grid_values(grid) + np.pi  # [0, 2 pi): the DFT phase convention
    theta = np.stack(np.meshgrid(g, g, g, g, indexing="ij"), axis=-1)
    A = amplification(theta, chirality=chirality)
    power = np.broadcast_to(IDENTITY, A.shape).copy()
    for _ in range(n_steps):
        power = power @ A
    # samples f(m) = sum_d c_d exp(2 pi i m.d / M), so fftn gives M^4 c_d
    return np.fft.fftn(power, axes=(0, 1, 2, 3)) / grid**4


def kernel_fourier(displacement, n_steps: int | None = None, grid: int | None = None,
                   chirality=Chirality.RIGHT) -> np.ndarray:
    """Coefficient of exp(i theta . d) in A(theta)^N.

    N defaults to the displacement's step total and the grid to the
    exactness bound N + 1.
    """
    counts = tuple(int(c) for c in displacement)
    if n_steps is None:
        n_steps = sum(max(c, 0) for c in counts)
    if grid is None:
        grid = n_steps + 1
    if grid < n_steps + 1:
        raise AliasingError(f"grid of {grid} per angle aliases modes of A^{n_steps}; need >= {n_steps + 1}")
    if min(counts) < 0 or max(counts) > n_steps:
        return np.zeros((2, 2), dtype=complex)
    return _fourier_coefficients(n_steps, grid, chirality)[counts]


def kernel_fourier_table(t: int, grid: int | None = None, chirality=Chirality.RIGHT) -> KernelTable:
    grid = t + 1 if grid is None else grid
    if grid < t + 1:
        raise AliasingError(f"grid of {grid} per angle aliases modes of A^{t}; need >= {t + 1}")
    coeffs = _fourier_coefficients(t, grid, chirality)
    entries = {}
    for counts in np.ndindex(*(t + 1,) * 4):
        if sum(counts) == t:
            entries[counts] = coeffs[counts]
    return KernelTable(t, entries, Chirality.parse(chirality))


def kernel_pathsum_table(t: int, chirality=Chirality.RIGHT, cap: int = DEFAULT_CAP) -> KernelTable:
    entries = {}
    for counts in np.ndindex(*(t + 1,) * 4):
        if sum(counts) == t:
            entries[counts] = kernel_pathsum(counts, chirality, cap)
    return KernelTable(t, entries, Chirality.parse(chirality))


def frobenius_mass(table: KernelTable) -> float:
    """Sum over displacements of ||K_t[d]||_F^2.

    By Parseval this is the mean of ||A(theta)^t||_F^2 over the torus, so
    ||A|| <= 1 makes it non-increasing in t. The sum of operator norms is
    not monotone (it grows from 1 at t = 0).
    """
    return float(sum(np.sum(np.abs(m) ** 2) for m in table.entries.values()))


def operator_norm_mass(table: KernelTable) -> float:
    return float(sum(np.linalg.norm(m, 2) for m in table.entries.values()))


def max_deviation(a: KernelTable, b: KernelTable) -> float:
    keys = set(a.entries) | set(b.entries)
    return max((float(np.max(np.abs(a.get(k) - b.get(k)))) for k in keys), default=0.0)


@dataclass(frozen=True)
class TripleCheck:
    t: int
    dp_vs_pathsum: float
    dp_vs_fourier: float
    pathsum_vs_fourier: float

    @property
    def worst(self) -> float:
        return max(self.dp_vs_pathsum, self.dp_vs_fourier, self.pathsum_vs_fourier)


def triple_equivalence(t: int, chirality=Chirality.RIGHT, grid: int | None = None) -> TripleCheck:
    dp = kernel_dp(t, chirality)
    ps = kernel_pathsum_table(t, chirality)
    ft = kernel_fourier_table(t, grid, chirality)
    return TripleCheck(t, max_deviation(dp, ps), max_deviation(dp, ft), max_deviation(ps, ft))


def continuum_prefactor(epsilon: float) -> float:
    """48 sqrt(3) eps^3 left in front of the continuum kernel."""
    return 48.0 * math.sqrt(3.0) * epsilon**3


def prefactor_identity_residual(epsilon: float) -> float:
    """|48 sqrt(3) eps^3 - V_p(3 eps)| relative to V_p."""
    vp = volume_per_point(3.0 * epsilon)
    return abs(continuum_prefactor(epsilon) - vp) / vp


@dataclass
class ConvergenceReport:
    k: tuple
    epsilons: list
    deviations: list
    negative_branch_deviations: list
    orders: list          # local order between consecutive epsilons
    fitted_order: float   # least-squares slope of log deviation vs log epsilon

    @property
    def monotone(self) -> bool:
        return all(b < a for a, b in zip(self.deviations, self.deviations[1:]))

    def rows(self):
        for eps, dev, order in zip(self.epsilons, self.deviations, [math.nan] + self.orders):
            yield {"epsilon": eps, "deviation": dev, "fitted_order": order}


def continuum_convergence_study(k_spatial, epsilons) -> ConvergenceReport:
    """Compare the lattice eigenphase frequency with omega = +-|k| as eps shrinks.

    The propagating branch is the one whose Re omega approaches +|k|; the
    other branch's deviation from -|k| is reported alongside.
    """
    eps = [float(e) for e in epsilons]
    if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("epsilon sequence must be positive and strictly decreasing")
    kmag = float(np.linalg.norm(k_spatial))
    pos, neg = [], []
    for e in eps:
        om = np.array(dispersion(k_spatial, e).omega)
        re = om.real
        pos.append(float(np.min(np.abs(re - kmag))))
        neg.append(float(np.min(np.abs(re + kmag))))
    orders, fitted = [], math.nan
    if kmag > 0 and len(eps) > 1:
        orders = [math.log(pos[j] / pos[j + 1]) / math.log(eps[j] / eps[j + 1])
                  if pos[j + 1] > 0 and pos[j] > 0 else math.nan for j in range(len(eps) - 1)]
        if all(p > 0 for p in pos):
            fitted = float(np.polyfit(np.log(eps), np.log(pos), 1)[0])
    return ConvergenceReport(tuple(map(float, k_spatial)), eps, pos, neg, orders, fitted)


def halving_sequence(epsilon0: float, halvings: int) -> list:
    return [epsilon0 / 2**j for j in range(halvings + 1)]
