"""Spectral theory of the one-step amplification matrix.

A(theta) = w * sum_j W_j exp(i theta_j) is the Fourier symbol of one
evolution step. Its eigenvalues are exp(-i omega epsilon); they lie in the
closed unit disk for step speed alpha >= 3 and reach the unit circle only
when at least three of the angles coincide.

All functions accept batched angle arrays of shape (..., ndir).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Mode, tetrad
from .spin import Chirality, IDENTITY, weighted_projector

# eigenvalue splitting |l1 - l2| below which a 2x2 matrix counts as degenerate
DEFECT_TOL = 1e-12
UNIT_TOL = 1e-10
COINCIDE_TOL = 1e-9
MAX_SCAN_POINTS = 10**8

PAIRS = tuple(itertools.combinations(range(4), 2))
PAIR_PARTITIONS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


def wrap_angle(x):
    """Map angles into [-pi, pi)."""
    return np.mod(np.asarray(x, dtype=float) + np.pi, 2 * np.pi) - np.pi


def constrained_theta(t1, t2, t3):
    """Complete three angles to a quadruple summing to 0 mod 2 pi."""
    t1, t2, t3 = np.broadcast_arrays(*(np.asarray(t, dtype=float) for t in (t1, t2, t3)))
    return np.stack([t1, t2, t3, wrap_angle(-(t1 + t2 + t3))], axis=-1)


def _weights(alpha, mode, chirality):
    mode = Mode.parse(mode)
    return np.stack([weighted_projector(i, alpha, mode, chirality) for i in range(1, mode.ndir + 1)])


def amplification(theta, alpha: float | None = None, mode=Mode.FOUR_D,
                  chirality=Chirality.RIGHT) -> np.ndarray:
    mode = Mode.parse(mode)
    if alpha is None:
        alpha = mode.default_alpha
    theta = np.asarray(theta, dtype=float)
    if theta.shape[-1] != mode.ndir:
        raise ValueError(f"expected {mode.ndir} angles, got shape {theta.shape}")
    W = _weights(alpha, mode, chirality)
    return mode.step_weight * np.einsum("...j,jab->...ab", np.exp(1j * theta), W)


def _order(l1, l2):
    """Larger modulus first; near-ties broken by real part, then imaginary part."""
    m1, m2 = np.abs(l1), np.abs(l2)
    tie = np.abs(m1 - m2) <= 1e-12 * np.maximum(1.0, np.maximum(m1, m2))
    re_tie = np.abs(l1.real - l2.real) <= 1e-12
    swap = np.where(
        tie,
        np.where(re_tie, l2.imag > l1.imag, l2.real > l1.real),
        m2 > m1,
    )
    return np.where(swap, l2, l1), np.where(swap, l1, l2)


def _discriminant(A):
    # (a - d)^2 + 4bc equals tr^2 - 4 det without the cancellation near
    # repeated eigenvalues
    return (A[..., 0, 0] - A[..., 1, 1]) ** 2 + 4 * A[..., 0, 1] * A[..., 1, 0]


def eigvals_batch(A) -> np.ndarray:
    """Closed-form eigenvalues of 2x2 matrices, shape (..., 2), ordered."""
    A = np.asarray(A, dtype=complex)
    tr = A[..., 0, 0] + A[..., 1, 1]
    det = A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]
    root = np.sqrt(_discriminant(A))
    lp, lm = (tr + root) / 2, (tr - root) / 2
    big = np.where(np.abs(lp) >= np.abs(lm), lp, lm)
    # the smaller root via det / big avoids cancellation
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.where(big != 0, det / np.where(big != 0, big, 1), 0)
    l1, l2 = _order(big, small)
    return np.stack([l1, l2], axis=-1)


@dataclass(frozen=True)
class EigenPair:
    lambda1: complex
    lambda2: complex
    v1: np.ndarray
    v2: np.ndarray | None
    degenerate: bool = False

    @property
    def eigenvalues(self):
        return (self.lambda1, self.lambda2)

    def residual(self, A) -> float:
        A = np.asarray(A)
        res = np.linalg.norm(A @ self.v1 - self.lambda1 * self.v1)
        if self.v2 is not None:
            res = max(res, np.linalg.norm(A @ self.v2 - self.lambda2 * self.v2))
        return float(res)


def _null_vector(M, scale):
    a, b = M[0]
    c, d = M[1]
    r1 = np.array([b, -a])
    r2 = np.array([d, -c])
    v = r1 if np.linalg.norm(r1) >= np.linalg.norm(r2) else r2
    if np.linalg.norm(v) <= 1e-13 * scale:
        return None
    return v / np.linalg.norm(v)


def eigenvalues(A) -> EigenPair:
    """Eigenvalues and unit eigenvectors of a single 2x2 matrix.

    A defective matrix (repeated eigenvalue, one eigenvector) comes back with
    ``degenerate=True`` and ``v2=None``.
    """
    A = np.asarray(A, dtype=complex)
    l1, l2 = (complex(x) for x in eigvals_batch(A))
    tr = A[0, 0] + A[1, 1]
    scale = max(1.0, float(np.max(np.abs(A))))
    e0 = np.array([1, 0], dtype=complex)
    e1 = np.array([0, 1], dtype=complex)
    if math.sqrt(abs(_discriminant(A))) <= DEFECT_TOL * scale:
        lam = tr / 2
        v = _null_vector(A - lam * IDENTITY, scale)
        if v is None:  # scalar matrix
            return EigenPair(lam, lam, e0, e1, degenerate=False)
        return EigenPair(lam, lam, v, None, degenerate=True)
    v1 = _null_vector(A - l1 * IDENTITY, scale)
    v2 = _null_vector(A - l2 * IDENTITY, scale)
    return EigenPair(l1, l2, v1 if v1 is not None else e0, v2 if v2 is not None else e1)


def operator_norm(A) -> np.ndarray:
    """Largest singular value, sqrt of the top eigenvalue of A^dagger A."""
    A = np.asarray(A, dtype=complex)
    H = np.conj(np.swapaxes(A, -1, -2)) @ A
    tr = (H[..., 0, 0] + H[..., 1, 1]).real
    det = (H[..., 0, 0] * H[..., 1, 1] - H[..., 0, 1] * H[..., 1, 0]).real
    top = 0.5 * (tr + np.sqrt(np.maximum(tr * tr - 4 * det, 0.0)))
    return np.sqrt(top)


def phi(theta) -> np.ndarray:
    """det(A^dagger A - 1) from the pair-partition closed form."""
    theta = np.asarray(theta, dtype=float)
    total = 0.0
    for (i, j), (k, l) in PAIR_PARTITIONS:
        total = total + (1 - np.cos(theta[..., i] - theta[..., j])) * (
            1 - np.cos(theta[..., k] - theta[..., l]))
    return total / 18.0


def phi_direct(theta) -> np.ndarray:
    A = amplification(theta)
    M = np.conj(np.swapaxes(A, -1, -2)) @ A - IDENTITY
    return (M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]).real


def trace_AdagA(theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    s = sum(np.cos(theta[..., i] - theta[..., j]) for i, j in PAIRS)
    return 1.0 + s / 6.0


def three_coincide(theta, tol: float = COINCIDE_TOL) -> np.ndarray:
    """True where at least three angles agree mod 2 pi within ``tol``."""
    theta = np.asarray(theta, dtype=float)
    n = theta.shape[-1]
    out = np.zeros(theta.shape[:-1], dtype=bool)
    for a, b, c in itertools.combinations(range(n), 3):
        ab = np.abs(wrap_angle(theta[..., a] - theta[..., b])) <= tol
        bc = np.abs(wrap_angle(theta[..., b] - theta[..., c])) <= tol
        ac = np.abs(wrap_angle(theta[..., a] - theta[..., c])) <= tol
        out |= ab & bc & ac
    return out


def grid_values(M: int) -> np.ndarray:
    """M equally spaced angles in [-pi, pi)."""
    return -np.pi + 2 * np.pi * np.arange(M) / M


def excluded_indices(M: int, width: int) -> np.ndarray:
    """Indices of ``width`` grid values centred on angle 0."""
    if width <= 0:
        return np.array([], dtype=int)
    center = int(np.argmin(np.abs(grid_values(M))))
    start = center - width // 2
    return np.arange(start, start + width) % M


@dataclass
class ScanResult:
    theta: np.ndarray          # (npoints, 4)
    eigenvalues: np.ndarray    # (npoints, 2), ordered per point
    grid: int
    constrained: bool
    alpha: float
    index: np.ndarray = field(repr=False, default=None)  # (npoints, 3 or 4) grid indices

    @property
    def points(self) -> np.ndarray:
        return self.eigenvalues.reshape(-1)

    def max_modulus(self):
        mod = np.abs(self.eigenvalues)
        flat = int(np.argmax(mod))
        return float(mod.reshape(-1)[flat]), self.theta[flat // 2]


def spectrum_scan(M: int, constrained: bool = True, exclude_center: int = 0,
                  alpha: float = 3.0) -> ScanResult:
    """Eigenvalues of A(theta) over a regular angle grid.

    Constrained scans sweep theta_1..3 over M values each and set
    theta_4 = -(theta_1 + theta_2 + theta_3) wrapped into [-pi, pi).
    ``exclude_center`` drops that many theta_1 values centred on zero.
    """
    if M < 2:
        raise ValueError(f"grid needs at least 2 points per angle, got {M}")
    npts = M**3 if constrained else M**4
    if npts > MAX_SCAN_POINTS:
        raise ValueError(f"scan of {npts} grid points exceeds the {MAX_SCAN_POINTS} point guard")
    g = grid_values(M)
    keep1 = np.setdiff1d(np.arange(M), excluded_indices(M, exclude_center))
    axes = [keep1] + [np.arange(M)] * (2 if constrained else 3)
    idx = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))
    if constrained:
        theta = constrained_theta(g[idx[:, 0]], g[idx[:, 1]], g[idx[:, 2]])
    else:
        theta = g[idx]
    ev = eigvals_batch(amplification(theta, alpha))
    return ScanResult(theta, ev, M, constrained, float(alpha), idx)


def write_scan_csv(scan: ScanResult, fh) -> None:
    n = len(scan.theta)
    rows = np.empty((2 * n, 7))
    rows[:, 0:4] = np.repeat(scan.theta, 2, axis=0)
    pts = scan.eigenvalues.reshape(-1)
    rows[:, 4] = pts.real
    rows[:, 5] = pts.imag
    rows[:, 6] = np.tile([0, 1], n)
    fh.write("theta1,theta2,theta3,theta4,re_lambda,im_lambda,branch_index\n")
    np.savetxt(fh, rows, fmt=["%.17g"] * 6 + ["%d"], delimiter=",")


@dataclass(frozen=True)
class GapResult:
    value: float
    theta: tuple
    grid: int


def real_axis_gap(M: int = 40, alpha: float = 3.0, scan: ScanResult | None = None) -> GapResult:
    """Largest real eigenvalue strictly inside the unit disk over a scan."""
    if scan is None:
        scan = spectrum_scan(M, constrained=True, alpha=alpha)
    ev = scan.eigenvalues
    mask = (np.abs(ev.imag) < 1e-9) & (np.abs(ev) < 1 - 1e-9)
    vals = np.where(mask, ev.real, -np.inf)
    flat = int(np.argmax(vals))
    return GapResult(float(vals.reshape(-1)[flat]), tuple(scan.theta[flat // 2].tolist()), scan.grid)


def refine_real_axis_gap(seed=(0.0, 0.0, np.pi), alpha: float = 3.0) -> GapResult:
    """Maximise the real eigenvalue on the real-spectrum surface near ``seed``.

    ``seed`` holds theta_1..3; theta_4 follows from the sum constraint.
    """
    from scipy.optimize import minimize

    def top_real(x):
        ev = eigvals_batch(amplification(constrained_theta(*x), alpha))
        return ev[int(np.argmax(ev.real))]

    res = minimize(
        lambda x: -top_real(x).real,
        np.asarray(seed, dtype=float),
        method="SLSQP",
        constraints=[{"type": "eq", "fun": lambda x: top_real(x).imag}],
        options={"ftol": 1e-15, "maxiter": 500},
    )
    lam = top_real(res.x)
    return GapResult(float(lam.real), tuple(constrained_theta(*res.x).tolist()), 0)


@dataclass(frozen=True)
class NormProbe:
    alpha: float
    grid: int
    max_modulus: float
    argmax_theta: tuple
    violated: bool


def norm_bound_probe(alpha: float, M: int = 40) -> NormProbe:
    """Maximum eigenvalue modulus of A(theta; alpha) over the constrained grid."""
    if not alpha > 0:
        raise ValueError(f"step speed alpha must be positive, got {alpha}")
    if M < 20:
        raise ValueError(f"norm probe needs a grid of at least 20 points, got {M}")
    scan = spectrum_scan(M, constrained=True, alpha=alpha)
    top, theta = scan.max_modulus()
    return NormProbe(float(alpha), M, top, tuple(theta.tolist()), top > 1 + 1e-9)


def lattice_angles(k_spatial, epsilon: float, alpha: float = 3.0, mode=Mode.FOUR_D) -> np.ndarray:
    """theta_j = epsilon * k . (alpha n_j), the spatial part of epsilon k_mu N_j^mu."""
    mode = Mode.parse(mode)
    k = np.asarray(k_spatial, dtype=float)
    n = tetrad(mode).spatial
    return epsilon * alpha * (n @ k)


def frequencies(eigs, epsilon: float) -> np.ndarray:
    """omega = (i / epsilon) Ln(lambda) on the principal branch.

    Re omega lies in (-pi/eps, pi/eps]; lambda = 0 maps to -inf imaginary part.
    """
    eigs = np.asarray(eigs, dtype=complex)
    re = -np.angle(eigs)
    re = np.where(re <= -np.pi, re + 2 * np.pi, re)
    with np.errstate(divide="ignore"):
        im = np.log(np.abs(eigs))
    return (re + 1j * im) / epsilon


@dataclass(frozen=True)
class Dispersion:
    k: tuple
    epsilon: float
    theta: tuple
    eigenvalues: tuple
    omega: tuple
    real_frequency: tuple
    infinite_decay: tuple
    three_coincide: bool

    @property
    def consistent(self) -> bool:
        """A real-frequency branch exists exactly on the three-coincident set."""
        return any(self.real_frequency) == self.three_coincide


def dispersion(k_spatial, epsilon: float, alpha: float = 3.0) -> Dispersion:
    if not epsilon > 0:
        raise ValueError(f"time step must be positive, got {epsilon}")
    theta = lattice_angles(k_spatial, epsilon, alpha)
    ev = eigvals_batch(amplification(theta, alpha))
    om = frequencies(ev, epsilon)
    return Dispersion(
        k=tuple(float(x) for x in k_spatial),
        epsilon=float(epsilon),
        theta=tuple(theta.tolist()),
        eigenvalues=tuple(complex(x) for x in ev),
        omega=tuple(complex(x) for x in om),
        real_frequency=tuple(bool(abs(abs(x) - 1) <= UNIT_TOL) for x in ev),
        infinite_decay=tuple(bool(x == 0) for x in ev),
        three_coincide=bool(three_coincide(theta)),
    )
