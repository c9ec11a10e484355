"""One-step lattice evolution of spinor fields.

Sparse slices map step counts to spinors; a step reads only slice t and
writes only slice t + 1, gathering the four predecessors of each output
site in fixed direction order. Values may also be 2x2 matrices, in which
case the same rule propagates a matrix-valued source (the kernel).

``PeriodicField`` is a dense wrapper on a torus used for plane-wave
measurements. Its sites are indexed by the first ndir - 1 step counts
modulo the period; the last count is implied by the time step.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvariantViolation
from .geometry import Mode, tetrad
from .spectral import amplification, eigenvalues, frequencies, lattice_angles
from .spin import Chirality, charge_conjugate, projector_stack


def _unit(i, n):
    e = [0] * n
    e[i] = 1
    return tuple(e)


@dataclass
class SliceField:
    time_step: int
    values: dict = field(default_factory=dict)
    chirality: Chirality = Chirality.RIGHT
    mode: Mode = Mode.FOUR_D

    def __post_init__(self):
        self.chirality = Chirality.parse(self.chirality)
        self.mode = Mode.parse(self.mode)
        for key in self.values:
            if len(key) != self.mode.ndir or min(key) < 0 or sum(key) != self.time_step:
                raise ValueError(f"site {key} is not a step count with sum {self.time_step}")

    def get(self, key):
        return self.values.get(key)

    def sites(self):
        return sorted(self.values)


def delta_source(spinor=(1, 0), chirality=Chirality.RIGHT, mode=Mode.FOUR_D) -> SliceField:
    mode = Mode.parse(mode)
    origin = (0,) * mode.ndir
    return SliceField(0, {origin: np.array(spinor, dtype=complex)}, chirality, mode)


def _gather(values: dict, ndir: int, ops, zero):
    """out[x] = sum_i ops[i](values[x - e_i]) over the forward fan-out of ``values``."""
    units = [_unit(i, ndir) for i in range(ndir)]
    targets = sorted({tuple(a + b for a, b in zip(key, e)) for key in values for e in units})
    out = {}
    for x in targets:
        acc = zero
        for i, e in enumerate(units):
            src = values.get(tuple(a - b for a, b in zip(x, e)))
            if src is not None:
                acc = acc + ops[i](src)
        out[x] = acc
    return out


def _zero_like(values: dict):
    for v in values.values():
        return np.zeros_like(v)
    return np.zeros(2, dtype=complex)


def step_weyl(f: SliceField) -> SliceField:
    """Psi'(x) = w * sum_i Q_i Psi(x - step_i), Q = P (right) or Pbar (left)."""
    Q = f.mode.step_weight * projector_stack(f.chirality, f.mode)
    ops = [lambda v, q=q: q @ v for q in Q]
    out = _gather(f.values, f.mode.ndir, ops, _zero_like(f.values))
    return SliceField(f.time_step + 1, out, f.chirality, f.mode)


def evolve_weyl(f: SliceField, steps: int):
    """Yield the slices f, step(f), ..., after ``steps`` steps."""
    yield f
    for _ in range(steps):
        f = step_weyl(f)
        yield f


@dataclass
class DiracSliceField:
    r_field: SliceField
    l_field: SliceField
    mass: float = 0.0
    epsilon: float = 1.0

    def __post_init__(self):
        if self.r_field.time_step != self.l_field.time_step:
            raise ValueError("R and L components must share a time step")
        if self.r_field.chirality is not Chirality.RIGHT or self.l_field.chirality is not Chirality.LEFT:
            raise ValueError("Dirac state needs a right-handed R and a left-handed L component")

    @property
    def time_step(self):
        return self.r_field.time_step


def dirac_source(r_spinor=(1, 0), l_spinor=(0, 0), mass=0.0, epsilon=1.0) -> DiracSliceField:
    return DiracSliceField(delta_source(r_spinor, Chirality.RIGHT),
                           delta_source(l_spinor, Chirality.LEFT), mass, epsilon)


def step_dirac(state: DiracSliceField) -> DiracSliceField:
    """Coupled step with chirality-flip amplitude i * epsilon * m.

    The mass term is evaluated at the pre-step site x - step_i.
    """
    r, l = state.r_field, state.l_field
    mode = r.mode
    g = 1j * state.epsilon * state.mass
    zero = _zero_like(r.values) if r.values else _zero_like(l.values)
    keys = set(r.values) | set(l.values)
    mixed_r = {k: r.values.get(k, zero) + g * l.values.get(k, zero) for k in keys}
    mixed_l = {k: l.values.get(k, zero) + g * r.values.get(k, zero) for k in keys}
    w = mode.step_weight
    P = w * projector_stack(Chirality.RIGHT, mode)
    Pb = w * projector_stack(Chirality.LEFT, mode)
    new_r = _gather(mixed_r, mode.ndir, [lambda v, q=q: q @ v for q in P], zero)
    new_l = _gather(mixed_l, mode.ndir, [lambda v, q=q: q @ v for q in Pb], zero)
    t = state.time_step + 1
    return DiracSliceField(SliceField(t, new_r, Chirality.RIGHT, mode),
                           SliceField(t, new_l, Chirality.LEFT, mode),
                           state.mass, state.epsilon)


class MajoranaVariant(str, enum.Enum):
    CONJUGATE_THEN_PROPAGATE = "conjugate_then_propagate"
    PROPAGATE_THEN_CONJUGATE = "propagate_then_conjugate"


@dataclass
class MajoranaSliceField:
    field: SliceField
    mass: float = 0.0
    epsilon: float = 1.0
    variant: MajoranaVariant = MajoranaVariant.CONJUGATE_THEN_PROPAGATE

    @property
    def time_step(self):
        return self.field.time_step


def step_majorana(state: MajoranaSliceField) -> MajoranaSliceField:
    """Step with amplitude i * epsilon * m to charge-conjugate.

    C acts antilinearly, so the result is only real-linear in the input.
    """
    f = state.field
    g = 1j * state.epsilon * state.mass
    Q = f.mode.step_weight * projector_stack(Chirality.RIGHT, f.mode)
    if state.variant is MajoranaVariant.CONJUGATE_THEN_PROPAGATE:
        ops = [lambda v, q=q: q @ (v + g * charge_conjugate(v)) for q in Q]
    else:
        ops = [lambda v, q=q: (q @ v) + g * charge_conjugate(q @ v) for q in Q]
    out = _gather(f.values, f.mode.ndir, ops, _zero_like(f.values))
    return replace(state, field=SliceField(f.time_step + 1, out, f.chirality, f.mode))


def norm2(f) -> float:
    """Squared norm summed over the support (both components for Dirac)."""
    if isinstance(f, DiracSliceField):
        return norm2(f.r_field) + norm2(f.l_field)
    if isinstance(f, MajoranaSliceField):
        return norm2(f.field)
    if isinstance(f, PeriodicField):
        return float(np.sum(np.abs(f.data) ** 2))
    # compensated sum keeps exact rational totals such as 1/2 exact
    return math.fsum(float(x) for v in f.values.values()
                     for x in (np.asarray(v).real ** 2 + np.asarray(v).imag ** 2).reshape(-1))


def overlap(f: SliceField, g: SliceField) -> complex:
    """<f|g> summed over common sites."""
    return complex(sum(np.vdot(f.values[k], g.values[k]) for k in set(f.values) & set(g.values)))


def field_to_json(f: SliceField) -> dict:
    sites = []
    for key in f.sites():
        v = np.asarray(f.values[key])
        if v.shape != (2,):
            raise ValueError("only spinor-valued fields serialise as snapshots")
        sites.append({"counts": list(key),
                      "spinor": [v[0].real, v[0].imag, v[1].real, v[1].imag]})
    return {"time_step": f.time_step, "chirality": f.chirality.value,
            "mode": f.mode.value, "sites": sites}


def field_from_json(obj: dict) -> SliceField:
    values = {}
    for site in obj["sites"]:
        a, b, c, d = site["spinor"]
        values[tuple(site["counts"])] = np.array([a + 1j * b, c + 1j * d])
    return SliceField(obj["time_step"], values, obj["chirality"], obj["mode"])


# ---------------------------------------------------------------------------
# periodic wrapper and plane waves


@dataclass
class PeriodicField:
    time_step: int
    data: np.ndarray            # shape (P,) * (ndir - 1) + (2,)
    chirality: Chirality = Chirality.RIGHT
    mode: Mode = Mode.FOUR_D

    @property
    def period(self) -> int:
        return self.data.shape[0]


def _periodic_apply(Q, data, ndir):
    # last direction leaves the first ndir - 1 counts unchanged
    out = np.einsum("ab,...b->...a", Q[-1], data)
    for i in range(ndir - 1):
        out = out + np.einsum("ab,...b->...a", Q[i], np.roll(data, 1, axis=i))
    return out


def periodic_step_weyl(f: PeriodicField) -> PeriodicField:
    Q = f.mode.step_weight * projector_stack(f.chirality, f.mode)
    return PeriodicField(f.time_step + 1, _periodic_apply(Q, f.data, f.mode.ndir),
                         f.chirality, f.mode)


def periodic_step_dirac(r: PeriodicField, l: PeriodicField, mass: float, epsilon: float):
    g = 1j * epsilon * mass
    w = r.mode.step_weight
    P = w * projector_stack(Chirality.RIGHT, r.mode)
    Pb = w * projector_stack(Chirality.LEFT, r.mode)
    nr = _periodic_apply(P, r.data + g * l.data, r.mode.ndir)
    nl = _periodic_apply(Pb, l.data + g * r.data, r.mode.ndir)
    t = r.time_step + 1
    return (PeriodicField(t, nr, Chirality.RIGHT, r.mode),
            PeriodicField(t, nl, Chirality.LEFT, r.mode))


def check_commensurate(theta, period: int, tol: float = 1e-9) -> None:
    theta = np.asarray(theta, dtype=float)
    turns = period * (theta[:-1] - theta[-1]) / (2 * np.pi)
    err = float(np.max(np.abs(turns - np.rint(turns))))
    if err > tol:
        raise ValueError(f"wavevector is incommensurate with period {period} (off by {err:.3e} turns)")


def plane_wave(theta, spinor, period: int, t: int = 0, chirality=Chirality.RIGHT,
               mode=Mode.FOUR_D) -> PeriodicField:
    """exp(-i sum_j theta_j N^j) * spinor on the torus at time step t."""
    mode = Mode.parse(mode)
    theta = np.asarray(theta, dtype=float)
    check_commensurate(theta, period)
    nd = mode.ndir - 1
    idx = np.indices((period,) * nd)
    last = t - idx.sum(axis=0)
    phase = np.exp(-1j * (np.tensordot(theta[:-1], idx, axes=1) + theta[-1] * last))
    data = phase[..., None] * np.asarray(spinor, dtype=complex)
    return PeriodicField(t, data, Chirality.parse(chirality), mode)


def commensurate_wavevector(modes, period: int, epsilon: float, alpha: float | None = None,
                            mode=Mode.FOUR_D) -> np.ndarray:
    """Spatial wavevector whose plane wave fits the torus with the given mode numbers.

    ``modes`` are the integers m_i with period * (theta_i - theta_last) = 2 pi m_i.
    """
    mode = Mode.parse(mode)
    if alpha is None:
        alpha = mode.default_alpha
    m = np.asarray(modes, dtype=float)
    if m.shape != (mode.ndir - 1,):
        raise ValueError(f"expected {mode.ndir - 1} mode numbers")
    diffs = 2 * np.pi * m / period
    last = -diffs.sum() / mode.ndir
    theta = np.append(diffs + last, last)
    n = tetrad(mode).spatial
    # sum_j n_j n_j^T = (ndir / d) * identity
    return (theta @ n) / (epsilon * alpha * mode.ndir / mode.spatial_dim)


@dataclass(frozen=True)
class PlaneWaveMeasurement:
    multiplier: complex
    history: tuple
    eigenvalue: complex
    theta: tuple

    @property
    def deviation(self) -> float:
        return abs(self.multiplier - self.eigenvalue)


def plane_wave_multiplier(k_spatial, epsilon: float, steps: int, period: int,
                          branch: int = 0) -> PlaneWaveMeasurement:
    """Evolve an eigenvector plane wave on the torus and measure its per-step factor."""
    if steps < 1:
        raise ValueError("need at least one step")
    theta = lattice_angles(k_spatial, epsilon)
    pair = eigenvalues(amplification(theta))
    vec = pair.v1 if branch == 0 else pair.v2
    if vec is None:
        raise InvariantViolation("evolution.plane_wave.defective", "no second eigenvector")
    f = plane_wave(theta, vec, period)
    history = []
    for _ in range(steps):
        nxt = periodic_step_weyl(f)
        ratio = np.vdot(f.data, nxt.data) / np.vdot(f.data, f.data)
        history.append(complex(ratio * np.exp(1j * theta[-1])))
        f = nxt
    return PlaneWaveMeasurement(history[-1], tuple(history), pair.eigenvalues[branch],
                                tuple(theta.tolist()))


def dirac_transfer_matrix(theta, epsilon: float, mass: float) -> np.ndarray:
    """4x4 one-step symbol acting on (R_0, L_0) plane-wave amplitudes."""
    g = 1j * epsilon * mass
    AR = amplification(theta, chirality=Chirality.RIGHT)
    AL = amplification(theta, chirality=Chirality.LEFT)
    I = np.eye(2)
    block = np.block([[AR, np.zeros((2, 2))], [np.zeros((2, 2)), AL]])
    mix = np.block([[I, g * I], [g * I, I]])
    return block @ mix


@dataclass(frozen=True)
class DiracDispersion:
    k: tuple
    mass: float
    epsilon: float
    omega: tuple
    target: float

    @property
    def deviation(self) -> float:
        """Worst | |Re omega| - sqrt(k^2 + m^2) | over the four branches."""
        return max(abs(abs(w.real) - self.target) for w in self.omega)


def dirac_dispersion(k_spatial, epsilon: float, mass: float) -> DiracDispersion:
    theta = lattice_angles(k_spatial, epsilon)
    ev = np.linalg.eigvals(dirac_transfer_matrix(theta, epsilon, mass))
    om = frequencies(ev, epsilon)
    target = float(np.sqrt(np.dot(k_spatial, k_spatial) + mass**2))
    return DiracDispersion(tuple(map(float, k_spatial)), float(mass), float(epsilon),
                           tuple(complex(w) for w in om), target)
