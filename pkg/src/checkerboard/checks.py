"""Algebraic identity checks, collected into one pass/fail table."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .geometry import CONSTRUCTOR_TOL, Mode, face_null_normal, jacobian, tetrad
from .propagator import prefactor_identity_residual
from .spectral import amplification, eigvals_batch, operator_norm, phi, phi_direct, trace_AdagA
from .spin import (
    IDENTITY,
    PhaseRule,
    anti_projector,
    conjugation_relations_residual,
    phase_impossibility_certificate,
    projector,
    sigma_identity_residual,
    transition_table,
)

TOL = 1e-12


@dataclass(frozen=True)
class CheckResult:
    identifier: str
    value: float
    tolerance: float
    passed: bool


def _result(identifier, value, tol=TOL):
    value = float(value)
    return CheckResult(identifier, value, tol, bool(value <= tol))


def geometry_checks() -> list:
    out = []
    for mode in Mode:
        for key, val in tetrad(mode).residuals().items():
            out.append(_result(f"geometry.{mode.value}.{key}", val, CONSTRUCTOR_TOL))
    worst = 0.0
    for face in itertools.combinations(range(1, 5), 3):
        fn = face_null_normal(face)
        worst = max(worst, abs(fn.norm2), *map(abs, fn.inner_products))
    out.append(_result("geometry.face_null_normals", worst))
    out.append(_result("geometry.jacobian", abs(jacobian() - 48 * np.sqrt(3)) / jacobian()))
    return out


# <a|b> = i / sqrt 3 for these (a, b); the reversed order carries -i / sqrt 3
RULE_A_PLUS_I = ((1, 4), (2, 4), (3, 4), (3, 1), (2, 3), (1, 2))


def ruleA_expected_table() -> np.ndarray:
    """Expected RuleA transitions in transition_table layout (row = from)."""
    t = np.eye(4, dtype=complex)
    for a, b in RULE_A_PLUS_I:
        t[b - 1, a - 1] = 1j / np.sqrt(3)
        t[a - 1, b - 1] = -1j / np.sqrt(3)
    return t


def spin_checks() -> list:
    out = [_result("spin.half_projector_sum",
                   np.max(np.abs(0.5 * sum(projector(i) for i in range(1, 5)) - IDENTITY)))]
    for alpha in (2.0, 3.0, 5.0):
        out.append(_result(f"spin.sigma_identity.alpha={alpha:g}", sigma_identity_residual(alpha)))
    out.append(_result("spin.sigma_identity.2+1", sigma_identity_residual(mode=Mode.PLANAR)))
    out.append(_result("spin.antiprojector_annihilates",
                       max(np.max(np.abs(anti_projector(i) @ projector(i))) for i in range(1, 5))))
    out.append(_result("spin.conjugation_relations", conjugation_relations_residual()))
    table = transition_table(PhaseRule.RULE_A)
    out.append(_result("spin.ruleA_table", np.max(np.abs(table - ruleA_expected_table()))))
    cert = phase_impossibility_certificate()
    out.append(CheckResult("spin.phase_swap_impossible", cert.numeric_spot_check, TOL,
                           bool(not cert.consistent and cert.numeric_spot_check <= TOL)))
    return out


def norm_checks(samples: int = 10_000, seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    theta = rng.uniform(-np.pi, np.pi, size=(samples, 4))
    out = [_result("norm.phi_at_0_0_pi_pi", abs(phi(np.array([0, 0, np.pi, np.pi])) - 4 / 9))]
    out.append(_result("norm.phi_closed_vs_direct", np.max(np.abs(phi(theta) - phi_direct(theta)))))
    norm = operator_norm(amplification(theta))
    # sign(phi) = sign(1 - ||A||) where the sign is decisive
    ph = phi(theta)
    decisive = np.abs(ph) > 1e-12
    mismatch = np.count_nonzero(np.sign(ph[decisive]) != np.sign(1 - norm[decisive]))
    out.append(CheckResult("norm.phi_sign", float(mismatch), 0.0, mismatch == 0))
    out.append(_result("norm.trace_bound", max(0.0, float(np.max(trace_AdagA(theta))) - 2)))
    out.append(_result("norm.operator_norm_bound", max(0.0, float(np.max(norm)) - 1)))
    base = rng.uniform(-np.pi, np.pi, size=(samples, 2))
    fam = np.stack([base[:, 0]] * 3 + [base[:, 1]], axis=-1)
    worst = 0.0
    for perm in set(itertools.permutations(range(4))):
        worst = max(worst, float(np.max(np.abs(phi(fam[:, perm])))))
    out.append(_result("norm.phi_zero_on_three_coincident", worst))
    out.append(_result("norm.eigenvalue_bound",
                       max(0.0, float(np.max(np.abs(eigvals_batch(amplification(theta))))) - 1)))
    out.append(_result("propagator.prefactor_identity", prefactor_identity_residual(0.1)))
    return out


def selfcheck(samples: int = 10_000, seed: int = 0) -> list:
    return geometry_checks() + spin_checks() + norm_checks(samples, seed)


def format_table(results) -> str:
    width = max(len(r.identifier) for r in results)
    lines = [f"{'check':<{width}}  {'value':>12}  {'tol':>8}  status"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.identifier:<{width}}  {r.value:12.3e}  {r.tolerance:8.1e}  {status}")
    return "\n".join(lines)
