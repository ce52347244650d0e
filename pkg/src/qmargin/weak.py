"""Optimal measurements for the mean-error margin, with dual certificates.

The primal problem maximizes the success probability

    p_ok = eta1 tr(E1 rho1) + eta2 tr(E2 rho2)

over three-outcome POVMs (E1, E2, E3) subject to the mean error
probability p_err = eta1 tr(E2 rho1) + eta2 tr(E1 rho2) not exceeding the
margin m.  Outcome 3 is the inconclusive result.  This is a semidefinite
program; a Hermitian operator Y and a scalar y >= 0 satisfying

    Y >= 0,   Y >= eta1 rho1 - y eta2 rho2,   Y >= eta2 rho2 - y eta1 rho1

certify the upper bound  tr(Y) + m y  on every feasible p_ok.  Each
builder below returns a POVM together with such a certificate whose value
matches the POVM's success probability, which proves optimality without
reference to any external solver.

Closed-form optimum (smaller prior a, larger prior b, squared overlap s,
k = sqrt(a b s)):

    m >= m_c          :  (1 + sqrt(1 - 4 k^2)) / 2
    m_c' <= m <= m_c  :  (sqrt(m) + sqrt(1 - 2 k))^2
    m <= m_c'         :  b (sqrt(m s / a) + sqrt((a - m)(1 - s) / a))^2

At m = 0 the margin constraint admits no strictly feasible point and the
dual optimum is only approached as y -> infinity; the builders then
evaluate the same one-parameter dual family at a large finite y chosen so
the certified gap stays below 1e-12, and the POVM degenerates to the
standard unambiguous measurement.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np

from .bloch import Herm2, PSD_TOL, frobenius_norm, min_eig, mul
from .instance import (
    Domain,
    DomainKind,
    Instance,
    MarginOutOfRange,
    classify,
    critical_margins,
)

# Tolerance budget: feasibility is checked on eigenvalues at PSD_TOL,
# complementary-slackness products one multiplication layer above that.
SLACK_TOL = 1e-10
GAP_TOL = 1e-10

# Outcome probabilities below this leave the conditional error undefined.
OUTCOME_PROB_FLOOR = 1e-14


class OutOfDomain(ValueError):
    """A builder was invoked outside its margin domain."""


class DegenerateDirection(ValueError):
    """The two weighted Bloch vectors coincide (cannot happen for a valid instance)."""


class MarginZeroDegenerate(ValueError):
    """m = 0 with vanishing lower critical margin needs the limiting construction."""


@dataclass(frozen=True, eq=False)
class Povm3:
    """Ordered measurement (E1, E2, E3); outcome 3 is inconclusive."""

    e1: Herm2
    e2: Herm2
    e3: Herm2

    @property
    def elements(self) -> tuple[Herm2, Herm2, Herm2]:
        return (self.e1, self.e2, self.e3)


@dataclass(frozen=True, eq=False)
class Certificate:
    """Dual feasible pair proving optimality.

    ``operator`` is the PSD dual operator, ``multiplier`` the nonnegative
    scalar attached to the margin constraint, and ``value`` the certified
    upper bound  tr(operator) + margin * multiplier.
    """

    operator: Herm2
    multiplier: float
    margin: float

    @property
    def value(self) -> float:
        return self.operator.trace() + self.margin * self.multiplier


class Diagnostics(NamedTuple):
    p_success: float
    p_error: float
    cond_err_1: Optional[float]
    cond_err_2: Optional[float]
    outcome_probs: tuple[float, float, float]


@dataclass(frozen=True, eq=False)
class Solution:
    domain: Domain
    p_max: float
    povm: Povm3
    cert: Certificate
    p_success: float
    p_error: float
    cond_err_1: Optional[float]
    cond_err_2: Optional[float]
    trace_e1: float


def _pmax_scalar(a: float, b: float, s: float, m: float) -> float:
    """Closed-form optimum for ordered priors a <= b; s may reach 1."""
    k = np.sqrt(a * b * s)
    m_c, m_c_prime = critical_margins(a, b, s)
    if m >= m_c:
        return float(0.5 * (1.0 + np.sqrt(max(1.0 - 4.0 * k * k, 0.0))))
    if m_c_prime > 0.0 and m <= m_c_prime:
        t = 1.0 - s
        return float(b * (np.sqrt(m * s / a) + np.sqrt(max(a - m, 0.0) * t / a)) ** 2)
    return float((np.sqrt(m) + np.sqrt(1.0 - 2.0 * k)) ** 2)


def p_max_weak(inst: Instance, m: float) -> float:
    """Optimal success probability under the mean-error margin m."""
    m = float(m)
    if not 0.0 <= m <= 1.0:
        raise MarginOutOfRange(f"margin must lie in [0, 1], got {m}")
    a, b = sorted((inst.eta1, inst.eta2))
    return _pmax_scalar(a, b, inst.s, m)


def build_min_error(inst: Instance) -> tuple[Povm3, Certificate]:
    """Unconstrained two-outcome optimum (margin inactive).

    E1 projects onto the positive eigenvector of eta1 rho1 - eta2 rho2,
    E2 is its complement, E3 = 0.  The certificate has multiplier 0 and
    operator eta2 rho2 + (eta1 rho1 - eta2 rho2)_+ whose trace equals the
    unconstrained optimum.
    """
    diff = inst.eta1 * inst.n1 - inst.eta2 * inst.n2
    norm = float(np.linalg.norm(diff))
    if norm < 1e-14:
        raise DegenerateDirection("eta1 n1 and eta2 n2 coincide")
    g = diff / norm
    e1 = Herm2.projector(g)
    e2 = Herm2.projector(-g)
    # Largest eigenvalue of eta1 rho1 - eta2 rho2; nonnegative because
    # norm^2 - (eta1 - eta2)^2 = 4 eta1 eta2 (1 - s) >= 0.
    lam_pos = 0.5 * (inst.eta1 - inst.eta2 + norm)
    y_op = Herm2(inst.eta2 / 2.0 + lam_pos / 2.0, inst.eta2 * inst.n2 / 2.0 + lam_pos * g / 2.0)
    cert = Certificate(operator=y_op, multiplier=0.0, margin=1.0)
    return Povm3(e1, e2, Herm2.zero()), cert


def _intermediate_construction(
    inst: Instance, y: float, sqrt_m: float
) -> tuple[Povm3, Herm2]:
    """Shared rank-1 construction for the three-outcome regime.

    The dual operator alpha + beta.sigma is fixed by requiring that it and
    its two shifted companions all have a vanishing smaller eigenvalue; the
    POVM elements are the orthogonal rank-1 complements of those three
    operators, weighted so they sum to the identity.  ``sqrt_m`` equals
    sqrt(r) / (y - 1), where r = 1 - 2 sqrt(eta1 eta2 s); passing it
    explicitly keeps the zero-margin limit (y huge) exact.
    """
    eta1, eta2, s = inst.eta1, inst.eta2, inst.s
    n1, n2 = inst.n1, inst.n2
    if s <= 0.0:
        raise OutOfDomain("three-outcome regime requires a nonzero overlap")
    k = np.sqrt(eta1 * eta2 * s)
    r = 1.0 - 2.0 * k
    sqrt_r = np.sqrt(r)
    w = np.sqrt(eta1 * eta2 / s)
    pref = y / (2.0 * (y - 1.0))
    beta = pref * ((eta1 - w) * n1 + (eta2 - w) * n2)
    alpha = pref * r
    a1 = eta1 * n1 - y * eta2 * n2
    a2 = eta2 * n2 - y * eta1 * n1
    b_vecs = (beta - a1 / 2.0, beta - a2 / 2.0, beta)
    coeffs = [
        y / (y + 1.0) * (sqrt_m - (k - eta1) / sqrt_r),
        y / (y + 1.0) * (sqrt_m - (k - eta2) / sqrt_r),
        k / sqrt_m - sqrt_m - sqrt_r,
    ]
    for i, c in enumerate(coeffs):
        if c < 0.0:
            if c < -PSD_TOL:
                raise OutOfDomain(f"element weight {i + 1} is negative: {c}")
            coeffs[i] = 0.0  # boundary noise
    norms = [float(np.linalg.norm(b)) for b in b_vecs]
    gamma = 1.0 / sum(c * n for c, n in zip(coeffs, norms))
    elements = [
        Herm2(gamma * c * n, -gamma * c * b)
        for c, n, b in zip(coeffs, norms, b_vecs)
    ]
    return Povm3(*elements), Herm2(alpha, beta)


def build_intermediate(inst: Instance, m: float) -> tuple[Povm3, Certificate]:
    """Three-outcome optimum for m_c' <= m <= m_c, m > 0.

    The dual scalar is y = 1 + sqrt(r / m) and the certified value is
    (sqrt(m) + sqrt(r))^2 with r = 1 - 2 sqrt(eta1 eta2 s); at the optimum
    the error constraint is tight, p_err = m.
    """
    m = float(m)
    m_c, m_c_prime = critical_margins(inst.eta1, inst.eta2, inst.s)
    if not m_c_prime <= m <= m_c:
        raise OutOfDomain(f"margin {m} outside [{m_c_prime}, {m_c}]")
    if m == 0.0:
        raise MarginZeroDegenerate("use the zero-margin limiting construction")
    sqrt_m = np.sqrt(m)
    r = 1.0 - 2.0 * np.sqrt(inst.eta1 * inst.eta2 * inst.s)
    y = 1.0 + np.sqrt(r) / sqrt_m
    povm, y_op = _intermediate_construction(inst, y, sqrt_m)
    return povm, Certificate(operator=y_op, multiplier=y, margin=m)


def _build_unambiguous_two_sided(inst: Instance) -> tuple[Povm3, Certificate]:
    # Zero-margin limit of the three-outcome family.  The dual optimum is
    # not attained at finite y; picking y - 1 = r * 1e12 leaves a certified
    # gap of exactly r / (y - 1) = 1e-12 while the POVM converges to the
    # standard unambiguous measurement.
    r = 1.0 - 2.0 * np.sqrt(inst.eta1 * inst.eta2 * inst.s)
    y = 1.0 + r * 1e12
    sqrt_m = np.sqrt(r) / (y - 1.0)
    povm, y_op = _intermediate_construction(inst, y, sqrt_m)
    return povm, Certificate(operator=y_op, multiplier=y, margin=0.0)


def build_single_state(inst: Instance, m: float) -> tuple[Povm3, Certificate]:
    """Two-outcome optimum omitting the less likely state (m <= m_c').

    The element identifying the likelier state and the inconclusive
    element form a projective pair along the Bloch axis of the positive
    eigenvector of  eta_b rho_b - y eta_a rho_a,  where a labels the less
    likely state.  For m > 0 the dual scalar follows from requiring
    p_err = m:

        y = (eta_b / eta_a) [ (2s - 1)
              + sqrt(s(1-s)) (eta_a - 2m) / sqrt(m (eta_a - m)) ].

    At m = 0 that scalar diverges; a large finite y is used instead (see
    module docstring) and the measurement becomes the projector orthogonal
    to the omitted state plus its complement.
    """
    m = float(m)
    _, m_c_prime = critical_margins(inst.eta1, inst.eta2, inst.s)
    if m_c_prime <= 0.0 or not 0.0 <= m <= m_c_prime:
        raise OutOfDomain(f"margin {m} outside [0, {m_c_prime}]")
    if inst.eta1 <= inst.eta2:
        a, b, na, nb = inst.eta1, inst.eta2, inst.n1, inst.n2
    else:
        a, b, na, nb = inst.eta2, inst.eta1, inst.n2, inst.n1
    s, t = inst.s, inst.t
    if m >= a:
        # m_c' < eta_a always; unreachable for a valid domain check.
        raise OutOfDomain(f"margin {m} not below the smaller prior {a}")
    cos12 = 2.0 * s - 1.0
    if m > 0.0:
        y = b / a * (cos12 + np.sqrt(s * t) * (a - 2.0 * m) / np.sqrt(m * (a - m)))
    else:
        k = np.sqrt(a * b * s)
        y_floor = 1.0 + (1.0 - 2.0 * k) * (1.0 + np.sqrt(b * s / a)) / (b * s - a)
        y = max(2.0 * y_floor, b * b * s * t / a * 1e12, 1e8)
    # Spectral data of eta_b rho_b - y eta_a rho_a, evaluated in forms that
    # stay accurate when y is large (the naive half-difference cancels).
    d_axis = y * a - b * cos12
    axis_norm = float(np.hypot(d_axis, 2.0 * b * np.sqrt(s * t)))
    axis = (b * nb - y * a * na) / axis_norm
    lam_pos = 2.0 * y * a * b * t / (y * a + axis_norm - b)
    e_b = Herm2.projector(axis)
    e_inc = Herm2.projector(-axis)
    y_op = Herm2(lam_pos / 2.0, lam_pos * axis / 2.0)
    cert = Certificate(operator=y_op, multiplier=float(y), margin=m)
    if inst.eta1 <= inst.eta2:
        povm = Povm3(Herm2.zero(), e_b, e_inc)
    else:
        povm = Povm3(e_b, Herm2.zero(), e_inc)
    return povm, cert


def diagnostics(inst: Instance, povm: Povm3) -> Diagnostics:
    """Joint, marginal, and conditional outcome statistics of a POVM.

    Conditional errors are ``None`` when the corresponding outcome
    probability falls below 1e-14.
    """
    rho1 = Herm2.density(inst.n1)
    rho2 = Herm2.density(inst.n2)
    joint1 = [inst.eta1 * _expect(e, rho1) for e in povm.elements]
    joint2 = [inst.eta2 * _expect(e, rho2) for e in povm.elements]
    outcome = tuple(p1 + p2 for p1, p2 in zip(joint1, joint2))
    p_success = joint1[0] + joint2[1]
    p_error = joint1[1] + joint2[0]
    cond1 = joint2[0] / outcome[0] if outcome[0] >= OUTCOME_PROB_FLOOR else None
    cond2 = joint1[1] / outcome[1] if outcome[1] >= OUTCOME_PROB_FLOOR else None
    return Diagnostics(p_success, p_error, cond1, cond2, outcome)


def _expect(e: Herm2, rho: Herm2) -> float:
    # tr(E rho) for rho = (I + n.sigma)/2
    return 2.0 * (e.alpha * rho.alpha + float(e.beta @ rho.beta))


def solve_weak(inst: Instance, m: float) -> Solution:
    """Optimal POVM, value, and certificate for the mean-error margin m."""
    dom = classify(inst, m)
    if dom.kind is DomainKind.MINIMUM_ERROR:
        povm, cert = build_min_error(inst)
        cert = replace(cert, margin=float(m))
    elif dom.kind is DomainKind.SINGLE_STATE:
        povm, cert = build_single_state(inst, m)
    elif m == 0.0:
        povm, cert = _build_unambiguous_two_sided(inst)
    else:
        povm, cert = build_intermediate(inst, m)
    diag = diagnostics(inst, povm)
    return Solution(
        domain=dom,
        p_max=p_max_weak(inst, m),
        povm=povm,
        cert=cert,
        p_success=diag.p_success,
        p_error=diag.p_error,
        cond_err_1=diag.cond_err_1,
        cond_err_2=diag.cond_err_2,
        trace_e1=povm.e1.trace(),
    )


@dataclass(frozen=True)
class PovmReport:
    """Element-wise positivity and completeness residuals."""

    min_eigs: tuple[float, float, float]
    second_eigs: tuple[float, float, float]
    completeness_residual: float


def povm_report(povm: Povm3) -> PovmReport:
    total = povm.e1 + povm.e2 + povm.e3
    residual = max(abs(total.alpha - 1.0), float(np.max(np.abs(total.beta))))
    lo, hi = zip(*(map(lambda e: (e.alpha - e.beta_norm(), e.alpha + e.beta_norm()), povm.elements)))
    return PovmReport(min_eigs=tuple(lo), second_eigs=tuple(hi), completeness_residual=residual)


@dataclass(frozen=True)
class CertificateReport:
    """Numerical evidence that a certificate proves a POVM optimal.

    ``feasibility_eigs`` are the smaller eigenvalues of the dual operator
    and its two shifted companions (all must be >= -1e-12); the ``_rel``
    variants divide by max(1, operator norm) and are the meaningful check
    when the multiplier is very large (zero-margin limit).  ``slackness``
    holds Frobenius norms of E1 Y1, E2 Y2, E3 Y; ``margin_slack`` is
    multiplier * (m - p_err); ``gap`` is |p_success - certified value|.
    """

    feasibility_eigs: tuple[float, float, float]
    feasibility_rel: tuple[float, float, float]
    multiplier: float
    slackness: tuple[float, float, float]
    slackness_rel: tuple[float, float, float]
    margin_slack: float
    gap: float
    p_error: float

    def passes(
        self,
        feas_tol: float = PSD_TOL,
        slack_tol: float = SLACK_TOL,
        gap_tol: float = GAP_TOL,
    ) -> bool:
        return (
            all(e >= -feas_tol for e in self.feasibility_eigs)
            and self.multiplier >= -feas_tol
            and all(n <= slack_tol for n in self.slackness)
            and abs(self.margin_slack) <= slack_tol
            and self.gap <= gap_tol
        )


def certificate_report(inst: Instance, m: float, povm: Povm3, cert: Certificate) -> CertificateReport:
    """Evaluate feasibility, complementary slackness, and the duality gap."""
    y = cert.multiplier
    y_op = cert.operator
    rho1 = Herm2.density(inst.n1)
    rho2 = Herm2.density(inst.n2)
    shift1 = y_op - (inst.eta1 * rho1 - y * inst.eta2 * rho2)
    shift2 = y_op - (inst.eta2 * rho2 - y * inst.eta1 * rho1)
    operators = (y_op, shift1, shift2)
    feas = tuple(min_eig(op) for op in operators)
    scales = tuple(max(1.0, abs(op.alpha) + op.beta_norm()) for op in operators)
    feas_rel = tuple(e / sc for e, sc in zip(feas, scales))
    slack = (
        frobenius_norm(mul(povm.e1, shift1)),
        frobenius_norm(mul(povm.e2, shift2)),
        frobenius_norm(mul(povm.e3, y_op)),
    )
    slack_scales = (scales[1], scales[2], scales[0])
    slack_rel = tuple(n / sc for n, sc in zip(slack, slack_scales))
    diag = diagnostics(inst, povm)
    return CertificateReport(
        feasibility_eigs=feas,
        feasibility_rel=feas_rel,
        multiplier=y,
        slackness=slack,
        slackness_rel=slack_rel,
        margin_slack=y * (float(m) - diag.p_error),
        gap=abs(diag.p_success - cert.value),
        p_error=diag.p_error,
    )
