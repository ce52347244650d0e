"""Conditional-error ("strong") margin scheme.

Instead of bounding the mean error probability, the strong scheme bounds
both conditional error probabilities,

    P(state 2 | outcome 1) <= m   and   P(state 1 | outcome 2) <= m.

These constraints imply the mean-error bound, so the strong optimum never
exceeds the weak one at the same margin.  The two schemes are linked by an
exact change of margin variable: with

    m_strong = m_weak / (p_weak(m_weak) + m_weak),
    m_weak   = m_strong * p_strong(m_strong) / (1 - m_strong),

the optimal values coincide, p_strong(m_strong) = p_weak(m_weak), and the
optimal POVMs are literally the same measurement.  The closed form below
evaluates p_strong directly; the conversion maps are then explicit in both
directions and no fixed-point iteration is needed.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .instance import Instance, MarginOutOfRange, critical_margins
from .weak import Solution, _pmax_scalar, p_max_weak, solve_weak


class MarginKind(Enum):
    WEAK = "weak"
    STRONG = "strong"


def strong_critical_margins(eta1: float, eta2: float, s: float) -> tuple[float, float]:
    """Critical strong margins (m_c, m_c').

    The upper one coincides with the weak m_c.  The lower one, nonzero only
    when the smaller prior a satisfies a <= b s, is
    (a - k)^2 / ((b - k)^2 + (a - k)^2) with k = sqrt(a b s).
    """
    a, b = sorted((float(eta1), float(eta2)))
    k = np.sqrt(a * b * s)
    m_c = 0.5 * (1.0 - np.sqrt(max(1.0 - 4.0 * k * k, 0.0)))
    if a <= b * s:
        num = (a - k) ** 2
        den = (b - k) ** 2 + num
        m_c_prime = num / den if den > 0.0 else m_c
    else:
        m_c_prime = 0.0
    return float(m_c), float(m_c_prime)


def _pmax_strong_scalar(a: float, b: float, s: float, m: float) -> float:
    k = np.sqrt(a * b * s)
    m_c, m_c_prime = strong_critical_margins(a, b, s)
    if m >= m_c:
        return float(0.5 * (1.0 + np.sqrt(max(1.0 - 4.0 * k * k, 0.0))))
    if m_c_prime > 0.0 and m <= m_c_prime:
        t = 1.0 - s
        den = m * b + (1.0 - m) * a - 2.0 * np.sqrt(m * (1.0 - m) * a * b * s)
        return float(a * b * (1.0 - m) * t / den)
    # m < m_c <= 1/2 here, so the amplification factor is finite.
    assert m < 0.5
    amp = (1.0 - m) / (1.0 - 2.0 * m) ** 2 * (1.0 + 2.0 * np.sqrt(m * (1.0 - m)))
    return float(amp * (1.0 - 2.0 * k))


def p_max_strong(inst: Instance, m_s: float) -> float:
    """Optimal success probability under the conditional-error margin m_s."""
    m_s = float(m_s)
    if not 0.0 <= m_s <= 1.0:
        raise MarginOutOfRange(f"margin must lie in [0, 1], got {m_s}")
    a, b = sorted((inst.eta1, inst.eta2))
    return _pmax_strong_scalar(a, b, inst.s, m_s)


def weak_margin_of_strong(inst: Instance, m_s: float) -> float:
    """Weak margin whose optimum coincides with the strong one at m_s.

    Rejects m_s = 1 (the map degenerates there); the image is clamped to 1
    where the constraint is already inactive on both sides.
    """
    m_s = float(m_s)
    if not 0.0 <= m_s < 1.0:
        raise MarginOutOfRange(f"strong margin must lie in [0, 1), got {m_s}")
    p_s = p_max_strong(inst, m_s)
    return min(1.0, m_s * p_s / (1.0 - m_s))


def strong_margin_of_weak(inst: Instance, m_w: float) -> float:
    """Strong margin whose optimum coincides with the weak one at m_w."""
    m_w = float(m_w)
    p_w = p_max_weak(inst, m_w)
    return m_w / (p_w + m_w) if m_w > 0.0 else 0.0


def solve_strong(inst: Instance, m_s: float) -> Solution:
    """Optimal POVM under the conditional-error margin m_s.

    The optimal measurement is the weak-margin one at the converted
    margin; both conditional errors of the returned POVM respect m_s.
    """
    m_s = float(m_s)
    if not 0.0 <= m_s <= 1.0:
        raise MarginOutOfRange(f"margin must lie in [0, 1], got {m_s}")
    m_c, _ = critical_margins(inst.eta1, inst.eta2, inst.s)
    if m_s >= m_c:
        # Constraint inactive: the unconstrained optimum already satisfies it.
        m_w = 1.0
    else:
        m_w = weak_margin_of_strong(inst, m_s)
    return solve_weak(inst, m_w)
