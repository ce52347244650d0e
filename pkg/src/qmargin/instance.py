"""Problem normalization and margin-domain classification.

A discrimination problem consists of two pure states with occurrence
probabilities eta1 and eta2 = 1 - eta1, plus an error margin m in [0, 1].
``canonicalize`` maps arbitrary complex state vectors into a canonical
real form: both Bloch vectors lie in the x-z plane, symmetric about z,

    n1 = (+sqrt(T), 0, sqrt(S)),    n2 = (-sqrt(T), 0, sqrt(S)),

where S is the squared overlap of the two states and T = 1 - S.  This
fixes global phases (the overlap becomes real and nonnegative) and makes
every later construction real arithmetic.

For a fixed instance, the margin axis splits into three regimes separated
by two critical margins m_c' <= m_c:

    m >= m_c   : the error constraint is inactive and the unconstrained
                 two-outcome measurement is optimal ("minimum-error");
    m <= m_c'  : the optimal measurement never reports the less likely
                 state ("single-state"; only possible when the smaller
                 prior does not exceed S times the larger one);
    otherwise  : all three outcomes occur ("intermediate").
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

# Overlaps above this are treated as linearly dependent states: the
# closed forms divide by quantities vanishing as S -> 1.
OVERLAP_SQ_MAX = 1.0 - 1e-10


class NotNormalizable(ValueError):
    """A state vector has zero norm."""


class LinearlyDependent(ValueError):
    """The two states are (numerically) parallel."""


class DegeneratePrior(ValueError):
    """An occurrence probability lies outside (0, 1)."""


class MarginOutOfRange(ValueError):
    """The error margin lies outside [0, 1]."""


class DomainKind(Enum):
    MINIMUM_ERROR = "minimum-error"
    INTERMEDIATE = "intermediate"
    SINGLE_STATE = "single-state"


@dataclass(frozen=True)
class Domain:
    """Margin-domain label together with the critical margins it was cut at."""

    kind: DomainKind
    m_c: float
    m_c_prime: float


@dataclass(frozen=True, eq=False)
class Instance:
    """Canonicalized two-state discrimination problem.

    Attributes keep the caller's state ordering; ``swapped`` records that
    eta1 > eta2, in which case solver internals exchange the roles of the
    two states (the constructions assume the first state is the less
    likely one) and map outcome labels back before returning.
    """

    eta1: float
    eta2: float
    psi1: np.ndarray
    psi2: np.ndarray
    s: float
    t: float
    n1: np.ndarray
    n2: np.ndarray
    swapped: bool

    def __post_init__(self):
        for name in ("psi1", "psi2", "n1", "n2"):
            arr = getattr(self, name)
            arr.setflags(write=False)

    @classmethod
    def from_overlap(cls, eta1: float, overlap: float) -> "Instance":
        """Build an instance directly from |<phi1|phi2>| in [0, 1)."""
        if not 0.0 <= overlap:
            raise LinearlyDependent(f"overlap must be nonnegative, got {overlap}")
        s = overlap * overlap
        if s > OVERLAP_SQ_MAX:
            raise LinearlyDependent(f"overlap {overlap} too close to 1")
        psi1, psi2 = _canonical_states(s)
        return canonicalize(psi1, psi2, eta1)


def _canonical_states(s: float) -> tuple[np.ndarray, np.ndarray]:
    # Real unit vectors with overlap sqrt(s), symmetric about the z axis.
    root = np.sqrt(s)
    c = np.sqrt((1.0 + root) / 2.0)
    d = np.sqrt((1.0 - root) / 2.0)
    return np.array([c, d], dtype=complex), np.array([c, -d], dtype=complex)


def canonicalize(psi1, psi2, eta1: float) -> Instance:
    """Normalize states, fix phases, and rotate into the canonical frame.

    The returned instance has real canonical state vectors whose overlap
    equals |<psi1|psi2>| of the inputs, Bloch vectors in the x-z plane
    with n1.n2 = 2S - 1, and priors (eta1, 1 - eta1).

    Raises
    ------
    NotNormalizable
        If either input vector has zero norm.
    LinearlyDependent
        If the squared overlap exceeds 1 - 1e-10.
    DegeneratePrior
        If eta1 is not strictly inside (0, 1).
    """
    eta1 = float(eta1)
    if not 0.0 < eta1 < 1.0:
        raise DegeneratePrior(f"eta1 must lie strictly in (0, 1), got {eta1}")
    v1 = np.asarray(psi1, dtype=complex).reshape(-1)
    v2 = np.asarray(psi2, dtype=complex).reshape(-1)
    if v1.shape != (2,) or v2.shape != (2,):
        raise NotNormalizable("state vectors must have two components")
    if not (np.all(np.isfinite(v1.view(float))) and np.all(np.isfinite(v2.view(float)))):
        raise NotNormalizable("state vectors must be finite")
    norm1 = np.linalg.norm(v1)
    norm2 = np.linalg.norm(v2)
    if not norm1 > 0.0:
        raise NotNormalizable("psi1 has zero norm")
    if not norm2 > 0.0:
        raise NotNormalizable("psi2 has zero norm")
    overlap = np.vdot(v1 / norm1, v2 / norm2)
    s = min(float(np.abs(overlap)) ** 2, 1.0)
    if s > OVERLAP_SQ_MAX:
        raise LinearlyDependent(f"squared overlap {s} exceeds {OVERLAP_SQ_MAX}")
    t = 1.0 - s
    root_s = np.sqrt(s)
    root_t = np.sqrt(t)
    n1 = np.array([root_t, 0.0, root_s])
    n2 = np.array([-root_t, 0.0, root_s])
    c1, c2 = _canonical_states(s)
    return Instance(
        eta1=eta1,
        eta2=1.0 - eta1,
        psi1=c1,
        psi2=c2,
        s=s,
        t=t,
        n1=n1,
        n2=n2,
        swapped=eta1 > 0.5,
    )


def critical_margins(eta1: float, eta2: float, s: float) -> tuple[float, float]:
    """Critical margins (m_c, m_c') for priors (eta1, eta2) and squared overlap s.

    m_c = (1 - sqrt(1 - 4 eta1 eta2 s)) / 2 is the error probability of the
    unconstrained optimum.  m_c' = (a - k)^2 / (1 - 2k) with a the smaller
    prior and k = sqrt(eta1 eta2 s), when a <= (larger prior) * s; else 0.
    Accepts s up to and including 1 (needed by the mixed-state bound, where
    s is a squared fidelity); at s = 1 with equal priors the two margins
    coincide and the degenerate ratio is resolved by that limit.
    """
    a, b = sorted((float(eta1), float(eta2)))
    k = np.sqrt(a * b * s)
    m_c = 0.5 * (1.0 - np.sqrt(max(1.0 - 4.0 * k * k, 0.0)))
    if a <= b * s:
        num = (a - k) ** 2
        den = 1.0 - 2.0 * k
        m_c_prime = num / den if den > 0.0 else m_c
    else:
        m_c_prime = 0.0
    return float(m_c), float(m_c_prime)


def classify(inst: Instance, m: float) -> Domain:
    """Assign the margin m to one of the three domains.

    Boundary convention: at m = m_c exactly the label is MINIMUM_ERROR and
    at m = m_c' exactly it is SINGLE_STATE; the optimal value is continuous
    across both boundaries so the choice is observationally irrelevant.
    A vanishing m_c' (smaller prior >= s times larger) never produces the
    single-state label: the two-outcome structure requires m_c' > 0.
    """
    m = float(m)
    if not 0.0 <= m <= 1.0:
        raise MarginOutOfRange(f"margin must lie in [0, 1], got {m}")
    m_c, m_c_prime = critical_margins(inst.eta1, inst.eta2, inst.s)
    if m >= m_c:
        kind = DomainKind.MINIMUM_ERROR
    elif m_c_prime > 0.0 and m <= m_c_prime:
        kind = DomainKind.SINGLE_STATE
    else:
        kind = DomainKind.INTERMEDIATE
    return Domain(kind=kind, m_c=m_c, m_c_prime=m_c_prime)
