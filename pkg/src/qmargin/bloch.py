"""2x2 Hermitian operator algebra in the Bloch representation.

Every Hermitian operator on a two-dimensional space is written as

    H = alpha * I + beta . sigma,

with a real coefficient ``alpha`` and a real 3-vector ``beta`` contracted
against the Pauli matrices.  The payoff of storing operators this way is
that the spectrum is exact arithmetic: the eigenvalues are
``alpha - |beta|`` and ``alpha + |beta|``, the trace is ``2 * alpha``, and
positive semidefiniteness is a single comparison.  Operators are expanded
to dense complex matrices only where a genuine product is required (a
product of Hermitians is generally not Hermitian).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Default tolerance on eigenvalues for positivity checks.  All quantities
# handled by the solver are O(1), which leaves ample double-precision
# headroom below this.
PSD_TOL = 1e-12

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


def vec3(x: float, y: float, z: float) -> np.ndarray:
    """Build a float64 3-vector."""
    return np.array([x, y, z], dtype=float)


@dataclass(frozen=True, eq=False)
class Herm2:
    """Hermitian 2x2 operator ``alpha * I + beta . sigma``.

    Immutable; all operations return new values, so instances are safe to
    share across threads.
    """

    alpha: float
    beta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        b = np.array(self.beta, dtype=float)
        if b.shape != (3,):
            raise ValueError(f"beta must be a 3-vector, got shape {b.shape}")
        b.setflags(write=False)
        object.__setattr__(self, "beta", b)

    @classmethod
    def identity(cls) -> "Herm2":
        return cls(1.0, np.zeros(3))

    @classmethod
    def zero(cls) -> "Herm2":
        return cls(0.0, np.zeros(3))

    @classmethod
    def projector(cls, axis) -> "Herm2":
        """Rank-1 projector (I + u.sigma)/2 onto the unit Bloch vector u."""
        return cls(0.5, np.asarray(axis, dtype=float) / 2.0)

    @classmethod
    def density(cls, bloch) -> "Herm2":
        """Qubit density operator (I + n.sigma)/2 with |n| <= 1."""
        return cls(0.5, np.asarray(bloch, dtype=float) / 2.0)

    def beta_norm(self) -> float:
        return float(np.linalg.norm(self.beta))

    def trace(self) -> float:
        return 2.0 * self.alpha

    def matrix(self) -> np.ndarray:
        """Expand to a dense complex 2x2 matrix."""
        bx, by, bz = self.beta
        return np.array(
            [
                [self.alpha + bz, bx - 1j * by],
                [bx + 1j * by, self.alpha - bz],
            ],
            dtype=complex,
        )

    def __add__(self, other: "Herm2") -> "Herm2":
        return Herm2(self.alpha + other.alpha, self.beta + other.beta)

    def __sub__(self, other: "Herm2") -> "Herm2":
        return Herm2(self.alpha - other.alpha, self.beta - other.beta)

    def __neg__(self) -> "Herm2":
        return Herm2(-self.alpha, -self.beta)

    def __mul__(self, scale: float) -> "Herm2":
        return Herm2(self.alpha * scale, self.beta * scale)

    __rmul__ = __mul__


def eigs(h: Herm2) -> tuple[float, float]:
    """Eigenvalues ``(alpha - |beta|, alpha + |beta|)`` in ascending order."""
    n = h.beta_norm()
    return h.alpha - n, h.alpha + n


def min_eig(h: Herm2) -> float:
    return h.alpha - h.beta_norm()


def is_psd(h: Herm2, tol: float = PSD_TOL) -> bool:
    """Positive semidefinite within ``tol`` on the smaller eigenvalue."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return min_eig(h) >= -tol


def mul(a, b) -> np.ndarray:
    """Matrix product of two operators as a dense complex 2x2 array.

    Accepts ``Herm2`` or plain 2x2 arrays for either operand.
    """
    am = a.matrix() if isinstance(a, Herm2) else np.asarray(a, dtype=complex)
    bm = b.matrix() if isinstance(b, Herm2) else np.asarray(b, dtype=complex)
    return am @ bm


def frobenius_norm(m) -> float:
    mm = m.matrix() if isinstance(m, Herm2) else np.asarray(m, dtype=complex)
    return float(np.linalg.norm(mm))


def trace_product(a: Herm2, b: Herm2) -> float:
    """tr(AB) for Hermitians: 2 * (alpha_a * alpha_b + beta_a . beta_b)."""
    return 2.0 * (a.alpha * b.alpha + float(a.beta @ b.beta))
