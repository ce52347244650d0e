"""Mixed-state fidelity and margin-discrimination bounds.

For two mixed states no closed-form margin optimum is known, but the
pure-state optimum bounds it from above: any mixed-state problem is the
restriction of a pure-state problem between purifications chosen (by
Uhlmann's theorem) to overlap exactly at the fidelity

    F(rho1, rho2) = tr sqrt(sqrt(rho1) rho2 sqrt(rho1)),

and restricting the measurement cannot raise the optimum.  Substituting
S -> F^2 into the pure closed form therefore yields an upper bound valid
for every margin; at m = 0 it reduces to the familiar unambiguous bound
(1 - 2 sqrt(eta1 eta2) F, or eta2 (1 - F^2) when the smaller prior is
below eta2 F^2), and at m = 1 it dominates the exact unconstrained value
(1 + tr|eta1 rho1 - eta2 rho2|) / 2, which is the generalized
trace-distance / fidelity inequality

    tr|eta1 rho1 - eta2 rho2| <= sqrt(1 - 4 eta1 eta2 F^2).

The m >= m_c branch of the bound is included by the same substitution
even though only the constrained branches are usually quoted; it follows
from the purification argument verbatim.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .instance import DegeneratePrior, MarginOutOfRange
from .weak import _pmax_scalar

MAX_DIM = 8

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
STATE_PSD_TOL = 1e-10


class DimensionMismatch(ValueError):
    """The two density matrices act on spaces of different dimension."""


class NotAState(ValueError):
    """A matrix fails Hermiticity, positivity, or unit-trace validation."""


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated density matrix on a space of dimension 2..8."""

    mat: np.ndarray

    def __post_init__(self):
        self.mat.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def from_array(cls, arr) -> "DensityMatrix":
        m = np.asarray(arr, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise NotAState(f"expected a square matrix, got shape {m.shape}")
        d = m.shape[0]
        if not 2 <= d <= MAX_DIM:
            raise NotAState(f"dimension {d} outside [2, {MAX_DIM}]")
        if not np.all(np.isfinite(m.view(float))):
            raise NotAState("entries must be finite")
        if np.max(np.abs(m - m.conj().T)) > HERMITICITY_TOL:
            raise NotAState("matrix is not Hermitian within 1e-12")
        herm = (m + m.conj().T) / 2.0
        eigvals = np.linalg.eigvalsh(herm)
        if eigvals[0] < -STATE_PSD_TOL:
            raise NotAState(f"matrix has eigenvalue {eigvals[0]} below -1e-10")
        if abs(np.trace(herm).real - 1.0) > TRACE_TOL:
            raise NotAState(f"trace {np.trace(herm).real} differs from 1 beyond 1e-12")
        return cls(mat=herm)

    @classmethod
    def pure(cls, vec) -> "DensityMatrix":
        v = np.asarray(vec, dtype=complex).reshape(-1)
        n = np.linalg.norm(v)
        if not n > 0.0:
            raise NotAState("zero state vector")
        v = v / n
        return cls.from_array(np.outer(v, v.conj()))


def load_density_matrix(source) -> DensityMatrix:
    """Load a density matrix from JSON: {"dim": n, "re": [[..]], "im": [[..]]}.

    ``source`` may be a path or an already-parsed dict.  Row-major real and
    imaginary parts; the result is validated like any other state.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    else:
        payload = source
    try:
        dim = int(payload["dim"])
        re = np.asarray(payload["re"], dtype=float)
        im = np.asarray(payload["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise NotAState(f"malformed density-matrix JSON: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise NotAState(
            f"re/im shapes {re.shape}/{im.shape} do not match dim {dim}"
        )
    return DensityMatrix.from_array(re + 1j * im)


@dataclass(frozen=True, eq=False)
class MixedInstance:
    """Two mixed states with priors and their cached fidelity."""

    rho1: DensityMatrix
    rho2: DensityMatrix
    eta1: float
    eta2: float
    fidelity: float

    @classmethod
    def from_states(cls, rho1: DensityMatrix, rho2: DensityMatrix, eta1: float) -> "MixedInstance":
        eta1 = float(eta1)
        if not 0.0 < eta1 < 1.0:
            raise DegeneratePrior(f"eta1 must lie strictly in (0, 1), got {eta1}")
        if rho1.dim != rho2.dim:
            raise DimensionMismatch(f"dimensions {rho1.dim} and {rho2.dim} differ")
        return cls(rho1=rho1, rho2=rho2, eta1=eta1, eta2=1.0 - eta1, fidelity=fidelity(rho1, rho2))


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(m)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def fidelity(rho1: DensityMatrix, rho2: DensityMatrix) -> float:
    """tr sqrt(sqrt(rho1) rho2 sqrt(rho1)), in [0, 1]."""
    if rho1.dim != rho2.dim:
        raise DimensionMismatch(f"dimensions {rho1.dim} and {rho2.dim} differ")
    root = _psd_sqrt(rho1.mat)
    inner = root @ rho2.mat @ root
    vals = np.linalg.eigvalsh((inner + inner.conj().T) / 2.0)
    f = float(np.sum(np.sqrt(np.clip(vals, 0.0, None))))
    return min(f, 1.0)


def helstrom_mixed(minst: MixedInstance) -> float:
    """Exact unconstrained optimum (1 + tr|eta1 rho1 - eta2 rho2|) / 2."""
    diff = minst.eta1 * minst.rho1.mat - minst.eta2 * minst.rho2.mat
    return float(0.5 * (1.0 + np.sum(np.abs(np.linalg.eigvalsh(diff)))))


def upper_bound_mixed(minst: MixedInstance, m: float) -> float:
    """Fidelity-substituted pure-state optimum; upper-bounds the mixed one."""
    m = float(m)
    if not 0.0 <= m <= 1.0:
        raise MarginOutOfRange(f"margin must lie in [0, 1], got {m}")
    a, b = sorted((minst.eta1, minst.eta2))
    return _pmax_scalar(a, b, minst.fidelity**2, m)


def trace_fidelity_inequality_gap(minst: MixedInstance) -> float:
    """sqrt(1 - 4 eta1 eta2 F^2) - tr|eta1 rho1 - eta2 rho2|; nonnegative."""
    f = minst.fidelity
    bound = np.sqrt(max(1.0 - 4.0 * minst.eta1 * minst.eta2 * f * f, 0.0))
    diff = minst.eta1 * minst.rho1.mat - minst.eta2 * minst.rho2.mat
    return float(bound - np.sum(np.abs(np.linalg.eigvalsh(diff))))


def random_density(dim: int, rng: np.random.Generator, pure: bool = False) -> DensityMatrix:
    """Sample a random state: Haar vector if pure, else normalized Ginibre."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    if pure:
        v = g[:, 0]
        return DensityMatrix.pure(v)
    m = g @ g.conj().T
    return DensityMatrix.from_array(m / np.trace(m).real)
