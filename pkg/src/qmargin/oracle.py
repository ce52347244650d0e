"""Brute-force verification by direct search over parameterized POVMs.

The closed forms elsewhere in this package are never consulted here: the
oracle maximizes the success probability directly over an explicit POVM
family and reports the best feasible value it finds, which is a certified
lower bound on the optimum (every evaluated point is a feasible
measurement).  Agreement with the analytic solver is the package's
end-to-end correctness check.

Parameterization.  The conclusive elements are scaled rank-1 projectors

    E1 = t1 (I + u(th1).sigma)/2,   E2 = t2 (I + u(th2).sigma)/2,

with u(th) = (sin th, 0, cos th), and E3 = I - E1 - E2 must stay PSD.
Restricting the axes to the x-z plane loses nothing: after
canonicalization every state and constraint operator lives in the real
span of {I, sigma_x, sigma_z}, and replacing any POVM element by the
average of itself and its reflection through that plane changes no trace
against the states while preserving positivity and completeness, so some
optimal POVM is reflection-symmetric, i.e. in-plane.  ``fullsphere_probe``
spot-checks this reduction by searching over out-of-plane axes too.

Search strategy.  The axes are scanned on a coarse angular grid and then
polished by coordinate descent (axis and diagonal moves, geometrically
shrinking steps).  The weights need no grid: at fixed axes the objective
is linear in (t1, t2) and the feasible slice is convex, bounded by the
unit box, the mean-error line  d1 t1 + d2 t2 = m,  and the positivity
curve

    Q(t1, t2) = 2 - 2 t1 - 2 t2 + (1 - u1.u2) t1 t2 = 0,

so the optimal weights lie on a short list of closed-form candidates (box
corners, pairwise boundary intersections, and the tangency point of the
objective on the curve) that is enumerated exactly.  Descending in the
weights instead would crawl along the active boundary and stall.  The two
state-orthogonal axis pairs are always included as starts: at m = 0 the
feasible set with nonzero weights collapses to exactly those axes, a
spike no finite grid or local step can discover from outside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bloch import Herm2
from .instance import Instance, MarginOutOfRange
from .mixed import DimensionMismatch, MixedInstance
from .weak import Povm3

_PROB_FLOOR = 1e-14


@dataclass(frozen=True)
class SearchConfig:
    """Grid resolution and refinement schedule for the direct search."""

    coarse_grid: int = 180      # angular samples per POVM axis
    refine_iters: int = 40
    refine_shrink: float = 0.5
    feas_tol: float = 1e-12
    top_starts: int = 3

    def __post_init__(self):
        if self.coarse_grid < 8:
            raise ValueError("coarse_grid must be at least 8")
        if self.refine_iters <= 0 or not 0.0 < self.refine_shrink < 1.0:
            raise ValueError("refinement parameters must be positive")
        if self.feas_tol < 0.0 or self.top_starts < 1:
            raise ValueError("feas_tol must be nonnegative and top_starts positive")


DEFAULT_CONFIG = SearchConfig()

_REFINE_DIRECTIONS = (
    (1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0),
    (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0),
)


def _remainder_min_eig(t1: float, t2: float, w: float) -> float:
    # Smaller eigenvalue of E3 = I - E1 - E2 for unit axes with u1.u2 = w.
    beta_sq = max(0.0, t1 * t1 + t2 * t2 + 2.0 * t1 * t2 * w) / 4.0
    return 1.0 - (t1 + t2) / 2.0 - math.sqrt(beta_sq)


def _tangency(c1, c2, w, gamma):
    # Point where the objective gradient is tangent to the positivity curve.
    if gamma <= 1e-15 or c1 <= 0.0:
        return None
    t1 = (2.0 - math.sqrt(max(0.0, 2.0 * c2 * (1.0 + w)) / c1)) / gamma
    den = 2.0 - gamma * t1
    if den <= 1e-15:
        return None
    return t1, (2.0 - 2.0 * t1) / den


def _weight_candidates_weak(c1, c2, d1, d2, w, margin):
    """Closed-form candidate weight pairs for the mean-error slice."""
    gamma = 1.0 - w
    cands = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
    if d1 > 0.0:
        cands.append((margin / d1, 0.0))
        cands.append(((margin - d2) / d1, 1.0))
    if d2 > 0.0:
        cands.append((0.0, margin / d2))
        cands.append((1.0, (margin - d1) / d2))
    tangent = _tangency(c1, c2, w, gamma)
    if tangent is not None:
        cands.append(tangent)
    # margin line meets the positivity curve
    qa = -gamma * d1
    qb = 2.0 * d1 - 2.0 * d2 + gamma * margin
    qc = 2.0 * d2 - 2.0 * margin
    if abs(qa) > 1e-15:
        disc = qb * qb - 4.0 * qa * qc
        if disc >= 0.0 and d2 > 0.0:
            root = math.sqrt(disc)
            for t1 in ((-qb + root) / (2.0 * qa), (-qb - root) / (2.0 * qa)):
                cands.append((t1, (margin - d1 * t1) / d2))
    elif abs(qb) > 1e-15 and d2 > 0.0:
        t1 = -qc / qb
        cands.append((t1, (margin - d1 * t1) / d2))
    if d1 > 0.0 and d2 <= 0.0:
        # vertical margin line against the curve
        t1 = margin / d1
        den = 2.0 - gamma * t1
        if den > 1e-15:
            cands.append((t1, (2.0 - 2.0 * t1) / den))
    return cands


def _best_weights_weak_scalar(c1, c2, d1, d2, w, margin, tol):
    best = (-1.0, 0.0, 0.0)
    for t1, t2 in _weight_candidates_weak(c1, c2, d1, d2, w, margin):
        t1 = min(1.0, max(0.0, t1))
        t2 = min(1.0, max(0.0, t2))
        if d1 * t1 + d2 * t2 > margin + tol:
            continue
        if _remainder_min_eig(t1, t2, w) < -tol:
            continue
        p = c1 * t1 + c2 * t2
        if p > best[0]:
            best = (p, t1, t2)
    return best


def _best_weights_strong_scalar(c1, c2, ok1, ok2, w, tol):
    # Conditional errors do not depend on the weights: an element whose
    # conditional error exceeds the margin can only appear with weight 0
    # (a zero-probability outcome imposes no constraint), and the rest is
    # limited by positivity alone.
    gamma = 1.0 - w
    cands = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
    tangent = _tangency(c1, c2, w, gamma)
    if tangent is not None:
        cands.append(tangent)
    best = (-1.0, 0.0, 0.0)
    for t1, t2 in cands:
        t1 = min(1.0, max(0.0, t1)) if ok1 else 0.0
        t2 = min(1.0, max(0.0, t2)) if ok2 else 0.0
        if _remainder_min_eig(t1, t2, w) < -tol:
            continue
        p = c1 * t1 + c2 * t2
        if p > best[0]:
            best = (p, t1, t2)
    return best


class _Searcher:
    """Angular grid plus coordinate descent, with exact weight subproblems."""

    def __init__(self, n1, n2, eta1, eta2, margin, strong, cfg: SearchConfig):
        self.n1 = np.asarray(n1, dtype=float)
        self.n2 = np.asarray(n2, dtype=float)
        self.eta1 = float(eta1)
        self.eta2 = float(eta2)
        self.margin = float(margin)
        self.strong = bool(strong)
        self.cfg = cfg

    def evaluate(self, th1: float, th2: float) -> tuple[float, float, float]:
        s1, z1 = math.sin(th1), math.cos(th1)
        s2, z2 = math.sin(th2), math.cos(th2)
        h1 = (1.0 + s1 * self.n1[0] + z1 * self.n1[2]) / 2.0  # tr(P1 rho1)
        g1 = (1.0 + s1 * self.n2[0] + z1 * self.n2[2]) / 2.0  # tr(P1 rho2)
        h2 = (1.0 + s2 * self.n1[0] + z2 * self.n1[2]) / 2.0  # tr(P2 rho1)
        g2 = (1.0 + s2 * self.n2[0] + z2 * self.n2[2]) / 2.0  # tr(P2 rho2)
        w = s1 * s2 + z1 * z2
        c1, c2 = self.eta1 * h1, self.eta2 * g2
        tol = self.cfg.feas_tol

        def remainder_eig(t1, t2):
            # Componentwise Bloch vector of E3: the direct form keeps the
            # error absolute (~1e-16) even where the two axes are nearly
            # antipodal, which the u1.u2 form cannot.
            bx = t1 * s1 + t2 * s2
            bz = t1 * z1 + t2 * z2
            return 1.0 - (t1 + t2) / 2.0 - math.hypot(bx, bz) / 2.0

        if self.strong:
            den1 = self.eta1 * h1 + self.eta2 * g1
            den2 = self.eta2 * g2 + self.eta1 * h2
            ok1 = self.eta2 * g1 <= (self.margin + tol) * den1 + _PROB_FLOOR
            ok2 = self.eta1 * h2 <= (self.margin + tol) * den2 + _PROB_FLOOR
            gamma = 1.0 - w
            cands = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]
            tangent = _tangency(c1, c2, w, gamma)
            if tangent is not None:
                cands.append(tangent)
            best = (-1.0, 0.0, 0.0)
            for t1, t2 in cands:
                t1 = min(1.0, max(0.0, t1)) if ok1 else 0.0
                t2 = min(1.0, max(0.0, t2)) if ok2 else 0.0
                if remainder_eig(t1, t2) < -tol:
                    continue
                p = c1 * t1 + c2 * t2
                if p > best[0]:
                    best = (p, t1, t2)
            return best
        d1, d2 = self.eta2 * g1, self.eta1 * h2
        best = (-1.0, 0.0, 0.0)
        for t1, t2 in _weight_candidates_weak(c1, c2, d1, d2, w, self.margin):
            t1 = min(1.0, max(0.0, t1))
            t2 = min(1.0, max(0.0, t2))
            if d1 * t1 + d2 * t2 > self.margin + tol:
                continue
            if remainder_eig(t1, t2) < -tol:
                continue
            p = c1 * t1 + c2 * t2
            if p > best[0]:
                best = (p, t1, t2)
        return best

    def _grid_values(self, thetas: np.ndarray) -> np.ndarray:
        # Vectorized coarse scan: same candidate enumeration, arrays over
        # all angle pairs at once.
        sin, cos = np.sin(thetas), np.cos(thetas)
        h = (1.0 + sin * self.n1[0] + cos * self.n1[2]) / 2.0
        g = (1.0 + sin * self.n2[0] + cos * self.n2[2]) / 2.0
        c1 = (self.eta1 * h)[:, None]
        c2 = (self.eta2 * g)[None, :]
        w = sin[:, None] * sin[None, :] + cos[:, None] * cos[None, :]
        gamma = 1.0 - w
        tol = self.cfg.feas_tol
        zeros = np.zeros_like(w)
        ones = np.ones_like(w)
        def remainder_eig(t1, t2):
            bx = t1 * sin[:, None] + t2 * sin[None, :]
            bz = t1 * cos[:, None] + t2 * cos[None, :]
            return 1.0 - (t1 + t2) / 2.0 - np.hypot(bx, bz) / 2.0

        if self.strong:
            den1 = self.eta1 * h + self.eta2 * g
            den2 = self.eta2 * g + self.eta1 * h
            ok1 = (self.eta2 * g <= (self.margin + tol) * den1 + _PROB_FLOOR)[:, None]
            ok2 = (self.eta1 * h <= (self.margin + tol) * den2 + _PROB_FLOOR)[None, :]
            with np.errstate(divide="ignore", invalid="ignore"):
                t1q = (2.0 - np.sqrt(np.maximum(2.0 * c2 * (1.0 + w), 0.0) / c1)) / gamma
                t2q = (2.0 - 2.0 * t1q) / (2.0 - gamma * t1q)
            pairs = [(zeros, zeros), (ones, zeros), (zeros, ones), (ones, ones), (t1q, t2q)]
            best = np.full(w.shape, -1.0)
            for t1, t2 in pairs:
                t1 = np.where(ok1, np.clip(np.nan_to_num(t1, nan=-1.0), 0.0, 1.0), 0.0)
                t2 = np.where(ok2, np.clip(np.nan_to_num(t2, nan=-1.0), 0.0, 1.0), 0.0)
                feas = remainder_eig(t1, t2) >= -tol
                best = np.maximum(best, np.where(feas, c1 * t1 + c2 * t2, -1.0))
            return best
        d1 = (self.eta2 * g)[:, None]
        d2 = (self.eta1 * h)[None, :]
        m = self.margin
        with np.errstate(divide="ignore", invalid="ignore"):
            t1q = (2.0 - np.sqrt(np.maximum(2.0 * c2 * (1.0 + w), 0.0) / c1)) / gamma
            qa = -gamma * d1
            qb = 2.0 * d1 - 2.0 * d2 + gamma * m
            qc = 2.0 * d2 - 2.0 * m
            disc = np.sqrt(qb * qb - 4.0 * qa * qc)
            r_plus = (-qb + disc) / (2.0 * qa)
            r_minus = (-qb - disc) / (2.0 * qa)
            r_lin = -qc / qb
            t1v = m / d1
            pairs = [
                (zeros, zeros), (ones, zeros), (zeros, ones), (ones, ones),
                (m / d1 + zeros, zeros), ((m - d2) / d1, ones),
                (zeros, m / d2 + zeros), (ones, (m - d1) / d2),
                (t1q, (2.0 - 2.0 * t1q) / (2.0 - gamma * t1q)),
                (r_plus, (m - d1 * r_plus) / d2),
                (r_minus, (m - d1 * r_minus) / d2),
                (r_lin, (m - d1 * r_lin) / d2),
                (t1v, (2.0 - 2.0 * t1v) / (2.0 - gamma * t1v)),
            ]
        best = np.full(w.shape, -1.0)
        for t1, t2 in pairs:
            t1 = np.clip(np.nan_to_num(t1, nan=-1.0, posinf=-1.0, neginf=-1.0), 0.0, 1.0)
            t2 = np.clip(np.nan_to_num(t2, nan=-1.0, posinf=-1.0, neginf=-1.0), 0.0, 1.0)
            feas = (d1 * t1 + d2 * t2 <= m + tol) & (remainder_eig(t1, t2) >= -tol)
            best = np.maximum(best, np.where(feas, c1 * t1 + c2 * t2, -1.0))
        return best

    def starts(self) -> list[tuple[float, float, float]]:
        n = self.cfg.coarse_grid
        thetas = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        p = self._grid_values(thetas)
        order = np.argsort(p.reshape(-1))[::-1]
        picked: list[tuple[float, float, float]] = []
        for idx in order[: 6 * self.cfg.top_starts]:
            i, j = np.unravel_index(int(idx), p.shape)
            if p[i, j] <= 0.0:
                break
            a, b = float(thetas[i]), float(thetas[j])
            if any(
                _angle_dist(a, pa) < 0.25 and _angle_dist(b, pb) < 0.25
                for _, pa, pb in picked
            ):
                continue
            picked.append((float(p[i, j]), a, b))
            if len(picked) >= self.cfg.top_starts:
                break
        # State-orthogonal axes: the zero-margin optimum lives exactly there.
        perp1 = math.atan2(-self.n2[0], -self.n2[2])
        perp2 = math.atan2(-self.n1[0], -self.n1[2])
        p0, _, _ = self.evaluate(perp1, perp2)
        picked.append((p0, perp1, perp2))
        return picked

    def refine(self, p0: float, th1: float, th2: float) -> tuple[float, float, float]:
        cfg = self.cfg
        step = 2.0 * np.pi / cfg.coarse_grid
        best_p, best = p0, (th1, th2)
        for _ in range(cfg.refine_iters):
            for dx, dy in _REFINE_DIRECTIONS:
                moved = 0
                while moved < 8:
                    trial = (best[0] + dx * step, best[1] + dy * step)
                    p, _, _ = self.evaluate(*trial)
                    if p > best_p:
                        best_p, best = p, trial
                        moved += 1
                    else:
                        break
            step *= cfg.refine_shrink
        return best_p, best[0], best[1]

    def run(self) -> tuple[float, tuple[float, float, float, float]]:
        best_p, best_params = 0.0, (0.0, 0.0, 0.0, 0.0)
        for p0, th1, th2 in self.starts():
            p, r1, r2 = self.refine(p0, th1, th2)
            p, t1, t2 = self.evaluate(r1, r2)
            if p > best_p:
                best_p, best_params = p, (r1, r2, t1, t2)
        return best_p, best_params


def _angle_dist(a: float, b: float) -> float:
    d = abs(a - b) % (2.0 * np.pi)
    return min(d, 2.0 * np.pi - d)


def _povm_from_params(params) -> Povm3:
    th1, th2, t1, t2 = params
    u1 = np.array([np.sin(th1), 0.0, np.cos(th1)])
    u2 = np.array([np.sin(th2), 0.0, np.cos(th2)])
    e1 = Herm2(t1 / 2.0, t1 * u1 / 2.0)
    e2 = Herm2(t2 / 2.0, t2 * u2 / 2.0)
    e3 = Herm2(1.0 - (t1 + t2) / 2.0, -(t1 * u1 + t2 * u2) / 2.0)
    return Povm3(e1, e2, e3)


def _check_margin(m: float) -> float:
    m = float(m)
    if not 0.0 <= m <= 1.0:
        raise MarginOutOfRange(f"margin must lie in [0, 1], got {m}")
    return m


def oracle_pure_weak(
    inst: Instance, m: float, cfg: SearchConfig = DEFAULT_CONFIG
) -> tuple[float, Povm3]:
    """Best mean-error-feasible success probability found by direct search."""
    m = _check_margin(m)
    searcher = _Searcher(inst.n1, inst.n2, inst.eta1, inst.eta2, m, False, cfg)
    p, params = searcher.run()
    return p, _povm_from_params(params)


def oracle_pure_strong(
    inst: Instance, m_s: float, cfg: SearchConfig = DEFAULT_CONFIG
) -> float:
    """Best conditional-error-feasible success probability found by search."""
    m_s = _check_margin(m_s)
    searcher = _Searcher(inst.n1, inst.n2, inst.eta1, inst.eta2, m_s, True, cfg)
    p, _ = searcher.run()
    return p


def _plane_frame(b1: np.ndarray, b2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """In-plane coordinates for two qubit Bloch vectors.

    The frame's z axis bisects the two vectors so that rank-1 inputs
    reproduce the canonical pure-state frame exactly.
    """
    mid = b1 + b2
    if np.linalg.norm(mid) > 1e-12:
        ez = mid / np.linalg.norm(mid)
    elif np.linalg.norm(b1) > 1e-12:
        seed = np.array([0.0, 0.0, 1.0])
        if abs(b1 @ seed) > 0.9 * np.linalg.norm(b1):
            seed = np.array([1.0, 0.0, 0.0])
        ez = np.cross(b1, seed)
        ez /= np.linalg.norm(ez)
    else:
        ez = np.array([0.0, 0.0, 1.0])
    ex = b1 - (b1 @ ez) * ez
    if np.linalg.norm(ex) > 1e-12:
        ex /= np.linalg.norm(ex)
    else:
        ex = np.array([1.0, 0.0, 0.0]) if abs(ez[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        ex -= (ex @ ez) * ez
        ex /= np.linalg.norm(ex)
    return (
        np.array([b1 @ ex, 0.0, b1 @ ez]),
        np.array([b2 @ ex, 0.0, b2 @ ez]),
    )


def oracle_mixed_weak(
    minst: MixedInstance, m: float, cfg: SearchConfig = DEFAULT_CONFIG
) -> float:
    """Feasible lower bound on the mixed-state optimum (qubits only).

    The conclusive elements are searched over scaled rank-1 projectors in
    the plane spanned by the two Bloch vectors, with the inconclusive
    remainder kept PSD.  Mixed states need not admit an in-plane optimal
    POVM, so the result is a lower bound, which is exactly what the
    fidelity upper bound is tested against.
    """
    m = _check_margin(m)
    if minst.rho1.dim != 2:
        raise DimensionMismatch(f"direct search supports qubits, got dim {minst.rho1.dim}")
    pauli = [
        np.array([[0, 1], [1, 0]], dtype=complex),
        np.array([[0, -1j], [1j, 0]], dtype=complex),
        np.array([[1, 0], [0, -1]], dtype=complex),
    ]
    bloch = lambda rho: np.array([np.trace(rho @ s).real for s in pauli])
    n1, n2 = _plane_frame(bloch(minst.rho1.mat), bloch(minst.rho2.mat))
    searcher = _Searcher(n1, n2, minst.eta1, minst.eta2, m, False, cfg)
    p, _ = searcher.run()
    return p


def classical_fidelity(inst: Instance, povm: Povm3) -> float:
    """Bhattacharyya overlap of the two outcome distributions.

    Never falls below the state overlap sqrt(s) for any POVM, which is the
    information-theoretic root of the three-outcome optimum.
    """
    total = 0.0
    for e in povm.elements:
        q1 = max(0.0, e.alpha + float(e.beta @ inst.n1))
        q2 = max(0.0, e.alpha + float(e.beta @ inst.n2))
        total += math.sqrt(q1 * q2)
    return float(total)


def fullsphere_probe(
    inst: Instance,
    m: float,
    n_starts: int = 40,
    rng: np.random.Generator | None = None,
    cfg: SearchConfig = DEFAULT_CONFIG,
) -> float:
    """Best feasible value with POVM axes anywhere on the Bloch sphere.

    Randomized multistart over four axis angles with the same exact weight
    subproblem, then coordinate descent.  Used to sanity-check the
    in-plane restriction: the result should match the in-plane optimum to
    search accuracy and never genuinely exceed it.
    """
    m = _check_margin(m)
    rng = rng or np.random.default_rng(0)
    n1, n2, eta1, eta2 = inst.n1, inst.n2, inst.eta1, inst.eta2
    tol = cfg.feas_tol

    def evaluate(params) -> float:
        th1, ph1, th2, ph2 = params
        u1 = (
            math.sin(th1) * math.cos(ph1),
            math.sin(th1) * math.sin(ph1),
            math.cos(th1),
        )
        u2 = (
            math.sin(th2) * math.cos(ph2),
            math.sin(th2) * math.sin(ph2),
            math.cos(th2),
        )
        c1 = eta1 * (1.0 + u1[0] * n1[0] + u1[2] * n1[2]) / 2.0
        c2 = eta2 * (1.0 + u2[0] * n2[0] + u2[2] * n2[2]) / 2.0
        d1 = eta2 * (1.0 + u1[0] * n2[0] + u1[2] * n2[2]) / 2.0
        d2 = eta1 * (1.0 + u2[0] * n1[0] + u2[2] * n1[2]) / 2.0
        w = u1[0] * u2[0] + u1[1] * u2[1] + u1[2] * u2[2]
        p, _, _ = _best_weights_weak_scalar(c1, c2, d1, d2, w, m, tol)
        return p

    # The in-plane family is a subset of this search space; seed with its
    # best configuration so the probe always reaches the in-plane value.
    inplane = _Searcher(n1, n2, eta1, eta2, m, False, cfg)
    _, (pth1, pth2, _, _) = inplane.run()

    def spherical(th_inplane: float) -> tuple[float, float]:
        ux, uz = math.sin(th_inplane), math.cos(th_inplane)
        return math.acos(max(-1.0, min(1.0, uz))), (0.0 if ux >= 0.0 else math.pi)

    s1_, p1_ = spherical(pth1)
    s2_, p2_ = spherical(pth2)
    seeds = [np.array([s1_, p1_, s2_, p2_])]
    for _ in range(n_starts):
        seeds.append(
            np.array(
                [
                    rng.uniform(0.0, np.pi),
                    rng.uniform(0.0, 2.0 * np.pi),
                    rng.uniform(0.0, np.pi),
                    rng.uniform(0.0, 2.0 * np.pi),
                ]
            )
        )
    best_p = 0.0
    for params in seeds:
        cur = params.copy()
        cur_p = evaluate(cur)
        step = 0.4
        for _ in range(cfg.refine_iters):
            for k in range(4):
                for sign in (1.0, -1.0):
                    trial = cur.copy()
                    trial[k] += sign * step
                    p = evaluate(trial)
                    if p > cur_p:
                        cur, cur_p = trial, p
            step *= cfg.refine_shrink
        best_p = max(best_p, cur_p)
    return best_p
