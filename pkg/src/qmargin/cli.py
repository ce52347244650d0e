"""Command-line interface: solve, sweep, verify, mixed-bound."""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .instance import (
    DegeneratePrior,
    Instance,
    LinearlyDependent,
    MarginOutOfRange,
    NotNormalizable,
    canonicalize,
    classify,
    critical_margins,
)
from .mixed import (
    DimensionMismatch,
    MixedInstance,
    NotAState,
    helstrom_mixed,
    load_density_matrix,
    random_density,
    trace_fidelity_inequality_gap,
    upper_bound_mixed,
)
from .oracle import oracle_mixed_weak, oracle_pure_strong, oracle_pure_weak
from .strong import (
    p_max_strong,
    solve_strong,
    strong_critical_margins,
    strong_margin_of_weak,
    weak_margin_of_strong,
)
from .weak import OutOfDomain, Solution, certificate_report, p_max_weak, solve_weak

_USER_ERRORS = (
    NotNormalizable,
    LinearlyDependent,
    DegeneratePrior,
    MarginOutOfRange,
    OutOfDomain,
    NotAState,
    DimensionMismatch,
)

SWEEP_COLUMNS = ("eta1", "m", "domain", "p_max", "trace_e1", "p_error", "m_c", "m_c_prime")


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def _parse_state(text: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 4:
        raise NotNormalizable(
            f"state must be 're0,im0,re1,im1' (four comma-separated reals), got {text!r}"
        )
    vals = [float(p) for p in parts]
    return np.array([vals[0] + 1j * vals[1], vals[2] + 1j * vals[3]])


def _instance_from_args(args) -> Instance:
    if args.overlap is not None:
        if args.state1 is not None or args.state2 is not None:
            raise LinearlyDependent("pass either --overlap or --state1/--state2, not both")
        return Instance.from_overlap(args.eta1, args.overlap)
    if args.state1 is None or args.state2 is None:
        raise NotNormalizable("pass --overlap, or both --state1 and --state2")
    return canonicalize(_parse_state(args.state1), _parse_state(args.state2), args.eta1)


def _herm_payload(h) -> dict:
    return {"alpha": h.alpha, "beta": [float(b) for b in h.beta]}


def _solution_payload(sol: Solution) -> dict:
    cert = sol.cert
    return {
        "domain": sol.domain.kind.value,
        "m_c": sol.domain.m_c,
        "m_c_prime": sol.domain.m_c_prime,
        "p_max": sol.p_max,
        "povm": [_herm_payload(e) for e in sol.povm.elements],
        "certificate": {
            "operator": _herm_payload(cert.operator),
            "multiplier": cert.multiplier,
            "margin": cert.margin,
            "value": cert.value,
        },
        "diagnostics": {
            "p_success": sol.p_success,
            "p_error": sol.p_error,
            "cond_err_1": sol.cond_err_1,
            "cond_err_2": sol.cond_err_2,
            "trace_e1": sol.trace_e1,
        },
    }


def _print_solution(payload: dict, out) -> None:
    print(f"domain: {payload['domain']}", file=out)
    print(f"m_c: {_g17(payload['m_c'])}", file=out)
    print(f"m_c_prime: {_g17(payload['m_c_prime'])}", file=out)
    print(f"p_max: {_g17(payload['p_max'])}", file=out)
    for label, element in zip(("E1", "E2", "E3"), payload["povm"]):
        beta = ", ".join(_g17(b) for b in element["beta"])
        print(f"{label}: alpha={_g17(element['alpha'])} beta=({beta})", file=out)
    cert = payload["certificate"]
    beta = ", ".join(_g17(b) for b in cert["operator"]["beta"])
    print(f"certificate operator: alpha={_g17(cert['operator']['alpha'])} beta=({beta})", file=out)
    print(f"certificate multiplier: {_g17(cert['multiplier'])}", file=out)
    print(f"certificate value: {_g17(cert['value'])}", file=out)
    diag = payload["diagnostics"]
    print(f"p_success: {_g17(diag['p_success'])}", file=out)
    print(f"p_error: {_g17(diag['p_error'])}", file=out)
    for key in ("cond_err_1", "cond_err_2"):
        val = diag[key]
        print(f"{key}: {'undefined' if val is None else _g17(val)}", file=out)
    print(f"trace_e1: {_g17(diag['trace_e1'])}", file=out)


def cmd_solve(args) -> int:
    inst = _instance_from_args(args)
    if args.kind == "strong":
        sol = solve_strong(inst, args.margin)
    else:
        sol = solve_weak(inst, args.margin)
    payload = _solution_payload(sol)
    payload["input"] = {
        "eta1": args.eta1,
        "overlap": args.overlap,
        "state1": args.state1,
        "state2": args.state2,
        "margin": args.margin,
        "kind": args.kind,
    }
    if args.kind == "strong":
        payload["weak_margin"] = sol.cert.margin
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        if args.kind == "strong":
            print(f"weak_margin: {_g17(sol.cert.margin)}")
        _print_solution(payload, sys.stdout)
    return 0


def _axis_values(fixed, lo, hi, steps, name) -> list[float]:
    if fixed is not None:
        return [float(fixed)]
    if lo is None or hi is None:
        raise MarginOutOfRange(f"pass --{name} or both --{name}-min and --{name}-max")
    if steps < 2:
        raise MarginOutOfRange(f"--{name}-steps must be at least 2 for a range")
    return [float(v) for v in np.linspace(float(lo), float(hi), steps)]


def cmd_sweep(args) -> int:
    etas = _axis_values(args.eta1, args.eta1_min, args.eta1_max, args.eta1_steps, "eta1")
    margins = _axis_values(args.margin, args.margin_min, args.margin_max, args.margin_steps, "margin")
    columns = SWEEP_COLUMNS if args.columns is None else tuple(args.columns.split(","))
    for col in columns:
        if col not in SWEEP_COLUMNS:
            raise MarginOutOfRange(f"unknown column {col!r}; choose from {', '.join(SWEEP_COLUMNS)}")
    try:
        fh = open(args.out, "w", newline="", encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return 2
    with fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for eta1 in etas:
            inst = Instance.from_overlap(eta1, args.overlap)
            for m in margins:
                if args.kind == "strong":
                    sol = solve_strong(inst, m)
                    m_c, m_c_prime = strong_critical_margins(inst.eta1, inst.eta2, inst.s)
                    p_val = p_max_strong(inst, m)
                else:
                    sol = solve_weak(inst, m)
                    m_c, m_c_prime = sol.domain.m_c, sol.domain.m_c_prime
                    p_val = sol.p_max
                row = {
                    "eta1": _g17(eta1),
                    "m": _g17(m),
                    "domain": sol.domain.kind.value,
                    "p_max": _g17(p_val),
                    "trace_e1": _g17(sol.trace_e1),
                    "p_error": _g17(sol.p_error),
                    "m_c": _g17(m_c),
                    "m_c_prime": _g17(m_c_prime),
                }
                writer.writerow([row[c] for c in columns])
    return 0


def _verify_pure(samples: int, seed: int, strong: bool) -> tuple[bool, list[str]]:
    rng = np.random.default_rng(seed)
    worst = {}

    def track(metric, value, params):
        if metric not in worst or value > worst[metric][0]:
            worst[metric] = (value, params)

    for _ in range(samples):
        eta1 = rng.uniform(0.02, 0.5)
        s = rng.uniform(0.0, 0.98)
        inst = Instance.from_overlap(eta1, np.sqrt(s))
        params = (eta1, np.sqrt(s))
        if strong:
            m_s = rng.uniform(0.0, 0.95)
            analytic = p_max_strong(inst, m_s)
            found = oracle_pure_strong(inst, m_s)
            sol = solve_strong(inst, m_s)
            tag = params + (m_s,)
            track("deviation", abs(analytic - found), tag)
            for cond in (sol.cond_err_1, sol.cond_err_2):
                if cond is not None:
                    track("margin_violation", cond - m_s, tag)
            roundtrip = strong_margin_of_weak(inst, weak_margin_of_strong(inst, m_s))
            track("roundtrip", abs(roundtrip - m_s), tag)
            rep = certificate_report(inst, sol.cert.margin, sol.povm, sol.cert)
        else:
            m = rng.uniform(0.0, 1.0)
            analytic = p_max_weak(inst, m)
            found, _ = oracle_pure_weak(inst, m)
            sol = solve_weak(inst, m)
            tag = params + (m,)
            track("deviation", abs(analytic - found), tag)
            track("margin_violation", sol.p_error - m, tag)
            track("oracle_excess", found - sol.cert.value, tag)
            rep = certificate_report(inst, m, sol.povm, sol.cert)
        track("feasibility_violation", -min(rep.feasibility_eigs), tag)
        track("slackness", max(rep.slackness), tag)
        track("margin_slack", abs(rep.margin_slack), tag)
        track("gap", rep.gap, tag)

    limits = {
        "deviation": 1e-3,
        "feasibility_violation": 1e-12,
        "slackness": 1e-10,
        "margin_slack": 1e-10,
        "gap": 1e-10,
        "margin_violation": 1e-10 if strong else 1e-12,
        "oracle_excess": 1e-9,
        "roundtrip": 1e-10,
    }
    ok = True
    lines = []
    for metric, (value, tag) in sorted(worst.items()):
        limit = limits[metric]
        passed = value <= limit
        ok &= passed
        lines.append(f"max {metric}: {value:.3e}  (tol {limit:.0e}) {'ok' if passed else 'FAIL'}")
        if not passed:
            lines.append(
                "  worst instance: eta1={:.17g} overlap={:.17g} margin={:.17g}".format(*tag)
            )
    return ok, lines


def _verify_mixed(samples: int, seed: int) -> tuple[bool, list[str]]:
    rng = np.random.default_rng(seed)
    worst_gap = (np.inf, None)
    worst_excess = (-np.inf, None)
    for _ in range(samples):
        eta1 = rng.uniform(0.05, 0.95)
        rho1 = random_density(2, rng, pure=bool(rng.integers(0, 2)))
        rho2 = random_density(2, rng, pure=bool(rng.integers(0, 2)))
        minst = MixedInstance.from_states(rho1, rho2, eta1)
        m = rng.uniform(0.0, 1.0)
        gap = trace_fidelity_inequality_gap(minst)
        if gap < worst_gap[0]:
            worst_gap = (gap, (eta1, m))
        excess = oracle_mixed_weak(minst, m) - upper_bound_mixed(minst, m)
        if excess > worst_excess[0]:
            worst_excess = (excess, (eta1, m))
    ok = worst_gap[0] >= -1e-10 and worst_excess[0] <= 1e-6
    lines = [
        f"min trace/fidelity inequality gap: {worst_gap[0]:.3e}  (tol -1e-10)"
        f" {'ok' if worst_gap[0] >= -1e-10 else 'FAIL'}",
        f"max oracle excess over bound: {worst_excess[0]:.3e}  (tol 1e-06)"
        f" {'ok' if worst_excess[0] <= 1e-6 else 'FAIL'}",
    ]
    return ok, lines


def cmd_verify(args) -> int:
    if args.mixed:
        ok, lines = _verify_mixed(args.samples, args.seed)
        header = f"samples: {args.samples}  seed: {args.seed}  mode: mixed"
    else:
        ok, lines = _verify_pure(args.samples, args.seed, args.kind == "strong")
        header = f"samples: {args.samples}  seed: {args.seed}  kind: {args.kind}"
    print(header)
    for line in lines:
        print(line)
    print(f"result: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_mixed_bound(args) -> int:
    rho1 = load_density_matrix(args.rho1)
    rho2 = load_density_matrix(args.rho2)
    minst = MixedInstance.from_states(rho1, rho2, args.eta1)
    m_c, m_c_prime = critical_margins(minst.eta1, minst.eta2, minst.fidelity**2)
    payload = {
        "fidelity": minst.fidelity,
        "m_c": m_c,
        "m_c_prime": m_c_prime,
        "upper_bound": upper_bound_mixed(minst, args.margin),
        "helstrom": helstrom_mixed(minst),
        "inequality_gap": trace_fidelity_inequality_gap(minst),
    }
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        for key in ("fidelity", "m_c", "m_c_prime", "upper_bound", "helstrom", "inequality_gap"):
            print(f"{key}: {_g17(payload[key])}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmargin",
        description="Optimal two-state discrimination under an error-margin constraint.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve a single instance")
    solve.add_argument("--eta1", type=float, required=True, help="prior of the first state")
    solve.add_argument("--overlap", type=float, help="|<phi1|phi2>| in [0, 1)")
    solve.add_argument("--state1", help="first state as re0,im0,re1,im1")
    solve.add_argument("--state2", help="second state as re0,im0,re1,im1")
    solve.add_argument("--margin", type=float, required=True)
    solve.add_argument("--kind", choices=("weak", "strong"), default="weak")
    solve.add_argument("--json", action="store_true")
    solve.set_defaults(func=cmd_solve)

    sweep = sub.add_parser("sweep", help="write a CSV over a parameter grid")
    sweep.add_argument("--overlap", type=float, required=True)
    sweep.add_argument("--eta1", type=float)
    sweep.add_argument("--eta1-min", type=float)
    sweep.add_argument("--eta1-max", type=float)
    sweep.add_argument("--eta1-steps", type=int, default=2)
    sweep.add_argument("--margin", type=float)
    sweep.add_argument("--margin-min", type=float)
    sweep.add_argument("--margin-max", type=float)
    sweep.add_argument("--margin-steps", type=int, default=2)
    sweep.add_argument("--kind", choices=("weak", "strong"), default="weak")
    sweep.add_argument("--columns", help="comma-separated subset of the default columns")
    sweep.add_argument("--out", required=True)
    sweep.set_defaults(func=cmd_sweep)

    verify = sub.add_parser("verify", help="compare the solver against direct search")
    verify.add_argument("--samples", type=int, required=True)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--kind", choices=("weak", "strong"), default="weak")
    verify.add_argument("--mixed", action="store_true")
    verify.set_defaults(func=cmd_verify)

    mixed = sub.add_parser("mixed-bound", help="fidelity bound for two mixed states")
    mixed.add_argument("--rho1", required=True, help="density-matrix JSON file")
    mixed.add_argument("--rho2", required=True, help="density-matrix JSON file")
    mixed.add_argument("--eta1", type=float, required=True)
    mixed.add_argument("--margin", type=float, required=True)
    mixed.add_argument("--json", action="store_true")
    mixed.set_defaults(func=cmd_mixed_bound)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _USER_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
