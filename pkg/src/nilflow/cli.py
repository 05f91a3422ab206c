"""``nilflow`` command line.

Exit codes: 0 success, 1 computation error (JSON message on stderr),
2 usage error.  Every JSON report carries the tool version, the seed and
the SHA-256 of the algebra's canonical serialization.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from typing import List, Optional

from . import __version__
from .coadjoint import (
    DEFAULT_SEED,
    casimir_basis,
    casimir_solver_V_even,
    classify_orbit,
    det_Btilde,
    generic_rank,
    is_casimir,
    leading_coefficient_V_even,
)
from .exactmath import ExtForm, Poly
from .flows import MagneticSetup, euler_field, integrate, magnetic_field_equations, quadratic_hamiltonian
from .forms import (
    certificates_V,
    check_contact,
    check_d_squared,
    check_symplectic,
    cohomology_dims,
    paired_form,
)
from .group import bch_product, group_axioms_check, lattice_closure_report
from .liealg import (
    Cocycle2,
    LieAlgebra,
    derived_series,
    invariant_profile,
    make_family,
    solvable_step,
)

# the F_n polynomials as printed in the source text, kept to report agreement
PRINTED_CASIMIRS = {
    1: "x2*x4 - 1/4*x3^2",
    2: "x3*x6^2 - 1/2*x4*x5*x6 + 1/8*x5^3",
    3: "x4*x8^3 - 1/2*x5*x7*x8^2 - 1/4*x6^2*x8^2 + 3/8*x6*x7^2*x8 - 15/48*x7^4",
}


class UsageError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get("NILFLOW_SEED")
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw, 0)
    except ValueError:
        raise UsageError(f"NILFLOW_SEED must be an integer, got {raw!r}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def meta(args, g: Optional[LieAlgebra] = None) -> dict:
    out = {"version": __version__, "seed": args.seed}
    if g is not None:
        out["algebra_sha256"] = g.digest()
    return out


def parse_vector(text: str, exact: bool = True):
    parts = [p for p in text.replace(" ", "").split(",") if p]
    try:
        return [Fraction(p) for p in parts] if exact else [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"cannot parse vector {text!r}")


def load_algebra(args) -> LieAlgebra:
    if getattr(args, "algebra", None):
        return LieAlgebra.load(args.algebra)
    if args.family and args.dim:
        return make_family(args.family, args.dim)
    raise UsageError("give --algebra FILE or --family {qn,vn} --dim N")


def add_source(p: argparse.ArgumentParser):
    p.add_argument("--algebra", help="algebra JSON file")
    p.add_argument("--family", choices=["qn", "vn", "Qn", "Vn"])
    p.add_argument("--dim", type=int)


def emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_algebra(args) -> int:
    g = load_algebra(args)
    if args.profile:
        emit(dumps({"profile": invariant_profile(g).as_dict(), **meta(args, g)}), args.out)
    elif args.out:
        g.dump(args.out)
    else:
        print(dumps(g.to_dict()))
    return 0


def cmd_casimir(args) -> int:
    g = load_algebra(args)
    cs = casimir_basis(g, max_degree=args.max_degree, seed=args.seed)
    rank = g.dim - cs.nu
    if args.format == "json":
        payload = {
            "generators": cs.canonical(),
            "nu": cs.nu,
            "generic_rank": rank,
            "complete": cs.complete,
            **meta(args, g),
        }
        emit(dumps(payload), args.out)
    else:
        # the interesting generator is the last one (x_n comes first)
        emit("\n".join(cs.canonical()[::-1]), args.out)
    return 0


def cmd_rank(args) -> int:
    g = load_algebra(args)
    res = generic_rank(g, seed=args.seed, symbolic=args.symbolic)
    emit(dumps({**res.as_dict(), **meta(args, g)}), args.out)
    return 0


def cmd_orbit(args) -> int:
    g = load_algebra(args)
    point = parse_vector(args.point)
    if len(point) != g.dim:
        raise UsageError(f"--point needs {g.dim} coordinates")
    emit(dumps({**classify_orbit(g, point).as_dict(), **meta(args, g)}), args.out)
    return 0


def _metric(args, n):
    if args.metric in (None, "identity"):
        return None
    with open(args.metric) as fh:
        return [[Fraction(str(v)) for v in row] for row in json.load(fh)]


def cmd_flow(args) -> int:
    g = load_algebra(args)
    x0 = parse_vector(args.x0, exact=False)
    charges = args.charge or []
    if charges:
        # the algebra is read as an extension whose last basis vector is central
        n = g.dim - 1
        if len(x0) != n:
            raise UsageError(f"--x0 needs {n} coordinates in magnetic mode")
        base = LieAlgebra(n, {k: {m: c for m, c in v.items() if m < n} for k, v in g.sc.items()})
        B = Cocycle2.from_pairs(n, {k: v[n] for k, v in g.sc.items() if n in v})
        H = quadratic_hamiltonian(n, _metric(args, n))
        systems = [(str(c), magnetic_field_equations(MagneticSetup(base, H, B, Fraction(c)))) for c in charges]
        monitor_alg = None
    else:
        n = g.dim
        if len(x0) != n:
            raise UsageError(f"--x0 needs {n} coordinates")
        H = quadratic_hamiltonian(n, _metric(args, n))
        systems = [(None, euler_field(g, H))]
        monitor_alg = g
    monitors = {}
    if args.monitor != "none":
        monitors["H"] = H
    if args.monitor == "casimirs" and monitor_alg is not None:
        cs = casimir_basis(monitor_alg, seed=args.seed)
        for i, F in enumerate(cs.generators):
            monitors[f"C{i + 1}"] = F
    summaries = {}
    for label, system in systems:
        traj = integrate(system, x0, args.dt, args.steps, monitors)
        if args.out:
            path = args.out if label is None else _suffixed(args.out, label)
            traj.to_csv(path)
        summaries[label or "euler"] = {"max_relative_drift": traj.summary(), "final_state": traj.states[-1].tolist()}
    report = {
        "runs": summaries,
        "monitors": {k: v.canonical() for k, v in monitors.items()},
        "dt": args.dt,
        "steps": args.steps,
        **meta(args, g),
    }
    emit(dumps(report), args.summary)
    return 0


def _suffixed(path: str, label: str) -> str:
    root, ext = os.path.splitext(path)
    return f"{root}_c{label.replace('/', '_')}{ext or '.csv'}"


def cmd_forms(args) -> int:
    g = load_algebra(args)
    n = g.dim
    if args.check == "symplectic":
        form = ExtForm.parse(args.form, n) if args.form else paired_form(n, n + 1)
        result = {"form": str(form), **check_symplectic(g, form)}
    elif args.check == "contact":
        if n % 2 == 0:
            raise UsageError("contact check needs an odd-dimensional algebra")
        form = ExtForm.parse(args.form, n) if args.form else None
        result = check_contact(g, form)
        result["form"] = str(form) if form is not None else f"w{n}"
    else:
        result = {"betti": cohomology_dims(g, args.p_max if args.p_max is not None else n), "d_squared_zero": check_d_squared(g)}
    emit(dumps({"check": args.check, "result": result, **meta(args, g)}), args.out)
    return 0


def cmd_group(args) -> int:
    g = load_algebra(args)
    if args.mul:
        u, v = (parse_vector(s) for s in args.mul)
        if len(u) != g.dim or len(v) != g.dim:
            raise UsageError(f"--mul needs two vectors with {g.dim} coordinates")
        print(",".join(str(c) for c in bch_product(g, u, v)))
        return 0
    if args.lattice is not None:
        emit(dumps({**lattice_closure_report(g, args.lattice, seed=args.seed), **meta(args, g)}), args.out)
        return 0
    emit(dumps({**group_axioms_check(g, args.samples, seed=args.seed), **meta(args, g)}), args.out)
    return 0


def paper_tables(seed: int = DEFAULT_SEED) -> dict:
    """Regenerate the closed-form results and check them."""
    checks = []
    discrepancies = []

    def check(name, ok, **info):
        checks.append({"name": name, "status": "pass" if ok else "fail", **info})

    casimirs = {}
    for q in (1, 2, 3):
        n = 2 * q + 2
        F = casimir_solver_V_even(q)
        g = make_family("Vn", n)
        casimirs[f"F{n}"] = F.canonical()
        check(f"F{n} is a Casimir of V{n}", is_casimir(g, F) is None)
        exp = [0] * n
        exp[n - 2] = q + 1
        check(f"F{n} leading coefficient", F.coefficient(exp) == leading_coefficient_V_even(q), value=str(F.coefficient(exp)))
        printed = Poly.parse(PRINTED_CASIMIRS[q], n)
        if printed != F:
            discrepancies.append({
                "item": f"F{n}",
                "printed": PRINTED_CASIMIRS[q],
                "computed": F.canonical(),
                "printed_is_casimir": is_casimir(g, printed) is None,
            })
    ranks = {}
    for fam in ("Vn", "Qn"):
        for n in range(3, 16):
            res = generic_rank(make_family(fam, n), seed=seed, symbolic=True)
            expected = 2 if fam == "Qn" else (n - 1 if n % 2 else n - 2)
            ranks[f"{fam[0]}{n}"] = {"rank": res.rank, "nu": res.nu, "certified": res.certified}
            check(f"generic rank {fam[0]}{n}", res.rank == expected and res.certified)
    dets = {}
    for q in range(1, 6):
        d = det_Btilde(q)
        dets[q] = d.canonical()
        n = 2 * q + 2
        target = Poly.var(n, n - 1) ** q
        fact = 1
        for i in range(1, q + 1):
            fact *= i
        check(f"|det B~| q={q}", d in (target.scale(2 ** q * fact), target.scale(-(2 ** q) * fact)))
    steps = {}
    for n in range(3, 71):
        k = solvable_step(make_family("Vn", n))
        steps[n] = k
        check(f"solvable step V{n}", 2 ** k - 1 <= n < 2 ** (k + 1) - 1)
    certs = certificates_V(range(3, 14))
    for name, cert in certs.items():
        ok = cert.get("contact") if cert["kind"] == "contact" else cert["closed"] and cert["nondegenerate"]
        check(f"{cert['kind']} {name}", bool(ok))
    profiles = {}
    for k in range(1, 7):
        pq = invariant_profile(make_family("Qn", k))
        pv = invariant_profile(make_family("Vn", k))
        profiles[k] = {"Q": pq.as_dict(), "V": pv.as_dict(), "equal": pq == pv}
        check(f"Q{k} vs V{k} profiles", (pq == pv) == (k <= 4))
    return {
        "casimirs": casimirs,
        "rank_table": ranks,
        "det_Btilde": dets,
        "solvable_steps": steps,
        "certificates": certs,
        "profiles": profiles,
        "checks": checks,
        "discrepancies": discrepancies,
        "all_pass": all(c["status"] == "pass" for c in checks),
    }


def cmd_reproduce(args) -> int:
    if args.target != "paper-tables":
        raise UsageError(f"unknown reproduction target {args.target!r}")
    report = {**paper_tables(args.seed), "version": __version__, "seed": args.seed}
    emit(dumps(report), args.out)
    return 0 if report["all_pass"] else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nilflow", description="Nilpotent Lie algebras, Casimirs and Euler flows.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--seed", type=lambda s: int(s, 0), default=None, help="overrides NILFLOW_SEED")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("algebra", help="write or profile an algebra")
    add_source(p)
    p.add_argument("--profile", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_algebra)

    p = sub.add_parser("casimir", help="Casimir generators")
    add_source(p)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--max-degree", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(func=cmd_casimir)

    p = sub.add_parser("rank", help="generic rank of the Poisson matrix")
    add_source(p)
    p.add_argument("--symbolic", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("orbit", help="classify a coadjoint orbit of V_n")
    add_source(p)
    p.add_argument("--point", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("flow", help="integrate Euler or magnetic flows")
    add_source(p)
    p.add_argument("--metric", default="identity", help="'identity' or a JSON file holding a symmetric matrix")
    p.add_argument("--x0", required=True)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--steps", type=int, default=10000)
    p.add_argument("--monitor", choices=["casimirs", "hamiltonian", "none"], default="casimirs")
    p.add_argument("--charge", action="append", help="magnetic mode: fixed value of the central coordinate (repeatable)")
    p.add_argument("--out", help="trajectory CSV")
    p.add_argument("--summary", help="JSON summary path (stdout if omitted)")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("forms", help="symplectic/contact/cohomology checks")
    add_source(p)
    p.add_argument("--check", choices=["symplectic", "contact", "cohomology"], required=True)
    p.add_argument("--form", help="e.g. '3*w1^w4 + w2^w3'")
    p.add_argument("--p-max", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_forms)

    p = sub.add_parser("group", help="Campbell-Hausdorff group law")
    add_source(p)
    p.add_argument("--mul", nargs=2, metavar=("U", "V"))
    p.add_argument("--lattice", type=int, metavar="RADIUS")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--out")
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("reproduce", help="regenerate the reference tables")
    p.add_argument("target", choices=["paper-tables"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.seed is None:
            args.seed = default_seed()
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"nilflow: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, RuntimeError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
