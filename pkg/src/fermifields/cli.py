"""Command-line front end.

Subcommands::

    fermifields propagators --config cfg.txt --out results/
    fermifields verify      --suite grassmann,bracket --seed 7
    fermifields gn-series   --order 3 --out results/
    fermifields car-table   --out results/

Exit codes: 0 all checks passed, 1 a check failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .lattice import CausalityError
from .reports import write_csv, write_report

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fermifields",
        description="Lattice fermion functionals: propagators, brackets, "
                    "intertwining series and deformation checks.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
            ("propagators", "write free/interacting kernels and defect norms"),
            ("verify", "run invariant suites and write a JSON report"),
            ("gn-series", "write per-order coupling tables"),
            ("car-table", "write the anticommutator table at first order")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", type=Path, default=None,
                       help="flat key-value config file")
        p.add_argument("--out", type=Path, default=Path("."),
                       help="output directory")
        p.add_argument("--arithmetic", choices=["float", "rational"],
                       default=None, help="override arithmetic mode")
        p.add_argument("--seed", type=int, default=None, help="override seed")
        p.add_argument("--order", type=int, default=None,
                       help="override truncation.lambda_order")
        if name == "verify":
            p.add_argument("--suite", default=None,
                           help="comma-separated subset of: grassmann,green,"
                                "bracket,moller,gn,quant")
    return parser


def _load(args) -> "RunConfig":
    overrides = {
        "arithmetic": args.arithmetic,
        "seed": args.seed,
        "truncation.lambda_order": args.order,
    }
    return load_config(args.config, overrides)


def cmd_propagators(cfg, out: Path) -> int:
    from .gross_neveu import build_gn_action, interacting_propagator, propagator_defect
    from .lattice import (DiracOperator, causal_propagator, dirac_green,
                          free_second_derivative, kg_green)
    from .scalars import Ring

    out.mkdir(parents=True, exist_ok=True)
    fl = cfg.field_lattice()
    lat = fl.lattice
    m = cfg.number(cfg.mass)
    ring = Ring(cfg.arithmetic)

    gR = kg_green(lat, m, "retarded", ring)
    dR = dirac_green(fl, m, "retarded")
    dA = dirac_green(fl, m, "advanced")
    delta = causal_propagator(dR, dA)
    for name, kern in (("kg_retarded", gR), ("free_retarded", dR),
                       ("free_advanced", dA), ("free_causal", delta)):
        kern.to_csv(out / f"{name}.csv")
        kern.to_json(out / f"{name}.json")

    S = build_gn_action(fl, cfg.gn_params(fl))
    ik = interacting_propagator(S, "retarded", max_grade=min(cfg.max_grade // 2 * 2, 6))
    ik.free.to_csv(out / "interacting_retarded_order0.csv")
    write_csv(out / "interacting_retarded_orders.csv",
              ["k", "grade", "frobenius_norm"],
              [[k, g, repr(v)] for k, g, v in ik.per_order_norms()])

    dop = DiracOperator(lat, m, ring)
    K = free_second_derivative(fl, m)
    worst = 0.0
    prod = K.mat @ dR.mat
    for i in range(fl.n_slots):
        if not dR.exact_rows[i]:
            continue
        for j in range(fl.n_slots):
            target = 1 if i == j else 0
            worst = max(worst, abs(complex(prod[i, j]) - target))
    defects = [
        ["factorization", repr(dop.factorization_defect())],
        ["green_identity_interior_rows", repr(worst)],
        ["interacting_defect", repr(propagator_defect(S, ik))],
    ]
    write_csv(out / "defects.csv", ["check", "max_defect"], defects)
    ok = dop.factorization_defect() < 1e-12 and worst < 1e-10
    return 0 if ok else 1


def cmd_verify(cfg, out: Path, suites_arg: str | None) -> int:
    from .verify import SUITES, run_suites

    out.mkdir(parents=True, exist_ok=True)
    names = list(SUITES) if not suites_arg else [
        s.strip() for s in suites_arg.split(",") if s.strip()]
    try:
        records, ok = run_suites(cfg, names)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    write_report(out / "verify_report.json", records, cfg.to_dict(), names)
    for rec in records:
        status = "PASS" if rec["passed"] else "FAIL"
        print(f"[{status}] {rec['suite']}:{rec['check']} "
              f"residual={rec['max_residual']:.3e}")
    print(f"report: {out / 'verify_report.json'}")
    return 0 if ok else 1


def cmd_gn_series(cfg, out: Path) -> int:
    from .dynamics import moller_substitution
    from .gross_neveu import (build_free_action, build_gn_action,
                              gn_interaction_term, interacting_propagator)
    from .lattice import dirac_green

    out.mkdir(parents=True, exist_ok=True)
    fl = cfg.field_lattice()
    params = cfg.gn_params(fl)
    m = cfg.number(cfg.mass)
    S = build_free_action(fl, m)
    F = gn_interaction_term(fl, params)
    dR = dirac_green(fl, m, "retarded")
    order = cfg.lambda_order
    sub = moller_substitution(S, F, dR, order, cfg.max_grade)

    # default observables: one field slot and one bilinear at interior times
    interior = fl.interior_slots()
    if len(interior) < 2:
        raise ConfigError("lattice too small for series observables (need nt >= 3)")
    obs = {
        "field": fl.algebra.generator(interior[0]),
        "bilinear": fl.algebra.monomial((interior[0], interior[-1])),
    }
    rows = []
    for name, G in obs.items():
        series = sub.apply(G)
        prod = sub.apply(G.wedge(G))
        split = series.wedge(series)
        for k in range(order + 1):
            coeff = series.coefficient(k)
            # homomorphism defect of r(G ∧ G) at this order
            homo = (prod.coefficient(k) - split.coefficient(k)).max_abs()
            rows.append([name, k, repr(coeff.max_abs()), repr(homo),
                         series.truncated])
    write_csv(out / "gn_moller_series.csv",
              ["observable", "order", "coefficient_max_abs",
               "homomorphism_residual", "truncated"], rows)

    S_gn = build_gn_action(fl, params)
    max_grade = min(cfg.max_grade // 2 * 2, 6)
    ik = interacting_propagator(S_gn, "retarded", max_grade)
    ik_more = interacting_propagator(S_gn, "retarded", max_grade + 2)
    norm_rows = []
    for k, g, v in ik_more.per_order_norms():
        within = g <= max_grade
        norm_rows.append([k, g, repr(v), within])
    write_csv(out / "gn_propagator_orders.csv",
              ["k", "grade", "frobenius_norm", "within_truncation"], norm_rows)
    return 0


def cmd_car_table(cfg, out: Path) -> int:
    from .algebra import CONJUGATE, FIELD
    from .lattice import causal_propagator, dirac_green
    from .quantization import star_commutator

    out.mkdir(parents=True, exist_ok=True)
    fl = cfg.field_lattice()
    m = cfg.number(cfg.mass)
    dR = dirac_green(fl, m, "retarded")
    dA = dirac_green(fl, m, "advanced")
    delta = causal_propagator(dR, dA)
    rows = []
    for i in fl.species_slots(FIELD):
        ei = fl.algebra.generator(i)
        for j in fl.species_slots(CONJUGATE):
            ej = fl.algebra.generator(j)
            comm = star_commutator(delta, ei, ej)
            val = complex(comm.coefficient(1).coefficient(()))
            if val != 0:
                rows.append([i, j, repr(val.real), repr(val.imag)])
    write_csv(out / "car_table.csv",
              ["field_slot", "conjugate_slot", "re_hbar1", "im_hbar1"], rows)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load(args)
        if args.command == "propagators":
            return cmd_propagators(cfg, args.out)
        if args.command == "verify":
            return cmd_verify(cfg, args.out, args.suite)
        if args.command == "gn-series":
            return cmd_gn_series(cfg, args.out)
        if args.command == "car-table":
            return cmd_car_table(cfg, args.out)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, CausalityError, FileNotFoundError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
