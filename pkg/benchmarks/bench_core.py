#!/usr/bin/env python3
"""Benchmark the compiled word-merge core against the pure-Python twin.

Times the raw sparse product kernel on synthetic term dictionaries and
an end-to-end graded-bracket workload with each backend swapped in.

    python benchmarks/bench_core.py [--cases 400] [--terms 40]
"""

import argparse
import random
import time

import fermifields.algebra as algebra_mod
from fermifields import _core_py
from fermifields.algebra import random_element
from fermifields.dynamics import peierls_bracket
from fermifields.gross_neveu import build_free_action
from fermifields.lattice import FieldLattice, Lattice, causal_propagator, dirac_green

try:
    from fermifields import _core_cy
except ImportError:  # pragma: no cover
    _core_cy = None


def synth_terms(rng, n_gens, grade, n_terms):
    terms = {}
    for _ in range(n_terms):
        w = tuple(sorted(rng.sample(range(n_gens), grade)))
        terms[w] = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
    return terms


def bench_raw(core, pairs, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for ta, tb in pairs:
            core.wedge_terms(ta, tb)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_bracket(core, repeat=3):
    """End-to-end: 60 graded brackets on a 6x2 float lattice."""
    saved = algebra_mod.wedge_terms, algebra_mod.contract
    algebra_mod.wedge_terms, algebra_mod.contract = core.wedge_terms, core.contract
    try:
        fl = FieldLattice(Lattice(6, 2, 0.5, 1.0), 1, "float")
        S = build_free_action(fl, 1.0)
        delta = causal_propagator(dirac_green(fl, 1.0, "retarded"),
                                  dirac_green(fl, 1.0, "advanced"))
        rng = random.Random(11)
        inputs = []
        for _ in range(60):
            slots = rng.sample(range(fl.n_slots), 10)
            inputs.append((random_element(fl.algebra, rng, 3, 6, slots),
                           random_element(fl.algebra, rng, 3, 6, slots)))
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            for F, G in inputs:
                peierls_bracket(S, delta.mat, F, G)
            best = min(best, time.perf_counter() - t0)
        return best
    finally:
        algebra_mod.wedge_terms, algebra_mod.contract = saved


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cases", type=int, default=400)
    ap.add_argument("--terms", type=int, default=40)
    args = ap.parse_args()

    rng = random.Random(7)
    pairs = [(synth_terms(rng, 64, rng.randint(2, 5), args.terms),
              synth_terms(rng, 64, rng.randint(2, 5), args.terms))
             for _ in range(args.cases)]

    rows = []
    t_py = bench_raw(_core_py, pairs)
    rows.append(("raw wedge", "python", t_py, 1.0))
    if _core_cy is not None:
        t_cy = bench_raw(_core_cy, pairs)
        rows.append(("raw wedge", "cython", t_cy, t_py / t_cy))

    b_py = bench_bracket(_core_py)
    rows.append(("bracket e2e", "python", b_py, 1.0))
    if _core_cy is not None:
        b_cy = bench_bracket(_core_cy)
        rows.append(("bracket e2e", "cython", b_cy, b_py / b_cy))

    print(f"{'workload':<14}{'backend':<10}{'seconds':>10}{'speedup':>9}")
    for wl, be, sec, sp in rows:
        print(f"{wl:<14}{be:<10}{sec:>10.4f}{sp:>8.1f}x")
    if _core_cy is None:
        print("compiled core unavailable; only the fallback was timed")


if __name__ == "__main__":
    main()
