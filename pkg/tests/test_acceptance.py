"""Acceptance gate: every criterion at its stated tolerance.

Runs the full verification battery twice through the report pipeline
(once per reproducibility arm) on the default desk-scale configuration
and asserts each criterion, printing one PASS/FAIL line per criterion.
Run with ``pytest tests/test_acceptance.py -s`` to see the lines; the
same battery backs ``fermifields verify``.
"""

import json

import pytest

from fermifields.config import RunConfig
from fermifields.reports import write_report
from fermifields.verify import SUITES, run_suites

EXACT = 0.0


@pytest.fixture(scope="module")
def battery(tmp_path_factory):
    cfg = RunConfig().validate()
    out = tmp_path_factory.mktemp("acceptance")
    names = list(SUITES)
    records, ok = run_suites(cfg, names)
    write_report(out / "report_a.json", records, cfg.to_dict(), names)
    records_b, _ = run_suites(cfg, names)
    write_report(out / "report_b.json", records_b, cfg.to_dict(), names)
    by_name = {r["check"]: r for r in records}
    return cfg, out, records, by_name


def _criterion(by_name, title, bounds):
    """Assert each (check, tolerance) pair and print one summary line."""
    worst = []
    ok = True
    for check, tol in bounds:
        rec = by_name[check]
        good = rec["passed"] and rec["max_residual"] <= tol
        ok = ok and good
        worst.append((check, rec["max_residual"], tol, good))
    line = "PASS" if ok else "FAIL"
    print(f"[{line}] acceptance: {title}")
    for check, res, tol, good in worst:
        assert good, f"{title}: {check} residual {res} exceeds {tol}"
    return ok


def test_criterion_1_grassmann_kernel(battery):
    _, _, _, by = battery
    assert _criterion(by, "1 grassmann kernel exact laws + wedge oracle", [
        ("grassmann_laws_rational", EXACT),
        ("wedge_permutation_oracle", EXACT),
        ("evaluation_pairing_oracle", EXACT),
    ])


def test_criterion_2_green_functions(battery):
    _, _, _, by = battery
    assert _criterion(by, "2 green functions: identities, supports, transposes", [
        ("dirac_factorization", 1e-12),
        ("kg_green_identity", 1e-10),
        ("kg_green_support_and_transpose", EXACT),
        ("dirac_green_identity_interior_rows", 1e-10),
        ("dirac_support_transpose_symmetry", EXACT),
        ("causal_block_structure", EXACT),
    ])


def test_criterion_3_peierls_bracket(battery):
    _, _, _, by = battery
    assert _criterion(by, "3 bracket: antisymmetry/Leibniz exact, Jacobi, ideal", [
        ("bracket_graded_antisymmetry_exact", EXACT),
        ("bracket_graded_leibniz_exact", EXACT),
        ("bracket_graded_jacobi", 1e-10),
        ("poisson_ideal_identity_exact", EXACT),
        ("response_on_eom_generators_exact", EXACT),
    ])


def test_criterion_4_moller_maps(battery):
    _, _, _, by = battery
    assert _criterion(by, "4 intertwining maps: id2, homomorphism, recursion", [
        ("moller_ideal_intertwining", EXACT),
        ("moller_homomorphism", 1e-10),
        ("moller_recursion", EXACT),
        ("moller_grade_formula", EXACT),
        ("moller_inverse_roundtrip", EXACT),
        ("moller_support_condition", EXACT),
        ("moller_quadratic_matches_matrix_theory", EXACT),
    ])


def test_criterion_5_canonical_transformation(battery):
    _, _, _, by = battery
    assert _criterion(by, "5 canonical identity: symbolic and finite difference", [
        ("canonical_identity_symbolic", 1e-9),
        ("canonical_identity_fd_oracle", 1e-6),
        ("gn_canonical_identity_quartic", 1e-9),
        ("gn_kernel_derivative_fd_oracle", 1e-6),
    ])


def test_criterion_6_gross_neveu(battery):
    _, _, _, by = battery
    assert _criterion(by, "6 interacting propagator: defect, termination, free limit", [
        ("gn_propagator_defect_grade4", 1e-10),
        ("gn_series_termination", EXACT),
        ("gn_lambda_zero_reduction", EXACT),
        ("gn_first_correction_dense_oracle", EXACT),
        ("gn_color_symmetry", 1e-12),
        ("gn_poisson_ideal_interacting", EXACT),
    ])


def test_criterion_7_quantization(battery):
    _, _, _, by = battery
    assert _criterion(by, "7 deformation: CAR, associativity, ordering, equivalence", [
        ("car_identity_all_basis_pairs", EXACT),
        ("star_associativity_exact", EXACT),
        ("star_classical_reductions", EXACT),
        ("time_ordering_inverse_and_symmetry", EXACT),
        ("time_ordered_equals_star_on_ordered_supports", EXACT),
        ("star_h_equivalence", EXACT),
    ])


def test_criterion_8_reproducibility(battery):
    _, out, _, _ = battery
    a = (out / "report_a.json").read_bytes()
    b = (out / "report_b.json").read_bytes()
    ok = a == b
    print(f"[{'PASS' if ok else 'FAIL'}] acceptance: 8 byte-identical reports")
    assert ok
    payload = json.loads(a)
    assert payload["passed"] is True


def test_every_suite_check_passed(battery):
    """No check anywhere in the battery may fail."""
    _, _, records, _ = battery
    bad = [r["check"] for r in records if not r["passed"]]
    print(f"[{'PASS' if not bad else 'FAIL'}] acceptance: full battery "
          f"({len(records)} checks)")
    assert not bad
