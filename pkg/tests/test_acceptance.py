"""Acceptance gate: twelve criteria, one recorded pass/fail line each.

Every criterion asserts at its stated tolerance; the conftest summary hook
prints the collected lines after the run.
"""

import math
import random
import time
from fractions import Fraction

import pytest

from ballmodes.besselpoly import (
    characteristic_poly_closed_form,
    characteristic_poly_direct,
    gamma_param,
    log_derivative_gap,
    logderiv_approx_error,
    secular_oracle,
)
from ballmodes.exactpoly import (
    cauchy_positive_bound,
    descartes_sign_changes,
    sturm_root_count,
)
from ballmodes.fields import (
    boundary_residual,
    field_scale,
    maxwell_residual,
    mode_field,
    sphere_quadrature,
)
from ballmodes.spectrum import (
    eigenvalue,
    exceptional_count,
    reciprocal_symmetry_check,
    spectrum_table,
    weyl_residual,
)

GP2 = gamma_param("2")


def test_criterion_01_exact_first_eigenvalue(acceptance_log):
    start = time.perf_counter()
    mode = eigenvalue(1, GP2)
    elapsed = time.perf_counter() - start
    gold = -2 / (1 + math.sqrt(5))
    lo, hi = mode.lambda_interval
    err = abs(float((lo + hi) / 2) - gold)
    ok = err <= 1e-12 and elapsed <= 1.0
    acceptance_log.record(
        1, ok, f"lambda_1 err {err:.2e} (tol 1e-12), runtime {elapsed:.3f}s (cap 1s)"
    )
    assert err <= 1e-12
    assert elapsed <= 1.0


def test_criterion_02_uniqueness_certificates(acceptance_log):
    failures = 0
    for gamma in ("3/2", "2", "3", "5"):
        gp = gamma_param(gamma)
        for n in range(1, 501):
            p = characteristic_poly_closed_form(n, gp)
            if descartes_sign_changes(p) != 1:
                failures += 1
            elif sturm_root_count(p, Fraction(0), cauchy_positive_bound(p)) != 1:
                failures += 1
    ok = failures == 0
    acceptance_log.record(
        2, ok, f"{failures} failures over n <= 500, four gammas (tol 0)"
    )
    assert failures == 0


def test_criterion_03_cross_construction(acceptance_log):
    mismatches = 0
    for gamma in ("3/2", "2", "5"):
        gp = gamma_param(gamma)
        for n in range(1, 301):
            if characteristic_poly_direct(n, gp) != characteristic_poly_closed_form(n, gp):
                mismatches += 1
    ok = mismatches == 0
    acceptance_log.record(
        3, ok, f"{mismatches} coefficient mismatches over n <= 300, three gammas (tol 0)"
    )
    assert mismatches == 0


def test_criterion_04_monotone_chain(acceptance_log, big_table_timed):
    table, _ = big_table_timed
    modes = table.modes[:500]
    violations = sum(
        1
        for a, b in zip(modes, modes[1:])
        if not b.lambda_interval[1] < a.lambda_interval[0]
    )
    ok = violations == 0
    acceptance_log.record(
        4, ok, f"{violations} ordering violations over n <= 500 (tol 0)"
    )
    assert violations == 0


def test_criterion_05_oracle_consistency(acceptance_log, big_table_timed):
    table, _ = big_table_timed
    worst = 0.0
    for mode in table.modes[:100]:
        worst = max(worst, abs(secular_oracle(mode.n, mode.lambda_mid, GP2)))
    tol = 1e-8 * float(1 + GP2.gamma0)
    ok = worst <= tol
    acceptance_log.record(
        5, ok, f"max |secular residual| {worst:.2e} over n <= 100 (tol {tol:.1e})"
    )
    assert worst <= tol


def test_criterion_06_localization_windows(acceptance_log, big_table_timed):
    table, _ = big_table_timed
    gaps = {m.n: m.gap for m in table.modes}
    early = max(gaps[n] for n in range(10, 251))
    late = max(gaps[n] for n in range(250, 501))
    a_empirical = max(gaps[n] for n in range(1, 501))
    ok = late <= 2 * early
    acceptance_log.record(
        6, ok,
        f"gap windows late {late:.6f} <= 2 x early {early:.6f}; "
        f"empirical a(2) = {a_empirical:.6f}",
    )
    assert late <= 2 * early


def test_criterion_07_weyl_law(acceptance_log, big_table_timed):
    table, build_time = big_table_timed
    start = time.perf_counter()
    grid = [Fraction(r) for r in range(50, 451)]
    report = weyl_residual(table, grid)
    grid_time = time.perf_counter() - start
    fitted = report.fitted_leading
    over_r = [abs(res) / float(r) for res, r in zip(report.residuals, grid)]
    split = len(grid) // 2
    lower, upper = max(over_r[:split]), max(over_r[split:])
    total = build_time + grid_time
    ok = 2.85 <= fitted <= 3.15 and upper <= 1.5 * lower and total <= 600
    acceptance_log.record(
        7, ok,
        f"fitted leading {fitted:.4f} (window [2.85, 3.15]); residual/r upper "
        f"{upper:.3f} <= 1.5 x lower {lower:.3f}; runtime {total:.1f}s (cap 600s)",
    )
    assert 2.85 <= fitted <= 3.15
    assert upper <= 1.5 * lower
    assert total <= 600


def test_criterion_08_exceptional_bound(acceptance_log):
    worst = 0
    for gamma in ("3/2", "2", "3", "5", "1/2", "2/3"):
        gp = gamma_param(gamma)
        table = spectrum_table(gp, 8, Fraction(1, 10**30))
        worst = max(worst, exceptional_count(table))
    ok = worst <= 1
    acceptance_log.record(
        8, ok, f"max count above -c0 is {worst} over six gammas (tol 1)"
    )
    assert worst <= 1


def test_criterion_09_reciprocal_symmetry(acceptance_log):
    ok = reciprocal_symmetry_check(Fraction(2), 50)
    acceptance_log.record(
        9, ok, "gamma = 2 and 1/2 spectra interval-identical for n <= 50"
    )
    assert ok


def test_criterion_10_gap_positivity(acceptance_log):
    rng = random.Random(424242)
    lams = [-Fraction(rng.randint(1, 500), rng.randint(1, 50)) for _ in range(200)]
    violations = 0
    for n in range(1, 51):
        for lam in lams:
            if log_derivative_gap(n, lam) <= 0:
                violations += 1
    ok = violations == 0
    acceptance_log.record(
        10, ok,
        f"{violations} nonpositive exact signs over n <= 50 x 200 rational lambda (tol 0)",
    )
    assert violations == 0


def test_criterion_11_logderiv_envelope(acceptance_log):
    worst_ratio = 0.0
    for n in (1, 5, 10, 20):
        scaled = [
            logderiv_approx_error(n, lam) * abs(lam)
            for lam in (-10.0, -20.0, -40.0, -80.0)
        ]
        worst_ratio = max(worst_ratio, max(scaled) / scaled[-1])
    ok = worst_ratio <= 3.0
    acceptance_log.record(
        11, ok, f"max scaled-error ratio {worst_ratio:.3f} vs lambda = -80 (tol 3)"
    )
    assert worst_ratio <= 3.0


def test_criterion_12_field_residuals(acceptance_log, big_table_timed):
    table, _ = big_table_timed
    points = ([1.2, 0.3, 0.4], [0.0, 1.5, 0.2], [-1.0, 0.8, 0.9], [0.1, -0.2, -1.6])
    worst_boundary = 0.0
    worst_maxwell = 0.0
    ratios = []
    for n, m in ((1, 0), (2, 1), (3, -2)):
        mf = mode_field(table.modes[n - 1], m, GP2)
        worst_boundary = max(
            worst_boundary, boundary_residual(mf, [s for s, _ in sphere_quadrature(n)])
        )
        res = maxwell_residual(mf, points, fd_step=1e-4)
        worst_maxwell = max(worst_maxwell, res / field_scale(mf, points))
        ratios.append(res / maxwell_residual(mf, points, fd_step=0.5e-4))
    ok = (
        worst_boundary <= 1e-8
        and worst_maxwell <= 1e-5
        and all(3 <= r <= 5 for r in ratios)
    )
    acceptance_log.record(
        12, ok,
        f"boundary {worst_boundary:.1e} (tol 1e-8), maxwell {worst_maxwell:.1e} "
        f"(tol 1e-5), halving ratios {['%.2f' % r for r in ratios]} (window [3, 5])",
    )
    assert worst_boundary <= 1e-8
    assert worst_maxwell <= 1e-5
    for r in ratios:
        assert 3 <= r <= 5
