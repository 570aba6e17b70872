"""Command-line surface: certified tables, counting, verification, fields.

Subcommands share one configuration model (flags over config file over
defaults) and print CSV or JSON.  When an output path is given, figures are
rendered next to the delimited file.  All output is deterministic: the same
configuration produces byte-identical bytes at any thread count.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .besselpoly import (
    GammaParam,
    OverflowAtLargeN,
    characteristic_poly_closed_form,
    characteristic_poly_direct,
    gamma_param,
    log_derivative_gap,
    logderiv_approx_error,
    secular_oracle,
)
from .exactpoly import (
    ZeroOrManyRoots,
    cauchy_positive_bound,
    descartes_sign_changes,
    sturm_root_count,
)
from .fields import (
    boundary_residual,
    divergence_residual,
    eigenfield,
    field_scale,
    maxwell_residual,
    mode_field,
    sphere_quadrature,
)
from .spectrum import (
    EigMode,
    IncompleteTable,
    SpectrumTable,
    counting,
    eigenvalue,
    exceptional_count,
    localization_windows,
    reciprocal_symmetry_check,
    spectrum_table,
    weyl_residual,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_CERTIFICATION = 3
EXIT_RANGE = 4

# sample points clear of the boundary for interior residuals
_RESIDUAL_POINTS = (
    (1.2, 0.3, 0.4),
    (0.0, 1.5, 0.2),
    (-1.0, 0.8, 0.9),
    (0.1, -0.2, -1.6),
)


class BadInput(Exception):
    """Configuration or argument the run cannot proceed with."""


@dataclass(frozen=True)
class RunConfig:
    """Fully deterministic run description; no seeds anywhere."""

    gamma: str = "2"
    n_max: int = 8
    precision: str = "1e-30"
    r_max: Optional[float] = None
    threads: int = 1
    output_format: str = "csv"
    output: Optional[str] = None


_CONFIG_KEYS = {
    "gamma": str,
    "n_max": int,
    "precision": str,
    "r_max": float,
    "threads": int,
    "format": str,
    "output": str,
}


def load_config_file(path: Path) -> Dict[str, object]:
    """key=value lines; '#' starts a comment; keys mirror the flags."""
    values: Dict[str, object] = {}
    try:
        text = path.read_text()
    except OSError as exc:
        raise BadInput(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise BadInput(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise BadInput(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values["output_format" if key == "format" else key] = _CONFIG_KEYS[key](value.strip())
        except ValueError as exc:
            raise BadInput(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def merge_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg = replace(cfg, **load_config_file(Path(args.config)))
    overrides = {
        name: getattr(args, name)
        for name in ("gamma", "n_max", "precision", "r_max", "threads", "output_format", "output")
        if getattr(args, name, None) is not None
    }
    cfg = replace(cfg, **overrides)
    if cfg.n_max < 1:
        raise BadInput("n-max must be at least 1")
    if cfg.threads < 1:
        raise BadInput("threads must be at least 1")
    if cfg.output_format not in ("csv", "json"):
        raise BadInput(f"unknown format {cfg.output_format!r}")
    try:
        eps = Fraction(cfg.precision)
    except (ValueError, ZeroDivisionError) as exc:
        raise BadInput(f"precision does not parse as a rational: {cfg.precision!r}") from exc
    if eps <= 0:
        raise BadInput("precision must be positive")
    return cfg


def _parse_gamma(cfg: RunConfig) -> GammaParam:
    try:
        return gamma_param(cfg.gamma)
    except (ValueError, ZeroDivisionError) as exc:
        raise BadInput(f"invalid gamma {cfg.gamma!r}: {exc}") from exc


def _precision(cfg: RunConfig) -> Fraction:
    return Fraction(cfg.precision)


def _decimal_places(eps: Fraction) -> int:
    places = 1
    scale = Fraction(1, 10)
    while scale > eps and places < 60:
        places += 1
        scale /= 10
    return max(12, places + 2)


def _dec_str(x: Fraction, places: int) -> str:
    """Exact decimal rendering with round-half-up, sign included."""
    sign = "-" if x < 0 else ""
    mag = -x if x < 0 else x
    scaled = mag * 10**places
    q, r = divmod(scaled.numerator, scaled.denominator)
    if 2 * r >= scaled.denominator:
        q += 1
    digits = str(q).rjust(places + 1, "0")
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def _metadata_lines(gp: GammaParam, cfg: RunConfig) -> List[str]:
    return [
        f"# gamma={gp.gamma}",
        f"# gamma0={gp.gamma0}",
        f"# n_max={cfg.n_max}",
        f"# precision={cfg.precision}",
    ]


def _emit(text: str, cfg: RunConfig) -> Optional[Path]:
    if cfg.output is None:
        sys.stdout.write(text)
        return None
    out = Path(cfg.output)
    out.write_text(text)
    return out


def _figure_path(out: Path, suffix: str) -> Path:
    return out.with_name(out.stem + suffix)


def _build_table(gp: GammaParam, cfg: RunConfig, n_max: Optional[int] = None) -> SpectrumTable:
    return spectrum_table(gp, n_max or cfg.n_max, _precision(cfg), threads=cfg.threads)


def _certified_radius(table: SpectrumTable) -> Fraction:
    """Largest radius the table certifies: counts are exact for r below the
    last mode's magnitude lower bound."""
    return -table.modes[-1].lambda_interval[1]


def _table_covering(gp: GammaParam, cfg: RunConfig, r: float) -> SpectrumTable:
    """Auto-extend the table until |lambda_n_max| clears r, up to a cap."""
    cap = max(4 * cfg.n_max, 64)
    n = cfg.n_max
    while True:
        table = _build_table(gp, cfg, n)
        if _certified_radius(table) > Fraction(r):
            return table
        if n >= cap:
            raise IncompleteTable(
                f"radius {r} not certified by n_max={n} (cap {cap}); raise --n-max"
            )
        n = min(cap, 2 * n)


# ---------------------------------------------------------------- eigs


def _mode_row(mode: EigMode, places: int) -> Dict[str, object]:
    lo, hi = mode.lambda_interval
    return {
        "n": mode.n,
        "multiplicity": mode.multiplicity,
        "lambda_lo": str(lo),
        "lambda_hi": str(hi),
        "lambda_mid": _dec_str((lo + hi) / 2, places),
        "z_n": f"{mode.z_n:.12g}",
        "gap": f"{mode.gap:.6e}",
        "branch": mode.branch,
    }


def cmd_eigs(cfg: RunConfig) -> int:
    gp = _parse_gamma(cfg)
    table = _build_table(gp, cfg)
    places = _decimal_places(_precision(cfg))
    rows = [_mode_row(m, places) for m in table.modes]
    if cfg.output_format == "json":
        doc = {
            "gamma": str(gp.gamma),
            "gamma0": str(gp.gamma0),
            "n_max": cfg.n_max,
            "precision": cfg.precision,
            "modes": rows,
        }
        text = json.dumps(doc, indent=2) + "\n"
    else:
        header = "n,multiplicity,lambda_lo,lambda_hi,lambda_mid,z_n,gap,branch"
        lines = _metadata_lines(gp, cfg) + [header]
        lines += [",".join(str(row[k]) for k in header.split(",")) for row in rows]
        text = "\n".join(lines) + "\n"
    out = _emit(text, cfg)
    if out is not None:
        from .plots import spectrum_figure

        spectrum_figure(table, gp, _figure_path(out, "_spectrum.png"))
    return EXIT_OK


# ---------------------------------------------------------------- count


def cmd_count(cfg: RunConfig, r: float) -> int:
    if not (r > 0 and math.isfinite(r)):
        raise BadInput("radius must be positive and finite")
    gp = _parse_gamma(cfg)
    table = _table_covering(gp, cfg, r)
    n_r = counting(table, Fraction(r))
    prediction = float(gp.weyl_coefficient) * r * r
    if cfg.output_format == "json":
        text = json.dumps(
            {"gamma": str(gp.gamma), "r": r, "count": n_r, "prediction": prediction},
            indent=2,
        ) + "\n"
    else:
        text = f"r,count,prediction\n{r:.10g},{n_r},{prediction:.10g}\n"
    _emit(text, cfg)
    return EXIT_OK


# ---------------------------------------------------------------- weyl


def _weyl_grid(r_max: int) -> List[Fraction]:
    return [Fraction(r) for r in range(1, r_max + 1)]


def cmd_weyl(cfg: RunConfig) -> int:
    gp = _parse_gamma(cfg)
    if cfg.r_max is not None:
        if cfg.r_max < 2:
            raise BadInput("r-max must be at least 2 for a counting grid")
        table = _table_covering(gp, cfg, cfg.r_max)
        r_top = int(cfg.r_max)
    else:
        table = _build_table(gp, cfg)
        r_top = int(_certified_radius(table))
        if Fraction(r_top) >= _certified_radius(table):
            r_top -= 1
    if r_top < 2:
        raise BadInput("certified range is too short for a grid; raise --n-max")
    report = weyl_residual(table, _weyl_grid(r_top))
    coeff = float(gp.weyl_coefficient)
    summary = {
        "fitted_leading": report.fitted_leading,
        "predicted_leading": coeff,
        "residual_slope": report.residual_slope,
        "max_residual_over_r": report.max_residual_over_r,
    }
    if cfg.output_format == "json":
        doc = {
            "gamma": str(gp.gamma),
            "gamma0": str(gp.gamma0),
            "n_max": table.n_max,
            "precision": cfg.precision,
            "summary": summary,
            "rows": [
                {
                    "r": float(r),
                    "count": n,
                    "prediction": coeff * float(r) ** 2,
                    "residual": res,
                }
                for r, n, res in zip(report.r_grid, report.N_values, report.residuals)
            ],
        }
        text = json.dumps(doc, indent=2) + "\n"
    else:
        lines = _metadata_lines(gp, cfg)
        lines += [f"# {key}={value:.10g}" for key, value in summary.items()]
        lines.append("r,count,prediction,residual")
        lines += [
            f"{float(r):.10g},{n},{coeff * float(r) ** 2:.10g},{res:.10g}"
            for r, n, res in zip(report.r_grid, report.N_values, report.residuals)
        ]
        text = "\n".join(lines) + "\n"
    out = _emit(text, cfg)
    if out is not None:
        from .plots import counting_figure

        counting_figure(report, gp, _figure_path(out, "_counting.png"))
    return EXIT_OK


# ---------------------------------------------------------------- verify


@dataclass(frozen=True)
class CheckResult:
    """One verification check; passes iff statistic <= threshold."""

    name: str
    statistic: float
    threshold: float
    detail: str

    @property
    def passed(self) -> bool:
        return self.statistic <= self.threshold


def _check_uniqueness(gp: GammaParam, n_max: int) -> CheckResult:
    failures = 0
    for n in range(1, n_max + 1):
        p = characteristic_poly_closed_form(n, gp)
        if descartes_sign_changes(p) != 1:
            failures += 1
            continue
        if sturm_root_count(p, Fraction(0), cauchy_positive_bound(p)) != 1:
            failures += 1
    return CheckResult(
        "uniqueness", float(failures), 0.0,
        f"sign-change and Sturm certificates for n <= {n_max}",
    )


def _check_monotonicity(table: SpectrumTable) -> CheckResult:
    overlaps = 0
    min_sep = math.inf
    for a, b in zip(table.modes, table.modes[1:]):
        sep = a.lambda_interval[0] - b.lambda_interval[1]
        if sep <= 0:
            overlaps += 1
        else:
            min_sep = min(min_sep, float(sep))
    return CheckResult(
        "monotonicity", float(overlaps), 0.0,
        f"strictly decreasing chain of {len(table.modes)} disjoint intervals, "
        f"min separation {min_sep:.3e}",
    )


def _check_cross_construction(gp: GammaParam, n_max: int) -> CheckResult:
    mismatches = sum(
        1
        for n in range(1, n_max + 1)
        if characteristic_poly_direct(n, gp) != characteristic_poly_closed_form(n, gp)
    )
    return CheckResult(
        "cross_construction", float(mismatches), 0.0,
        f"derivative-route vs coefficient-formula equality for n <= {n_max}",
    )


def _check_oracle(gp: GammaParam, table: SpectrumTable) -> CheckResult:
    worst = 0.0
    used = 0
    for mode in table.modes[: min(100, len(table.modes))]:
        try:
            value = abs(secular_oracle(mode.n, mode.lambda_mid, gp))
        except (OverflowAtLargeN, ArithmeticError):
            break
        worst = max(worst, value)
        used += 1
    threshold = float(1e-8 * (1 + gp.gamma0))
    return CheckResult(
        "oracle", worst, threshold,
        f"float Hankel recurrence at {used} certified midpoints",
    )


def _check_localization(table: SpectrumTable) -> CheckResult:
    if table.n_max < 2:
        return CheckResult("localization", 0.0, 2.0, "table too short for gap windows")
    early, late = localization_windows(table)
    ratio = late / early if early > 0 else math.inf
    return CheckResult(
        "localization", ratio, 2.0,
        f"window maxima of |lambda_n - z_n|: early {early:.6f}, late {late:.6f}",
    )


def _check_weyl(gp: GammaParam, table: SpectrumTable) -> CheckResult:
    jump_failures = 0
    jumps_tested = 0
    picks = sorted({1, table.n_max // 2, (9 * table.n_max) // 10})
    for n in picks:
        if not 1 <= n < table.n_max:
            continue
        mode = table.modes[n - 1]
        r_mid = -mode.lambda_mid
        lo, hi = counting(table, Fraction(r_mid - 1e-6)), counting(table, Fraction(r_mid + 1e-6))
        jumps_tested += 1
        # the structural law, not mode.multiplicity: a tampered table would
        # tamper both sides of that comparison at once
        if hi - lo != 2 * n + 1:
            jump_failures += 1
    r_top = int(_certified_radius(table))
    if Fraction(r_top) >= _certified_radius(table):
        r_top -= 1
    deviation = 0.0
    fit_note = "grid too short for a leading-coefficient fit"
    if r_top >= 20:
        grid = [Fraction(r) for r in range(max(5, r_top // 10), r_top + 1)]
        report = weyl_residual(table, grid)
        deviation = abs(report.fitted_leading / float(gp.weyl_coefficient) - 1)
        fit_note = f"fitted leading {report.fitted_leading:.4f} on r in [{grid[0]}, {grid[-1]}]"
    statistic = max(deviation, 1.0 if jump_failures else 0.0)
    return CheckResult(
        "weyl", statistic, 0.05,
        f"{fit_note}; {jumps_tested} multiplicity jumps checked, {jump_failures} wrong",
    )


def _check_exceptional(table: SpectrumTable) -> CheckResult:
    try:
        above = exceptional_count(table)
        detail = "modes certified above the spectral-gap radius"
    except IncompleteTable as exc:
        above = len(table.modes) + 1
        detail = f"not certifiable: {exc}"
    return CheckResult("exceptional", float(above), 1.0, detail)


def _check_reciprocal(gp: GammaParam, cfg: RunConfig) -> CheckResult:
    n_max = min(cfg.n_max, 50)
    ok = reciprocal_symmetry_check(gp.gamma, n_max, _precision(cfg))
    return CheckResult(
        "reciprocal", 0.0 if ok else 1.0, 0.0,
        f"interval-identical spectra for gamma and 1/gamma, n <= {n_max}",
    )


def _check_gap_positivity(gp: GammaParam, n_max: int) -> CheckResult:
    rng = random.Random(9020)
    lams = [-Fraction(rng.randint(1, 400), rng.randint(1, 64)) for _ in range(200)]
    violations = 0
    floor = math.inf
    for n in range(1, min(n_max, 50) + 1):
        for lam in lams:
            gap = log_derivative_gap(n, lam)
            if gap <= 0:
                violations += 1
            else:
                floor = min(floor, float(gap))
    return CheckResult(
        "gap_positivity", float(violations), 0.0,
        f"exact rational sign at {len(lams)} sampled lambda, min gap {floor:.3e}",
    )


def _check_logderiv_envelope(gp: GammaParam, n_max: int) -> CheckResult:
    worst_ratio = 0.0
    for n in (1, 5, 10, 20):
        if n > n_max:
            continue
        scaled = [logderiv_approx_error(n, lam) * abs(lam) for lam in (-10.0, -20.0, -40.0, -80.0)]
        worst_ratio = max(worst_ratio, max(scaled) / scaled[-1])
    return CheckResult(
        "logderiv_envelope", worst_ratio, 3.0,
        "error times |lambda| stays within 3x of its deep-lambda value",
    )


def _check_fields(gp: GammaParam, table: SpectrumTable) -> CheckResult:
    statistic = 0.0
    checked = []
    for n, m in ((1, 0), (2, 1), (3, -2)):
        if n > table.n_max:
            continue
        mf = mode_field(table.modes[n - 1], m, gp)
        boundary = boundary_residual(mf, [s for s, _ in sphere_quadrature(n)])
        scale = field_scale(mf, _RESIDUAL_POINTS)
        maxwell = maxwell_residual(mf, _RESIDUAL_POINTS, fd_step=1e-4)
        ratio = maxwell / maxwell_residual(mf, _RESIDUAL_POINTS, fd_step=0.5e-4)
        statistic = max(statistic, boundary / 1e-8, maxwell / (1e-5 * scale))
        if not 3 <= ratio <= 5:
            statistic = max(statistic, 10.0)
        checked.append(f"({n},{m})")
    return CheckResult(
        "fields", statistic, 1.0,
        "boundary and curl-system residuals at " + " ".join(checked),
    )


def run_verify_checks(gp: GammaParam, cfg: RunConfig) -> List[CheckResult]:
    table = _build_table(gp, cfg)
    return [
        _check_uniqueness(gp, cfg.n_max),
        _check_monotonicity(table),
        _check_cross_construction(gp, cfg.n_max),
        _check_oracle(gp, table),
        _check_localization(table),
        _check_weyl(gp, table),
        _check_exceptional(table),
        _check_reciprocal(gp, cfg),
        _check_gap_positivity(gp, cfg.n_max),
        _check_logderiv_envelope(gp, cfg.n_max),
        _check_fields(gp, table),
    ]


def verify_report(gp: GammaParam, cfg: RunConfig, checks: Sequence[CheckResult]) -> Dict[str, object]:
    from . import __version__

    return {
        "gamma": str(gp.gamma),
        "gamma0": str(gp.gamma0),
        "n_max": cfg.n_max,
        "precision": cfg.precision,
        "version": __version__,
        "all_passed": all(c.passed for c in checks),
        "checks": {
            c.name: {
                "passed": c.passed,
                "statistic": c.statistic,
                "threshold": c.threshold,
                "detail": c.detail,
            }
            for c in checks
        },
    }


def cmd_verify(cfg: RunConfig) -> int:
    gp = _parse_gamma(cfg)
    checks = run_verify_checks(gp, cfg)
    report = verify_report(gp, cfg, checks)
    _emit(json.dumps(report, indent=2) + "\n", cfg)
    failing = [c.name for c in checks if not c.passed]
    if failing:
        print("failing checks: " + ", ".join(failing), file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


# ---------------------------------------------------------------- field


def cmd_field(cfg: RunConfig, n: int, m: int) -> int:
    if n < 1 or abs(m) > n:
        raise BadInput("field orders require n >= 1 and |m| <= n")
    gp = _parse_gamma(cfg)
    mode = eigenvalue(n, gp, _precision(cfg))
    mf = mode_field(mode, m, gp)
    samples = [s for s, _ in sphere_quadrature(n)]
    scale = field_scale(mf, _RESIDUAL_POINTS)
    maxwell = maxwell_residual(mf, _RESIDUAL_POINTS, fd_step=1e-4)
    metrics: List[Tuple[str, str]] = [
        ("n", str(n)),
        ("m", str(m)),
        ("branch", mf.branch),
        ("lambda", f"{mf.lam:.15g}"),
        ("boundary_residual", f"{boundary_residual(mf, samples):.6e}"),
        ("maxwell_residual", f"{maxwell:.6e}"),
        ("maxwell_relative", f"{maxwell / scale:.6e}"),
        ("maxwell_halving_ratio",
         f"{maxwell / maxwell_residual(mf, _RESIDUAL_POINTS, fd_step=0.5e-4):.4f}"),
        ("divergence_residual", f"{divergence_residual(mf, _RESIDUAL_POINTS):.6e}"),
        ("field_scale", f"{scale:.6e}"),
    ]
    if cfg.output_format == "json":
        text = json.dumps(dict(metrics), indent=2) + "\n"
    else:
        text = "metric,value\n" + "\n".join(f"{k},{v}" for k, v in metrics) + "\n"
    out = _emit(text, cfg)
    if out is not None:
        import numpy as np

        from .plots import field_figure

        direction = np.array([0.3, 0.5, math.sqrt(1 - 0.34)])
        radii = [1.0 + 0.25 * i for i in range(21)]
        e_mags, b_mags = [], []
        for r in radii:
            e, b = eigenfield(mf, r * direction)
            e_mags.append(float(np.linalg.norm(e)))
            b_mags.append(float(np.linalg.norm(b)))
        field_figure(radii, e_mags, b_mags, mf.lam, _figure_path(out, "_decay.png"))
    return EXIT_OK


# ---------------------------------------------------------------- driver


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ballmodes",
        description="Certified negative eigenvalues of the damped exterior "
        "Maxwell problem on the unit ball, with counting, verification, and "
        "field diagnostics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--gamma", help="boundary impedance, decimal or p/q (default 2)")
        sp.add_argument("--n-max", dest="n_max", type=int, help="highest mode order (default 8)")
        sp.add_argument("--precision", help="certified interval width (default 1e-30)")
        sp.add_argument("--r-max", dest="r_max", type=float, help="counting grid radius cap")
        sp.add_argument("--threads", type=int, help="worker processes (default 1)")
        sp.add_argument("--format", dest="output_format", choices=("csv", "json"),
                        help="output encoding (default csv)")
        sp.add_argument("--output", help="write here instead of stdout; also renders figures")
        sp.add_argument("--config", help="key=value config file, overridden by flags")

    common(sub.add_parser("eigs", help="certified eigenvalue table"))
    count = sub.add_parser("count", help="counting function N(r) with the quadratic prediction")
    common(count)
    count.add_argument("r", type=float, help="radius to count eigenvalues up to")
    common(sub.add_parser("weyl", help="counting grid with growth-law fit summary"))
    common(sub.add_parser("verify", help="run every invariant suite, JSON report"))
    field = sub.add_parser("field", help="residual report for one eigenfield")
    common(field)
    field.add_argument("n", type=int, help="mode order")
    field.add_argument("m", type=int, help="azimuthal order, |m| <= n")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = merge_config(args)
        if args.command == "eigs":
            return cmd_eigs(cfg)
        if args.command == "count":
            return cmd_count(cfg, args.r)
        if args.command == "weyl":
            return cmd_weyl(cfg)
        if args.command == "verify":
            return cmd_verify(cfg)
        return cmd_field(cfg, args.n, args.m)
    except BadInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except IncompleteTable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RANGE
    except (ZeroOrManyRoots, OverflowAtLargeN, ArithmeticError) as exc:
        print(f"certification failure: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATION


if __name__ == "__main__":
    sys.exit(main())
