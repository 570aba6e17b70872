"""Certified eigenvalue tables, the counting function, and spectral checks.

Each mode order n contributes one simple negative eigenvalue of multiplicity
2n+1, pinned by the unique positive root of the characteristic polynomial
through lam = -1/(2w).  Everything spectral is interval-certified: counting
and threshold comparisons are exact rational decisions, refined on demand
when an interval straddles a cut.
"""

from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from .besselpoly import GammaParam, characteristic_poly_direct
from .exactpoly import RatPoly, RootInterval, eval_sign, isolate_unique_positive_root, refine

Rational = Union[int, str, float, Fraction]


class IncompleteTable(Exception):
    """The table does not certify the requested radius; extend n_max."""


@dataclass(frozen=True)
class EigMode:
    """One certified eigenvalue: order, enclosures, and metadata.

    lambda_interval is the image of w_interval under lam = -1/(2w), which is
    increasing, so endpoints map in order.  z_n is the asymptotic center
    -sqrt(n(n+1)/(gamma0^2-1)) the eigenvalue localizes around.
    """

    n: int
    w_interval: RootInterval
    lambda_interval: Tuple[Fraction, Fraction]
    multiplicity: int
    z_n: float
    branch: str

    def __post_init__(self):
        lo, hi = self.lambda_interval
        if not (lo <= hi < 0):
            raise ValueError("eigenvalue interval must be negative")
        if self.multiplicity != 2 * self.n + 1:
            raise ValueError("multiplicity must be 2n + 1")

    @property
    def lambda_mid(self) -> float:
        lo, hi = self.lambda_interval
        return float((lo + hi) / 2)

    @property
    def gap(self) -> float:
        """Distance from the interval midpoint to the asymptotic center."""
        return abs(self.lambda_mid - self.z_n)


@dataclass(frozen=True)
class SpectrumTable:
    """Modes for n = 1..n_max with pairwise disjoint, strictly decreasing
    eigenvalue intervals."""

    gamma_param: GammaParam
    n_max: int
    precision: Fraction
    modes: Tuple[EigMode, ...]

    def __post_init__(self):
        for a, b in zip(self.modes, self.modes[1:]):
            if not b.lambda_interval[1] < a.lambda_interval[0]:
                raise ValueError(f"modes {a.n} and {b.n} are not certified disjoint")


@dataclass(frozen=True)
class CountingReport:
    """Counting function samples against the quadratic growth law."""

    r_grid: Tuple[Fraction, ...]
    N_values: Tuple[int, ...]
    residuals: Tuple[float, ...]
    fitted_leading: float
    residual_slope: float
    max_residual_over_r: float

    def __post_init__(self):
        for a, b in zip(self.N_values, self.N_values[1:]):
            if b < a:
                raise ValueError("counting function must be nondecreasing")


def _lambda_interval(w_iv: RootInterval) -> Tuple[Fraction, Fraction]:
    if w_iv.is_exact:
        lam = -1 / (2 * w_iv.lo)
        return (lam, lam)
    return (-1 / (2 * w_iv.lo), -1 / (2 * w_iv.hi))


def _build_mode(n: int, gp: GammaParam, w_iv: RootInterval) -> EigMode:
    return EigMode(
        n=n,
        w_interval=w_iv,
        lambda_interval=_lambda_interval(w_iv),
        multiplicity=2 * n + 1,
        z_n=-math.sqrt(n * (n + 1) / float(gp.weyl_coefficient)),
        branch=gp.branch,
    )


def eigenvalue(n: int, gp: GammaParam, eps: Rational = Fraction(1, 10**30)) -> EigMode:
    """Certified eigenvalue of order n: isolate the unique positive root of
    the characteristic polynomial, refine to width <= eps in w and in lam,
    and map through lam = -1/(2w).

    A certification failure (zero or many positive roots) propagates; it
    would falsify the uniqueness statement and must abort loudly.
    """
    if n < 1:
        raise ValueError("mode order must be at least 1")
    eps = Fraction(eps)
    p = characteristic_poly_direct(n, gp)
    iv = refine(p, isolate_unique_positive_root(p), eps)
    while not iv.is_exact:
        lo, hi = _lambda_interval(iv)
        if hi - lo <= eps:
            break
        iv = refine(p, iv, iv.width / 4)
    return _build_mode(n, gp, iv)


def _refine_mode(mode: EigMode, gp: GammaParam, eps_w: Fraction) -> EigMode:
    p = characteristic_poly_direct(mode.n, gp)
    return _build_mode(mode.n, gp, refine(p, mode.w_interval, eps_w))


def _mode_worker(args: Tuple[int, GammaParam, Fraction]) -> EigMode:
    n, gp, eps = args
    return eigenvalue(n, gp, eps)


def spectrum_table(
    gp: GammaParam,
    n_max: int,
    eps: Rational = Fraction(1, 10**30),
    threads: int = 1,
) -> SpectrumTable:
    """Modes for n = 1..n_max, computed independently (optionally in a
    process pool) and assembled in order of n, then post-refined until all
    consecutive eigenvalue intervals are certified disjoint.

    Output is identical for every thread count: each mode's computation is
    deterministic and results are assembled by index.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1; expansions start at n = 1")
    eps = Fraction(eps)
    tasks = [(n, gp, eps) for n in range(1, n_max + 1)]
    if threads <= 1:
        modes = [_mode_worker(t) for t in tasks]
    else:
        with multiprocessing.Pool(threads) as pool:
            modes = pool.map(_mode_worker, tasks, chunksize=max(1, n_max // (4 * threads)))
    for i in range(len(modes) - 1):
        # spacing is order 1/sqrt(gamma0^2-1), so this loop fires only at
        # coarse eps; it restores the strict chain at negligible cost
        while not modes[i + 1].lambda_interval[1] < modes[i].lambda_interval[0]:
            modes[i] = _refine_mode(modes[i], gp, modes[i].w_interval.width / 4)
            modes[i + 1] = _refine_mode(modes[i + 1], gp, modes[i + 1].w_interval.width / 4)
    return SpectrumTable(gamma_param=gp, n_max=n_max, precision=eps, modes=tuple(modes))


def _as_fraction(r: Rational) -> Fraction:
    return Fraction(r)


def _mode_abs_bounds(mode: EigMode) -> Tuple[Fraction, Fraction]:
    """(lower, upper) bounds for |lambda_n| from the certified interval."""
    lo, hi = mode.lambda_interval
    return -hi, -lo


def _counted_at(mode: EigMode, gp: GammaParam, r: Fraction) -> Tuple[bool, EigMode]:
    """Exact decision |lambda_n| <= r, refining while the interval straddles r."""
    checked_equality = False
    while True:
        abs_lo, abs_hi = _mode_abs_bounds(mode)
        if mode.w_interval.is_exact:
            return abs_lo <= r, mode
        if abs_hi <= r:
            return True, mode
        if abs_lo >= r:
            return False, mode
        # straddle: rule out -r being the eigenvalue itself (w root at
        # 1/(2r)), then refinement is guaranteed to separate
        if not checked_equality:
            if eval_sign(characteristic_poly_direct(mode.n, gp), 1 / (2 * r)) == 0:
                return True, mode
            checked_equality = True
        mode = _refine_mode(mode, gp, mode.w_interval.width / 4)


def counting(table: SpectrumTable, r: Rational) -> int:
    """N(r): total multiplicity of eigenvalues with |lambda| <= r.

    Exact: every threshold comparison is decided on certified intervals,
    refined on demand.  Requires the table to certify that mode n_max lies
    strictly beyond r, so no uncomputed mode can contribute.
    """
    r = _as_fraction(r)
    if r <= 0:
        raise ValueError("radius must be positive")
    gp = table.gamma_param
    last_in, _ = _counted_at(table.modes[-1], gp, r)
    if last_in:
        raise IncompleteTable(
            f"mode n_max = {table.n_max} lies within radius {float(r):.6g}; extend the table"
        )
    total = 0
    for mode in table.modes:
        included, _ = _counted_at(mode, gp, r)
        if included:
            total += mode.multiplicity
    return total


def weyl_residual(table: SpectrumTable, r_grid: Sequence[Rational]) -> CountingReport:
    """Residuals N(r) - (gamma0^2 - 1) r^2 over an increasing grid, with the
    least-squares summary used by the growth-law checks."""
    grid = [_as_fraction(r) for r in r_grid]
    if not grid:
        raise ValueError("empty radius grid")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("radius grid must be strictly increasing")
    coeff = table.gamma_param.weyl_coefficient
    counts = [counting(table, r) for r in grid]
    residuals = [float(n_val - coeff * r * r) for n_val, r in zip(counts, grid)]
    rs = np.array([float(r) for r in grid])
    ns = np.array([float(n_val) for n_val in counts])
    res = np.array(residuals)
    fitted_leading = float(np.linalg.lstsq(np.stack([rs * rs, np.ones_like(rs)], 1), ns, rcond=None)[0][0])
    residual_slope = float(np.linalg.lstsq(np.stack([rs, np.ones_like(rs)], 1), res, rcond=None)[0][0])
    return CountingReport(
        r_grid=tuple(grid),
        N_values=tuple(counts),
        residuals=tuple(residuals),
        fitted_leading=fitted_leading,
        residual_slope=residual_slope,
        max_residual_over_r=max(abs(v) / float(r) for v, r in zip(residuals, grid)),
    )


def localization_gaps(table: SpectrumTable) -> Tuple[float, ...]:
    """|lambda_n - z_n| per mode, midpoint against the asymptotic center."""
    return tuple(m.gap for m in table.modes)


def localization_check(table: SpectrumTable) -> float:
    """Largest localization gap over the table."""
    if not table.modes:
        raise ValueError("empty table")
    return max(localization_gaps(table))


def localization_windows(table: SpectrumTable) -> Tuple[float, float]:
    """(early, late) window maxima of the gaps: n in [2, n_max/2] and
    [n_max/2, n_max].  Bounded gaps show as late <= 2 * early."""
    half = max(2, table.n_max // 2)
    gaps = localization_gaps(table)
    early = max(g for m, g in zip(table.modes, gaps) if 2 <= m.n <= half)
    late = max(g for m, g in zip(table.modes, gaps) if half <= m.n)
    return early, late


def _sign_at_sqrt(p: RatPoly, t: Fraction) -> int:
    """Exact sign of p(sqrt(t)) for rational t > 0, by splitting p into
    even and odd parts: p(sqrt t) = A + B sqrt(t) with A, B rational."""
    a = sum((c * t ** (k // 2) for k, c in enumerate(p.coeffs) if k % 2 == 0), Fraction(0))
    b = sum((c * t ** ((k - 1) // 2) for k, c in enumerate(p.coeffs) if k % 2 == 1), Fraction(0))
    if a == 0 and b == 0:
        return 0
    if a >= 0 and b >= 0:
        return 1
    if a <= 0 and b <= 0:
        return -1
    d = a * a - b * b * t  # sign(A + B sqrt t) = sign(A^2 - B^2 t) * sign(A)
    if d == 0:
        return 0
    return (1 if d > 0 else -1) * (1 if a > 0 else -1)


def _above_neg_c0(mode: EigMode, gp: GammaParam) -> Tuple[bool, EigMode]:
    """Exact decision lambda_n > -c0, via the rational square c0^2."""
    c0_sq = gp.c0_sq
    checked_equality = False
    while True:
        lo, hi = mode.lambda_interval
        if mode.w_interval.is_exact:
            return lo * lo < c0_sq, mode
        if lo * lo <= c0_sq:
            return True, mode
        if hi * hi >= c0_sq:
            return False, mode
        # straddle: equality lambda = -c0 corresponds to the w root at
        # 1/(2 c0), i.e. w^2 = 1/(4 c0^2); decidable even when c0 is a surd
        if not checked_equality:
            p = characteristic_poly_direct(mode.n, gp)
            if _sign_at_sqrt(p, 1 / (4 * c0_sq)) == 0:
                return False, mode  # strict inequality fails at equality
            checked_equality = True
        mode = _refine_mode(mode, gp, mode.w_interval.width / 4)


def exceptional_count(table: SpectrumTable) -> int:
    """Number of eigenvalues above -c0; the spectral-gap claim caps it at 1.

    The table must certify its last mode strictly below -c0, so that no
    uncomputed mode could land above.
    """
    gp = table.gamma_param
    last_above, _ = _above_neg_c0(table.modes[-1], gp)
    if last_above:
        raise IncompleteTable("table does not reach past -c0; extend n_max")
    return sum(1 for mode in table.modes if _above_neg_c0(mode, gp)[0])


def reciprocal_symmetry_check(gamma: Rational, n_max: int, eps: Rational = Fraction(1, 10**30)) -> bool:
    """Tables for gamma and 1/gamma carry identical eigenvalue intervals
    mode-by-mode, with opposite polarization branches."""
    from .besselpoly import gamma_param

    g = Fraction(gamma)
    t_fwd = spectrum_table(gamma_param(g), n_max, eps)
    t_rec = spectrum_table(gamma_param(1 / g), n_max, eps)
    return all(
        a.lambda_interval == b.lambda_interval
        and a.multiplicity == b.multiplicity
        and a.branch != b.branch
        for a, b in zip(t_fwd.modes, t_rec.modes)
    )
