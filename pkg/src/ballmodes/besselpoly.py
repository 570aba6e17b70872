"""Bessel-type polynomials and the characteristic polynomials of the modes.

The radial profile of an outgoing mode is a spherical Hankel function,
which on the negative real spectral axis reduces to a polynomial with
positive integer coefficients.  This module builds those polynomials and
the characteristic polynomial whose unique positive root pins the
eigenvalue, each by two independent routes, plus floating-point Hankel
oracles used to cross-check the exact pipeline.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Tuple, Union

from gmpy2 import mpz

from .exactpoly import RatPoly, derivative

Rational = Union[int, Fraction]


class OverflowAtLargeN(Exception):
    """Hankel recurrence left the double-precision range; the float oracle
    is a desk-scale cross-check and does not rescale."""


@dataclass(frozen=True)
class GammaParam:
    """Boundary impedance and the derived quantities the solver needs.

    gamma0 folds the reciprocal symmetry: modes for gamma and 1/gamma
    coincide, only the polarization branch differs.  alpha is the constant
    term of every characteristic polynomial; c0 is the spectral-gap radius
    (at most one eigenvalue lies above -c0).
    """

    gamma: Fraction
    gamma0: Fraction
    alpha: Fraction
    c0: float

    def __post_init__(self):
        if self.gamma0 <= 1:
            raise ValueError("gamma0 must exceed 1")
        if self.alpha >= 0:
            raise ValueError("alpha must be negative")
        if not (self.c0 > 0 and math.isfinite(self.c0)):
            raise ValueError("c0 must be positive and finite")

    @property
    def branch(self) -> str:
        """Polarization carrying the eigenvalues: U for gamma > 1, V below."""
        return "U" if self.gamma > 1 else "V"

    @property
    def c0_sq(self) -> Fraction:
        """Exact square of c0; rational even when c0 itself is a surd."""
        t = self.gamma0 - 1
        return 1 / (t * max(t, 1))

    @property
    def weyl_coefficient(self) -> Fraction:
        """Leading coefficient gamma0^2 - 1 of the eigenvalue counting law."""
        return self.gamma0 * self.gamma0 - 1


def gamma_param(gamma: Union[str, Rational]) -> GammaParam:
    """Build GammaParam from a decimal string, fraction string, or rational.

    The value must be positive and different from 1 (at gamma = 1 the
    boundary absorbs perfectly and the point spectrum is empty).
    """
    try:
        g = Fraction(gamma)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse gamma value {gamma!r}") from exc
    if g <= 0:
        raise ValueError("gamma must be positive")
    if g == 1:
        raise ValueError("for gamma = 1 there are no eigenvalues: the boundary "
                         "absorbs perfectly and the point spectrum is empty")
    g0 = max(g, 1 / g)
    t = g0 - 1
    c0 = 1 / float(t) if t >= 1 else 1 / math.sqrt(float(t))
    return GammaParam(gamma=g, gamma0=g0, alpha=(1 - g0) / 2, c0=c0)


@lru_cache(maxsize=256)
def hankel_poly_coeffs(n: int) -> RatPoly:
    """Polynomial part of the outgoing radial function, ascending powers.

    Coefficient at power m is (n+m)!/(m!(n-m)!), a positive integer,
    generated by the term ratio to avoid repeated factorials.
    """
    if n < 0:
        raise ValueError("order must be nonnegative")
    a = mpz(1)
    coeffs = [a]
    for m in range(n):
        a = a * (n + m + 1) * (n - m) // (m + 1)
        coeffs.append(a)
    return RatPoly(int(c) for c in coeffs)


def characteristic_poly_direct(n: int, gp: GammaParam) -> RatPoly:
    """Characteristic polynomial built from its definition:
    w^2 * R_n'(w) + alpha * R_n(w)."""
    if n < 1:
        raise ValueError("mode order must be at least 1")
    r = hankel_poly_coeffs(n)
    return derivative(r).shifted(2) + r.scaled(gp.alpha)


def characteristic_poly_closed_form(n: int, gp: GammaParam) -> RatPoly:
    """Characteristic polynomial from the closed-form coefficient formula.

    Coefficient at power k (k = 0..n+1) is
    (n+k-1)!/((n-k+1)! k!) * (k(k-1) + alpha (n+k)(n-k+1)),
    an independent route used to cross-validate the direct construction.
    """
    if n < 1:
        raise ValueError("mode order must be at least 1")
    alpha = gp.alpha
    f = Fraction(1, n * (n + 1))  # (n+k-1)!/((n-k+1)! k!) at k = 0
    coeffs = []
    for k in range(n + 2):
        coeffs.append(f * (k * (k - 1) + alpha * (n + k) * (n - k + 1)))
        f *= Fraction((n + k) * (n - k + 1), k + 1)
    return RatPoly(coeffs)


def _hankel_pair(n: int, lam: float) -> Tuple[complex, complex]:
    """Exponential-free pair (h_{n-1}, h_n)/e^lam of the outgoing spherical
    Hankel function at -i*lam, for n >= 1.

    Upward three-term recurrence from the closed-form orders 0 and 1; on
    the positive imaginary axis the recurrence is forward-stable because
    the dominant solution grows.  The common factor e^lam, which underflows
    for very negative lam, is left off; it cancels in every ratio and is
    restored by hankel_oracle.
    """
    if lam >= 0:
        raise ValueError("spectral parameter must be negative")
    if n < 1:
        raise ValueError("pair evaluation needs n >= 1")
    z = -1j * lam  # on the positive imaginary axis
    h_prev = -1j / z
    h = -(z + 1j) / (z * z)
    for k in range(1, n):
        h_prev, h = h, (2 * k + 1) / z * h - h_prev
        if not (math.isfinite(h.real) and math.isfinite(h.imag)):
            raise OverflowAtLargeN(f"order {n} overflows at lam = {lam}")
    return h_prev, h


def hankel_oracle(n: int, lam: float) -> complex:
    """Outgoing spherical Hankel function h_n at -i*lam, evaluated by the
    standard recurrence, never through the polynomial representation.
    Serves as an independent oracle for the exact path."""
    if n < 0:
        raise ValueError("order must be nonnegative")
    if lam >= 0:
        raise ValueError("spectral parameter must be negative")
    scale = math.exp(lam)  # e^{i z} at z = -i lam
    if n == 0:
        return -1j * scale / (-1j * lam)
    return _hankel_pair(n, lam)[1] * scale


@dataclass(frozen=True)
class HankelLogDeriv:
    """Logarithmic derivative d/dlam log h_n(-i*lam), which is finite for
    lam < 0 because h_n has no zeros in the upper half plane."""

    n: int
    lam: float
    value: float


def hankel_log_deriv(n: int, lam: float) -> HankelLogDeriv:
    """Evaluate the logarithmic derivative via the ladder identity
    h_n'(z) = h_{n-1}(z) - (n+1)/z * h_n(z) at z = -i*lam."""
    if n < 1:
        raise ValueError("mode order must be at least 1")
    h_prev, h = _hankel_pair(n, lam)
    val = -1j * (h_prev / h) - (n + 1) / lam
    if abs(val.imag) > 1e-10 * (1 + abs(val)):
        raise ArithmeticError(f"log-derivative not real: {val!r}")
    return HankelLogDeriv(n=n, lam=lam, value=val.real)


def secular_oracle(n: int, lam: float, gp: GammaParam) -> float:
    """Floating secular function whose zeros are the eigenvalues:
    1/lam + d/dlam log h_n(-i*lam) - gamma0.

    Real for real lam; the imaginary part is asserted to be float noise and
    the real part returned.
    """
    if n < 1:
        raise ValueError("mode order must be at least 1")
    h_prev, h = _hankel_pair(n, lam)
    g = 1 / lam + (-1j * (h_prev / h) - (n + 1) / lam) - float(gp.gamma0)
    if abs(g.imag) > 1e-10 * (1 + abs(g)):
        raise ArithmeticError(f"secular value not real: {g!r}")
    return g.real


def _homogeneous_int_eval(p: RatPoly, num: int, den: int):
    """Integer value of den^deg * p(num/den) for an integer-coefficient p."""
    d = p.degree
    num, den = mpz(num), mpz(den)
    acc = mpz(0)
    dp = mpz(1)
    for k in range(d, -1, -1):
        c = p.coeffs[k]
        acc = acc * num + c.numerator * dp
        dp *= den
    return acc


def log_derivative_gap(n: int, lam: Rational) -> Fraction:
    """Exact gap between consecutive radial log-derivatives,
    (1/(2 lam^2)) * (R_{n+1}'/R_{n+1} - R_n'/R_n) at w = -1/(2 lam).

    Positive for every lam < 0; this is the interlacing mechanism that
    makes the eigenvalue sequence strictly decreasing.
    """
    lam = Fraction(lam)
    if lam >= 0:
        raise ValueError("spectral parameter must be negative")
    w = -1 / (2 * lam)
    p, q = w.numerator, w.denominator
    b = hankel_poly_coeffs(n)
    a = hankel_poly_coeffs(n + 1)
    ha = _homogeneous_int_eval(a, p, q)
    hb = _homogeneous_int_eval(b, p, q)
    hda = _homogeneous_int_eval(derivative(a), p, q)
    hdb = _homogeneous_int_eval(derivative(b), p, q)
    # A'/A - B'/B at p/q equals q*(hda*hb - hdb*ha)/(ha*hb); multiply by 2w^2
    return Fraction(int(2 * p * p * (hda * hb - hdb * ha)), int(q * ha * hb))


def logderiv_approx_error(n: int, lam: float) -> float:
    """Deviation of the Hankel log-derivative from its large-|lam| envelope
    sqrt(1 + n(n+1)/lam^2); decays like 1/|lam| uniformly in n."""
    if not lam <= -1:
        raise ValueError("need lam <= -1")
    val = hankel_log_deriv(n, lam).value
    return abs(val - math.sqrt(1 + n * (n + 1) / (lam * lam)))
