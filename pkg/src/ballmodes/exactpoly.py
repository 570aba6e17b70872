"""Exact rational polynomials with certified real root isolation.

Everything here is exact: coefficients are `fractions.Fraction`, sign
evaluations are big-integer arithmetic (gmpy2), and root enclosures carry
a proof obligation (a sign change plus a root count of one).  Floating
point never enters the decision path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence, Union

import gmpy2
from gmpy2 import mpz

Rational = Union[int, Fraction]


class ZeroOrManyRoots(Exception):
    """Raised when a polynomial expected to have exactly one positive root
    fails that certification.  Carries the certified count."""

    def __init__(self, count: int, message: str = ""):
        self.count = count
        super().__init__(message or f"expected exactly one positive root, certified {count}")


class RatPoly:
    """Univariate polynomial with exact rational coefficients.

    Coefficients are stored ascending by power and trimmed, so the leading
    coefficient is nonzero unless the polynomial is identically zero.
    """

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable[Rational]):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "_hash", None)

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    @property
    def constant(self) -> Fraction:
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def __call__(self, x: Rational) -> Fraction:
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other) -> bool:
        return isinstance(other, RatPoly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(self.coeffs))
        return self._hash

    def __repr__(self) -> str:
        return f"RatPoly({list(self.coeffs)!r})"

    def scaled(self, c: Rational) -> "RatPoly":
        c = Fraction(c)
        return RatPoly(ci * c for ci in self.coeffs)

    def __add__(self, other: "RatPoly") -> "RatPoly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return RatPoly(out)

    def shifted(self, k: int) -> "RatPoly":
        """Multiply by x^k (k >= 0)."""
        if self.is_zero:
            return self
        return RatPoly((Fraction(0),) * k + self.coeffs)


@dataclass(frozen=True)
class RootInterval:
    """Certified enclosure of a single real root.

    Invariant: p has exactly one root in (lo, hi), witnessed by opposite
    signs at the endpoints.  The degenerate case lo == hi (signs 0) records
    a root hit exactly, which bisection can produce at rational roots.
    """

    lo: Fraction
    hi: Fraction
    sign_lo: int
    sign_hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("interval endpoints out of order")
        if self.lo == self.hi:
            if self.sign_lo != 0 or self.sign_hi != 0:
                raise ValueError("degenerate interval must carry zero signs")
        elif self.sign_lo == self.sign_hi or 0 in (self.sign_lo, self.sign_hi):
            raise ValueError("enclosure needs a strict sign change")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def contains(self, other: "RootInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi


def derivative(p: RatPoly) -> RatPoly:
    """Formal derivative."""
    return RatPoly(k * c for k, c in enumerate(p.coeffs) if k >= 1)


@lru_cache(maxsize=64)
def _primitive_ints(p: RatPoly) -> tuple:
    """Primitive integer coefficient vector with the same sign behavior.

    Clears denominators and divides by the content; the scaling factor is
    positive, so signs and roots are unchanged.
    """
    if p.is_zero:
        return ()
    den = 1
    for c in p.coeffs:
        den = den * c.denominator // gmpy2.gcd(den, c.denominator)
    ints = [mpz(c.numerator) * (den // c.denominator) for c in p.coeffs]
    g = mpz(0)
    for v in ints:
        if v:
            g = gmpy2.gcd(g, v)
            if g == 1:
                break
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(ints)


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def _eval_sign_ints(ints: Sequence, num, den) -> int:
    """Sign of sum c_k num^k den^(deg-k); den > 0 so this matches p(num/den).

    For power-of-two denominators the den powers become shifts.
    """
    d = len(ints) - 1
    if d < 0:
        return 0
    num = mpz(num)
    if den == 1:
        acc = ints[d]
        for k in range(d - 1, -1, -1):
            acc = acc * num + ints[k]
        return _sign(acc)
    s = gmpy2.bit_scan1(mpz(den))
    if den == (1 << s):
        acc = ints[d]
        for k in range(d - 1, -1, -1):
            acc = acc * num + (ints[k] << (s * (d - k)))
        return _sign(acc)
    den = mpz(den)
    acc = ints[d]
    dp = mpz(1)
    for k in range(d - 1, -1, -1):
        dp *= den
        acc = acc * num + ints[k] * dp
    return _sign(acc)


def eval_sign(p: RatPoly, x: Rational) -> int:
    """Exact sign of p(x) for rational x."""
    if p.is_zero:
        return 0
    x = Fraction(x)
    return _eval_sign_ints(_primitive_ints(p), x.numerator, x.denominator)


def descartes_sign_changes(p: RatPoly) -> int:
    """Strict sign changes in the coefficient sequence, zeros skipped.

    Bounds the number of positive roots (with multiplicity); a count of 0
    or 1 is sharp.
    """
    if p.is_zero:
        raise ValueError("sign changes undefined for the zero polynomial")
    changes = 0
    prev = 0
    for c in p.coeffs:
        s = _sign(c)
        if s == 0:
            continue
        if prev != 0 and s != prev:
            changes += 1
        prev = s
    return changes


def cauchy_positive_bound(p: RatPoly) -> Fraction:
    """Exclusive upper bound M for positive roots: 1 + max |c_k/c_deg|.

    All complex roots have modulus < M, so p keeps the sign of its leading
    coefficient on [M, oo).
    """
    if p.is_zero:
        raise ValueError("no root bound for the zero polynomial")
    if p.degree == 0:
        return Fraction(1)
    lead = abs(p.leading)
    return 1 + max(abs(c) for c in p.coeffs[:-1]) / lead


def _tail_root_free(ints: Sequence, lo: Fraction) -> bool:
    """True when the integer polynomial provably has no root on [lo, hi]
    with lo >= 0: a constant, or all coefficients of one strict sign
    (then it cannot vanish for x >= 0)."""
    if len(ints) == 1:
        return True
    if lo < 0:
        return False
    return all(v > 0 for v in ints) or all(v < 0 for v in ints)


def _sturm_chain(ints: tuple, lo: Fraction):
    """Sturm chain of p from the primitive integer coefficients.

    Each stored element is a positive integer multiple of the classical
    Sturm polynomial, so sign variations are unchanged.  The chain stops
    early once the current element provably has no root in [lo, oo) with
    lo >= 0; the truncated chain still satisfies the Sturm sign conditions
    on the query interval (the tail element never vanishes there, and a
    common zero of consecutive elements would propagate to it).
    """
    p0 = list(ints)
    p1 = [mpz(k) * p0[k] for k in range(1, len(p0))]
    g = mpz(0)
    for v in p1:
        if v:
            g = gmpy2.gcd(g, v)
            if g == 1:
                break
    if g > 1:
        p1 = [v // g for v in p1]
    chain = [p0, p1]
    a, b = p0, p1
    while len(b) > 1 and not _tail_root_free(b, lo):
        # pseudo-division: r = lb^k * (a mod b), k = number of elimination steps
        r = list(a)
        lb = b[-1]
        db = len(b) - 1
        steps = 0
        while r and len(r) - 1 >= db:
            la = r[-1]
            sh = len(r) - 1 - db
            r = [v * lb for v in r]
            for i in range(db + 1):
                r[sh + i] -= la * b[i]
            r.pop()
            while r and r[-1] == 0:
                r.pop()
            steps += 1
        if not r:
            # b divides a: gcd stage reached (multiple roots); classical
            # truncation at the gcd still counts distinct roots correctly
            break
        # true next element is -(a mod b); flip so the stored multiple is positive
        if lb > 0 or steps % 2 == 0:
            r = [-v for v in r]
        g = mpz(0)
        for v in r:
            g = gmpy2.gcd(g, v)
            if g == 1:
                break
        if g > 1:
            r = [v // g for v in r]
        chain.append(r)
        a, b = b, r
    return chain


def _variations_at(chain, num, den) -> int:
    signs = []
    for el in chain:
        s = _eval_sign_ints(el, num, den)
        if s != 0:
            signs.append(s)
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def sturm_root_count(p: RatPoly, lo: Rational, hi: Rational) -> int:
    """Number of distinct real roots of p in (lo, hi).

    Computed as the difference of Sturm-chain sign variations at the two
    endpoints, entirely in integer arithmetic.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    if lo >= hi:
        raise ValueError("need lo < hi")
    if p.is_zero or p.degree == 0:
        return 0
    if eval_sign(p, lo) == 0 or eval_sign(p, hi) == 0:
        raise ValueError("endpoint is a root; perturb the endpoint and retry")
    chain = _sturm_chain(_primitive_ints(p), lo)
    va = _variations_at(chain, lo.numerator, lo.denominator)
    vb = _variations_at(chain, hi.numerator, hi.denominator)
    return va - vb


def _dyadic_split(lo: Fraction, hi: Fraction) -> Fraction:
    """Interior point of (lo, hi) with a power-of-two denominator, near the
    midpoint.  Keeps bisection evaluation points cheap: numerators stay
    small and denominator powers turn into shifts."""
    width = hi - lo
    # 2^-s <= width/4 guarantees the snapped midpoint stays interior
    s = max(1, width.denominator.bit_length() - width.numerator.bit_length() + 3)
    while True:
        mid = (lo + hi) / 2
        a = (mid.numerator << s) // mid.denominator
        split = Fraction(a, 1 << s)
        if lo < split < hi:
            return split
        s += 2


def isolate_unique_positive_root(p: RatPoly) -> RootInterval:
    """Certified enclosure of the unique positive root of p.

    Certification: one Descartes sign change proves exactly one positive
    root (and that it is simple); otherwise an explicit Sturm count over
    (0, M) decides.  Raises ZeroOrManyRoots when the count is not one.
    """
    if p.is_zero or p.degree < 1:
        raise ZeroOrManyRoots(0, "constant polynomial has no roots")
    if p.constant == 0:
        raise ValueError("p(0) = 0; factor out the root at the origin first")
    bound = cauchy_positive_bound(p)
    changes = descartes_sign_changes(p)
    if changes == 0:
        raise ZeroOrManyRoots(0)
    if changes > 1:
        count = sturm_root_count(p, 0, bound)
        if count != 1:
            raise ZeroOrManyRoots(count)
    sign_lo = _sign(p.constant)
    sign_hi = _sign(p.leading)  # sign of p on [M, oo): no roots at or beyond M
    if sign_lo == sign_hi:
        # distinct-root count 1 without a sign change: even multiplicity
        raise ZeroOrManyRoots(1, "positive root has even multiplicity; enclosure impossible")
    lo, hi = Fraction(0), bound
    ints = _primitive_ints(p)
    # the Cauchy bound is strict, so the root is interior; bisect until the
    # enclosure is strictly inside (0, M)
    while lo == 0 or hi == bound:
        split = _dyadic_split(lo, hi)
        s = _eval_sign_ints(ints, split.numerator, split.denominator)
        if s == 0:
            return RootInterval(split, split, 0, 0)
        if s == sign_lo:
            lo = split
        else:
            hi = split
    return RootInterval(lo, hi, sign_lo, sign_hi)


def refine(p: RatPoly, iv: RootInterval, eps: Rational) -> RootInterval:
    """Bisect iv until its width is at most eps.

    Split points are dyadic rationals near the midpoint; signs are exact, so
    containment is preserved at every step.  A split landing exactly on the
    root collapses the interval to the degenerate exact point.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if iv.is_exact or iv.width <= eps:
        return iv
    ints = _primitive_ints(p)
    lo, hi = iv.lo, iv.hi
    sign_lo, sign_hi = iv.sign_lo, iv.sign_hi
    while hi - lo > eps:
        split = _dyadic_split(lo, hi)
        s = _eval_sign_ints(ints, split.numerator, split.denominator)
        if s == 0:
            return RootInterval(split, split, 0, 0)
        if s == sign_lo:
            lo = split
        else:
            hi = split
    return RootInterval(lo, hi, sign_lo, sign_hi)
