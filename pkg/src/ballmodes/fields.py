"""Eigenfield reconstruction and residual verification on and off the sphere.

Scalar and vector spherical harmonics are built from scaled associated
Legendre functions (the 1/sin^m theta factor is divided out analytically,
so pole evaluation needs no special cases).  Fields are single-(n,m) terms
of the outgoing expansion; verification is numerical: finite-difference
curl and divergence residuals off the boundary, and the impedance bracket
on the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .besselpoly import GammaParam
from .spectrum import EigMode

Vec3 = np.ndarray


@dataclass(frozen=True, eq=False)
class SphereSample:
    """Point on the unit sphere with its angles and Cartesian vector."""

    theta: float
    phi: float
    omega: Vec3

    def __post_init__(self):
        if abs(float(np.dot(self.omega, self.omega)) - 1.0) > 1e-14:
            raise ValueError("omega must be a unit vector")


def sphere_sample(theta: float, phi: float) -> SphereSample:
    s, c = math.sin(theta), math.cos(theta)
    omega = np.array([s * math.cos(phi), s * math.sin(phi), c])
    omega /= math.sqrt(float(np.dot(omega, omega)))
    return SphereSample(theta=theta, phi=phi, omega=omega)


def _scaled_legendre_pair(n: int, m: int, x: float) -> Tuple[float, float]:
    """(q_{n-1}^m, q_n^m) where q_n^m = normalized-P_n^m / sin^m(theta),
    a polynomial in x = cos(theta).

    Normalization includes the Condon-Shortley phase and the full
    orthonormal prefactor, so q * sin^m * e^{im phi} is the orthonormal
    spherical harmonic.
    """
    sigma = 1.0 / math.sqrt(4 * math.pi)
    for i in range(1, m + 1):
        sigma *= -math.sqrt((2 * i + 1) / (2 * i))
    if n == m:
        return 0.0, sigma
    q_prev, q = sigma, math.sqrt(2 * m + 3) * x * sigma
    for k in range(m + 2, n + 1):
        a_k = math.sqrt((4 * k * k - 1) / (k * k - m * m))
        b_k = math.sqrt((2 * k + 1) * (k - 1 - m) * (k - 1 + m) / ((2 * k - 3) * (k * k - m * m)))
        q_prev, q = q, a_k * x * q - b_k * q_prev
    return q_prev, q


def _angular_parts(n: int, m: int, x: float, s: float) -> Tuple[float, float, float]:
    """(y, f1, f2) for m >= 0 at cos(theta) = x, sin(theta) = s, where the
    harmonic is y e^{im phi}, its theta-derivative is f1 e^{im phi}, and
    m/sin(theta) times it is f2 e^{im phi}.  All three are finite at the
    poles by construction."""
    q_prev, q = _scaled_legendre_pair(n, m, x)
    if m == 0:
        y = q
        if n == 0:
            return y, 0.0, 0.0
        _, q1 = _scaled_legendre_pair(n, 1, x)
        return y, math.sqrt(n * (n + 1)) * s * q1, 0.0
    sm1 = s ** (m - 1)
    y = q * sm1 * s
    e_n = math.sqrt((n * n - m * m) * (2 * n + 1) / (2 * n - 1)) if n > m else 0.0
    f1 = sm1 * (n * x * q - e_n * q_prev)
    f2 = m * q * sm1
    return y, f1, f2


def sph_harm(n: int, m: int, sample: SphereSample) -> complex:
    """Orthonormal spherical harmonic with Condon-Shortley phase."""
    if abs(m) > n:
        raise ValueError("need |m| <= n")
    x, s = math.cos(sample.theta), math.sin(sample.theta)
    y, _, _ = _angular_parts(n, abs(m), x, s)
    val = y * complex(math.cos(abs(m) * sample.phi), math.sin(abs(m) * sample.phi))
    if m < 0:
        val = (-1) ** m * val.conjugate()
    return val


def _frames(sample: SphereSample) -> Tuple[Vec3, Vec3]:
    """(theta-hat, phi-hat) at the sample; at the poles this is the limit
    frame along the sample's meridian."""
    ct, st = math.cos(sample.theta), math.sin(sample.theta)
    cp, sp = math.cos(sample.phi), math.sin(sample.phi)
    e_theta = np.array([ct * cp, ct * sp, -st])
    e_phi = np.array([-sp, cp, 0.0])
    return e_theta, e_phi


def vector_harmonics(n: int, m: int, sample: SphereSample) -> Tuple[Vec3, Vec3]:
    """Tangent pair (U, V): the normalized surface gradient of the harmonic
    and its quarter-turn nu x U.  Pole values come from the analytic limits
    baked into the scaled-Legendre evaluation."""
    if n < 1:
        raise ValueError("vector harmonics start at n = 1")
    if abs(m) > n:
        raise ValueError("need |m| <= n")
    x, s = math.cos(sample.theta), math.sin(sample.theta)
    ma = abs(m)
    _, f1, f2 = _angular_parts(n, ma, x, s)
    phase = complex(math.cos(ma * sample.phi), math.sin(ma * sample.phi))
    scale = 1.0 / math.sqrt(n * (n + 1))
    e_theta, e_phi = _frames(sample)
    u = scale * phase * (f1 * e_theta.astype(complex) + 1j * f2 * e_phi.astype(complex))
    v = scale * phase * (f1 * e_phi.astype(complex) - 1j * f2 * e_theta.astype(complex))
    if m < 0:
        sign = (-1) ** m
        u = sign * np.conj(u)
        v = sign * np.conj(v)
    return u, v


def sphere_quadrature(n: int) -> List[Tuple[SphereSample, float]]:
    """Product rule exact for harmonic products up to order n: Gauss-
    Legendre with 2n+2 nodes in cos(theta) crossed with a 4n+4 point
    uniform rule in phi.  Weights sum to the sphere area."""
    xs, ws = np.polynomial.legendre.leggauss(2 * n + 2)
    n_phi = 4 * n + 4
    dphi = 2 * math.pi / n_phi
    nodes = []
    for x, w in zip(xs, ws):
        theta = math.acos(float(x))
        for j in range(n_phi):
            nodes.append((sphere_sample(theta, j * dphi), float(w) * dphi))
    return nodes


@dataclass(frozen=True)
class ModeField:
    """Single-(n,m) eigenfield description: which harmonic, which certified
    eigenvalue (midpoint), which polarization branch, and the boundary
    impedance it must satisfy."""

    n: int
    m: int
    lam: float
    branch: str
    gamma: float

    def __post_init__(self):
        if abs(self.m) > self.n or self.n < 1:
            raise ValueError("need n >= 1 and |m| <= n")
        if not self.lam < 0:
            raise ValueError("eigenvalue must be negative")
        if self.branch not in ("U", "V"):
            raise ValueError("branch must be U or V")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")


def mode_field(mode: EigMode, m: int, gp: GammaParam) -> ModeField:
    """Bind a certified eigenvalue to an azimuthal order."""
    return ModeField(n=mode.n, m=m, lam=mode.lambda_mid, branch=mode.branch, gamma=float(gp.gamma))


def _radial_pair(n: int, lam: float, r: float) -> Tuple[complex, complex]:
    """(h, (r h)') for the outgoing radial factor h = h_n(-i lam r).

    Evaluated through the polynomial representation with a term-ratio
    recurrence: coefficients of the radial polynomial overflow doubles
    near n = 90, the running terms do not.  All terms are positive, so the
    sums are cancellation-free.
    """
    w = -1.0 / (2.0 * lam * r)
    term = 1.0
    val = term
    dval = 0.0
    for m_i in range(n):
        term *= w * (n + m_i + 1) * (n - m_i) / (m_i + 1)
        val += term
        dval += (m_i + 1) * term / w
    pref = (-1j) ** n * math.exp(lam * r)
    return pref * val / (lam * r), pref * (val + 2 * w * w * dval)


def eigenfield(mode: ModeField, x: Sequence[float]) -> Tuple[Vec3, Vec3]:
    """(E, B) of the mode at a point outside the unit ball.

    U-branch modes carry the electric field in the gradient polarization,
    V-branch modes in the rotated one; the magnetic field follows from the
    curl relation curl E = -lam B.
    """
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    if r < 1.0 - 1e-12:
        raise ValueError("field points must satisfy |x| >= 1")
    theta = math.acos(max(-1.0, min(1.0, x[2] / r)))
    phi = math.atan2(x[1], x[0])
    sample = sphere_sample(theta, phi)
    n, lam = mode.n, mode.lam
    kappa = math.sqrt(n * (n + 1))
    y = sph_harm(n, mode.m, sample)
    u, v = vector_harmonics(n, mode.m, sample)
    h, rhp = _radial_pair(n, lam, r)
    gradient_part = kappa * (h / r) * y * sample.omega.astype(complex) + (rhp / r) * u
    if mode.branch == "U":
        return gradient_part, -lam * h * v
    return h * v, gradient_part / lam


def boundary_residual(mode: ModeField, samples: Sequence[SphereSample]) -> float:
    """Impedance defect sup |E_tan - gamma nu x B_tan| / sup |E_tan| over
    boundary samples; vanishes to rounding exactly at certified
    eigenvalues of the mode's own branch."""
    worst_num = 0.0
    worst_den = 0.0
    for sample in samples:
        e, b = eigenfield(mode, sample.omega)
        omega = sample.omega
        e_tan = e - np.dot(omega, e) * omega
        bracket = e_tan - mode.gamma * np.cross(omega, b)
        worst_num = max(worst_num, float(np.linalg.norm(bracket)))
        worst_den = max(worst_den, float(np.linalg.norm(e_tan)))
    if worst_den == 0.0:
        raise ValueError("tangential field vanishes on all samples")
    return worst_num / worst_den


def _fd_derivatives(mode: ModeField, x: np.ndarray, h: float):
    """Central-difference Jacobians of E and B at x: lists indexed by
    derivative direction."""
    de, db = [], []
    for i in range(3):
        step = np.zeros(3)
        step[i] = h
        ep, bp = eigenfield(mode, x + step)
        em, bm = eigenfield(mode, x - step)
        de.append((ep - em) / (2 * h))
        db.append((bp - bm) / (2 * h))
    return de, db


def _curl(d) -> np.ndarray:
    return np.array(
        [
            d[1][2] - d[2][1],
            d[2][0] - d[0][2],
            d[0][1] - d[1][0],
        ]
    )


def maxwell_residual(mode: ModeField, points: Sequence[Sequence[float]], fd_step: float = 1e-4) -> float:
    """Largest pointwise defect |curl B - lam E| + |curl E + lam B| with
    central differences of step fd_step; second-order small for a true
    eigenfield, order-one otherwise."""
    worst = 0.0
    lam = mode.lam
    for point in points:
        x = np.asarray(point, dtype=float)
        if float(np.linalg.norm(x)) < 1.0 + 2 * fd_step:
            raise ValueError("need |x| >= 1 + 2 fd_step for the stencil")
        e, b = eigenfield(mode, x)
        de, db = _fd_derivatives(mode, x, fd_step)
        res = float(np.linalg.norm(_curl(db) - lam * e) + np.linalg.norm(_curl(de) + lam * b))
        worst = max(worst, res)
    return worst


def field_scale(mode: ModeField, points: Sequence[Sequence[float]]) -> float:
    """Reference magnitude |lam| (|E| + |B|) maximized over points; the
    natural yardstick for maxwell_residual."""
    worst = 0.0
    for point in points:
        e, b = eigenfield(mode, np.asarray(point, dtype=float))
        worst = max(worst, abs(mode.lam) * float(np.linalg.norm(e) + np.linalg.norm(b)))
    return worst


def divergence_residual(mode: ModeField, points: Sequence[Sequence[float]], fd_step: float = 1e-4) -> float:
    """Largest |div E| + |div B| relative to the local field size, by the
    same central-difference stencil."""
    worst = 0.0
    for point in points:
        x = np.asarray(point, dtype=float)
        if float(np.linalg.norm(x)) < 1.0 + 2 * fd_step:
            raise ValueError("need |x| >= 1 + 2 fd_step for the stencil")
        e, b = eigenfield(mode, x)
        de, db = _fd_derivatives(mode, x, fd_step)
        div_e = abs(de[0][0] + de[1][1] + de[2][2])
        div_b = abs(db[0][0] + db[1][1] + db[2][2])
        scale = float(np.linalg.norm(e) + np.linalg.norm(b))
        worst = max(worst, (div_e + div_b) / scale)
    return worst
