"""Tests for spherical harmonics, vector harmonics, and eigenfield residuals.

scipy's sph_harm_y is the independent oracle for scalar harmonics; vector
harmonics are validated by quadrature orthonormality; fields by the
finite-difference Maxwell system and the boundary impedance bracket.
"""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.special import sph_harm_y

from ballmodes.besselpoly import gamma_param
from ballmodes.fields import (
    ModeField,
    SphereSample,
    boundary_residual,
    divergence_residual,
    eigenfield,
    field_scale,
    maxwell_residual,
    mode_field,
    sph_harm,
    sphere_quadrature,
    sphere_sample,
    vector_harmonics,
)
from ballmodes.fields import _curl, _fd_derivatives
from ballmodes.spectrum import eigenvalue

GP2 = gamma_param("2")
NODES8 = sphere_quadrature(8)
OFF_POINTS = ([1.2, 0.3, 0.4], [0.0, 1.5, 0.2], [-1.0, 0.8, 0.9], [0.1, -0.2, -1.6])


def test_sphere_sample_unit_vector():
    s = sphere_sample(0.7, 1.9)
    assert abs(float(np.dot(s.omega, s.omega)) - 1) <= 1e-14
    with pytest.raises(ValueError):
        SphereSample(theta=0.7, phi=1.9, omega=np.array([1.0, 1.0, 0.0]))


def test_sph_harm_constants():
    for theta, phi in ((0.3, 0.0), (1.2, 2.5), (2.9, 5.1)):
        s = sphere_sample(theta, phi)
        assert sph_harm(0, 0, s) == pytest.approx(1 / math.sqrt(4 * math.pi), rel=1e-14)
        assert sph_harm(1, 0, s) == pytest.approx(
            math.sqrt(3 / (4 * math.pi)) * math.cos(theta), rel=1e-13
        )


def test_sph_harm_matches_scipy():
    rng = np.random.default_rng(21)
    for n in range(9):
        for m in range(-n, n + 1):
            for _ in range(3):
                theta = rng.uniform(0.005, math.pi - 0.005)
                phi = rng.uniform(0.0, 2 * math.pi)
                mine = sph_harm(n, m, sphere_sample(theta, phi))
                assert mine == pytest.approx(complex(sph_harm_y(n, m, theta, phi)), abs=1e-12)


def test_sph_harm_quadrature_normalized():
    for n, m in ((1, 0), (3, 2), (6, 4), (8, -8)):
        total = sum(w * abs(sph_harm(n, m, s)) ** 2 for s, w in NODES8)
        assert total == pytest.approx(1.0, abs=1e-10)


def test_sph_harm_rejects_bad_order():
    with pytest.raises(ValueError):
        sph_harm(2, 3, sphere_sample(1.0, 1.0))


def test_quadrature_weights_cover_sphere():
    assert sum(w for _, w in NODES8) == pytest.approx(4 * math.pi, rel=1e-12)


def test_vector_harmonics_tangent():
    thetas = [0.0, 1e-9, 0.4, math.pi / 2, math.pi - 1e-9, math.pi]
    for n, m in ((1, 0), (2, 1), (3, 3), (5, -2)):
        for theta in thetas:
            s = sphere_sample(theta, 0.9)
            u, v = vector_harmonics(n, m, s)
            assert abs(np.dot(s.omega, u)) <= 1e-12
            assert abs(np.dot(s.omega, v)) <= 1e-12
            assert np.all(np.isfinite(u.view(float))) and np.all(np.isfinite(v.view(float)))


def test_vector_harmonics_quarter_turn():
    for n, m in ((1, 1), (4, -3), (7, 0)):
        s = sphere_sample(1.3, 4.0)
        u, v = vector_harmonics(n, m, s)
        assert np.linalg.norm(np.cross(s.omega, u) - v) <= 1e-12
        assert np.linalg.norm(np.cross(s.omega, np.cross(s.omega, u)) + u) <= 1e-12


def test_vector_harmonics_negative_m_symmetry():
    s = sphere_sample(0.8, 2.2)
    for n, m in ((3, 1), (5, 4), (8, 7)):
        u_pos, v_pos = vector_harmonics(n, m, s)
        u_neg, v_neg = vector_harmonics(n, -m, s)
        sign = (-1) ** m
        assert np.linalg.norm(u_neg - sign * np.conj(u_pos)) <= 1e-13
        assert np.linalg.norm(v_neg - sign * np.conj(v_pos)) <= 1e-13


def test_vector_harmonics_orthonormality_by_quadrature():
    orders = [(n, m) for n in range(1, 9) for m in range(-n, n + 1)]
    us, vs = {}, {}
    for n, m in orders:
        u_arr = np.empty((len(NODES8), 3), dtype=complex)
        v_arr = np.empty((len(NODES8), 3), dtype=complex)
        for i, (s, _) in enumerate(NODES8):
            u_arr[i], v_arr[i] = vector_harmonics(n, m, s)
        us[(n, m)], vs[(n, m)] = u_arr, v_arr
    weights = np.array([w for _, w in NODES8])

    def inner(a, b):
        return complex(np.sum(weights * np.sum(np.conj(b) * a, axis=1)))

    for key in orders:
        assert inner(us[key], us[key]) == pytest.approx(1.0, abs=1e-8)
        assert inner(vs[key], vs[key]) == pytest.approx(1.0, abs=1e-8)
        assert inner(us[key], vs[key]) == pytest.approx(0.0, abs=1e-8)
    for m in (0, 1, 3):
        for n in range(max(1, m), 9):
            for n2 in range(max(1, m), n):
                assert inner(us[(n, m)], us[(n2, m)]) == pytest.approx(0.0, abs=1e-8)
                assert inner(vs[(n, m)], vs[(n2, m)]) == pytest.approx(0.0, abs=1e-8)
                assert inner(us[(n, m)], vs[(n2, m)]) == pytest.approx(0.0, abs=1e-8)


def test_vector_harmonics_rejects_bad_orders():
    s = sphere_sample(1.0, 1.0)
    with pytest.raises(ValueError):
        vector_harmonics(0, 0, s)
    with pytest.raises(ValueError):
        vector_harmonics(2, -3, s)


def test_mode_field_validation():
    with pytest.raises(ValueError):
        ModeField(n=2, m=3, lam=-1.0, branch="U", gamma=2.0)
    with pytest.raises(ValueError):
        ModeField(n=2, m=1, lam=0.5, branch="U", gamma=2.0)
    with pytest.raises(ValueError):
        ModeField(n=2, m=1, lam=-1.0, branch="W", gamma=2.0)
    mf = mode_field(eigenvalue(2, GP2), 1, GP2)
    assert (mf.n, mf.m, mf.branch, mf.gamma) == (2, 1, "U", 2.0)
    assert mf.lam == pytest.approx(-1.1958233454, abs=1e-9)


def test_eigenfield_decay():
    mf = mode_field(eigenvalue(1, GP2), 0, GP2)
    direction = np.array([0.3, 0.5, math.sqrt(1 - 0.34)])
    mags = []
    for r in (1.0, 2.0, 4.0):
        e, b = eigenfield(mf, r * direction)
        mags.append(float(np.linalg.norm(e)) + float(np.linalg.norm(b)))
    assert mags[0] > mags[1] > mags[2]
    # exponential envelope with a tame prefactor
    assert mags[2] <= 2.0 * math.exp(mf.lam * 3.0) * mags[0]


def test_eigenfield_rejects_interior():
    mf = mode_field(eigenvalue(1, GP2), 0, GP2)
    with pytest.raises(ValueError):
        eigenfield(mf, [0.3, 0.3, 0.3])


def test_boundary_tangential_polarization():
    # with the rotated polarization absent, the tangential electric field
    # on the sphere is parallel to the gradient harmonic
    mf = mode_field(eigenvalue(2, GP2), 1, GP2)
    for s, _ in sphere_quadrature(2)[::5]:
        e, _ = eigenfield(mf, s.omega)
        e_tan = e - np.dot(s.omega, e) * s.omega
        u, _ = vector_harmonics(2, 1, s)
        proj = np.vdot(u, e_tan) / np.vdot(u, u)
        assert np.linalg.norm(e_tan - proj * u) <= 1e-12 * (1 + np.linalg.norm(e_tan))


SAMPLES1 = [s for s, _ in sphere_quadrature(1)]


def test_boundary_residual_certified_modes():
    for n, m in ((1, 0), (2, 1), (3, -2)):
        mf = mode_field(eigenvalue(n, GP2), m, GP2)
        samples = [s for s, _ in sphere_quadrature(n)]
        assert boundary_residual(mf, samples) <= 1e-8


def test_boundary_residual_both_branches():
    gp_half = gamma_param("1/2")
    mf_u = mode_field(eigenvalue(1, GP2), 0, GP2)
    mf_v = mode_field(eigenvalue(1, gp_half), 0, gp_half)
    assert mf_u.branch == "U" and mf_v.branch == "V"
    assert boundary_residual(mf_u, SAMPLES1) <= 1e-8
    assert boundary_residual(mf_v, SAMPLES1) <= 1e-8


def test_boundary_residual_rejects_asymptotic_center():
    mf = ModeField(n=1, m=0, lam=-math.sqrt(2 / 3), branch="U", gamma=2.0)
    assert boundary_residual(mf, SAMPLES1) > 1e-3


def test_boundary_residual_perturbed_lambda():
    certified = mode_field(eigenvalue(1, GP2), 0, GP2)
    perturbed = ModeField(n=1, m=0, lam=certified.lam + 0.1, branch="U", gamma=2.0)
    assert boundary_residual(perturbed, SAMPLES1) >= 100 * boundary_residual(certified, SAMPLES1)


def test_maxwell_residual_small_and_second_order():
    for n, m in ((1, 0), (2, 1), (3, -2)):
        mf = mode_field(eigenvalue(n, GP2), m, GP2)
        res = maxwell_residual(mf, OFF_POINTS, fd_step=1e-4)
        assert res <= 1e-5 * field_scale(mf, OFF_POINTS)
        ratio = res / maxwell_residual(mf, OFF_POINTS, fd_step=0.5e-4)
        assert 3 <= ratio <= 5


def test_maxwell_residual_detects_operator_mismatch():
    # the multipole field solves the system for its own lam exactly, so the
    # diagnostic power of the residual lies in the lam it is tested against
    mf = mode_field(eigenvalue(1, GP2), 0, GP2)
    lam_off = mf.lam + 0.1
    consistent = maxwell_residual(mf, OFF_POINTS)
    worst = 0.0
    for point in OFF_POINTS:
        x = np.asarray(point, dtype=float)
        e, b = eigenfield(mf, x)
        de, db = _fd_derivatives(mf, x, 1e-4)
        worst = max(
            worst,
            float(
                np.linalg.norm(_curl(db) - lam_off * e)
                + np.linalg.norm(_curl(de) + lam_off * b)
            ),
        )
    assert worst >= 100 * consistent


def test_maxwell_residual_validates_stencil_clearance():
    mf = mode_field(eigenvalue(1, GP2), 0, GP2)
    with pytest.raises(ValueError):
        maxwell_residual(mf, [[1.0, 0.0, 0.0]], fd_step=1e-4)


def test_divergence_residual():
    for n, m in ((1, 0), (3, -2)):
        mf = mode_field(eigenvalue(n, GP2), m, GP2)
        assert divergence_residual(mf, OFF_POINTS) <= 1e-6
