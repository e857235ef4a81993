"""
Moment-method solution for a finite, perfectly conducting cylinder with axial
roughness under azimuthally symmetric (TE_phi) incidence.

The surface current ``J(z) phi_hat`` is expanded in pulses on the axial cells
and tested with delta functions at the cell centres. After integrating out
the azimuth, the kernel of cell ``n`` seen from the centre of cell ``m`` is

    int_{-pi}^{pi} cos(theta) exp(-j k0 R) / (4 pi R) dtheta,

which is even in ``theta`` and is integrated over ``[0, pi]`` and doubled.
The cylinder occupies ``-L/2 <= z <= L/2``; lengths are in wavelengths.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import DomainError, GeometryError, QuadratureError
from .numerics import (DEFAULT_QUADRATURE, ComplexDenseSystem, QuadratureSpec,
                       integrate_1d_batch, lu_solve)
from .surface import AxialSurface

K0 = 2.0 * np.pi
ETA0 = 376.730313668
BEAM_MODES = ("closed-form", "k-integral")


@dataclass(frozen=True)
class AxialCurrents:
    j: np.ndarray
    condition: float = float("nan")
    residual: float = float("nan")


@dataclass(frozen=True)
class TaperedBeam:
    """
    Incident ``E_phi`` built from inward cylindrical waves ``H1^(1)`` with a
    Gaussian spectrum in the axial wavenumber; ``w0`` is the waist in z.
    """

    w0: float = 5.0
    mode: str = "closed-form"
    amplitude: complex = 1.0
    quadrature: QuadratureSpec = DEFAULT_QUADRATURE

    def __post_init__(self):
        if self.mode not in BEAM_MODES:
            raise ValueError(f"beam mode must be one of {BEAM_MODES}")
        if not self.w0 > 0:
            raise ValueError("beam waist must be positive")
        if self.mode == "closed-form" and self.w0 < 2.0:
            raise ValueError("closed-form beam requires w0 >= 2 wavelengths")


@dataclass(frozen=True)
class CylindricalWave:
    """Untapered incidence ``E_phi = A H1^(1)(k0 r)``, uniform in z."""

    amplitude: complex = 1.0


def _check_radius(r):
    r = np.asarray(r, dtype=float)
    if np.any(~np.isfinite(r)) or np.any(r <= 0):
        raise DomainError("radial coordinate must be positive")
    return r


def _beam_closed_form(beam: TaperedBeam, r, z, k0):
    h = specfun.hankel1_1(k0 * r)
    hp = specfun.hankel1_1_prime(k0 * r)
    w2 = beam.w0**2
    env = np.exp(-(z**2) / w2)
    corr = (2.0 * r * z**2 / (k0 * w2**2) - r / (k0 * w2)) * hp
    return 2.0 * np.sqrt(np.pi) * env * (h + corr)


def _beam_spectral(beam: TaperedBeam, r, z, k0):
    kmax = 6.0 / beam.w0
    rr, zz = np.broadcast_arrays(r, z)
    rf, zf = rr.ravel(), zz.ravel()

    def f(k):
        # sqrt(k0^2 - k^2) taken on the branch Im >= 0 so evanescent parts decay in r
        q = np.sqrt((k0**2 - k**2).astype(complex))
        arg = np.multiply.outer(q, rf)
        if np.all(q.imag == 0):
            h = specfun.hankel1_1(arg.real)
        else:
            h = specfun.hankel1_1(arg)
        phase = np.exp(1j * np.multiply.outer(k, zf))
        return (np.exp(-(k**2) * beam.w0**2 / 4.0))[:, None] * h * phase

    val = integrate_1d_batch(f, -kmax, kmax, beam.quadrature, points=(0.0,))
    return (beam.w0 * val).reshape(rr.shape)


def incident_field(beam, r, z, k0: float = K0):
    """
    Incident ``E_phi(r, z)``.

    ``beam`` is a :class:`TaperedBeam` (closed form or numerically
    integrated spectrum truncated at ``|k| <= 6 / w0``) or a
    :class:`CylindricalWave`.
    """
    r = _check_radius(r)
    z = np.asarray(z, dtype=float)
    if isinstance(beam, CylindricalWave):
        out = beam.amplitude * specfun.hankel1_1(k0 * r) * np.ones_like(z)
    elif beam.mode == "closed-form":
        out = beam.amplitude * _beam_closed_form(beam, r, z, k0)
    else:
        out = beam.amplitude * _beam_spectral(beam, r, z, k0)
    return out[()] if np.ndim(out) == 0 else out


def _theta_kernel_integral(k0, rho1, rho2, dz, spec, what="kernel"):
    """
    ``2 int_0^pi cos(t) exp(-j k0 R) / (4 pi R) dt`` for broadcastable arrays,
    ``R^2 = rho1^2 + rho2^2 + dz^2 - 2 rho1 rho2 cos(t)``.
    """
    rho1, rho2, dz = np.broadcast_arrays(rho1, rho2, dz)
    shape = rho1.shape
    a = (rho1**2 + rho2**2 + dz**2).ravel()
    b = (2.0 * rho1 * rho2).ravel()

    def f(t):
        c = np.cos(t)[:, None]
        R = np.sqrt(a[None, :] - b[None, :] * c)
        return c * np.exp(-1j * k0 * R) / (4.0 * np.pi * R)

    try:
        val = integrate_1d_batch(f, 0.0, np.pi, spec, points=(0.05, 0.2, 0.6))
    except QuadratureError as exc:
        idx = np.unravel_index(int(np.argmax(np.atleast_1d(exc.error))), shape)
        raise QuadratureError(f"{what} integral at index {tuple(int(i) for i in idx)}: {exc}",
                              estimate=exc.estimate, error=exc.error) from exc
    return 2.0 * val.reshape(shape)


def self_term_analytic_piece(r, delta):
    """``int_0^{delta/2} (1/r) ln(z / 8r) dz = (delta / 2r) [ln(delta / 16 r) - 1]``."""
    return delta / (2.0 * r) * (np.log(delta / (16.0 * r)) - 1.0)


def _self_regular_part(k0, r, delta, spec):
    """``int_0^{delta/2} int_0^pi (cos(t) exp(-j k0 R) - 1) / R dt dz`` for each radius in ``r``."""

    def outer(z):
        def inner(t):
            s2 = np.sin(0.5 * t)[:, None, None] ** 2
            R = np.sqrt(4.0 * r[None, None, :] ** 2 * s2 + z[None, :, None] ** 2)
            c = np.cos(t)[:, None, None]
            return np.expm1(-1j * k0 * R) * c / R + (c - 1.0) / R

        return integrate_1d_batch(inner, 0.0, np.pi, spec)

    return integrate_1d_batch(outer, 0.0, 0.5 * delta, spec)


def _self_log_part(r, delta, spec):
    """``int_0^{delta/2} [2 K(m) / sqrt(4r^2 + z^2) + (1/r) ln(z / 8r)] dz``, ``m = 4r^2 / (4r^2 + z^2)``."""

    def f(z):
        zz = z[:, None]
        d2 = 4.0 * r[None, :] ** 2 + zz**2
        m1 = np.maximum(zz**2 / d2, 1e-15)
        kk = specfun.elliptic_k_complement(m1)
        return 2.0 * kk / np.sqrt(d2) + np.log(zz / (8.0 * r[None, :])) / r[None, :]

    return integrate_1d_batch(f, 0.0, 0.5 * delta, spec)


def self_terms(surface: AxialSurface, k0: float = K0, spec: QuadratureSpec = DEFAULT_QUADRATURE):
    """Diagonal entries via subtraction of the static, logarithmic part of the kernel."""
    r = surface.r_mid
    d = surface.delta
    try:
        reg = _self_regular_part(k0, r, d, spec)
        log_part = _self_log_part(r, d, spec)
    except QuadratureError as exc:
        raise QuadratureError(f"self-term integral: {exc}", estimate=exc.estimate,
                              error=exc.error) from exc
    static = log_part - self_term_analytic_piece(r, d)
    return r * np.sqrt(1.0 + surface.slopes**2) / np.pi * (reg + static)


def _cell_rule(surface: AxialSurface, points: int):
    """Gauss-Legendre nodes in z' on every cell: positions, radii and weights, shape ``(N, points)``."""
    x, w = np.polynomial.legendre.leggauss(points)
    half = 0.5 * surface.delta
    zq = surface.z_mid[:, None] + half * x[None, :]
    rq = surface.r_mid[:, None] + surface.slopes[:, None] * (zq - surface.z_mid[:, None])
    wq = (half * w)[None, :] * np.sqrt(1.0 + surface.slopes**2)[:, None] * rq
    return zq, rq, wq


def _cell_integrals(surface: AxialSurface, r_obs, z_obs, cells, k0, spec, points, what):
    """
    ``int_cell r_S(z') sqrt(1 + s^2) [2 int_0^pi cos(t) e^{-j k0 R} / (4 pi R) dt] dz'``
    for observation points ``(r_obs, z_obs)`` paired with source cells ``cells``.
    """
    if points == 1:
        w = surface.delta * surface.r_mid[cells] * np.sqrt(1.0 + surface.slopes[cells] ** 2)
        return w * _theta_kernel_integral(k0, r_obs, surface.r_mid[cells],
                                          z_obs - surface.z_mid[cells], spec, what)
    zq, rq, wq = _cell_rule(surface, points)
    kern = _theta_kernel_integral(k0, r_obs[:, None], rq[cells], z_obs[:, None] - zq[cells],
                                  spec, what)
    return (kern * wq[cells]).sum(axis=1)


def assemble_axial_matrix(surface: AxialSurface, k0: float = K0,
                          spec: QuadratureSpec = DEFAULT_QUADRATURE,
                          z_points: int = 4, neighbour_points: int = 8):
    """
    ``alpha_{m,n}``: delta-tested vector potential of pulse ``n`` at the centre of cell ``m``.

    Off-diagonal cells are integrated in z' with ``z_points``-point
    Gauss-Legendre over the linearly interpolated surface
    (``neighbour_points`` for ``|m - n| = 1``, where the kernel is
    nearly logarithmic). ``z_points=1`` gives the purely centroidal rule,
    in which case the neighbour setting is ignored. Diagonal entries use
    :func:`self_terms`.
    """
    N = surface.N
    r = surface.r_mid
    zc = surface.z_mid
    alpha = np.zeros((N, N), dtype=complex)
    m, n = np.nonzero(~np.eye(N, dtype=bool))
    near = np.abs(m - n) == 1
    groups = [(m, n, z_points)] if z_points == 1 else [
        (m[near], n[near], neighbour_points), (m[~near], n[~near], z_points)]
    for mi, ni, pts in groups:
        if mi.size:
            alpha[mi, ni] = _cell_integrals(surface, r[mi], zc[mi], ni, k0, spec, pts,
                                            "off-diagonal kernel")
    alpha[np.arange(N), np.arange(N)] = self_terms(surface, k0, spec)
    return alpha


def assemble_axial_rhs(surface: AxialSurface, beam, k0: float = K0):
    return np.asarray(incident_field(beam, surface.r_mid, surface.z_mid, k0), dtype=complex)


def solve_axial(surface: AxialSurface, beam, k0: float = K0,
                spec: QuadratureSpec = DEFAULT_QUADRATURE, matrix=None,
                z_points: int = 4) -> AxialCurrents:
    """Solve ``e_m = j eta0 k0 sum_n alpha_{m,n} j_n``; a precomputed ``matrix`` may be passed."""
    alpha = assemble_axial_matrix(surface, k0, spec, z_points) if matrix is None else matrix
    system = ComplexDenseSystem(1j * ETA0 * k0 * alpha, assemble_axial_rhs(surface, beam, k0))
    sol = lu_solve(system)
    return AxialCurrents(j=sol.x, condition=sol.condition, residual=sol.residual)


def field_weights(surface: AxialSurface, r, z, k0: float = K0,
                  spec: QuadratureSpec = DEFAULT_QUADRATURE, z_points: int = 4):
    """``epsilon_n(r, z)`` for each observation point (rows) and cell (columns)."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    r, z = np.broadcast_arrays(r, z)
    inside = (np.abs(z) <= 0.5 * surface.length) & (r <= surface.radius(np.clip(
        z, -0.5 * surface.length, 0.5 * surface.length)))
    if np.any(inside) or np.any(r < 0):
        raise GeometryError("observation point lies inside or on the cylinder surface")
    P, N = r.size, surface.N
    obs = np.repeat(np.arange(P), N)
    cells = np.tile(np.arange(N), P)
    vals = _cell_integrals(surface, r[obs], z[obs], cells, k0, spec, z_points, "field kernel")
    return vals.reshape(P, N)


def scattered_field(surface: AxialSurface, currents: AxialCurrents, r, z, k0: float = K0,
                    spec: QuadratureSpec = DEFAULT_QUADRATURE, z_points: int = 4):
    """Scattered ``E_phi = -j k0 eta0 sum_n epsilon_n j_n`` at points outside the cylinder."""
    eps = field_weights(surface, r, z, k0, spec, z_points)
    return -1j * k0 * ETA0 * (eps @ currents.j)
