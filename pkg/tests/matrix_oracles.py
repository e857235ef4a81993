"""
Brute-force reference values for moment-method matrix entries.

Everything here is built on scipy.integrate.quad_vec and scipy.special so it
shares no quadrature or special-function code with the package. Surfaces are
read through their public piecewise-linear ``radius``/``slope`` methods.
"""

from __future__ import annotations

import numpy as np
import scipy.special as sc
from scipy.integrate import quad_vec

EPSABS = 1e-13
EPSREL = 1e-9


def _triangle(u):
    return np.clip(1.0 - np.abs(u), 0.0, None)


def _azimuthal_entries(surface, k, pairs, kind, offset=0.0):
    """
    ``alpha`` (kind="alpha") or ``beta`` (kind="beta") for the (m, n) pairs,
    with the observation point displaced radially by ``offset``.
    """
    pairs = np.asarray(pairs)
    m = pairs[:, 0]
    n = pairs[:, 1]
    d = surface.delta

    def inner(t):
        # observation angle phi = (m + t) delta on the test cell
        phi = (m + t) * d
        r_obs = surface.radius(np.mod(phi, 2 * np.pi)) + offset

        def g(u):
            # source angle phi' = (n + u) delta on the support of the triangle
            pp = np.mod((n + u) * d, 2 * np.pi)
            rp = surface.radius(pp)
            sp = surface.slope(pp)
            dphi = (n + u) * d - phi
            R = np.sqrt(r_obs**2 + rp**2 - 2 * r_obs * rp * np.cos(dphi))
            w = _triangle(u)
            if kind == "alpha":
                return w * sc.hankel2(0, k * R) * np.sqrt(rp**2 + sp**2)
            F = rp * r_obs * np.cos(dphi) + sp * r_obs * np.sin(dphi) - rp**2
            return w * (-sc.hankel2(1, k * R)) / R * F

        # near-singular point of every component sits at u = (m - n) + t (mod N)
        pts = sorted({-0.5, 0.0, 0.5})
        val, _ = quad_vec(g, -1.0, 1.0, epsabs=EPSABS, epsrel=EPSREL, points=pts, limit=4000)
        return val * d

    val, _ = quad_vec(inner, -0.5, 0.5, epsabs=EPSABS, epsrel=EPSREL, limit=4000)
    val = val * d
    return val / 4j if kind == "alpha" else k / 4j * val


def azimuthal_regular(surface, k, pairs, kind):
    """Entries for non-touching pairs (no singularity on the integration domain)."""
    return _azimuthal_entries(surface, k, pairs, kind)


def _rows_at_offset(surface, k, shift, kind, offset, epsrel):
    """Entries ``(m, m - shift)`` for every row ``m``, observation point displaced radially."""
    d = surface.delta
    N = surface.N
    m = np.arange(N)
    n = m - shift

    def inner(t):
        phi = (m + t) * d
        r_obs = surface.radius(np.mod(phi, 2 * np.pi)) + offset

        def g(u):
            pp = np.mod((n + u) * d, 2 * np.pi)
            rp = surface.radius(pp)
            sp = surface.slope(pp)
            dphi = (n + u) * d - phi
            R = np.sqrt(r_obs**2 + rp**2 - 2 * r_obs * rp * np.cos(dphi))
            w = _triangle(u)
            if kind == "alpha":
                return w * sc.hankel2(0, k * R) * np.sqrt(rp**2 + sp**2)
            F = rp * r_obs * np.cos(dphi) + sp * r_obs * np.sin(dphi) - rp**2
            return w * (-sc.hankel2(1, k * R)) / R * F

        # the observation angle sits at u = shift + t on the source triangle
        u0 = shift + t
        pts = sorted({-0.5, 0.0, 0.5} | ({u0} if -1 < u0 < 1 else set()))
        val, _ = quad_vec(g, -1.0, 1.0, epsabs=EPSABS, epsrel=epsrel, points=pts, limit=4000)
        return val * d

    # piece boundaries of the source triangle seen from the test cell
    edges = sorted({-0.5, 0.5} | {b - shift for b in (-1.0, -0.5, 0.0, 0.5, 1.0)
                                  if -0.5 < b - shift < 0.5})
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        v, _ = quad_vec(inner, lo, hi, epsabs=EPSABS, epsrel=epsrel, limit=4000)
        total = total + v
    total = total * d
    return total / 4j if kind == "alpha" else k / 4j * total


def azimuthal_singular_rows(surface, k, shift, kind, side=+1, offsets=None, epsrel=1e-7):
    """
    Limits of the entries ``(m, m - shift)`` (``shift`` in -1, 0, 1) as the
    observation point approaches the surface from ``side`` (+1 outside,
    -1 inside). Three radial offsets are fitted with
    ``v(e) = L + A e ln(e) + B e`` and ``L`` returned.
    """
    scale = surface.mean_radius * surface.delta
    offsets = np.array([4e-3, 2e-3, 1e-3]) * scale if offsets is None else np.asarray(offsets)
    vals = np.array([_rows_at_offset(surface, k, shift, kind, side * e, epsrel) for e in offsets])
    A = np.stack([np.ones_like(offsets), offsets * np.log(offsets), offsets], axis=1)
    return np.linalg.solve(A, vals)[0]


def axial_entries(surface, k0, pairs):
    """Off-diagonal axial entries: adaptive z' over the source cell, adaptive theta inside."""
    pairs = np.asarray(pairs)
    m = pairs[:, 0]
    n = pairs[:, 1]
    zm = surface.z_mid[m]
    rm = surface.r_mid[m]
    lo = surface.z_nodes[n]
    hi = surface.z_nodes[n + 1]
    sl = surface.slopes[n]

    def over_z(v):
        zp = lo + v * (hi - lo)
        rp = surface.radius(zp)

        def over_theta(t):
            R = np.sqrt(rm**2 + rp**2 - 2 * rm * rp * np.cos(t) + (zm - zp) ** 2)
            return np.cos(t) * np.exp(-1j * k0 * R) / (4 * np.pi * R)

        th, _ = quad_vec(over_theta, -np.pi, np.pi, epsabs=EPSABS, epsrel=EPSREL,
                         points=[0.0], limit=4000)
        return th * rp * np.sqrt(1 + sl**2) * (hi - lo)

    val, _ = quad_vec(over_z, 0.0, 1.0, epsabs=EPSABS, epsrel=EPSREL, limit=4000)
    return val


def axial_self_entry(surface, k0, m, cutoffs=(4e-3, 2e-3, 1e-3)):
    """
    Diagonal axial entry from the unregularised integrand: the theta range
    ``|theta| < c`` is excised for the three cutoffs ``c`` and the result
    extrapolated to ``c -> 0`` assuming ``v(c) = L + A c ln(c) + B c``
    (the excised wedge around the logarithmic singularity contributes ``O(c ln c)``).
    """
    zm = surface.z_mid[m]
    lo = surface.z_nodes[m]
    hi = surface.z_nodes[m + 1]
    rm = surface.r_mid[m]
    sl = surface.slopes[m]

    def value(cut):
        def over_z(zp):
            rp = surface.radius(zp)

            def f(t):
                R = np.sqrt(rm**2 + rp**2 - 2 * rm * rp * np.cos(t) + (zm - zp) ** 2)
                return np.cos(t) * np.exp(-1j * k0 * R) / (4 * np.pi * R)

            v, _ = quad_vec(f, cut, np.pi, epsabs=EPSABS, epsrel=EPSREL, limit=4000)
            return 2 * v * rp * np.sqrt(1 + sl**2)

        v, _ = quad_vec(over_z, lo, hi, epsabs=EPSABS, epsrel=EPSREL, points=[zm], limit=4000)
        return v

    c = np.asarray(cutoffs)
    v = np.array([value(x) for x in c])
    A = np.stack([np.ones_like(c), c * np.log(c), c], axis=1)
    return np.linalg.solve(A, v)[0]
