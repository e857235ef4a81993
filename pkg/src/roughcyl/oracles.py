"""
Closed-form reference solutions used to validate the moment-method solvers.

These routines rely on ``scipy.special`` rather than :mod:`roughcyl.specfun`
so that agreement with the solvers is a check across independent
implementations of the special functions.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.special as sc

from .errors import DomainError


class SeriesConvergenceError(DomainError):
    """Cylindrical-harmonic series tail did not fall below the bound."""


K0 = 2.0 * np.pi
TAIL_BOUND = 1e-12


def mie_order_count(x0: float) -> int:
    """Number of cylindrical harmonics retained for a size parameter ``k0 a``."""
    return int(math.ceil(x0 + 10.0 * x0 ** (1.0 / 3.0) + 10.0))


def mie_coefficients(a: float, eps_d: complex, mu_d: complex = 1.0, k0: float = K0,
                     n_max: int | None = None):
    """
    TM (E_z) scattering coefficients ``a_n``, ``n = 0 .. n_max``, of a
    homogeneous dielectric cylinder, for ``E_s = E0 sum_n j^-n a_n H_n^(2)(k0 r) exp(j n phi)``.
    """
    if a <= 0:
        raise DomainError("cylinder radius must be positive")
    x0 = k0 * a
    if n_max is not None:
        return _mie_terms(a, eps_d, mu_d, k0, n_max)
    M = mie_order_count(x0)
    for n_max in (M, 2 * M, 4 * M):
        coef = _mie_terms(a, eps_d, mu_d, k0, n_max)
        if np.all(np.isfinite(coef)) and abs(coef[-1]) < TAIL_BOUND:
            return coef
    raise SeriesConvergenceError(
        f"series tail {abs(coef[-1]):.3g} above {TAIL_BOUND:g} at order {n_max}")


def _mie_terms(a, eps_d, mu_d, k0, n_max):
    x0 = k0 * a
    n = np.arange(n_max + 1)
    kd = k0 * np.sqrt(complex(eps_d) * complex(mu_d))
    xd = kd * a
    # tangential H continuity: (1/mu) dE/dr matched across r = a
    z = (kd / complex(mu_d)) / k0
    jn0, djn0 = sc.jv(n, x0), sc.jvp(n, x0)
    hn0, dhn0 = sc.hankel2(n, x0), sc.h2vp(n, x0)
    # the ratio is homogeneous in (J_n, J_n') of the interior argument, so
    # exponentially scaled values keep lossy, dense media from overflowing
    jnd = sc.jve(n, xd)
    djnd = 0.5 * (sc.jve(n - 1, xd) - sc.jve(n + 1, xd))
    num = z * jn0 * djnd - djn0 * jnd
    den = dhn0 * jnd - z * hn0 * djnd
    with np.errstate(invalid="ignore"):
        return num / den


def mie_sigma_tm(a: float, eps_d: complex, phi, phi0: float = 0.0, mu_d: complex = 1.0,
                 k0: float = K0, n_max: int | None = None):
    """
    Scattering width ``sigma(phi)`` (wavelengths) of a circular dielectric
    cylinder under a TM plane wave arriving along ``phi0``.
    """
    coef = mie_coefficients(a, eps_d, mu_d, k0, n_max)
    phi = np.asarray(phi, dtype=float)
    n = np.arange(1, coef.size)
    angle = np.multiply.outer(phi - phi0, n)
    s = coef[0] + 2.0 * (np.cos(angle) @ coef[1:])
    return 4.0 / k0 * np.abs(s) ** 2


def mie_near_field(a: float, eps_d: complex, x, y, phi0: float = 0.0, mu_d: complex = 1.0,
                   k0: float = K0, n_max: int | None = None):
    """Scattered ``E_z`` outside the cylinder for unit incident amplitude."""
    coef = mie_coefficients(a, eps_d, mu_d, k0, n_max)
    rho = np.hypot(x, y)
    phi = np.arctan2(y, x)
    n = np.arange(coef.size)
    weights = np.where(n == 0, 1.0, 2.0) * (-1j) ** n * coef
    h = sc.hankel2(n, k0 * np.asarray(rho)[..., None])
    c = np.cos(np.asarray(phi - phi0)[..., None] * n)
    return (weights * h * c).sum(axis=-1)


def pec_cylinder_field(a: float, x, y, phi0: float = 0.0, k0: float = K0,
                       n_max: int | None = None):
    """Scattered ``E_z`` of a perfectly conducting circular cylinder (unit TM plane wave)."""
    x0 = k0 * a
    n_max = mie_order_count(x0) if n_max is None else n_max
    n = np.arange(n_max + 1)
    coef = -sc.jv(n, x0) / sc.hankel2(n, x0)
    rho = np.hypot(x, y)
    phi = np.arctan2(y, x)
    weights = np.where(n == 0, 1.0, 2.0) * (-1j) ** n * coef
    h = sc.hankel2(n, k0 * np.asarray(rho)[..., None])
    c = np.cos(np.asarray(phi - phi0)[..., None] * n)
    return (weights * h * c).sum(axis=-1)


def pec_reflection_coefficient(a: float, k0: float = K0) -> complex:
    """``c = -H1^(1)(k0 a) / H1^(2)(k0 a)`` for an axisymmetric ``E_phi`` on a PEC cylinder."""
    if a <= 0:
        raise DomainError("cylinder radius must be positive")
    x = k0 * a
    return complex(-sc.hankel1(1, x) / sc.hankel2(1, x))


def pec_infinite_axisym(a: float, r, amplitude: complex = 1.0, k0: float = K0):
    """
    Scattered ``E_phi`` of an infinite PEC cylinder of radius ``a`` for the
    z-independent incidence ``E_phi = A H1^(1)(k0 r)``: ``A c H1^(2)(k0 r)``.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < a):
        raise DomainError("observation radius must not be inside the cylinder")
    return amplitude * pec_reflection_coefficient(a, k0) * sc.hankel2(1, k0 * r)


def pec_beam_envelope_reference(a: float, r, z, w0: float, k0: float = K0):
    """
    Quasi-plane-wave reference for the tapered beam: the infinite-cylinder
    response ``c H1^(2)(k0 r)`` modulated by the closed-form beam's z-dependence
    at the surface, ``2 sqrt(pi) exp(-z^2/w0^2)[1 + (2 a z^2/(k0 w0^4) - a/(k0 w0^2)) H1'/H1]``.
    """
    z = np.asarray(z, dtype=float)
    x = k0 * a
    ratio = sc.h1vp(1, x) / sc.hankel1(1, x)
    env = 2.0 * np.sqrt(np.pi) * np.exp(-z**2 / w0**2) * (
        1.0 + (2.0 * a * z**2 / (k0 * w0**4) - a / (k0 * w0**2)) * ratio)
    return env * pec_infinite_axisym(a, r, 1.0, k0)


def pec_beam_spectral_reference(a: float, r, z, w0: float, k0: float = K0,
                                 kmax_factor: float = 6.0):
    """
    Exact scattered field of an infinite PEC cylinder under the Gaussian
    spectrum of inward waves, ``-w0 int exp(-k^2 w0^2/4) H1^(1)(q a)/H1^(2)(q a) H1^(2)(q r) e^{jkz} dk``
    with ``q = sqrt(k0^2 - k^2)``, evaluated with ``scipy.integrate.quad_vec``.
    """
    from scipy.integrate import quad_vec

    z = np.atleast_1d(np.asarray(z, dtype=float))
    kmax = min(kmax_factor / w0, 0.999 * k0)

    def f(k):
        q = np.sqrt(k0**2 - k**2)
        ratio = sc.hankel1(1, q * a) / sc.hankel2(1, q * a)
        return np.exp(-k**2 * w0**2 / 4.0) * ratio * sc.hankel2(1, q * r) * np.exp(1j * k * z)

    val, _ = quad_vec(f, -kmax, kmax, epsabs=1e-12, epsrel=1e-10)
    return -w0 * val
