"""
Bessel and Hankel functions of order 0 and 1 for real positive arguments,
plus the complete elliptic integral used by the axial self-term.

All routines are vectorised over numpy arrays. Three regimes are used:

* ``x < 8``: ascending power series.
* ``8 <= x < 25``: Miller backward recurrence for J_n, normalised by
  ``J0 + 2*sum(J_2k) = 1``, with Neumann series for Y0 and Y1.
* ``x >= 25``: Hankel asymptotic expansion.

Complex arguments (lossy media) are delegated to ``scipy.special``.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.special as sc

from .errors import DomainError

EULER_GAMMA = 0.57721566490153286061
# exp(Euler-Mascheroni), the constant appearing in the small-argument form of H0
GAMMA_EXP = math.exp(EULER_GAMMA)

_SERIES_MAX = 8.0
_ASYMPTOTIC_MIN = 25.0
_N_SERIES = 34
_N_ASYMPTOTIC = 22


def _series_tables():
    k = np.arange(_N_SERIES)
    fact = np.array([math.factorial(int(i)) for i in k], dtype=float)
    harmonic = np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1, _N_SERIES))])
    sign = (-1.0) ** k
    c_j0 = sign / fact**2
    c_j1 = sign / (fact * fact * (k + 1))
    # psi(k+1) + psi(k+2) = 2 H_k + 1/(k+1) - 2 gamma
    c_y0 = -sign * harmonic / fact**2
    c_y1 = sign * (2 * harmonic + 1.0 / (k + 1) - 2 * EULER_GAMMA) / (fact * fact * (k + 1))
    return c_j0, c_j1, c_y0, c_y1


_C_J0, _C_J1, _C_Y0, _C_Y1 = _series_tables()


def _poly(coeffs, t):
    out = np.zeros_like(t)
    for c in coeffs[::-1]:
        out = out * t + c
    return out


def _bessel_series(x):
    t = 0.25 * x * x
    j0 = _poly(_C_J0, t)
    j1 = 0.5 * x * _poly(_C_J1, t)
    lg = np.log(0.5 * x) + EULER_GAMMA
    y0 = (2.0 / np.pi) * (lg * j0 + _poly(_C_Y0, t))
    y1 = (-2.0 / (np.pi * x) + (2.0 / np.pi) * np.log(0.5 * x) * j1
          - (0.5 * x / np.pi) * _poly(_C_Y1, t))
    return j0, j1, y0, y1


def _bessel_miller(x):
    # start order well above x so J_M(x) is negligible
    m = int(x.max() + 12.0 * x.max() ** (1.0 / 3.0) + 30.0)
    m += m % 2
    f_next = np.zeros_like(x)
    f_cur = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    neu0 = np.zeros_like(x)   # sum (-1)^k J_2k / k
    neu1 = np.zeros_like(x)   # sum (-1)^k (J_{2k-1} - J_{2k+1}) / k
    j0 = j1 = None
    # f_cur holds order n, f_next order n + 1
    for n in range(m, 0, -1):
        f_prev = (2.0 * n / x) * f_cur - f_next
        if n % 2 == 0:
            k = n // 2
            norm += 2.0 * f_cur
            neu0 += (-1.0) ** k * f_cur / k
            # J_{2k-1} = f_prev, J_{2k+1} = f_next
            neu1 += (-1.0) ** k * (f_prev - f_next) / k
        if n == 1:
            j1 = f_cur
            j0 = f_prev
        f_next, f_cur = f_cur, f_prev
        big = np.abs(f_cur) > 1e200
        if big.any():
            scale = np.where(big, 1e-200, 1.0)
            f_cur = f_cur * scale
            f_next = f_next * scale
            norm = norm * scale
            neu0 = neu0 * scale
            neu1 = neu1 * scale
    norm = norm + j0
    j0 = j0 / norm
    j1 = j1 / norm
    neu0 = neu0 / norm
    neu1 = neu1 / norm
    lg = np.log(0.5 * x) + EULER_GAMMA
    y0 = (2.0 / np.pi) * (lg * j0 - 2.0 * neu0)
    y1 = (2.0 / np.pi) * (lg * j1 - j0 / x + neu1)
    return j0, j1, y0, y1


def _asymptotic_coeffs(nu):
    mu = 4.0 * nu * nu
    a = [1.0]
    for k in range(1, _N_ASYMPTOTIC):
        a.append(a[-1] * (mu - (2 * k - 1) ** 2) / (k * 8.0))
    return np.array(a)


_A0 = _asymptotic_coeffs(0)
_A1 = _asymptotic_coeffs(1)


def _pq(a, x):
    # P = a0 - a2/x^2 + a4/x^4 ..., Q = a1/x - a3/x^3 + ...
    inv = 1.0 / x
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    for k in range(len(a) - 1, -1, -1):
        term = (-1.0) ** (k // 2) * a[k] * inv**k
        if k % 2 == 0:
            p += term
        else:
            q += term
    return p, q


def _bessel_asymptotic(x):
    amp = np.sqrt(2.0 / (np.pi * x))
    p0, q0 = _pq(_A0, x)
    p1, q1 = _pq(_A1, x)
    chi0 = x - 0.25 * np.pi
    chi1 = x - 0.75 * np.pi
    c0, s0 = np.cos(chi0), np.sin(chi0)
    c1, s1 = np.cos(chi1), np.sin(chi1)
    j0 = amp * (p0 * c0 - q0 * s0)
    y0 = amp * (p0 * s0 + q0 * c0)
    j1 = amp * (p1 * c1 - q1 * s1)
    y1 = amp * (p1 * s1 + q1 * c1)
    return j0, j1, y0, y1


def _check_real(x):
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError("Bessel argument must be finite")
    if np.any(x <= 0):
        raise DomainError("Bessel argument must be positive, got min %r" % float(np.min(x)))
    return x


def bessel01(x):
    """
    Return ``(J0, J1, Y0, Y1)`` evaluated at real ``x > 0``.

    The output arrays have the shape of ``x``; relative accuracy is about
    1e-13 or better away from the zeros of each function.
    """
    x = _check_real(x)
    shape = x.shape
    xf = x.ravel()
    out = [np.empty_like(xf) for _ in range(4)]
    regions = (
        (xf < _SERIES_MAX, _bessel_series),
        ((xf >= _SERIES_MAX) & (xf < _ASYMPTOTIC_MIN), _bessel_miller),
        (xf >= _ASYMPTOTIC_MIN, _bessel_asymptotic),
    )
    for mask, func in regions:
        if mask.any():
            vals = func(xf[mask])
            for o, v in zip(out, vals):
                o[mask] = v
    return tuple(o.reshape(shape) for o in out)


def _is_complex(x):
    return np.iscomplexobj(x)


def _scalar(out, x):
    return out[()] if np.ndim(x) == 0 else out


def hankel2_0(x):
    """H0^(2)(x) = J0(x) - j Y0(x)."""
    if _is_complex(x):
        return sc.hankel2(0, x)
    j0, _, y0, _ = bessel01(x)
    return _scalar(j0 - 1j * y0, x)


def hankel2_1(x):
    """H1^(2)(x) = J1(x) - j Y1(x)."""
    if _is_complex(x):
        return sc.hankel2(1, x)
    _, j1, _, y1 = bessel01(x)
    return _scalar(j1 - 1j * y1, x)


def hankel2_0_prime(x):
    """Derivative of H0^(2), equal to -H1^(2)(x)."""
    return -hankel2_1(x)


def hankel1_0(x):
    """H0^(1)(x) = J0(x) + j Y0(x)."""
    if _is_complex(x):
        return sc.hankel1(0, x)
    j0, _, y0, _ = bessel01(x)
    return _scalar(j0 + 1j * y0, x)


def hankel1_1(x):
    """H1^(1)(x) = J1(x) + j Y1(x)."""
    if _is_complex(x):
        return sc.hankel1(1, x)
    _, j1, _, y1 = bessel01(x)
    return _scalar(j1 + 1j * y1, x)


def hankel1_1_prime(x):
    """Derivative of H1^(1): H0^(1)(x) - H1^(1)(x)/x."""
    if _is_complex(x):
        return sc.h1vp(1, x)
    j0, j1, y0, y1 = bessel01(x)
    x = np.asarray(x, dtype=float)
    return _scalar((j0 + 1j * y0) - (j1 + 1j * y1) / x, x)


def elliptic_k_complement(m1):
    """
    Complete elliptic integral of the first kind from the complementary
    parameter ``m1 = 1 - m``: ``pi / (2 AGM(1, sqrt(m1)))``.

    Passing ``m1`` directly avoids the cancellation in ``1 - m`` near the
    logarithmic singularity at ``m = 1``.
    """
    m1 = np.asarray(m1, dtype=float)
    if not np.all(np.isfinite(m1)) or np.any(m1 < 1e-15) or np.any(m1 > 1.0):
        raise DomainError("complementary elliptic parameter must lie in [1e-15, 1]")
    a = np.ones_like(m1)
    b = np.sqrt(m1)
    for _ in range(64):
        if np.all(np.abs(a - b) <= 1e-16 * a):
            break
        a, b = 0.5 * (a + b), np.sqrt(a * b)
    return _scalar(np.pi / (2.0 * a), m1)


def elliptic_paper_E(chi):
    """
    Complete elliptic integral ``int_0^{pi/2} dbeta / sqrt(1 - chi sin^2 beta)``.

    ``chi`` is the parameter (not the modulus), so this is K(m = chi),
    evaluated with the arithmetic-geometric mean. Values of ``chi`` above
    ``1 - 1e-15`` are rejected since the integral diverges logarithmically at 1.
    """
    chi = np.asarray(chi, dtype=float)
    if not np.all(np.isfinite(chi)) or np.any(chi < 0) or np.any(chi > 1.0 - 1e-15):
        raise DomainError("elliptic parameter must lie in [0, 1 - 1e-15]")
    return elliptic_k_complement(1.0 - chi)
