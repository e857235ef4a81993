"""
Logarithmic moments behind the singular azimuthal matrix elements.

With the small-argument form of H0^(2), every singular sub-integral reduces to

    int_{test cell} dphi int_{piece} dphi' w(phi') ln|phi - phi'|
        = delta^2 * (c * ln(delta) + d),

where the pulse test cell is ``[-1/2, 1/2]`` in units of ``delta`` and
``w`` is the triangle basis restricted to one piece. ``c`` is the basis
weight of the piece and ``d`` a pure number. The inner integral over the test
cell has a closed form, leaving a 1-D integral evaluated adaptively.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .numerics import QuadratureSpec, integrate_1d

_TIGHT = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-13, max_subdivisions=2000)


def _xlogx_minus_x(x):
    ax = np.abs(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(ax > 0, x * np.log(np.where(ax > 0, ax, 1.0)) - x, 0.0)
    return out


def cell_log_integral(up):
    """``int_{-1/2}^{1/2} ln|u - up| du`` in closed form."""
    up = np.asarray(up, dtype=float)
    return _xlogx_minus_x(0.5 - up) - _xlogx_minus_x(-0.5 - up)


def log_moment(lo: float, hi: float, center: float):
    """
    Return ``(c, d)`` for the piece ``[lo, hi]`` of the triangle centred at ``center``.

    ``c = int w`` and ``d = int w(u') ln|u - u'| du du'`` with ``u`` over the
    unit test cell.
    """
    def weight(u):
        return np.clip(1.0 - np.abs(u - center), 0.0, None)

    points = [p for p in (-0.5, 0.5, center) if lo < p < hi]
    c = integrate_1d(weight, lo, hi, _TIGHT, points=points)
    d = integrate_1d(lambda u: weight(u) * cell_log_integral(u), lo, hi, _TIGHT, points=points)
    return float(c), float(d)


@dataclass(frozen=True)
class LogConstants:
    """
    ``(c, d)`` pairs for the four distinct singular pieces.

    ``self_mid``: source piece ``[-1/2, 1/2]`` of the own triangle.
    ``self_side``: piece ``[-1, -1/2]`` (or its mirror) of the own triangle.
    ``adj_mid``: centre piece ``[-3/2, -1/2]`` of the neighbouring triangle.
    ``adj_near``: the neighbour's half-piece ``[-1/2, 0]`` inside the test cell.
    """

    self_mid: tuple
    self_side: tuple
    adj_mid: tuple
    adj_near: tuple


@lru_cache(maxsize=None)
def derived_constants() -> LogConstants:
    return LogConstants(
        self_mid=log_moment(-0.5, 0.5, 0.0),
        self_side=log_moment(-1.0, -0.5, 0.0),
        adj_mid=log_moment(-1.5, -0.5, -1.0),
        adj_near=log_moment(-0.5, 0.0, -1.0),
    )


# Values as printed alongside the closed-form self and neighbour terms.
PRINTED_CONSTANTS = LogConstants(
    self_mid=(0.75, -1.15057),
    self_side=(0.125, -0.0699),
    adj_mid=(0.749, 0.33),
    adj_near=(0.3124, -0.29024),
)
