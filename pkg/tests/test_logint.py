import mpmath as mp
import numpy as np
import pytest

from roughcyl.logint import (PRINTED_CONSTANTS, cell_log_integral, derived_constants,
                             log_moment)

mp.mp.dps = 30


def _mp_moment(lo, hi, center):
    """Double integral of w(u') ln|u - u'| over the unit test cell, by mpmath."""
    def inner(up):
        w = max(mp.mpf(0), 1 - abs(up - center))
        # closed form of int_{-1/2}^{1/2} ln|u - up| du
        def F(x):
            return x * mp.log(abs(x)) - x if x != 0 else mp.mpf(0)
        return w * (F(mp.mpf(0.5) - up) - F(mp.mpf(-0.5) - up))
    pts = sorted({lo, hi} | {p for p in (-0.5, 0.5, center) if lo < p < hi})
    return mp.quad(inner, pts)


def test_cell_log_integral_closed_form():
    for up in (0.0, 0.25, 0.5, 1.3, -2.0):
        want = mp.quad(lambda u: mp.log(abs(u - up)), sorted({-0.5, 0.5} | ({up} if -0.5 < up < 0.5 else set())))
        assert cell_log_integral(up) == pytest.approx(float(want), abs=1e-13)


@pytest.mark.parametrize("piece", [(-0.5, 0.5, 0.0), (-1.0, -0.5, 0.0),
                                   (-1.5, -0.5, -1.0), (-0.5, 0.0, -1.0)])
def test_log_moment_against_mpmath(piece):
    c, d = log_moment(*piece)
    assert d == pytest.approx(float(_mp_moment(*piece)), abs=1e-11)


def test_scaling_with_delta():
    """The scaled form delta^2 (c ln delta + d) equals the unscaled double integral."""
    delta = mp.mpf("0.07")

    def inner(pp):
        # int_{-delta/2}^{delta/2} ln|p - pp| dp in closed form
        def F(x):
            return x * mp.log(abs(x)) - x if x != 0 else mp.mpf(0)
        return (1 - abs(pp) / delta) * (F(delta / 2 - pp) - F(-delta / 2 - pp))

    direct = mp.quad(inner, [-delta / 2, 0, delta / 2])
    c, d = derived_constants().self_mid
    assert float(direct) == pytest.approx(float(delta**2 * (c * mp.log(delta) + d)), rel=1e-9)


def test_self_constants_match_printed_truncations():
    got = derived_constants()
    assert got.self_mid[0] == pytest.approx(0.75, abs=1e-14)
    assert abs(-got.self_mid[1] - 1.15057) <= 1e-5
    assert got.self_side[0] == pytest.approx(0.125, abs=1e-14)
    assert abs(-got.self_side[1] - 0.0699) <= 1e-4


def test_piece_weights():
    got = derived_constants()
    assert got.adj_mid[0] == pytest.approx(0.75, abs=1e-14)
    assert got.adj_near[0] == pytest.approx(0.125, abs=1e-14)
    # weights of the three pieces of a triangle sum to its area
    assert got.self_mid[0] + 2 * got.self_side[0] == pytest.approx(1.0)


def test_printed_constants_table():
    assert PRINTED_CONSTANTS.adj_mid == (0.749, 0.33)
    assert PRINTED_CONSTANTS.adj_near == (0.3124, -0.29024)
