"""CSV emission with fixed 17-significant-digit formatting."""

from __future__ import annotations

import csv

import numpy as np

PATTERN_HEADER = ("phi_rad", "sigma_over_lambda0")
CURRENTS_HEADER = ("n", "re_j", "im_j", "re_k", "im_k")
AXIAL_CURRENTS_HEADER = ("n", "re_j", "im_j")
SCAN_HEADER = ("z_over_lambda0", "abs_E", "Re_E", "Im_E")


def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_rows(path, header, columns):
    """Write equal-length columns; integers are written as-is, floats with 17 digits."""
    cols = [np.asarray(c) for c in columns]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([str(int(v)) if np.issubdtype(type(v), np.integer) else _fmt(v) for v in row])


def write_pattern(path, phi, sigma):
    write_rows(path, PATTERN_HEADER, [phi, sigma])


def write_currents(path, j, k=None):
    j = np.asarray(j)
    n = np.arange(j.size)
    if k is None:
        write_rows(path, AXIAL_CURRENTS_HEADER, [n, j.real, j.imag])
    else:
        k = np.asarray(k)
        write_rows(path, CURRENTS_HEADER, [n, j.real, j.imag, k.real, k.imag])


def write_scan(path, z, field, abs_field=None):
    """``abs_E`` defaults to ``|field|``; pass ``abs_field`` for incoherent (power) averages."""
    field = np.asarray(field, dtype=complex)
    mag = np.abs(field) if abs_field is None else np.asarray(abs_field)
    write_rows(path, SCAN_HEADER, [z, mag, field.real, field.imag])


def read_columns(path):
    """Read a CSV written by this module into ``(header, float array of shape (rows, cols))``."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array([[float(v) for v in r] for r in rows[1:]])
