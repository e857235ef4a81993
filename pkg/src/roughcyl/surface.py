"""
Rough cylinder surfaces: synthesis, piecewise-linear discretisation and the
derived geometric tables consumed by the moment-method kernels.

All lengths are in units of the free-space wavelength.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import GeometryError


@dataclass(frozen=True)
class RoughnessSpec:
    """Gaussian-correlated roughness: ``<h(x) h(x + d)> = rms^2 exp(-d^2 / lc^2)``."""

    rms_height: float = 0.0
    correlation_length: float = 1.0
    seed: int = 0
    spectrum_kind: str = "gaussian"

    def __post_init__(self):
        if self.rms_height < 0:
            raise ValueError("rms_height must be >= 0")
        if self.correlation_length <= 0:
            raise ValueError("correlation_length must be > 0")
        if self.spectrum_kind != "gaussian":
            raise ValueError(f"unsupported spectrum_kind {self.spectrum_kind!r}")


@dataclass(frozen=True, eq=False)
class AzimuthalSurface:
    """
    Periodic surface ``r_S(phi)`` sampled at ``phi_{n+1/2} = (n + 1/2) delta``.

    ``samples[n]`` holds ``r_{n+1/2}``; between samples the radius is linear
    in ``phi``. Indices wrap modulo ``N``.
    """

    mean_radius: float
    samples: np.ndarray

    def __post_init__(self):
        r = np.array(self.samples, dtype=float)
        if r.ndim != 1 or r.size < 3:
            raise GeometryError("azimuthal surface needs at least 3 samples")
        if not np.all(np.isfinite(r)) or np.any(r <= 0):
            raise GeometryError("all surface radii must be positive and finite")
        r.setflags(write=False)
        object.__setattr__(self, "samples", r)

    @property
    def N(self) -> int:
        return self.samples.size

    @property
    def delta(self) -> float:
        return 2.0 * np.pi / self.N

    @property
    def sample_angles(self) -> np.ndarray:
        return (np.arange(self.N) + 0.5) * self.delta

    def radius(self, phi):
        """Piecewise-linear interpolant ``r_n + s_n (phi - n delta)`` on the owning segment."""
        phi = np.asarray(phi, dtype=float)
        t = np.mod(phi, 2.0 * np.pi) / self.delta
        n = np.floor(t + 0.5).astype(int)
        g = self.tables
        nn = np.mod(n, self.N)
        return g.r[nn] + g.s[nn] * (t - n) * self.delta

    def slope(self, phi):
        """dr_S/dphi of the interpolant (the slope of the owning segment)."""
        t = np.mod(np.asarray(phi, dtype=float), 2.0 * np.pi) / self.delta
        n = np.mod(np.floor(t + 0.5).astype(int), self.N)
        return self.tables.s[n]

    @cached_property
    def tables(self) -> "AzimuthalTables":
        return geometry_tables(self)

    def to_csv(self, path):
        write_surface_csv(path, self.sample_angles, self.samples, header="phi_rad")


@dataclass(frozen=True)
class AzimuthalTables:
    """
    Per-index derived quantities, each an array of length ``N`` indexed by n.

    ``r`` and ``s`` are the segment-centre radius and slope; ``r_m34`` and
    ``r_p34`` are radii at ``(n -+ 3/4) delta``; ``s_m1``/``s_p1`` the slopes
    of the neighbouring segments; ``rho_mh``/``rho_ph`` the local stretch
    factors at the segment ends ``(n -+ 1/2) delta``; ``arc1..arc3`` the
    centroidal arc factors of the three sub-pieces of the triangle basis.
    """

    delta: float
    r_half: np.ndarray
    r: np.ndarray
    s: np.ndarray
    s_m1: np.ndarray
    s_p1: np.ndarray
    r_m34: np.ndarray
    r_p34: np.ndarray
    rho_mh: np.ndarray
    rho_ph: np.ndarray
    arc1: np.ndarray
    arc2: np.ndarray
    arc3: np.ndarray

    @property
    def N(self) -> int:
        return self.r.size

    def chord(self, m, n):
        """Chord ``R_{m,n}`` between the segment centres ``m`` and ``n``."""
        m = np.asarray(m)
        n = np.asarray(n)
        dphi = np.mod(m - n, self.N) * self.delta
        rm = self.r[np.mod(m, self.N)]
        rn = self.r[np.mod(n, self.N)]
        return np.sqrt(np.maximum(rm**2 + rn**2 - 2.0 * rm * rn * np.cos(dphi), 0.0))


def geometry_tables(surface: AzimuthalSurface) -> AzimuthalTables:
    rh = surface.samples
    d = surface.delta
    rh_m1 = np.roll(rh, 1)       # r_{n-1/2}
    rh_m2 = np.roll(rh, 2)       # r_{n-3/2}
    rh_p1 = np.roll(rh, -1)      # r_{n+3/2}
    r = 0.5 * (rh + rh_m1)
    s = (rh - rh_m1) / d
    s_m1 = np.roll(s, 1)
    s_p1 = np.roll(s, -1)
    r_m34 = 0.25 * (3.0 * rh_m1 + rh_m2)
    r_p34 = 0.25 * (3.0 * rh + rh_p1)
    rho_mh = np.sqrt(rh_m1**2 + 0.25 * (s + s_m1) ** 2)
    rho_ph = np.sqrt(rh**2 + 0.25 * (s + s_p1) ** 2)
    return AzimuthalTables(
        delta=d, r_half=rh, r=r, s=s, s_m1=s_m1, s_p1=s_p1,
        r_m34=r_m34, r_p34=r_p34, rho_mh=rho_mh, rho_ph=rho_ph,
        arc1=np.sqrt(r_m34**2 + s_m1**2),
        arc2=np.sqrt(r**2 + s**2),
        arc3=np.sqrt(r_p34**2 + s_p1**2),
    )


@dataclass(frozen=True, eq=False)
class AxialSurface:
    """
    Finite cylinder ``r_S(z)`` on ``[-L/2, L/2]`` with ``N + 1`` nodes
    ``z_n = n delta - L/2``; linear between nodes, no wrap-around.
    """

    mean_radius: float
    length: float
    nodes: np.ndarray

    def __post_init__(self):
        r = np.array(self.nodes, dtype=float)
        if r.ndim != 1 or r.size < 2:
            raise GeometryError("axial surface needs at least 2 nodes")
        if not np.all(np.isfinite(r)) or np.any(r <= 0):
            raise GeometryError("all surface radii must be positive and finite")
        if self.length <= 0:
            raise GeometryError("cylinder length must be positive")
        r.setflags(write=False)
        object.__setattr__(self, "nodes", r)

    @property
    def N(self) -> int:
        return self.nodes.size - 1

    @property
    def delta(self) -> float:
        return self.length / self.N

    @property
    def z_nodes(self) -> np.ndarray:
        return np.arange(self.N + 1) * self.delta - 0.5 * self.length

    @property
    def z_mid(self) -> np.ndarray:
        """Cell centres ``z_{n+1/2}``."""
        return (np.arange(self.N) + 0.5) * self.delta - 0.5 * self.length

    @property
    def r_mid(self) -> np.ndarray:
        """``r_{n+1/2} = (r_n + r_{n+1}) / 2``."""
        return 0.5 * (self.nodes[:-1] + self.nodes[1:])

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.nodes) / self.delta

    def radius(self, z):
        z = np.asarray(z, dtype=float)
        return np.interp(z, self.z_nodes, self.nodes)

    def to_csv(self, path):
        write_surface_csv(path, self.z_nodes, self.nodes, header="z")


def smooth_azimuthal(a: float, N: int) -> AzimuthalSurface:
    return AzimuthalSurface(a, np.full(N, float(a)))


def smooth_axial(a: float, L: float, N: int) -> AxialSurface:
    return AxialSurface(a, L, np.full(N + 1, float(a)))


def _check_roughness(a, N, spec, min_n):
    if N < min_n:
        raise GeometryError(f"N must be >= {min_n}, got {N}")
    if a <= 3.0 * spec.rms_height:
        raise GeometryError("mean radius must exceed 3 * rms_height")


def synthesize_azimuthal(a: float, N: int, spec: RoughnessSpec) -> AzimuthalSurface:
    """
    Draw a periodic Gaussian-correlated realisation of ``h(phi)``.

    The covariance is the circulant matrix built from
    ``rms^2 exp(-(a dphi)^2 / lc^2)`` with ``dphi`` the wrapped angular lag,
    factorised exactly through its DFT (negative eigenvalues clipped).
    """
    _check_roughness(a, N, spec, 8)
    if spec.rms_height == 0:
        return smooth_azimuthal(a, N)
    rng = np.random.default_rng(spec.seed)
    delta = 2.0 * np.pi / N
    lag = np.arange(N)
    lag = np.minimum(lag, N - lag) * delta
    cov = spec.rms_height**2 * np.exp(-((a * lag) / spec.correlation_length) ** 2)
    eig = np.clip(np.fft.fft(cov).real, 0.0, None)
    noise = rng.standard_normal(N)
    h = np.fft.ifft(np.sqrt(eig) * np.fft.fft(noise)).real
    r = a + h
    if np.any(r <= 0):
        raise GeometryError("synthesised surface has non-positive radius")
    return AzimuthalSurface(a, r)


EDGE_TAPER_FRACTION = 0.1
_AXIAL_OVERSAMPLE = 4


def synthesize_axial(a: float, L: float, N: int, spec: RoughnessSpec) -> AxialSurface:
    """
    Draw a Gaussian-correlated ``h(z)`` for a finite cylinder.

    White noise on a grid four times finer than ``L / N`` (padded by
    ``4 lc`` on each side) is convolved with a Gaussian kernel, giving
    covariance ``rms^2 exp(-dz^2 / lc^2)``. The field is sampled at the
    nodes and ramped to zero with a raised cosine over the outer 10% of the
    length at each end.
    """
    _check_roughness(a, N, spec, 8)
    if L <= 0:
        raise GeometryError("cylinder length must be positive")
    if spec.rms_height == 0:
        return smooth_axial(a, L, N)
    rng = np.random.default_rng(spec.seed)
    lc = spec.correlation_length
    dz = L / (N * _AXIAL_OVERSAMPLE)
    pad = int(np.ceil(4.0 * lc / dz))
    n_fine = N * _AXIAL_OVERSAMPLE + 1 + 2 * pad
    n_fft = int(2 ** np.ceil(np.log2(n_fine + 2 * pad)))
    noise = rng.standard_normal(n_fft)
    lag = np.arange(n_fft)
    lag = np.minimum(lag, n_fft - lag) * dz
    # kernel g with (g * g)(d) proportional to exp(-d^2 / lc^2)
    kernel = np.exp(-2.0 * (lag / lc) ** 2)
    h_fine = np.fft.ifft(np.fft.fft(kernel) * np.fft.fft(noise)).real
    h_fine *= spec.rms_height / np.sqrt(np.sum(kernel**2))
    h = h_fine[pad:pad + N * _AXIAL_OVERSAMPLE + 1:_AXIAL_OVERSAMPLE]
    z = np.arange(N + 1) * (L / N) - 0.5 * L
    h = h * edge_taper(z, L)
    r = a + h
    if np.any(r <= 0):
        raise GeometryError("synthesised surface has non-positive radius")
    return AxialSurface(a, L, r)


def edge_taper(z, L, fraction=EDGE_TAPER_FRACTION):
    """Raised-cosine window: 0 at ``|z| = L/2``, 1 once ``fraction * L`` inside."""
    d = 0.5 * L - np.abs(np.asarray(z, dtype=float))
    ramp = fraction * L
    x = np.clip(d / ramp, 0.0, 1.0)
    return 0.5 - 0.5 * np.cos(np.pi * x)


def write_surface_csv(path, coords, radii, header):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", header, "radius"])
        for i, (c, r) in enumerate(zip(coords, radii)):
            w.writerow([i, f"{c:.17g}", f"{r:.17g}"])


def read_surface_csv(path, mean_radius=None, length=None):
    """
    Load a surface written by ``to_csv``.

    The second column header decides the kind: ``phi_rad`` gives an
    :class:`AzimuthalSurface`, ``z`` an :class:`AxialSurface` (whose length
    is inferred from the node span unless given).
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    coords = np.array([float(r[1]) for r in body])
    radii = np.array([float(r[2]) for r in body])
    if header[1] == "phi_rad":
        a = float(np.mean(radii)) if mean_radius is None else mean_radius
        return AzimuthalSurface(a, radii)
    if header[1] == "z":
        a = float(np.mean(radii)) if mean_radius is None else mean_radius
        L = float(coords[-1] - coords[0]) if length is None else length
        return AxialSurface(a, L, radii)
    raise GeometryError(f"unrecognised surface CSV header {header!r}")
