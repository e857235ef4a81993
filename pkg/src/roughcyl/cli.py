"""
Command-line driver: JSON configuration, single runs, convergence sweeps and
Monte Carlo ensembles over rough-surface realisations.

Exit codes: 0 success, 2 configuration, 3 geometry/domain, 4 singular
system, 5 quadrature, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__, axial, azimuthal, io, oracles
from .errors import (ConfigError, DomainError, GeometryError, QuadratureError,
                     RoughCylError, SingularMatrixError)
from .logint import PRINTED_CONSTANTS
from .surface import (RoughnessSpec, smooth_axial, smooth_azimuthal, synthesize_axial,
                      synthesize_azimuthal)

MODES = ("azimuthal-dielectric", "axial-pec", "mie-reference", "pec-reference")
EXIT_OK, EXIT_OTHER, EXIT_CONFIG, EXIT_GEOMETRY, EXIT_SINGULAR, EXIT_QUADRATURE = 0, 1, 2, 3, 4, 5


@dataclass
class RunConfig:
    mode: str
    a: float = 2.0
    L: float = 15.0
    eps_d: complex = 2.0
    mu_d: complex = 1.0
    phi0: float = 0.0
    E0: float = 1.0
    w0: float | None = 5.0
    beam: str = "closed-form"
    N: int = 100
    sweep: list = field(default_factory=list)
    rms_height: float = 0.0
    correlation_length: float = 1.0
    realizations: int = 1
    seed_base: int = 0
    stop_rel_stderr: float | None = None
    min_realizations: int = 2
    log_constants: str = "derived"
    phi_points: int = 360
    r_obs: float = 2.5
    z_min: float = -7.5
    z_max: float = 7.5
    z_points: int = 151
    pec_reference: str = "envelope"
    write_currents: bool = True
    write_surface: bool = False

    @property
    def delta(self) -> float:
        return 2.0 * math.pi / self.N if self.mode.startswith("azimuthal") else self.L / self.N


def _complex(value, name):
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, dict) and set(value) <= {"re", "im"}:
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    raise ConfigError(name, "expected a number, [re, im] or {\"re\":..., \"im\":...}")


def _number(section, key, name, default, kind=float, positive=False, allow_none=False):
    value = section.get(key, default)
    if value is None and allow_none:
        return None
    try:
        if kind is int and (isinstance(value, bool) or float(value) != int(value)):
            raise TypeError
        out = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(name, f"expected {kind.__name__}, got {value!r}") from None
    if kind is float and not math.isfinite(out):
        raise ConfigError(name, "must be finite")
    if positive and out <= 0:
        raise ConfigError(name, "must be positive")
    return out


def _section(doc, key):
    value = doc.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(key, "expected an object")
    return value


def parse_config(doc: dict) -> RunConfig:
    """Validate a configuration document; raise :class:`ConfigError` naming the bad field."""
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "configuration must be a JSON object")
    known = {"mode", "geometry", "medium", "incidence", "discretization", "roughness",
             "ensemble", "output", "solver"}
    for key in doc:
        if key not in known:
            raise ConfigError(key, "unknown top-level key")
    mode = doc.get("mode")
    if mode not in MODES:
        raise ConfigError("mode", f"must be one of {', '.join(MODES)}")
    geo = _section(doc, "geometry")
    med = _section(doc, "medium")
    inc = _section(doc, "incidence")
    disc = _section(doc, "discretization")
    rough = _section(doc, "roughness")
    ens = _section(doc, "ensemble")
    out = _section(doc, "output")
    solver = _section(doc, "solver")

    cfg = RunConfig(mode=mode)
    cfg.a = _number(geo, "a", "geometry.a", cfg.a, positive=True)
    cfg.L = _number(geo, "L", "geometry.L", cfg.L, positive=True)
    cfg.eps_d = _complex(med.get("eps_d", cfg.eps_d), "medium.eps_d")
    cfg.mu_d = _complex(med.get("mu_d", cfg.mu_d), "medium.mu_d")
    if cfg.eps_d.real <= 0 or cfg.eps_d.imag > 0:
        raise ConfigError("medium.eps_d", "need Re > 0 and Im <= 0 (passive medium)")
    if cfg.mu_d.real <= 0 or cfg.mu_d.imag > 0:
        raise ConfigError("medium.mu_d", "need Re > 0 and Im <= 0 (passive medium)")
    cfg.phi0 = _number(inc, "phi0", "incidence.phi0", cfg.phi0)
    if not 0.0 <= cfg.phi0 < 2.0 * math.pi:
        raise ConfigError("incidence.phi0", "must lie in [0, 2 pi)")
    cfg.E0 = _number(inc, "E0", "incidence.E0", cfg.E0, positive=True)
    cfg.beam = inc.get("beam", cfg.beam)
    if cfg.beam not in ("closed-form", "k-integral", "cylindrical"):
        raise ConfigError("incidence.beam", "must be closed-form, k-integral or cylindrical")
    cfg.w0 = _number(inc, "w0", "incidence.w0", cfg.w0, positive=True)
    if mode in ("axial-pec", "pec-reference") and cfg.beam == "closed-form" and cfg.w0 < 2.0:
        raise ConfigError("incidence.w0", "closed-form beam requires w0 >= 2")

    if "N" in disc and "delta" in disc:
        raise ConfigError("discretization", "give either N or delta, not both")
    if "delta" in disc:
        delta = _number(disc, "delta", "discretization.delta", 0.0, positive=True)
        span = 2.0 * math.pi if mode.startswith("azimuthal") or mode == "mie-reference" else cfg.L
        n = span / delta
        if abs(n - round(n)) > 1e-9 * n:
            raise ConfigError("discretization.delta", f"does not divide the domain ({span:g}) evenly")
        cfg.N = int(round(n))
    else:
        cfg.N = _number(disc, "N", "discretization.N", cfg.N, kind=int, positive=True)
    min_n = 3 if mode == "azimuthal-dielectric" else 1
    if cfg.N < min_n:
        raise ConfigError("discretization.N", f"must be >= {min_n}")
    sweep = disc.get("sweep", [])
    if not isinstance(sweep, list) or not all(isinstance(v, int) and v >= min_n for v in sweep):
        raise ConfigError("discretization.sweep", f"expected a list of integers >= {min_n}")
    cfg.sweep = sorted(set(sweep))

    cfg.rms_height = _number(rough, "rms_height", "roughness.rms_height", cfg.rms_height)
    if cfg.rms_height < 0:
        raise ConfigError("roughness.rms_height", "must be >= 0")
    cfg.correlation_length = _number(rough, "correlation_length", "roughness.correlation_length",
                                     cfg.correlation_length, positive=True)
    kind = rough.get("spectrum_kind", "gaussian")
    if kind != "gaussian":
        raise ConfigError("roughness.spectrum_kind", "only 'gaussian' is supported")
    if cfg.rms_height > 0 and cfg.a <= 3.0 * cfg.rms_height:
        raise ConfigError("roughness.rms_height", "mean radius must exceed 3 * rms_height")

    cfg.realizations = _number(ens, "realizations", "ensemble.realizations", cfg.realizations,
                               kind=int, positive=True)
    cfg.seed_base = _number(ens, "seed_base", "ensemble.seed_base", cfg.seed_base, kind=int)
    if cfg.seed_base < 0:
        raise ConfigError("ensemble.seed_base", "must be >= 0")
    cfg.stop_rel_stderr = _number(ens, "stop_rel_stderr", "ensemble.stop_rel_stderr", None,
                                  positive=True, allow_none=True)
    cfg.min_realizations = _number(ens, "min_realizations", "ensemble.min_realizations",
                                   cfg.min_realizations, kind=int, positive=True)
    if cfg.min_realizations < 2:
        raise ConfigError("ensemble.min_realizations", "must be >= 2")

    cfg.log_constants = solver.get("log_constants", cfg.log_constants)
    if cfg.log_constants not in ("derived", "printed"):
        raise ConfigError("solver.log_constants", "must be 'derived' or 'printed'")

    cfg.phi_points = _number(out, "phi_points", "output.phi_points", cfg.phi_points,
                             kind=int, positive=True)
    cfg.r_obs = _number(out, "r_obs", "output.r_obs", cfg.r_obs, positive=True)
    cfg.z_min = _number(out, "z_min", "output.z_min", cfg.z_min)
    cfg.z_max = _number(out, "z_max", "output.z_max", cfg.z_max)
    if cfg.z_max < cfg.z_min:
        raise ConfigError("output.z_max", "must be >= output.z_min")
    cfg.z_points = _number(out, "z_points", "output.z_points", cfg.z_points, kind=int,
                           positive=True)
    cfg.pec_reference = out.get("pec_reference", cfg.pec_reference)
    if cfg.pec_reference not in ("envelope", "spectral"):
        raise ConfigError("output.pec_reference", "must be 'envelope' or 'spectral'")
    cfg.write_currents = bool(out.get("write_currents", cfg.write_currents))
    cfg.write_surface = bool(out.get("write_surface", cfg.write_surface))
    if mode in ("axial-pec", "pec-reference") and cfg.r_obs <= cfg.a + 3.0 * cfg.rms_height:
        raise ConfigError("output.r_obs", "observation radius must clear the rough surface")
    return cfg


def phi_grid(cfg: RunConfig):
    return np.arange(cfg.phi_points) * (2.0 * math.pi / cfg.phi_points)


def z_grid(cfg: RunConfig):
    return np.linspace(cfg.z_min, cfg.z_max, cfg.z_points)


def _beam(cfg: RunConfig):
    if cfg.beam == "cylindrical":
        return axial.CylindricalWave(amplitude=cfg.E0)
    return axial.TaperedBeam(w0=cfg.w0, mode=cfg.beam, amplitude=cfg.E0)


def _roughness(cfg: RunConfig, seed: int):
    return RoughnessSpec(cfg.rms_height, cfg.correlation_length, seed)


def _realization(cfg: RunConfig, N: int, seed: int):
    """One solve; returns ``(observable, complex field or None, info dict, extras)``."""
    info = {"seed": seed, "N": N}
    if cfg.mode == "azimuthal-dielectric":
        surf = synthesize_azimuthal(cfg.a, N, _roughness(cfg, seed)) if cfg.rms_height > 0 \
            else smooth_azimuthal(cfg.a, N)
        medium = azimuthal.MediumParams(cfg.eps_d, cfg.mu_d)
        inc = azimuthal.IncidentPlaneWave(cfg.phi0, cfg.E0)
        const = PRINTED_CONSTANTS if cfg.log_constants == "printed" else None
        cur = azimuthal.solve_currents(surf, medium, inc, const)
        pat = azimuthal.scattering_cross_section(surf, cur, medium, inc, phi_grid(cfg))
        info.update(condition=cur.condition, residual=cur.residual)
        return pat.values, None, info, (surf, cur)
    if cfg.mode == "axial-pec":
        surf = synthesize_axial(cfg.a, cfg.L, N, _roughness(cfg, seed)) if cfg.rms_height > 0 \
            else smooth_axial(cfg.a, cfg.L, N)
        cur = axial.solve_axial(surf, _beam(cfg))
        e = axial.scattered_field(surf, cur, cfg.r_obs, z_grid(cfg))
        info.update(condition=cur.condition, residual=cur.residual)
        return np.abs(e) ** 2, e, info, (surf, cur)
    raise ConfigError("mode", f"{cfg.mode} has no realisations")


def _reference(cfg: RunConfig):
    if cfg.mode in ("azimuthal-dielectric", "mie-reference"):
        return oracles.mie_sigma_tm(cfg.a, cfg.eps_d, phi_grid(cfg), cfg.phi0, cfg.mu_d), None
    z = z_grid(cfg)
    if cfg.beam == "cylindrical":
        e = np.full(z.shape, oracles.pec_infinite_axisym(cfg.a, cfg.r_obs, cfg.E0), dtype=complex)
    elif cfg.pec_reference == "spectral":
        e = cfg.E0 * oracles.pec_beam_spectral_reference(cfg.a, cfg.r_obs, z, cfg.w0)
    else:
        e = cfg.E0 * oracles.pec_beam_envelope_reference(cfg.a, cfg.r_obs, z, cfg.w0)
    return np.abs(e) ** 2, e


class RealizationError(RoughCylError):
    def __init__(self, index, seed, exc):
        super().__init__(f"realization {index} (seed {seed}): {type(exc).__name__}: {exc}")
        self.index = index
        self.seed = seed
        self.cause = exc


def run_ensemble(cfg: RunConfig, N: int | None = None):
    """
    Average the observable over realisations with seeds ``seed_base + i``.

    Returns ``(mean, stderr, coherent_mean_field, infos, last_extras)``. The
    observable is ``sigma(phi)`` or ``|E_phi|^2`` on the output grid.
    """
    N = cfg.N if N is None else N
    total = None
    total_sq = None
    field_sum = None
    infos = []
    extras = None
    count = 0
    for i in range(cfg.realizations):
        seed = cfg.seed_base + i
        try:
            obs, e, info, extras = _realization(cfg, N, seed)
        except (RoughCylError, ValueError, ArithmeticError) as exc:
            raise RealizationError(i, seed, exc) from exc
        info["index"] = i
        infos.append(info)
        total = obs.copy() if total is None else total + obs
        total_sq = obs**2 if total_sq is None else total_sq + obs**2
        if e is not None:
            field_sum = e.copy() if field_sum is None else field_sum + e
        count += 1
        if cfg.stop_rel_stderr is not None and count >= cfg.min_realizations:
            mean = total / count
            var = np.maximum(total_sq / count - mean**2, 0.0) * count / (count - 1)
            se = np.sqrt(var / count)
            if np.all(se <= cfg.stop_rel_stderr * np.abs(mean)):
                break
    mean = total / count
    if count > 1:
        var = np.maximum(total_sq / count - mean**2, 0.0) * count / (count - 1)
        stderr = np.sqrt(var / count)
    else:
        stderr = np.zeros_like(mean)
    coherent = None if field_sum is None else field_sum / count
    return mean, stderr, coherent, infos, extras


def _relative_rms(x, ref):
    return float(np.linalg.norm(x - ref) / np.linalg.norm(ref))


def _emit(cfg, outdir: Path, mean, stderr, coherent, suffix=""):
    files = []
    if cfg.mode in ("azimuthal-dielectric", "mie-reference"):
        p = outdir / f"pattern{suffix}.csv"
        io.write_pattern(p, phi_grid(cfg), mean)
        files.append(p.name)
        if cfg.mode == "azimuthal-dielectric" and cfg.realizations > 1:
            p = outdir / f"pattern_stats{suffix}.csv"
            io.write_rows(p, ("phi_rad", "sigma_mean", "sigma_stderr"),
                          [phi_grid(cfg), mean, stderr])
            files.append(p.name)
    else:
        p = outdir / f"scan{suffix}.csv"
        io.write_scan(p, z_grid(cfg), coherent, abs_field=np.sqrt(mean))
        files.append(p.name)
    return files


def run(cfg: RunConfig, outdir) -> dict:
    """Execute a configuration, write CSV results and ``manifest.json``; return the manifest."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    manifest = {
        "tool": "roughcyl",
        "version": __version__,
        "numpy": np.__version__,
        "config": _config_echo(cfg),
        "units": "lengths in free-space wavelengths; k0 = 2 pi; exp(j omega t)",
        "files": [],
    }
    if cfg.mode in ("mie-reference", "pec-reference"):
        mean, field_ = _reference(cfg)
        manifest["files"] += _emit(cfg, outdir, mean, np.zeros_like(mean), field_)
    else:
        mean, stderr, coherent, infos, extras = run_ensemble(cfg)
        manifest["files"] += _emit(cfg, outdir, mean, stderr, coherent)
        manifest["realizations"] = infos
        manifest["realizations_used"] = len(infos)
        manifest["max_condition"] = max(i["condition"] for i in infos)
        surf, cur = extras
        if cfg.write_currents and len(infos) == 1:
            p = outdir / "currents.csv"
            io.write_currents(p, cur.j, getattr(cur, "k", None))
            manifest["files"].append(p.name)
        if cfg.write_surface and len(infos) == 1:
            p = outdir / "surface.csv"
            surf.to_csv(p)
            manifest["files"].append(p.name)
        if cfg.rms_height == 0:
            ref, _ = _reference(cfg)
            manifest["relative_rms_vs_reference"] = _relative_rms(mean, ref)
        if cfg.sweep:
            manifest["convergence"] = convergence_sweep(cfg, outdir)
            manifest["files"].append("convergence.csv")
    manifest["wall_time_s"] = time.perf_counter() - start
    with open(outdir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, default=_json_default)
        fh.write("\n")
    return manifest


def convergence_sweep(cfg: RunConfig, outdir: Path):
    """Solve for each N in the sweep; compare with the finest N and, when smooth, the reference."""
    results = {}
    for N in cfg.sweep:
        t0 = time.perf_counter()
        mean, _, coherent, infos, _ = run_ensemble(cfg, N)
        results[N] = (mean, coherent, infos, time.perf_counter() - t0)
        _emit(cfg, outdir, mean, np.zeros_like(mean), coherent, suffix=f"_N{N}")
    finest = results[cfg.sweep[-1]][0]
    ref = _reference(cfg)[0] if cfg.rms_height == 0 else None
    rows = []
    for N, (mean, _, infos, wall) in results.items():
        rows.append({
            "N": N,
            "delta": replace(cfg, N=N).delta,
            "rel_rms_vs_finest": _relative_rms(mean, finest),
            "rel_rms_vs_reference": float("nan") if ref is None else _relative_rms(mean, ref),
            "max_condition": max(i["condition"] for i in infos),
            "wall_time_s": wall,
        })
    # wall time stays in the manifest so the CSV is reproducible byte for byte
    keys = [k for k in rows[0] if k != "wall_time_s"]
    io.write_rows(outdir / "convergence.csv", keys, [[r[k] for r in rows] for k in keys])
    return rows


def _config_echo(cfg: RunConfig):
    d = asdict(cfg)
    for key in ("eps_d", "mu_d"):
        d[key] = [d[key].real, d[key].imag]
    return d


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, RealizationError):
        exc = exc.cause
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, SingularMatrixError):
        return EXIT_SINGULAR
    if isinstance(exc, QuadratureError):
        return EXIT_QUADRATURE
    if isinstance(exc, (GeometryError, DomainError)):
        return EXIT_GEOMETRY
    return EXIT_OTHER


def build_parser():
    p = argparse.ArgumentParser(
        prog="roughcyl",
        description="Moment-method scattering from rough circular cylinders.")
    p.add_argument("config", help="JSON run configuration")
    p.add_argument("-o", "--out", default="out", help="output directory (default: out)")
    p.add_argument("--mode", choices=MODES, help="override the configured mode")
    p.add_argument("--seed", type=int, help="override ensemble.seed_base")
    p.add_argument("-N", type=int, help="override discretization.N")
    p.add_argument("--realizations", type=int, help="override ensemble.realizations")
    return p


def load_config(path, args=None) -> RunConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON: {exc}") from None
    except OSError as exc:
        raise ConfigError("<file>", str(exc)) from None
    if args is not None:
        if not isinstance(doc, dict):
            raise ConfigError("<root>", "configuration must be a JSON object")
        if args.mode:
            doc["mode"] = args.mode
        if args.seed is not None:
            doc.setdefault("ensemble", {})["seed_base"] = args.seed
        if args.realizations is not None:
            doc.setdefault("ensemble", {})["realizations"] = args.realizations
        if args.N is not None:
            disc = doc.setdefault("discretization", {})
            disc.pop("delta", None)
            disc["N"] = args.N
    return parse_config(doc)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args)
        manifest = run(cfg, args.out)
    except Exception as exc:  # noqa: BLE001 - mapped to an exit category
        code = exit_code_for(exc)
        kind = {EXIT_CONFIG: "config", EXIT_GEOMETRY: "geometry", EXIT_SINGULAR: "solver",
                EXIT_QUADRATURE: "quadrature"}.get(code, "error")
        print(f"roughcyl: {kind} error: {exc}", file=sys.stderr)
        return code
    summary = f"roughcyl: {cfg.mode} -> {args.out} ({', '.join(manifest['files'])})"
    if "relative_rms_vs_reference" in manifest:
        summary += f"; relative RMS vs reference {manifest['relative_rms_vs_reference']:.4g}"
    print(summary)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
