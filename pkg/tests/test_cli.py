import json
import subprocess
import sys

import numpy as np
import pytest

from roughcyl import io
from roughcyl.cli import (EXIT_CONFIG, EXIT_GEOMETRY, EXIT_OTHER, EXIT_QUADRATURE,
                          EXIT_SINGULAR, RealizationError, exit_code_for, main, parse_config,
                          run)
from roughcyl.errors import (ConfigError, DomainError, GeometryError, QuadratureError,
                             SingularMatrixError)

AZ_SMALL = {
    "mode": "azimuthal-dielectric",
    "geometry": {"a": 0.5},
    "medium": {"eps_d": 2.0},
    "discretization": {"N": 40},
    "output": {"phi_points": 36},
}

AX_SMALL = {
    "mode": "axial-pec",
    "geometry": {"a": 1.0, "L": 4.0},
    "incidence": {"w0": 2.0},
    "discretization": {"N": 40},
    "output": {"r_obs": 1.5, "z_min": -2.0, "z_max": 2.0, "z_points": 9},
}


def _columns(path):
    header, data = io.read_columns(path)
    return {h: data[:, i] for i, h in enumerate(header)}


def _write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


def test_defaults():
    cfg = parse_config({"mode": "azimuthal-dielectric"})
    assert cfg.a == 2.0 and cfg.N == 100 and cfg.eps_d == 2.0


@pytest.mark.parametrize("doc, field", [
    ({}, "mode"),
    ({"mode": "x"}, "mode"),
    ({"mode": "azimuthal-dielectric", "bogus": 1}, "bogus"),
    ({"mode": "azimuthal-dielectric", "geometry": {"a": -1}}, "geometry.a"),
    ({"mode": "azimuthal-dielectric", "medium": {"eps_d": [2, 0.5]}}, "medium.eps_d"),
    ({"mode": "azimuthal-dielectric", "incidence": {"phi0": 7}}, "incidence.phi0"),
    ({"mode": "axial-pec", "incidence": {"w0": 1.0}}, "incidence.w0"),
    ({"mode": "azimuthal-dielectric", "discretization": {"N": 10, "delta": 0.1}},
     "discretization"),
    ({"mode": "azimuthal-dielectric", "discretization": {"delta": 0.1}}, "discretization.delta"),
    ({"mode": "azimuthal-dielectric", "discretization": {"N": 2}}, "discretization.N"),
    ({"mode": "azimuthal-dielectric", "roughness": {"rms_height": 1.0}}, "roughness.rms_height"),
    ({"mode": "azimuthal-dielectric", "roughness": {"spectrum_kind": "exp"}},
     "roughness.spectrum_kind"),
    ({"mode": "azimuthal-dielectric", "ensemble": {"min_realizations": 1}},
     "ensemble.min_realizations"),
    ({"mode": "azimuthal-dielectric", "solver": {"log_constants": "x"}}, "solver.log_constants"),
    ({"mode": "axial-pec", "output": {"r_obs": 1.0}}, "output.r_obs"),
])
def test_config_errors_name_the_field(doc, field):
    with pytest.raises(ConfigError) as exc:
        parse_config(doc)
    assert exc.value.field == field


def test_complex_forms():
    for v in (2.0, [2.0, -0.1], {"re": 2.0, "im": -0.1}):
        cfg = parse_config({"mode": "azimuthal-dielectric", "medium": {"eps_d": v}})
        assert cfg.eps_d.real == 2.0


def test_delta_sets_N():
    cfg = parse_config({"mode": "axial-pec", "geometry": {"L": 15.0},
                        "discretization": {"delta": 0.1}})
    assert cfg.N == 150


def test_exit_codes():
    assert exit_code_for(ConfigError("x", "y")) == EXIT_CONFIG
    assert exit_code_for(GeometryError("x")) == EXIT_GEOMETRY
    assert exit_code_for(DomainError("x")) == EXIT_GEOMETRY
    assert exit_code_for(SingularMatrixError("x")) == EXIT_SINGULAR
    assert exit_code_for(QuadratureError("x")) == EXIT_QUADRATURE
    assert exit_code_for(RuntimeError("x")) == EXIT_OTHER
    assert exit_code_for(RealizationError(0, 3, SingularMatrixError("x"))) == EXIT_SINGULAR


def test_main_bad_file(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main([str(p)]) == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err
    assert main([str(tmp_path / "missing.json")]) == EXIT_CONFIG


def test_azimuthal_run_outputs(tmp_path):
    out = tmp_path / "o"
    assert main([str(_write(tmp_path, AZ_SMALL)), "-o", str(out)]) == 0
    man = json.loads((out / "manifest.json").read_text())
    assert set(man["files"]) >= {"pattern.csv", "currents.csv"}
    cols = _columns(out / "pattern.csv")
    assert len(cols["phi_rad"]) == 36
    assert man["relative_rms_vs_reference"] < 0.05
    cur = _columns(out / "currents.csv")
    assert len(cur["re_j"]) == 40


def test_byte_exact_reproducibility(tmp_path):
    doc = dict(AZ_SMALL, roughness={"rms_height": 0.01, "correlation_length": 0.3},
               ensemble={"realizations": 2, "seed_base": 5})
    cfg = _write(tmp_path, doc)
    for d in ("a", "b"):
        assert main([str(cfg), "-o", str(tmp_path / d)]) == 0
    for name in ("pattern.csv", "pattern_stats.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert main([str(cfg), "-o", str(tmp_path / "c"), "--seed", "6"]) == 0
    assert (tmp_path / "a" / "pattern.csv").read_bytes() != \
        (tmp_path / "c" / "pattern.csv").read_bytes()


def test_ensemble_stopping_rule(tmp_path):
    cfg = parse_config(dict(AZ_SMALL, roughness={"rms_height": 0.005, "correlation_length": 0.3},
                            ensemble={"realizations": 20, "stop_rel_stderr": 10.0,
                                      "min_realizations": 3}))
    man = run(cfg, tmp_path)
    assert man["realizations_used"] == 3


def test_axial_run_and_sweep(tmp_path):
    doc = dict(AX_SMALL, discretization={"N": 40, "sweep": [20, 40]})
    man = run(parse_config(doc), tmp_path)
    scan = _columns(tmp_path / "scan.csv")
    assert len(scan["z_over_lambda0"]) == 9
    assert np.allclose(scan["abs_E"], np.hypot(scan["Re_E"], scan["Im_E"]), rtol=1e-12)
    assert [row["N"] for row in man["convergence"]] == [20, 40]
    conv = _columns(tmp_path / "convergence.csv")
    assert conv["rel_rms_vs_finest"][-1] == 0.0
    assert "wall_time_s" not in conv


def test_reference_modes(tmp_path):
    man = run(parse_config({"mode": "mie-reference", "output": {"phi_points": 12}}), tmp_path / "m")
    assert man["files"] == ["pattern.csv"]
    man = run(parse_config(dict(AX_SMALL, mode="pec-reference")), tmp_path / "p")
    assert man["files"] == ["scan.csv"]


def test_module_entry_point(tmp_path):
    cfg = _write(tmp_path, {"mode": "mie-reference", "output": {"phi_points": 8}})
    res = subprocess.run([sys.executable, "-m", "roughcyl", str(cfg), "-o", str(tmp_path / "x")],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert "mie-reference" in res.stdout


def test_single_smooth_realization_equals_deterministic_run(tmp_path):
    base = run(parse_config(AZ_SMALL), tmp_path / "d")
    doc = dict(AZ_SMALL, roughness={"rms_height": 0.0, "correlation_length": 0.3},
               ensemble={"realizations": 1, "seed_base": 11})
    run(parse_config(doc), tmp_path / "e")
    assert base["files"][0] == "pattern.csv"
    assert (tmp_path / "d" / "pattern.csv").read_bytes() == \
        (tmp_path / "e" / "pattern.csv").read_bytes()


def test_split_sample_ensemble_consistency(tmp_path):
    # two disjoint 50-seed ensembles agree within three combined standard errors
    rough = {"rms_height": 0.02, "correlation_length": 0.3}
    means, errs = [], []
    for base in (0, 50):
        doc = dict(AZ_SMALL, discretization={"N": 30}, output={"phi_points": 12},
                   roughness=rough, ensemble={"realizations": 50, "seed_base": base})
        run(parse_config(doc), tmp_path / str(base))
        cols = _columns(tmp_path / str(base) / "pattern_stats.csv")
        means.append(cols["sigma_mean"])
        errs.append(cols["sigma_stderr"])
    assert np.all(errs[0] > 0)
    assert np.all(np.abs(means[0] - means[1]) <= 3 * np.hypot(errs[0], errs[1]))
