# --------------------------------------------------------------
# Copyright (c) 2024, anisoqed developers
# License: GPLv3 (see LICENSE)
# --------------------------------------------------------------
"""Command-line front end.

    anisoqed [--config run.json] [--out result.json] [--csv table.csv]
             [-v] COMMAND [options]

Every result file echoes the fully-resolved configuration under
"config"; feeding it back through --config reproduces the result.
Exit codes: 0 ok, 2 configuration error, 3 numerical convergence
error, 4 physics validation error.
"""
import argparse
import contextlib
import copy
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from importlib import resources

import numpy as np
import jsonschema

import anisoqed.num as anp

from anisoqed import __version__
from anisoqed.constitutive import (
    ConstitutiveTensors,
    PhysicalConstants,
    SpacetimeMetric,
    metric_to_constitutive,
    validate_onsager,
)
from anisoqed.dispersion import (
    maxwell_residual,
    phase_speed,
    plane_wave_modes,
    solve_branches,
)
from anisoqed.emission import TwoLevelAtom, decay_rate, dipole_angle_sweep
from anisoqed.errors import (
    AnisoError,
    ConfigurationError,
    InvalidInputError,
    OnsagerError,
    SchemaError,
    exit_code,
)
from anisoqed.localfield import CavityConfig, QuadratureSpec, correction_tensors
from anisoqed.misc import diagnosis
from anisoqed.misc.sphere import regulargrid_sphere
from anisoqed.projection import FourierField, decompose, green_scalar_fourier, projector_pair
from anisoqed.wwsim import discretize_modes, evolve, fit_decay

COMMANDS = ("dispersion", "project", "metric", "localfield", "decay", "wwsim")

REQUIRED = {
    "dispersion": ("material",),
    "project": ("material", "q", "field"),
    "metric": ("metric",),
    "localfield": ("material", "omega", "R"),
    "decay": ("material", "omega0", "dipole", "R"),
    "wwsim": ("material", "omega0", "dipole", "window", "modes", "t_final", "dt"),
}

# keys dropped from result files so that reruns are byte-identical
VOLATILE_KEYS = ("time",)


# ---------------------------------------------------------------- schemas


def load_schema(name):
    """Parsed JSON schema shipped with the package."""
    text = resources.files("anisoqed").joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def run_schema(allow_paths=False):
    # the material and metric schemas are inlined as definitions; with
    # allow_paths they may also be given as file names
    schema = load_schema("run")
    material = load_schema("material")
    metric = load_schema("metric")
    for s in (material, metric):
        s.pop("$schema", None)
    schema["definitions"].update(material.pop("definitions"))
    schema["definitions"]["material"] = material
    schema["definitions"]["metric"] = metric
    if allow_paths:
        for key in ("material", "hole", "metric"):
            schema["properties"][key] = {"anyOf": [{"type": "string"}, schema["properties"][key]]}
    return schema


def validate_document(obj, schema, source):
    """Validate `obj` against `schema`, raising SchemaError with the path."""
    validator = jsonschema.Draft7Validator(schema)
    errors = sorted(validator.iter_errors(obj), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        path = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise SchemaError(f"{source}: {path}: {err.message}", path=path)


# ---------------------------------------------------------------- files


def _read_json(path, files=None):
    if files is not None and path in files:
        return copy.deepcopy(files[path])
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except OSError as e:
        raise ConfigurationError(f"cannot read '{path}': {e.strerror}")
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"'{path}' is not valid JSON: {e}")


def material_from_dict(d, source="material"):
    """ConstitutiveTensors from a material document.

    Raises SchemaError on a malformed document and OnsagerError when
    the tensors violate the Onsager relations or positivity.
    """
    validate_document(d, load_schema("material"), source)
    constants = PhysicalConstants(**d.get("constants", {}))
    if d.get("units", "relative") == "SI":
        t = ConstitutiveTensors(d["eps1"], d["mu2"], d.get("eps2"), d.get("mu1"), constants)
    else:
        t = ConstitutiveTensors.from_relative(
            d["eps1"], d["mu2"], d.get("eps2"), d.get("mu1"), constants
        )
    report = validate_onsager(t)
    if not report.ok:
        worst = ", ".join(
            f"{v.constraint} (max deviation {v.max_deviation:.3g})" for v in report.violations
        )
        raise OnsagerError(f"{source} violates the Onsager constraints: {worst}", report)
    return t


def material_to_dict(t):
    """Fully-resolved material document in relative units."""
    rel = t.to_relative()
    out = {k: np.asarray(v).tolist() for k, v in rel.items()}
    out["units"] = "relative"
    out["constants"] = t.constants.to_dict()
    return out


def _resolve_material(d, source):
    # returns (tensors, resolved document); resolution keeps SI files in SI
    t = material_from_dict(d, source)
    resolved = dict(d)
    resolved.setdefault("units", "relative")
    resolved.setdefault("constants", t.constants.to_dict())
    zeros = np.zeros((3, 3)).tolist()
    resolved.setdefault("eps2", zeros)
    resolved.setdefault("mu1", zeros)
    return t, resolved


# ---------------------------------------------------------------- parsing


def _floats(n):
    def parse(s):
        try:
            vals = [float(v) for v in s.split(",")]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {s!r}")
        if len(vals) != n:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {s!r}")
        return vals

    return parse


def _ints(s):
    try:
        return [int(v) for v in s.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="anisoqed",
        description="Quantized modes and spontaneous emission in bi-anisotropic media.",
    )
    parser.add_argument("--config", help="run configuration JSON (run.schema.json)")
    parser.add_argument("--out", help="result JSON path (stdout by default)")
    parser.add_argument("--csv", help="CSV table path (sweeps, trajectories)")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    parser.add_argument("--version", action="version", version=f"anisoqed {__version__}")
    sub = parser.add_subparsers(dest="command")

    def quad_options(p):
        p.add_argument("--n-theta", type=int, dest="n_theta")
        p.add_argument("--n-phi", type=int, dest="n_phi")
        p.add_argument("--radial", choices=("analytic", "quadrature", "eta"))
        p.add_argument("--eta", type=float)
        p.add_argument("--rtol", type=float)

    p = sub.add_parser("dispersion", help="dispersion branches along directions")
    p.add_argument("--material")
    p.add_argument("--qhat", type=_floats(3))
    p.add_argument("--sweep", type=_ints, help="theta-phi grid n_theta,n_phi")

    p = sub.add_parser("project", help="longitudinal/transverse split of a Fourier field")
    p.add_argument("--material")
    p.add_argument("--q", type=_floats(3))
    p.add_argument("--field", type=_floats(2), nargs=3, metavar="RE,IM")

    p = sub.add_parser("metric", help="medium equivalent to a static metric")
    p.add_argument("--metric")
    p.add_argument("--material-out", dest="material_out", help="write the material file")

    p = sub.add_parser("localfield", help="local-field correction tensors")
    p.add_argument("--material")
    p.add_argument("--hole")
    p.add_argument("--omega", type=float)
    p.add_argument("--R", type=float, dest="R")
    quad_options(p)

    p = sub.add_parser("decay", help="golden-rule decay constant")
    p.add_argument("--material")
    p.add_argument("--hole")
    p.add_argument("--omega0", type=float)
    p.add_argument("--dipole", type=_floats(3))
    p.add_argument("--R", type=float, dest="R")
    p.add_argument("--uncorrected", action="store_true", default=None)
    p.add_argument("--sweep-angle", type=int, dest="sweep_angle", metavar="N")
    quad_options(p)

    p = sub.add_parser("wwsim", help="single-excitation dynamics on a discretized continuum")
    p.add_argument("--material")
    p.add_argument("--omega0", type=float)
    p.add_argument("--dipole", type=_floats(3))
    p.add_argument("--window", type=_floats(2))
    p.add_argument("--modes", type=_ints, help="n_omega[,n_theta,n_phi]")
    p.add_argument("--tfinal", type=float, dest="t_final")
    p.add_argument("--dt", type=float)
    p.add_argument("--store-every", type=int, dest="store_every")
    p.add_argument("--fit-window", type=_floats(2), dest="fit_window")
    return parser


@dataclass
class RunConfig:
    """Validated, fully-resolved configuration of one command."""

    command: str
    params: dict
    out: str = None
    csv: str = None
    material_out: str = None
    verbosity: int = 0
    objects: dict = field(default_factory=dict, repr=False)

    def echo(self):
        return dict(self.params, command=self.command)


def _collect_cli(args):
    skip = {"config", "out", "csv", "verbose", "command", "material_out", "uncorrected"}
    quad_keys = ("n_theta", "n_phi", "radial", "eta", "rtol")
    given = {}
    quad = {}
    for k, v in vars(args).items():
        if k in skip or v is None:
            continue
        if k in quad_keys:
            quad[k] = v
        else:
            given[k] = v
    if quad:
        given["quad"] = quad
    if getattr(args, "uncorrected", None):
        given["corrected"] = False
    if "field" in given:
        given["field"] = [list(p) for p in given["field"]]
    if "modes" in given:
        m = given["modes"]
        if len(m) == 1:
            m = [m[0], 2, 2]
        if len(m) != 3:
            raise InvalidInputError("--modes takes n_omega or n_omega,n_theta,n_phi")
        given["modes"] = m
    return given


def parse_config(argv, files=None):
    """Parse the command line and configuration files into a RunConfig.

    Parameters
    ----------
    argv : list of str
    files : dict, optional
        Already-parsed JSON documents keyed by path, used instead of
        reading the file system.

    Returns
    -------
    RunConfig

    Raises
    ------
    ConfigurationError
        Unknown keys, malformed tensors (SchemaError naming the path),
        missing parameters.
    OnsagerError
        Material tensors violating the Onsager relations.
    """
    parser = build_parser()
    args = parser.parse_args(argv)

    params = {}
    if args.config:
        params = _read_json(args.config, files)
        validate_document(params, run_schema(allow_paths=True), args.config)
    cli = _collect_cli(args)
    if "quad" in cli and "quad" in params:
        cli["quad"] = dict(params["quad"], **cli["quad"])
    params.update(cli)

    command = params.pop("command", None)
    if args.command is not None:
        command = args.command
    if command is None:
        raise ConfigurationError("no command given")

    for key in ("material", "hole", "metric"):
        if isinstance(params.get(key), str):
            params[key] = _read_json(params[key], files)

    unknown = set(params) - set(run_schema()["properties"])
    if unknown:
        raise SchemaError(f"unknown key(s): {', '.join(sorted(unknown))}", path=sorted(unknown)[0])
    missing = [k for k in REQUIRED[command] if k not in params]
    if command == "dispersion" and "qhat" not in params and "sweep" not in params:
        missing.append("qhat")
    if missing:
        raise ConfigurationError(f"{command}: missing parameter(s): {', '.join(missing)}")

    objects = {}
    if "material" in params:
        objects["material"], params["material"] = _resolve_material(params["material"], "material")
    if command in ("localfield", "decay"):
        if "hole" in params:
            objects["hole"], params["hole"] = _resolve_material(params["hole"], "hole")
        else:
            objects["hole"] = ConstitutiveTensors.vacuum(objects["material"].constants)
            params["hole"] = material_to_dict(objects["hole"])
        params["quad"] = QuadratureSpec(**params.get("quad", {})).to_dict()
    if command == "decay":
        params.setdefault("corrected", True)
        params.setdefault("sweep_angle", 0)
    if command == "wwsim":
        n_steps = int(round(params["t_final"] / params["dt"]))
        params.setdefault("store_every", max(1, n_steps // 200))
        params.setdefault("fit_window", [0.2 * params["t_final"], 0.8 * params["t_final"]])
    if command == "metric":
        validate_document(params["metric"], load_schema("metric"), "metric")
        objects["metric"] = SpacetimeMetric(params["metric"]["g"])

    config = RunConfig(
        command=command,
        params=params,
        out=args.out,
        csv=args.csv,
        material_out=getattr(args, "material_out", None),
        verbosity=args.verbose,
        objects=objects,
    )
    validate_document(config.echo(), run_schema(), "resolved configuration")
    return config


# ---------------------------------------------------------------- serialization


def to_jsonable(x):
    """Plain JSON structure; complex numbers become [re, im]."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items() if k not in VOLATILE_KEYS}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


def dumps(obj):
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def _write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(buf.getvalue())


# ---------------------------------------------------------------- commands


def _run_dispersion(cfg):
    medium = cfg.objects["material"]
    p = cfg.params
    if "sweep" in p:
        theta, phi, dirs = regulargrid_sphere(*p["sweep"])
    else:
        qhat = np.asarray(p["qhat"], dtype=float)
        dirs = [qhat / anp.norm(qhat)]
        theta = [float(np.arccos(np.clip(dirs[0][2], -1.0, 1.0)))]
        phi = [float(np.arctan2(dirs[0][1], dirs[0][0]))]
    directions = []
    rows = []
    for t, f, qhat in zip(theta, phi, dirs):
        entries = []
        branches = solve_branches(qhat, medium)
        if cfg.verbosity >= 2:
            print(diagnosis.branch_table(branches))
        for b in branches:
            entry = {
                "rho": b.rho,
                "omega": b.omega,
                "lambda_count": b.lambda_count,
                "X": b.X,
                "longitudinal_zero_mode": b.is_longitudinal_zero_mode,
            }
            if not b.is_longitudinal_zero_mode:
                entry["phase_index"] = medium.constants.c / phase_speed(b)
            entries.append(entry)
            for lam in range(b.lambda_count):
                rows.append([t, f, b.rho, lam, b.omega, *b.X[lam]])
        residual = max(
            max(maxwell_residual(m, medium).values()) for m in plane_wave_modes(qhat, 1.0, medium)
        )
        directions.append(
            {"theta": t, "phi": f, "qhat": qhat, "branches": entries, "maxwell_residual": residual}
        )
    csv_table = (["theta", "phi", "branch", "lambda", "omega", "X_x", "X_y", "X_z"], rows)
    return {"magnitude": 1.0, "directions": directions}, csv_table


def _run_project(cfg):
    medium = cfg.objects["material"]
    p = cfg.params
    F = np.array([complex(re, im) for re, im in p["field"]])
    fld = FourierField(p["q"], F)
    F_par, F_perp = decompose(fld, medium.eps1)
    P = projector_pair(fld.q, medium.eps1)
    eps_r = medium.eps1 / medium.constants.eps0
    checks = {
        "idempotence": float(np.max(np.abs(P.P_par @ P.P_par - P.P_par))),
        "complementarity": float(np.max(np.abs(P.P_par + P.P_perp - np.eye(3)))),
        "longitudinal_q": float(np.max(np.abs(P.P_par @ fld.q - fld.q)) / anp.norm(fld.q)),
        "transversality": float(
            abs(fld.q @ eps_r @ F_perp) / max(anp.norm(fld.q) * anp.norm(F), 1e-300)
        ),
    }
    out = {
        "F_par": F_par,
        "F_perp": F_perp,
        "green_scalar": green_scalar_fourier(fld.q, medium.eps1),
        "checks": checks,
    }
    return out, None


def _run_metric(cfg):
    medium = metric_to_constitutive(cfg.objects["metric"])
    report = validate_onsager(medium)
    material = material_to_dict(medium)
    if cfg.material_out:
        with open(cfg.material_out, "w", encoding="utf-8") as f:
            f.write(dumps(material))
    return {"material": material, "onsager": report.to_dict()}, None


def _cavity(cfg):
    return CavityConfig(cfg.params["R"], cfg.objects["material"], cfg.objects["hole"])


def _run_localfield(cfg):
    p = cfg.params
    system = correction_tensors(
        p["omega"], _cavity(cfg), QuadratureSpec(**p["quad"]), verbosity=cfg.verbosity
    )
    out = {
        "Gamma1": system.Gamma1,
        "Delta1": system.Delta1,
        "Gamma2": system.Gamma2,
        "Delta2": system.Delta2,
        "Q": system.Q,
        "diagnostics": system.diagnostics,
    }
    return out, None


def _run_decay(cfg):
    p = cfg.params
    cavity = _cavity(cfg)
    atom = TwoLevelAtom(p["omega0"], p["dipole"])
    quad = QuadratureSpec(**p["quad"])
    result = decay_rate(atom, cavity, quad, corrected=p["corrected"], verbosity=cfg.verbosity)
    if cfg.verbosity >= 1:
        diagnosis.decay_summary(result)
    out = {
        "gamma": result.gamma,
        "population_rate": result.population_rate,
        "gamma_free_space": result.gamma_free_space,
        "gamma_over_free_space": result.gamma_over_free_space,
        "branch_contributions": result.branch_contributions,
        "error_estimate": result.error_estimate,
        "converged": result.converged,
        "convention": "amplitude decay constant; population decays at 2*gamma",
        "diagnostics": result.diagnostics,
    }
    csv_table = None
    if p["sweep_angle"] > 0:
        theta, results = dipole_angle_sweep(
            atom, cavity, quad, n=p["sweep_angle"], corrected=p["corrected"]
        )
        rows = [[t, r.gamma, r.gamma_over_free_space] for t, r in zip(theta, results)]
        out["angle_sweep"] = [
            {"theta": r[0], "gamma": r[1], "gamma_over_free_space": r[2]} for r in rows
        ]
        csv_table = (["theta", "gamma", "gamma_over_free_space"], rows)
    return out, csv_table


def _run_wwsim(cfg):
    p = cfg.params
    medium = cfg.objects["material"]
    atom = TwoLevelAtom(p["omega0"], p["dipole"])
    modes = discretize_modes(medium, atom, p["window"], p["modes"])
    traj = evolve(modes, atom, p["t_final"], p["dt"], p["store_every"], verbosity=cfg.verbosity)
    fit = fit_decay(traj, p["fit_window"])
    golden = modes.golden_rule_rate()
    if cfg.verbosity >= 1:
        diagnosis.fit_summary(fit, golden)
    out = {
        "gamma_fit": fit.gamma_fit,
        "delta_omega_fit": fit.delta_omega_fit,
        "fit_residual": fit.residual,
        "fit_window": fit.window,
        "golden_rule_rate": golden,
        "relative_deviation": abs(fit.gamma_fit - golden) / golden if golden > 0 else None,
        "norm_drift": traj.norm_drift,
        "n_modes": len(modes),
        "diagnostics": traj.diagnostics,
    }
    idx = np.searchsorted(traj.times, traj.snapshot_times)
    rows = [
        [t, c.real, c.imag, n] for t, c, n in zip(traj.snapshot_times, traj.c[idx], traj.norm)
    ]
    return out, (["t", "re_c", "im_c", "norm"], rows)


RUNNERS = {
    "dispersion": _run_dispersion,
    "project": _run_project,
    "metric": _run_metric,
    "localfield": _run_localfield,
    "decay": _run_decay,
    "wwsim": _run_wwsim,
}


def run(config):
    """Execute a RunConfig and write its artifacts.

    Returns
    -------
    int
        Exit status (0).
    """
    if config.verbosity >= 1:
        print(f"anisoqed {config.command}...", file=sys.stderr)
    # progress and summaries go to stderr, stdout may carry the result
    with contextlib.redirect_stdout(sys.stderr):
        result, table = RUNNERS[config.command](config)
    document = {"version": __version__, "config": config.echo(), "result": result}
    text = dumps(document)
    if config.out:
        with open(config.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    if config.csv and table is not None:
        _write_csv(config.csv, *table)
    return 0


def main(argv=None):
    """Console entry point; returns the exit code."""
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        config = parse_config(argv)
        return run(config)
    except SystemExit as e:
        # argparse usage errors and --help
        return e.code if isinstance(e.code, int) else 2
    except AnisoError as e:
        print(f"anisoqed: error: {e}", file=sys.stderr)
        return exit_code(e)


if __name__ == "__main__":
    sys.exit(main())
