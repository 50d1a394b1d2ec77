"""Command-line front end.

Subcommands: steady-state, evolve, traj count, traj homodyne, ensemble,
wigner, reproduce {fig1a, fig1bc, fig2}.  Runs are configured by an INI
file (flat key = value under [run], [params], [output]) plus flag
overrides, and every run echoes its fully resolved configuration to the
output directory.  Scenario presets pin the physical parameters and
refuse silent changes: pass --override to depart from a preset.

Exit codes: 0 success, 2 configuration error, 3 numerical failure (an
error.json with machine-readable details is left in the output directory).
"""

import argparse
import configparser
import io
import json
import os
import sys
import time
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import __version__
from .analysis import (
    detect_switches,
    ensemble_average,
    histogram_payload,
    stationary_histogram,
    switch_report_payload,
    wigner,
)
from .counting import run_counting
from .errors import KerrTrajError
from .fock import density_from_state, fock_state, number_op, parity_op, quadratures
from .homodyne import run_homodyne
from .master import evolve_me, fit_two_component, liouvillian_for, steady_state
from .model import ModelParams
from .record import TIME_UNIT_COMMENT, write_events_json, write_metadata_json, write_record_csv
from .svgplot import heatmap_svg, line_plot_svg

__all__ = ["ConfigError", "RunConfig", "parse_config", "emit_config", "run", "main"]

OUTPUT_DIR_ENV = "KERRTRAJ_OUTPUT_DIR"

SCENARIOS = (
    "fig1a_counting",
    "fig1bc_homodyne",
    "fig2a_counting_1ph",
    "fig2b_homodyne_1ph",
    "steady_state",
    "me_evolve",
    "ensemble",
    "wigner",
    "custom",
)

_TWO_PHOTON = {"U": 1.0, "G": 5.0, "F": 0.0, "gamma": 0.1, "eta": 1.0, "n_max": 15}
_ONE_PHOTON = {"U": 1.0, "G": 0.0, "F": 5.0, "gamma": 0.1, "eta": 1.0, "n_max": 15}

# Per-scenario parameter presets and run defaults.  The fig* presets carry
# pinned=True: their parameters may only be changed together with
# --override.
_SCENARIO_TABLE = {
    "fig1a_counting": dict(params=_TWO_PHOTON, pinned=True, action="traj_counting", dt=1e-3),
    "fig1bc_homodyne": dict(params=_TWO_PHOTON, pinned=True, action="traj_homodyne", dt=1e-4),
    "fig2a_counting_1ph": dict(params=_ONE_PHOTON, pinned=True, action="traj_counting", dt=1e-3),
    "fig2b_homodyne_1ph": dict(params=_ONE_PHOTON, pinned=True, action="traj_homodyne", dt=1e-4),
    "steady_state": dict(params=_TWO_PHOTON, pinned=False, action="steady_state", dt=1e-3),
    "me_evolve": dict(params=_TWO_PHOTON, pinned=False, action="evolve", dt=1e-3),
    "ensemble": dict(params=_TWO_PHOTON, pinned=False, action="ensemble", dt=1e-3),
    "wigner": dict(params=_TWO_PHOTON, pinned=False, action="wigner", dt=1e-3),
    "custom": dict(params=None, pinned=False, action=None, dt=1e-3),
}

_FLOAT_KEYS = {
    ("run", "t_final"), ("run", "dt"), ("run", "sample_every"),
    ("params", "U"), ("params", "G"), ("params", "F"),
    ("params", "gamma"), ("params", "eta"),
}
_INT_KEYS = {("run", "n_traj"), ("run", "seed"), ("run", "workers"), ("params", "n_max")}
_STR_KEYS = {("run", "scenario"), ("run", "protocol"), ("output", "dir")}
_ALL_KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS


class ConfigError(Exception):
    """Invalid configuration file or flags."""


@dataclass(frozen=True)
class RunConfig:
    scenario: str = "custom"
    params: ModelParams = ModelParams(**_TWO_PHOTON)
    t_final: float = 500.0
    dt: float = 1e-3
    sample_every: float = 0.1
    n_traj: int = 500
    seed: int = 0
    workers: int = 1
    protocol: str = "counting"  # ensemble scenario only
    output_dir: str = "kerrtraj-out"


def _coerce(section, key, raw):
    if (section, key) in _FLOAT_KEYS:
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"key '{section}.{key}': expected a number, got {raw!r}") from None
    if (section, key) in _INT_KEYS:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"key '{section}.{key}': expected an integer, got {raw!r}") from None
    return raw


def _read_ini(text):
    cp = configparser.ConfigParser()
    cp.optionxform = str  # keep key case (U vs u)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    values = {}
    for section in cp.sections():
        if section not in ("run", "params", "output"):
            raise ConfigError(f"unknown section '[{section}]'")
        for key, raw in cp.items(section):
            if (section, key) not in _ALL_KEYS:
                raise ConfigError(f"unknown key '{section}.{key}'")
            values[(section, key)] = _coerce(section, key, raw)
    return values


def parse_config(path=None, overrides=None, allow_override=False) -> RunConfig:
    """Resolve file values, flag overrides and scenario presets into a RunConfig.

    ``overrides`` maps "section.key" strings to raw string values (flags
    beat file keys).  Unknown keys, type mismatches and invariant
    violations raise :class:`ConfigError` naming the offending key.
    """
    values = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                values = _read_ini(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
    for dotted, raw in (overrides or {}).items():
        if dotted.count(".") != 1:
            raise ConfigError(f"override {dotted!r} must look like section.key")
        section, key = dotted.split(".")
        if (section, key) not in _ALL_KEYS:
            raise ConfigError(f"unknown key '{section}.{key}'")
        values[(section, key)] = _coerce(section, key, str(raw))

    scenario = values.get(("run", "scenario"), "custom")
    if scenario not in SCENARIOS:
        raise ConfigError(f"key 'run.scenario': unknown scenario {scenario!r}")
    preset = _SCENARIO_TABLE[scenario]

    base = RunConfig()
    param_values = dict(_TWO_PHOTON if preset["params"] is None else preset["params"])
    if preset["params"] is not None and preset["pinned"]:
        for name in param_values:
            given = values.get(("params", name))
            if given is not None and given != param_values[name] and not allow_override:
                raise ConfigError(
                    f"key 'params.{name}': scenario {scenario!r} pins {name}="
                    f"{param_values[name]!r}; pass --override to change it"
                )
    for name in param_values:
        if ("params", name) in values:
            param_values[name] = values[("params", name)]
    if param_values["gamma"] < 0:
        raise ConfigError(f"key 'params.gamma': must be >= 0, got {param_values['gamma']}")
    if param_values["eta"] < 0:
        raise ConfigError(f"key 'params.eta': must be >= 0, got {param_values['eta']}")
    if param_values["n_max"] < 1:
        raise ConfigError(f"key 'params.n_max': must be >= 1, got {param_values['n_max']}")

    def run_val(key, default):
        return values.get(("run", key), default)

    protocol = run_val("protocol", base.protocol)
    if protocol not in ("counting", "homodyne"):
        raise ConfigError(f"key 'run.protocol': must be counting or homodyne, got {protocol!r}")
    config = RunConfig(
        scenario=scenario,
        params=ModelParams(**param_values),
        t_final=run_val("t_final", base.t_final),
        dt=run_val("dt", preset["dt"]),
        sample_every=run_val("sample_every", base.sample_every),
        n_traj=run_val("n_traj", base.n_traj),
        seed=run_val("seed", base.seed),
        workers=run_val("workers", base.workers),
        protocol=protocol,
        output_dir=values.get(("output", "dir"), os.environ.get(OUTPUT_DIR_ENV, base.output_dir)),
    )
    if config.t_final <= 0:
        raise ConfigError(f"key 'run.t_final': must be > 0, got {config.t_final}")
    if config.dt <= 0:
        raise ConfigError(f"key 'run.dt': must be > 0, got {config.dt}")
    if config.sample_every < config.dt:
        raise ConfigError("key 'run.sample_every': must be >= dt")
    if config.n_traj < 1:
        raise ConfigError(f"key 'run.n_traj': must be >= 1, got {config.n_traj}")
    if config.seed < 0:
        raise ConfigError(f"key 'run.seed': must be >= 0, got {config.seed}")
    if config.workers < 1:
        raise ConfigError(f"key 'run.workers': must be >= 1, got {config.workers}")
    return config


def emit_config(config: RunConfig) -> str:
    """Serialize a RunConfig to INI text; parse_config inverts this exactly."""
    cp = configparser.ConfigParser()
    cp.optionxform = str
    cp["run"] = {
        "scenario": config.scenario,
        "t_final": repr(config.t_final),
        "dt": repr(config.dt),
        "sample_every": repr(config.sample_every),
        "n_traj": str(config.n_traj),
        "seed": str(config.seed),
        "workers": str(config.workers),
        "protocol": config.protocol,
    }
    cp["params"] = {k: repr(v) if isinstance(v, float) else str(v) for k, v in asdict(config.params).items()}
    cp["output"] = {"dir": config.output_dir}
    buf = io.StringIO()
    cp.write(buf)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Scenario executors

def _rho_observables(rhos, n_max):
    x_op, p_op = quadratures(n_max)
    n_op, par_op = number_op(n_max), parity_op(n_max)
    out = {}
    for name, op in (("x", x_op), ("p", p_op), ("parity", par_op), ("n", n_op)):
        out[name] = np.array([np.trace(r @ op).real for r in rhos])
    return out


def _drive_kind(params: ModelParams) -> str:
    return "one_photon" if (params.F != 0.0 and params.G == 0.0) else "two_photon"


def _steady_state_payload(params: ModelParams):
    L = liouvillian_for(params, _drive_kind(params))
    rho = steady_state(L)
    n_mean = float(np.trace(rho @ number_op(params.n_max)).real)
    fit = fit_two_component(rho)
    payload = {
        "n_mean": n_mean,
        "purity": float(np.trace(rho @ rho).real),
        "fit_applicable": fit is not None,
    }
    if fit is not None:
        payload.update(
            p_plus=fit.p_plus,
            p_minus=fit.p_minus,
            alpha_re=fit.alpha.real,
            alpha_im=fit.alpha.imag,
            fidelity=fit.fidelity,
        )
    return rho, payload


def _exec_steady_state(config, outdir):
    _, payload = _steady_state_payload(config.params)
    path = os.path.join(outdir, "steady_state.json")
    _dump_json(payload, path)
    return [path]


def _exec_traj(config, outdir, protocol):
    runner = run_counting if protocol == "counting" else run_homodyne
    rec = runner(
        config.params,
        t_final=config.t_final,
        dt=config.dt,
        sample_every=config.sample_every,
        seed=config.seed,
    )
    csv_path = os.path.join(outdir, "trajectory.csv")
    write_record_csv(rec, csv_path)
    meta_path = os.path.join(outdir, "run_meta.json")
    write_metadata_json(rec, meta_path)
    quad_svg = os.path.join(outdir, "quadratures.svg")
    line_plot_svg(
        [(rec.sample_times, rec.x, "&lt;x&gt;"), (rec.sample_times, rec.p, "&lt;p&gt;")],
        quad_svg,
        y_label="quadratures",
        title=f"{protocol} trajectory, seed {config.seed}",
    )
    par_svg = os.path.join(outdir, "parity.svg")
    line_plot_svg(
        [(rec.sample_times, rec.parity, "&lt;parity&gt;")],
        par_svg,
        y_label="parity",
        title=f"{protocol} trajectory, seed {config.seed}",
    )
    artifacts = [csv_path, meta_path, quad_svg, par_svg]
    if protocol == "counting":
        ev_path = os.path.join(outdir, "events.json")
        write_events_json(rec, ev_path)
        artifacts.append(ev_path)

    # switch statistics and stationary histograms of the record
    burn_in = min(50.0, 0.5 * config.t_final)
    analysis = {"burn_in": burn_in}
    for name, series in (("x", rec.x), ("parity", rec.parity)):
        edges, counts = stationary_histogram(rec.sample_times, series, t_burn_in=burn_in)
        analysis[f"{name}_histogram"] = histogram_payload(edges, counts)
    if protocol == "counting":
        report = detect_switches(rec.parity, rec.sample_times, level=0.99)
        analysis["parity_switches"] = switch_report_payload(report)
    else:
        fit = fit_two_component(steady_state(liouvillian_for(config.params, _drive_kind(config.params))))
        if fit is not None and abs(fit.alpha.real) > 1e-6:
            report = detect_switches(rec.x, rec.sample_times, level=abs(fit.alpha.real))
            analysis["quadrature_switches"] = switch_report_payload(report)
    ana_path = os.path.join(outdir, "analysis.json")
    _dump_json(analysis, ana_path)
    artifacts.append(ana_path)
    return artifacts


def _exec_evolve(config, outdir):
    params = config.params
    L = liouvillian_for(params, _drive_kind(params))
    rho0 = density_from_state(fock_state(0, params.n_max))
    times, rhos = evolve_me(rho0, L, t_final=config.t_final, dt=config.dt, sample_every=config.sample_every)
    obs = _rho_observables(rhos, params.n_max)
    csv_path = os.path.join(outdir, "evolve.csv")
    _write_table_csv(csv_path, times, [("x", obs["x"]), ("p", obs["p"]), ("parity", obs["parity"]), ("n", obs["n"])])
    svg_path = os.path.join(outdir, "evolve.svg")
    line_plot_svg(
        [(times, obs["n"], "&lt;n&gt;"), (times, obs["parity"], "&lt;parity&gt;")],
        svg_path,
        y_label="",
        title="master-equation evolution",
    )
    return [csv_path, svg_path]


def _exec_ensemble(config, outdir):
    t_grid = np.arange(0.0, config.t_final + 0.5 * config.sample_every, config.sample_every)
    res = ensemble_average(
        config.protocol,
        config.params,
        n_traj=config.n_traj,
        t_grid=t_grid,
        seed=config.seed,
        dt=config.dt,
        workers=config.workers,
    )
    cols = []
    for name in ("x", "p", "parity", "n"):
        cols.append((name, res.means[name]))
        cols.append((f"{name}_se", res.std_errors[name]))
    csv_path = os.path.join(outdir, "ensemble.csv")
    _write_table_csv(csv_path, res.times, cols)
    meta_path = os.path.join(outdir, "ensemble.json")
    _dump_json(
        {"protocol": res.protocol, "n_traj": res.n_traj, "seed": res.seed, "dt": res.dt},
        meta_path,
    )
    svg_path = os.path.join(outdir, "ensemble.svg")
    line_plot_svg(
        [(res.times, res.means["n"], "&lt;n&gt;"), (res.times, res.means["parity"], "&lt;parity&gt;")],
        svg_path,
        y_label="ensemble mean",
        title=f"{res.protocol} ensemble, {res.n_traj} trajectories",
    )
    return [csv_path, meta_path, svg_path]


def _exec_wigner(config, outdir):
    rho, payload = _steady_state_payload(config.params)
    grid = wigner(rho)
    csv_path = os.path.join(outdir, "wigner.csv")
    lines = [TIME_UNIT_COMMENT, "x,p,W"]
    for i, xv in enumerate(grid.x_axis):
        for j, pv in enumerate(grid.p_axis):
            lines.append(f"{xv:.17g},{pv:.17g},{grid.values[i, j]:.17g}")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    svg_path = os.path.join(outdir, "wigner.svg")
    heatmap_svg(grid.x_axis, grid.p_axis, grid.values, svg_path, title="steady-state Wigner function")
    meta_path = os.path.join(outdir, "steady_state.json")
    _dump_json(payload, meta_path)
    return [csv_path, svg_path, meta_path]


_ACTIONS = {
    "steady_state": _exec_steady_state,
    "evolve": _exec_evolve,
    "traj_counting": lambda c, d: _exec_traj(c, d, "counting"),
    "traj_homodyne": lambda c, d: _exec_traj(c, d, "homodyne"),
    "ensemble": _exec_ensemble,
    "wigner": _exec_wigner,
}


def run(config: RunConfig, action: str) -> int:
    """Execute one scenario; writes artifacts plus a manifest, returns 0."""
    outdir = config.output_dir
    os.makedirs(outdir, exist_ok=True)
    with open(os.path.join(outdir, "resolved_config.ini"), "w", encoding="utf-8") as fh:
        fh.write(emit_config(config))
    t0 = time.perf_counter()
    artifacts = _ACTIONS[action](config, outdir)
    wall = time.perf_counter() - t0
    manifest = {
        "scenario": config.scenario,
        "action": action,
        "seed": config.seed,
        "params": asdict(config.params),
        "versions": {
            "kerrtraj": __version__,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
        },
        "wall_time_s": wall,
        "artifacts": [os.path.basename(p) for p in artifacts],
    }
    _dump_json(manifest, os.path.join(outdir, "manifest.json"))
    return 0


def _dump_json(payload, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _write_table_csv(path, times, named_cols):
    header = "t," + ",".join(name for name, _ in named_cols)
    lines = [TIME_UNIT_COMMENT, header]
    for i, t in enumerate(times):
        row = [format(float(t), ".17g")] + [format(float(col[i]), ".17g") for _, col in named_cols]
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Argument parsing

def _add_common(sp):
    sp.add_argument("--config", help="INI configuration file")
    sp.add_argument("--output-dir", help="artifact directory (default: $KERRTRAJ_OUTPUT_DIR or ./kerrtraj-out)")
    sp.add_argument("--scenario", help="scenario preset name")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--t-final", type=float)
    sp.add_argument("--dt", type=float)
    sp.add_argument("--sample-every", type=float)
    sp.add_argument("--n-traj", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--override", action="store_true", help="allow changing scenario-pinned parameters")
    sp.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE", help="override any config key")


def _overrides_from_args(args, scenario_default=None, protocol=None):
    ov = {}
    if scenario_default is not None and args.scenario is None:
        ov["run.scenario"] = scenario_default
    if args.scenario is not None:
        ov["run.scenario"] = args.scenario
    for flag, key in (
        ("seed", "run.seed"),
        ("t_final", "run.t_final"),
        ("dt", "run.dt"),
        ("sample_every", "run.sample_every"),
        ("n_traj", "run.n_traj"),
        ("workers", "run.workers"),
    ):
        val = getattr(args, flag)
        if val is not None:
            ov[key] = str(val)
    if args.output_dir is not None:
        ov["output.dir"] = args.output_dir
    if protocol is not None:
        ov["run.protocol"] = protocol
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects SECTION.KEY=VALUE, got {item!r}")
        dotted, raw = item.split("=", 1)
        ov[dotted.strip()] = raw.strip()
    return ov


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="kerrtraj",
        description="Quantum trajectories of a two-photon-driven dissipative Kerr resonator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("steady-state", help="Liouvillian steady state and two-component fit")
    _add_common(sp)
    sp.set_defaults(action="steady_state", scenario_default="steady_state")

    sp = sub.add_parser("evolve", help="master-equation time evolution")
    _add_common(sp)
    sp.set_defaults(action="evolve", scenario_default="me_evolve")

    sp = sub.add_parser("traj", help="single quantum trajectory")
    traj_sub = sp.add_subparsers(dest="protocol_cmd", required=True)
    for name, action in (("count", "traj_counting"), ("homodyne", "traj_homodyne")):
        tp = traj_sub.add_parser(name)
        _add_common(tp)
        tp.set_defaults(action=action, scenario_default="custom")

    sp = sub.add_parser("ensemble", help="trajectory ensemble averaged on a time grid")
    _add_common(sp)
    sp.add_argument("--protocol", choices=("counting", "homodyne"))
    sp.set_defaults(action="ensemble", scenario_default="ensemble")

    sp = sub.add_parser("wigner", help="Wigner function of the steady state")
    _add_common(sp)
    sp.set_defaults(action="wigner", scenario_default="wigner")

    sp = sub.add_parser("reproduce", help="rerun a headline scenario preset")
    sp.add_argument("figure", choices=("fig1a", "fig1bc", "fig2"))
    _add_common(sp)
    sp.set_defaults(action="reproduce", scenario_default=None)
    return parser


_SCENARIO_ACTION_FAMILY = {
    "traj_counting": {"fig1a_counting", "fig2a_counting_1ph", "custom"},
    "traj_homodyne": {"fig1bc_homodyne", "fig2b_homodyne_1ph", "custom"},
}


def _dispatch(args) -> int:
    if args.action == "reproduce":
        mapping = {
            "fig1a": [("fig1a_counting", "traj_counting", "")],
            "fig1bc": [("fig1bc_homodyne", "traj_homodyne", "")],
            "fig2": [
                ("fig2a_counting_1ph", "traj_counting", "fig2a"),
                ("fig2b_homodyne_1ph", "traj_homodyne", "fig2b"),
            ],
        }
        for scenario, action, subdir in mapping[args.figure]:
            ov = _overrides_from_args(args, scenario_default=scenario)
            ov["run.scenario"] = scenario
            config = parse_config(args.config, ov, allow_override=args.override)
            if subdir:
                config = replace(config, output_dir=os.path.join(config.output_dir, subdir))
            run(config, action)
        return 0

    protocol = getattr(args, "protocol", None) if args.action == "ensemble" else None
    ov = _overrides_from_args(args, scenario_default=args.scenario_default, protocol=protocol)
    config = parse_config(args.config, ov, allow_override=args.override)
    if args.action in _SCENARIO_ACTION_FAMILY and config.scenario not in _SCENARIO_ACTION_FAMILY[args.action]:
        raise ConfigError(
            f"scenario {config.scenario!r} does not belong to this subcommand"
        )
    return run(config, args.action)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (KerrTrajError, ValueError, FloatingPointError) as exc:
        outdir = getattr(args, "output_dir", None) or os.environ.get(OUTPUT_DIR_ENV, "kerrtraj-out")
        try:
            os.makedirs(outdir, exist_ok=True)
            _dump_json({"error": type(exc).__name__, "message": str(exc)}, os.path.join(outdir, "error.json"))
        except OSError:
            pass
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
