"""Command-line entry point and CSV/JSON emission.

Usage:

    darkpol run --scenario fig2 --out fig2.csv
    darkpol run --scenario protocol --set n_cycles=10 --out protocol.json --format json
    darkpol run --scenario fig4 --config sweep.cfg --out sweep.csv

Configuration files hold one ``key = value`` pair per line with ``#``
comments; command-line ``--set key=value`` pairs override file values, and
explicit flags (--scenario, --out, --format, --dt) override both.  All runs
are deterministic: the same configuration produces byte-identical output.

Exit codes: 0 ok, 2 configuration error, 3 numeric failure, 4 I/O failure.
"""

import argparse
import difflib
import json
import sys
import time
from dataclasses import dataclass, field

from .errors import (
    ConfigError,
    ConstraintInfeasibleError,
    DarkpolError,
    DegenerateRootsError,
    IntegrationError,
    UnsupportedRegimeError,
)
from .experiments import (
    ResultTable,
    SweepSpec,
    scenario_custom,
    scenario_fig2,
    scenario_fig3,
    scenario_fig4,
    scenario_protocol,
)
from .model import ModelSwitches, PhysicalParams, default_params
from .protocol import ProtocolConfig

SCENARIOS = ("fig2", "fig3", "fig4", "protocol", "custom")
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class KeySpec:
    kind: str        # float | int | bool | str | floatlist
    unit: str
    help: str
    choices: tuple | None = None


# Every accepted configuration key, with units.  Rendered into --help.
KEY_SPECS = {
    "scenario": KeySpec("str", "-", "what to run", SCENARIOS),
    "out": KeySpec("str", "path", "output file"),
    "format": KeySpec("str", "-", "output format", FORMATS),
    "dt": KeySpec("float", "us", "integrator step override (auto-refined if too large)"),
    "T": KeySpec("float", "us", "trajectory window for fig2/custom (default 0.5)"),
    # physical parameters
    "D": KeySpec("float", "rad/us", "zero-field splitting"),
    "gamma_e": KeySpec("float", "rad/(us G)", "electron gyromagnetic ratio"),
    "gamma_c": KeySpec("float", "rad/(us G)", "13C gyromagnetic ratio"),
    "Bz": KeySpec("float", "G", "static field along the NV axis"),
    "A_par": KeySpec("float", "rad/us", "longitudinal hyperfine coupling"),
    "A_perp": KeySpec("float", "rad/us", "transverse hyperfine coupling"),
    "Omega1": KeySpec("float", "rad/us", "microwave Rabi frequency"),
    "Omega2": KeySpec("float", "rad/us", "radio-frequency Rabi frequency"),
    "delta": KeySpec("float", "rad/us", "microwave detuning"),
    "Delta": KeySpec("float", "rad/us", "radio-frequency detuning"),
    "kappa": KeySpec("float", "1/us", "pure-dephasing rate"),
    # model switches
    "off_resonant_drives": KeySpec("bool", "flag", "include detuned drive branches"),
    "include_ms_plus": KeySpec("bool", "flag", "keep the ms=+1 manifold coupled"),
    # protocol
    "scheme": KeySpec("str", "-", "pulse scheme", ("simultaneous", "sequential")),
    "n_cycles": KeySpec("int", "-", "number of polarization cycles"),
    "t_pulse": KeySpec("float", "us", "simultaneous pulse duration (default pi/Omega)"),
    "t1": KeySpec("float", "us", "sequential microwave pulse duration"),
    "t2": KeySpec("float", "us", "sequential radio-frequency pulse duration"),
    "initial_nuclear": KeySpec("str", "-", "initial nuclear state", ("mixed", "up", "down")),
    # fig3
    "Omega1_seq": KeySpec("float", "rad/us", "sequential-scheme microwave Rabi (fig3)"),
    "Omega2_seq": KeySpec("float", "rad/us", "sequential-scheme radio-frequency Rabi (fig3)"),
    # fig4 sweep
    "A_values": KeySpec("floatlist", "rad/us", "comma-separated hyperfine grid (fig4)"),
    "kappa_values": KeySpec("floatlist", "1/us", "comma-separated noise grid (fig4)"),
    "rabi_factor": KeySpec("float", "-", "Omega = rabi_factor*|A_par| per sweep point"),
    "n_periods": KeySpec("float", "-", "sweep window in units of pi/Omega"),
    "metric": KeySpec("str", "-", "sweep metric", ("max_p_down", "cycle1_fidelity")),
}

_PARAM_KEYS = ("D", "gamma_e", "gamma_c", "Bz", "A_par", "A_perp",
               "Omega1", "Omega2", "delta", "Delta", "kappa")


@dataclass
class RunConfig:
    """Validated, typed key/value assignments for one run."""

    values: dict = field(default_factory=dict)

    @property
    def scenario(self):
        return self.values.get("scenario")

    def get(self, key, default=None):
        return self.values.get(key, default)


def _parse_value(key: str, raw: str, where: str):
    spec = KEY_SPECS[key]
    raw = raw.strip()
    try:
        if spec.kind == "float":
            return float(raw)
        if spec.kind == "int":
            return int(raw)
        if spec.kind == "bool":
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if spec.kind == "floatlist":
            return tuple(float(part) for part in raw.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse value for {key!r}: {exc}") from None
    value = raw
    if spec.choices is not None and value not in spec.choices:
        raise ConfigError(
            f"{where}: invalid value {value!r} for {key!r}; choices: {', '.join(spec.choices)}"
        )
    return value


def _unknown_key_error(key: str, where: str) -> ConfigError:
    suggestion = difflib.get_close_matches(key, KEY_SPECS, n=1)
    hint = f"; did you mean {suggestion[0]!r}?" if suggestion else ""
    return ConfigError(
        f"{where}: unknown key {key!r}{hint} valid keys: {', '.join(sorted(KEY_SPECS))}"
    )


def _assign(values: dict, key: str, raw: str, where: str):
    if key not in KEY_SPECS:
        raise _unknown_key_error(key, where)
    values[key] = _parse_value(key, raw, where)


def parse_config(text: str) -> RunConfig:
    """Parse ``key = value`` lines with ``#`` comments into a RunConfig."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.rstrip()!r}")
        key, raw = stripped.split("=", 1)
        _assign(values, key.strip(), raw, f"line {lineno}")
    return RunConfig(values)


def _merge_cli(cfg: RunConfig, args) -> RunConfig:
    for pair in args.set or []:
        if "=" not in pair:
            raise ConfigError(f"--set expects key=value, got {pair!r}")
        key, raw = pair.split("=", 1)
        _assign(cfg.values, key.strip(), raw, f"--set {pair!r}")
    if args.scenario:
        _assign(cfg.values, "scenario", args.scenario, "--scenario")
    if args.out:
        cfg.values["out"] = args.out
    if args.format:
        _assign(cfg.values, "format", args.format, "--format")
    if args.dt is not None:
        cfg.values["dt"] = float(args.dt)
    if cfg.scenario is None:
        raise ConfigError("no scenario given (use --scenario or 'scenario = ...' in the config)")
    if not cfg.values.get("out"):
        raise ConfigError("no output path given (use --out)")
    return cfg


def _build_params(cfg: RunConfig) -> PhysicalParams:
    overrides = {k: cfg.values[k] for k in _PARAM_KEYS if k in cfg.values}
    try:
        return default_params().with_(**overrides)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _build_switches(cfg: RunConfig) -> ModelSwitches:
    return ModelSwitches(
        off_resonant_drives=cfg.get("off_resonant_drives", True),
        include_ms_plus=cfg.get("include_ms_plus", True),
    )


def execute(cfg: RunConfig) -> ResultTable:
    """Run the configured scenario and return its table."""
    p = _build_params(cfg)
    switches = _build_switches(cfg)
    dt = cfg.get("dt")
    name = cfg.scenario
    if name == "fig2":
        return scenario_fig2(p, T=cfg.get("T", 0.5), dt=dt, switches=switches)
    if name == "fig3":
        p_seq = p.with_(Omega1=cfg.get("Omega1_seq", 4.3), Omega2=cfg.get("Omega2_seq", 4.3))
        return scenario_fig3(p, p_seq, dt=dt, switches=switches)
    if name == "fig4":
        spec_kwargs = {}
        if "A_values" in cfg.values:
            spec_kwargs["a_values"] = cfg.values["A_values"]
        if "kappa_values" in cfg.values:
            spec_kwargs["kappa_values"] = cfg.values["kappa_values"]
        for key in ("rabi_factor", "n_periods", "metric"):
            if key in cfg.values:
                spec_kwargs[key] = cfg.values[key]
        if dt is not None:
            spec_kwargs["dt"] = dt
        try:
            spec = SweepSpec(**spec_kwargs)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return scenario_fig4(spec, base=p)
    if name == "protocol":
        try:
            pcfg = ProtocolConfig(
                scheme=cfg.get("scheme", "simultaneous"),
                n_cycles=cfg.get("n_cycles", 10),
                t_pulse=cfg.get("t_pulse"),
                t1=cfg.get("t1"),
                t2=cfg.get("t2"),
                initial_nuclear=cfg.get("initial_nuclear", "mixed"),
                switches=switches,
                dt=dt,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return scenario_protocol(p, pcfg)
    if name == "custom":
        return scenario_custom(
            p, T=cfg.get("T", 0.5), dt=dt, switches=switches,
            initial_nuclear=cfg.get("initial_nuclear", "up"),
        )
    raise ConfigError(f"unknown scenario {name!r}; choices: {', '.join(SCENARIOS)}")


def _format_cell(x) -> str:
    # records() hands over plain Python types; bool before int (bool is an int).
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def write_csv(table: ResultTable, path: str):
    keys = list(table.columns)
    lines = [",".join(keys)]
    for rec in table.records():
        lines.append(",".join(_format_cell(rec[k]) for k in keys))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_json(table: ResultTable, path: str):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(table.records(), fh, indent=2)
        fh.write("\n")


def _summary(name: str, table: ResultTable) -> str:
    meta = table.metadata
    if name == "fig2":
        core = (f"nh_peak={meta['nh_peak']:.5f} at t={meta['nh_peak_time']:.4f} us, "
                f"max_gap={meta['max_gap_mdown']:.4f}")
    elif name == "fig3":
        core = (f"sim_max={meta['sim_max_mixed']:.4f} vs "
                f"seq_at_sim_max={meta['seq_at_sim_max_mixed']:.4f} (mixed start)")
    elif name == "fig4":
        core = f"{meta['n_points']} grid points, metric={meta['metric']}"
    elif name == "protocol":
        core = f"p_down {meta['p_down_initial']:.3f} -> {meta['p_down_final']:.6f}"
    else:
        core = f"max_p_down={meta.get('max_p_down', float('nan')):.5f}"
    return core


def _epilog() -> str:
    lines = ["scenarios:"]
    descriptions = {
        "fig2": "three-level populations, non-Hermitian vs exact master equation",
        "fig3": "nuclear p_down vs time, simultaneous vs sequential pulses",
        "fig4": "transfer fidelity vs hyperfine coupling and noise strength",
        "protocol": "repeated polarization cycles with electron reset",
        "custom": "single master-equation trajectory with all populations",
    }
    for name in SCENARIOS:
        lines.append(f"  {name:<10} {descriptions[name]}")
    lines.append("")
    lines.append("config keys (config file or --set key=value):")
    for key, spec in KEY_SPECS.items():
        choice = f" [{'|'.join(spec.choices)}]" if spec.choices else ""
        lines.append(f"  {key:<20} {spec.kind:<9} {spec.unit:<11} {spec.help}{choice}")
    lines.append("")
    lines.append("environment: DARKPOL_THREADS caps fig4 sweep parallelism (default 1)")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="darkpol",
        description="Dark-state nuclear-spin polarization simulator",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=_epilog(),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser(
        "run",
        help="run a scenario and write its table",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=_epilog(),
    )
    run_p.add_argument("--scenario", choices=SCENARIOS, help="scenario to run")
    run_p.add_argument("--config", help="key = value configuration file")
    run_p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config key (repeatable)")
    run_p.add_argument("--out", help="output file path")
    run_p.add_argument("--format", choices=FORMATS, help="output format (default csv)")
    run_p.add_argument("--dt", type=float, help="integrator step in us")
    return parser


def run(cfg: RunConfig) -> int:
    """Execute a validated config: integrate, write the file, print a summary."""
    started = time.perf_counter()
    try:
        table = execute(cfg)
    except ConfigError as exc:
        print(f"darkpol: config error: {exc}", file=sys.stderr)
        return 2
    except (IntegrationError, DegenerateRootsError, UnsupportedRegimeError,
            ConstraintInfeasibleError) as exc:
        print(f"darkpol: numeric failure: {exc}", file=sys.stderr)
        return 3
    out = cfg.values["out"]
    fmt = cfg.get("format", "csv")
    try:
        if fmt == "json":
            write_json(table, out)
        else:
            write_csv(table, out)
    except OSError as exc:
        print(f"darkpol: cannot write {out!r}: {exc}", file=sys.stderr)
        return 4
    elapsed = time.perf_counter() - started
    print(f"{cfg.scenario}: {_summary(cfg.scenario, table)}; "
          f"wrote {out} ({table.n_rows} rows) in {elapsed:.2f} s")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            try:
                with open(args.config, encoding="utf-8") as fh:
                    cfg = parse_config(fh.read())
            except OSError as exc:
                raise ConfigError(f"cannot read config {args.config!r}: {exc}") from None
        else:
            cfg = RunConfig()
        cfg = _merge_cli(cfg, args)
    except ConfigError as exc:
        print(f"darkpol: config error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
