"""Command-line front end: run scenarios, sweep parameters, print analytic rates.

Each run writes a bundle directory:

    timeseries.csv     time column + one probability column per basis state
    summary.json       headline metrics (recomputable from the CSV where
                       probability-based; final amplitudes included so phases
                       and fidelities can be re-derived too)
    scenario.json      the fully resolved configuration (re-runnable)
    provenance.json    tool version, timestamp, config hash, kernel backend

Exit codes: 0 success, 2 unknown scenario, 3 invalid override, 4 calibration
failure, 5 integration failure (norm drift), 1 anything else.
"""

from __future__ import annotations

import hashlib
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import click

from . import __version__
from ._backend import DEFAULT_BACKEND
from .evolve import NormDriftError
from .perturbation import CouplingParams, rates_report
from .scenarios import (
    CalibrationError,
    Scenario,
    calibrate_bell_time,
    get_scenario,
    run as run_scenario,
    scenario_names,
)

EXIT_UNKNOWN_SCENARIO = 2
EXIT_BAD_OVERRIDE = 3
EXIT_CALIBRATION = 4
EXIT_INTEGRATION = 5


class CliError(click.ClickException):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code

    def show(self, file=None):
        payload = {"error": self.message, "code": self.exit_code}
        click.echo(json.dumps(payload), err=True)


def _load_scenario(ref: str) -> Scenario:
    path = Path(ref)
    if path.suffix == ".json" or path.exists():
        try:
            with open(path, "r", encoding="utf-8") as fh:
                return Scenario.from_config(json.load(fh))
        except FileNotFoundError:
            raise CliError(f"config file {ref!r} not found", EXIT_UNKNOWN_SCENARIO)
        except (json.JSONDecodeError, KeyError, ValueError) as exc:
            raise CliError(f"invalid scenario config {ref!r}: {exc}", EXIT_UNKNOWN_SCENARIO)
    try:
        return get_scenario(ref)
    except KeyError as exc:
        raise CliError(str(exc.args[0]), EXIT_UNKNOWN_SCENARIO)


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _apply_override(config: dict, key: str, value) -> None:
    """Set a dotted-path key; bare keys resolve into spec/ramp/integrator sections."""
    if "." not in key:
        spec = config["spec"]
        if key in spec and key != "ramp":
            spec[key] = value
            return
        if key in spec["ramp"]:
            spec["ramp"][key] = value
            return
        if key in config["integrator"]:
            config["integrator"][key] = value
            return
        if key in config and not isinstance(config[key], (dict, list)):
            config[key] = value
            return
        raise KeyError(key)
    node = config
    parts = key.split(".")
    for part in parts[:-1]:
        if not isinstance(node, dict) or part not in node:
            raise KeyError(key)
        node = node[part]
    if not isinstance(node, dict) or parts[-1] not in node:
        raise KeyError(key)
    node[parts[-1]] = value


def _with_overrides(scenario: Scenario, overrides: tuple[str, ...]) -> Scenario:
    if not overrides:
        return scenario
    config = scenario.to_config()
    for item in overrides:
        if "=" not in item:
            raise CliError(f"override {item!r} is not of the form key=value", EXIT_BAD_OVERRIDE)
        key, _, raw = item.partition("=")
        try:
            _apply_override(config, key.strip(), _parse_value(raw.strip()))
        except KeyError:
            raise CliError(f"unknown override key {key.strip()!r}", EXIT_BAD_OVERRIDE)
    try:
        return Scenario.from_config(config)
    except (ValueError, KeyError) as exc:
        raise CliError(f"override produced an invalid config: {exc}", EXIT_BAD_OVERRIDE)


def _config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(canon).hexdigest()


def _write_bundle(out_dir: Path, scenario: Scenario, series, summary) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "timeseries.csv", "w", encoding="utf-8", newline="\n") as fh:
        series.write_csv(fh)
    config = scenario.to_config()
    with open(out_dir / "scenario.json", "w", encoding="utf-8") as fh:
        json.dump(config, fh, indent=2, sort_keys=True)
    with open(out_dir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary.to_dict(), fh, indent=2, sort_keys=True)
    provenance = {
        "tool": "zenophot",
        "version": __version__,
        "backend": DEFAULT_BACKEND,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "config_sha256": _config_hash(config),
    }
    with open(out_dir / "provenance.json", "w", encoding="utf-8") as fh:
        json.dump(provenance, fh, indent=2, sort_keys=True)
    return out_dir


@click.group()
@click.version_option(__version__)
def main():
    """Simulate measurement-suppressed photon bunching in coupled waveguides."""


@main.command("list")
def cmd_list():
    """List registered scenarios."""
    for name in scenario_names():
        click.echo(f"{name:8s} {get_scenario(name).description}")


@main.command("run")
@click.argument("scenario")
@click.option("--out", type=click.Path(path_type=Path), default=None,
              help="Directory for the output bundle (default: runs/<name>).")
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE",
              help="Override a config value (dotted path or bare field name).")
@click.option("--dt", type=float, default=None, help="Integrator step size.")
@click.option("--stride", type=int, default=None, help="Record every k-th step.")
@click.option("--frame", type=click.Choice(["rotating", "lab"]), default="rotating",
              help="Subtract the carrier frequency from the diagonal (default) or not.")
@click.option("--calibrate/--no-calibrate", default=False,
              help="Re-run the plateau calibration before evolving.")
def cmd_run(scenario, out, overrides, dt, stride, frame, calibrate):
    """Run a scenario (registered name or JSON config path) and write its bundle."""
    sc = _with_overrides(_load_scenario(scenario), overrides)
    if calibrate:
        try:
            sc, info = calibrate_bell_time(sc)
            click.echo(f"calibrated plateau: {info['plateau']:.3f} "
                       f"({info['evaluations']} evaluations)")
        except CalibrationError as exc:
            raise CliError(str(exc), EXIT_CALIBRATION)
    try:
        series, summary = run_scenario(sc, dt=dt, stride=stride,
                                       rotating=(frame == "rotating"))
    except NormDriftError as exc:
        raise CliError(str(exc), EXIT_INTEGRATION)
    out_dir = out if out is not None else Path("runs") / sc.name
    _write_bundle(out_dir, sc, series, summary)
    click.echo(json.dumps(summary.to_dict(), indent=2, sort_keys=True))
    click.echo(f"bundle written to {out_dir}", err=True)


@main.command("sweep")
@click.argument("scenario")
@click.option("--param", required=True, metavar="KEY",
              help="Config key to sweep (dotted path or bare field name).")
@click.option("--min", "lo", type=float, required=True)
@click.option("--max", "hi", type=float, required=True)
@click.option("--samples", type=int, default=10)
@click.option("--out", type=click.Path(path_type=Path), default=None,
              help="CSV output path (default: stdout).")
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE")
def cmd_sweep(scenario, param, lo, hi, samples, out, overrides):
    """Run a scenario once per parameter value; one summary row per sample."""
    if samples < 1:
        raise CliError("samples must be >= 1", EXIT_BAD_OVERRIDE)
    base = _with_overrides(_load_scenario(scenario), overrides)
    values = [lo + (hi - lo) * k / max(1, samples - 1) for k in range(samples)]
    if samples == 1:
        values = [lo]

    rows = []
    for v in values:
        sc = _with_overrides(base, (f"{param}={v!r}",))
        try:
            _, summary = run_scenario(sc)
        except NormDriftError as exc:
            raise CliError(str(exc), EXIT_INTEGRATION)
        row = {"value": v}
        for lab, p in summary.final_probabilities.items():
            row[f"P[{lab}]"] = p
        row["norm_drift"] = summary.norm_drift
        row["max_bunched"] = summary.max_bunched_probability
        for key in ("final_fidelity", "relative_phase", "concurrence", "w_fidelity"):
            val = getattr(summary, key)
            if val is not None:
                row[key] = val
        for key in ("max_swap_probability", "residence"):
            if key in summary.extras:
                row[key] = summary.extras[key]
        rows.append(row)

    header = [param] + [k for k in rows[0] if k != "value"]
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join([f"{row['value']:.12g}"]
                              + [f"{row[k]:.12g}" for k in header[1:]]))
    text = "\n".join(lines) + "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
        click.echo(f"sweep written to {out}", err=True)


@main.command("rates")
@click.option("--theta", type=float, default=1.0 / 164.0, show_default=True)
@click.option("--lam", type=float, default=0.2, show_default=True)
@click.option("--delta", type=float, default=1.0, show_default=True)
@click.option("--t", "t_", type=float, default=0.0, show_default=True)
@click.option("--delta-omega-r", type=float, default=0.0, show_default=True)
def cmd_rates(theta, lam, delta, t_, delta_omega_r):
    """Print every analytic transition quantity as JSON."""
    params = CouplingParams(theta=theta, lam=lam, delta=delta, t=t_,
                            delta_omega_r=delta_omega_r)
    click.echo(json.dumps(rates_report(params), indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
