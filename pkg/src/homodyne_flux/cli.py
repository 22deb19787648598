"""``homodyne-flux`` command line: sweep, report, stats, selftest."""
from __future__ import annotations

import json
import os
import sys
import time

import click

from .config import ConfigError, apply_override, load_config, spec_from_config
from .harness import model_report, rows_from_csv, rows_to_csv, run_sweep, stats_report
from .selftest import run_selftest


def _fail(kind, message, code=2):
    click.echo(json.dumps({"error": kind, "message": message}), err=True)
    sys.exit(code)


def _spec(config_path, seed, overrides, repetitions=None, flux_points=None):
    try:
        cfg = load_config(config_path)
        for item in overrides:
            apply_override(cfg, item)
        if repetitions is not None:
            cfg.setdefault("sweep", {})["repetitions"] = repetitions
        if flux_points:
            try:
                pts = [float(x) for x in flux_points.split(",") if x.strip()]
            except ValueError as exc:
                raise ConfigError(f"bad --flux-points: {exc}") from exc
            cfg.setdefault("sweep", {})["flux_points"] = pts
            for k in ("flux_min", "flux_max", "n_points"):
                cfg["sweep"].pop(k, None)
        return spec_from_config(cfg, seed)
    except ConfigError as exc:
        _fail("invalid_config", str(exc))


def _write(text, out):
    if out in (None, "-"):
        click.echo(text, nl=False)
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


config_option = click.option("--config", "config_path", type=click.Path(dir_okay=False),
                             help="JSON config file.")
seed_option = click.option("--seed", type=click.IntRange(min=0), required=True,
                           help="Master RNG seed (required; there is no clock-derived default).")
set_option = click.option("--set", "overrides", multiple=True, metavar="SECTION.KEY=VALUE",
                          help="Override one config value; repeatable.")


@click.group()
def main():
    """Simulate homodyne and photon-counting flux measurements."""


@main.command()
@config_option
@seed_option
@set_option
@click.option("--repetitions", type=click.IntRange(min=1), help="Repetitions per flux point.")
@click.option("--flux-points", help="Comma-separated fluxes at the reference point (photons/s).")
@click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True,
              help="Worker processes; the output does not depend on this.")
@click.option("--out", "-o", default="-", help="CSV destination (default stdout).")
def sweep(config_path, seed, overrides, repetitions, flux_points, jobs, out):
    """Run a flux sweep and write one CSV row per point, repetition and method."""
    spec = _spec(config_path, seed, overrides, repetitions, flux_points)
    _write(rows_to_csv(run_sweep(spec, jobs=jobs)), out)


@main.command()
@click.option("--input", "input_csv", type=click.Path(exists=True, dir_okay=False),
              help="Sweep CSV to summarise; without it a sweep is run first.")
@config_option
@click.option("--seed", type=click.IntRange(min=0), help="Required unless --input is given.")
@set_option
@click.option("--repetitions", type=click.IntRange(min=1))
@click.option("--jobs", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--threshold", type=float, default=0.10, show_default=True,
              help="RMS relative error below which a flux point counts as usable.")
@click.option("--out", "-o", default="-", help="JSON destination (default stdout).")
def report(input_csv, config_path, seed, overrides, repetitions, jobs, threshold, out):
    """Per-decade bias of each method and its usable dynamic range, as JSON."""
    if input_csv:
        with open(input_csv) as fh:
            try:
                rows = rows_from_csv(fh.read())
            except ValueError as exc:
                _fail("invalid_input", str(exc))
    else:
        if seed is None:
            _fail("invalid_config", "--seed is required when no --input CSV is given")
        rows = run_sweep(_spec(config_path, seed, overrides, repetitions), jobs=jobs)
    if not rows:
        _fail("invalid_input", "no sweep rows to report on")
    summary = model_report(rows, threshold=threshold)
    compact = {
        m: {k: v for k, v in body.items() if k != "points"} for m, body in summary["methods"].items()
    }
    summary["summary"] = compact
    _write(json.dumps(summary, indent=2) + "\n", out)


def _write_histogram(path, triples):
    with open(path, "w", newline="\n") as fh:
        fh.write("bin_lo,bin_hi,count\n")
        for lo, hi, c in triples:
            fh.write(f"{lo!r},{hi!r},{c}\n")


@main.command()
@config_option
@seed_option
@set_option
@click.option("--flux", type=float, default=2e7, show_default=True,
              help="Flux at the reference point (photons/s).")
@click.option("--out-dir", type=click.Path(file_okay=False),
              help="Write stats.json and one (bin_lo, bin_hi, count) file per histogram here.")
def stats(config_path, seed, overrides, flux, out_dir):
    """Time series and histograms of bright, dark and QNL records."""
    if not flux > 0:
        _fail("invalid_config", f"--flux must be positive, got {flux}")
    spec = _spec(config_path, seed, overrides)
    result = stats_report(flux, spec, seed)
    if out_dir is None:
        brief = {
            "spdm": {k: v["dispersion"] for k, v in result["spdm"].items()},
            "homodyne": {k: {"mean_power": v["mean_power"], "exponential_ks_p_value": v.get("exponential_ks_p_value")}
                         for k, v in result["homodyne"].items()},
        }
        click.echo(json.dumps(brief, indent=2))
        return
    os.makedirs(out_dir, exist_ok=True)
    for name, body in result["spdm"].items():
        _write_histogram(os.path.join(out_dir, f"spdm_{name}_hist.txt"), body["histogram"])
    for name, body in result["homodyne"].items():
        _write_histogram(os.path.join(out_dir, f"homodyne_{name}_hist_db.txt"), body["histogram_db"])
    with open(os.path.join(out_dir, "stats.json"), "w", newline="\n") as fh:
        json.dump(result, fh, indent=1)
        fh.write("\n")
    click.echo(out_dir)


@main.command()
def selftest():
    """Check the closed-form photon-number identities."""
    t0 = time.perf_counter()
    results = run_selftest()
    for name, ok, detail in results:
        click.echo(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    click.echo(f"{sum(ok for _, ok, _ in results)}/{len(results)} passed in {time.perf_counter() - t0:.3f} s")
    if not all(ok for _, ok, _ in results):
        sys.exit(1)


if __name__ == "__main__":
    main()
