"""Flux sweeps across both detectors, bias reports and noise statistics.

A sweep steps the flux at the reference point, passes the field through the
frequency-translation scheme and the two detector paths, estimates the flux
with all four methods and refers every estimate back to the reference point.
Rows are keyed by ``(point index, repetition)`` and each key draws from its
own seed, so the output does not depend on how rows are scheduled.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import stats

from .estimation import (
    METHODS,
    FluxEstimate,
    OpticalPath,
    homodyne_flux_quantum,
    homodyne_flux_semiclassical,
    refer_to_reference,
)
from .homodyne_sim import (
    HomodyneConfig,
    dark_record,
    dark_samples,
    measure_variance,
    subtract_dark,
    synthesize_variance_record,
)
from .quantum_states import SidebandField
from .sideband_scheme import SchemeConfig, apply_scheme
from .spdm_sim import SpdmConfig, estimate_flux_from_counts, simulate_counts

CSV_SCHEMA_VERSION = 1
CSV_COLUMNS = ("flux_a", "repetition", "method", "phi_est", "phi_raw", "sigma", "flagged", "error")
WAVELENGTH = 1540e-9
USABLE_RELATIVE_ERROR = 0.10

DEFAULT_HOMODYNE_PATH = OpticalPath((("coupler_50_50", 0.5), ("fiber_to_free_space", 0.9)))
DEFAULT_SPDM_PATH = OpticalPath((("coupler_50_50", 0.5), ("fiber_connectors", 0.9)))


def default_flux_points():
    return tuple(float(x) for x in np.logspace(2, 9, 29))


@dataclass(frozen=True)
class SweepSpec:
    flux_points: Tuple[float, ...] = field(default_factory=default_flux_points)
    repetitions: int = 1
    homodyne: HomodyneConfig = field(default_factory=HomodyneConfig)
    spdm: SpdmConfig = field(default_factory=SpdmConfig)
    scheme: SchemeConfig = field(default_factory=SchemeConfig)
    homodyne_path: OpticalPath = DEFAULT_HOMODYNE_PATH
    spdm_path: OpticalPath = DEFAULT_SPDM_PATH
    seed: int = 0

    def __post_init__(self):
        pts = tuple(float(x) for x in self.flux_points)
        if any(not x > 0 for x in pts):
            raise ValueError("flux_points must all be positive")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("flux_points must be strictly ascending")
        object.__setattr__(self, "flux_points", pts)
        if int(self.repetitions) < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")
        if int(self.seed) < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")

    def path_to(self, detector):
        """Reference-point-to-detector path including the AOM attenuation."""
        path = self.homodyne_path if detector == "homodyne" else self.spdm_path
        return OpticalPath(path.elements + (("aom", self.scheme.aom_transmission),))


@dataclass
class SweepRow:
    flux_a: float
    repetition: int
    estimates: Dict[str, Optional[FluxEstimate]]
    errors: Dict[str, str] = field(default_factory=dict)

    @property
    def deleted(self):
        return {m: e.negative_mean_deleted for m, e in self.estimates.items() if e is not None}


def row_seed(seed, point_index, repetition):
    ss = np.random.SeedSequence(seed, spawn_key=(point_index, repetition))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def _homodyne_estimates(spec: SweepSpec, flux_a, seed):
    cfg = spec.homodyne.with_seed(seed)
    # flux at the detector over the analysis bandwidth gives photons per mode
    path = spec.homodyne_path.total
    alpha = math.sqrt(flux_a * path / cfg.rbw_measured)
    field_out = apply_scheme(SidebandField.single_sideband(alpha), spec.scheme)
    v = subtract_dark(measure_variance(synthesize_variance_record(field_out, cfg)), dark_record(cfg))
    to_a = spec.path_to("homodyne")
    return {
        "quantum": refer_to_reference(homodyne_flux_quantum(v, cfg), to_a),
        "semiclassical": refer_to_reference(homodyne_flux_semiclassical(v, cfg), to_a),
    }


def _spdm_estimates(spec: SweepSpec, flux_a, seed):
    cfg = spec.spdm.with_seed(seed)
    to_apd = spec.path_to("spdm")
    bright = simulate_counts(flux_a * to_apd.total, cfg, stream="bright")
    dark = simulate_counts(0.0, cfg, stream="dark")
    out, errors = {}, {}
    for mode, method in (("linear", "spdm_linear"), ("log_corrected", "spdm_log")):
        try:
            out[method] = refer_to_reference(estimate_flux_from_counts(bright, dark, cfg, mode), to_apd)
        except ValueError as exc:
            out[method] = None
            errors[method] = str(exc)
    return out, errors


def compute_row(spec: SweepSpec, point_index, repetition) -> SweepRow:
    flux_a = spec.flux_points[point_index]
    seed = row_seed(spec.seed, point_index, repetition)
    estimates, errors = {}, {}
    try:
        estimates.update(_homodyne_estimates(spec, flux_a, seed))
    except ValueError as exc:
        for m in ("quantum", "semiclassical"):
            estimates[m], errors[m] = None, str(exc)
    try:
        spdm, spdm_errors = _spdm_estimates(spec, flux_a, seed)
        estimates.update(spdm)
        errors.update(spdm_errors)
    except ValueError as exc:
        for m in ("spdm_linear", "spdm_log"):
            estimates[m], errors[m] = None, str(exc)
    return SweepRow(flux_a, repetition, {m: estimates[m] for m in METHODS}, errors)


def _compute_row_star(args):
    return compute_row(*args)


def run_sweep(spec: SweepSpec, jobs: int = 1) -> List[SweepRow]:
    """One row per (flux point, repetition), ordered by point then repetition."""
    keys = [(i, k) for i in range(len(spec.flux_points)) for k in range(spec.repetitions)]
    if jobs <= 1 or len(keys) < 2:
        return [compute_row(spec, i, k) for i, k in keys]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        rows = list(pool.map(_compute_row_star, [(spec, i, k) for i, k in keys], chunksize=4))
    return sorted(rows, key=lambda r: (spec.flux_points.index(r.flux_a), r.repetition))


def _fmt(x):
    return repr(float(x))


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        for method in METHODS:
            est = row.estimates.get(method)
            if est is None:
                writer.writerow([_fmt(row.flux_a), row.repetition, method, "nan", "nan", "nan", 0,
                                 row.errors.get(method, "missing")])
                continue
            writer.writerow([
                _fmt(row.flux_a), row.repetition, method, _fmt(est.phi), _fmt(est.phi_raw),
                _fmt(est.sigma), int(est.negative_mean_deleted), "",
            ])
    return buf.getvalue()


def rows_from_csv(text) -> List[SweepRow]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV columns {reader.fieldnames}; expected {list(CSV_COLUMNS)}")
    rows: Dict[Tuple[float, int], SweepRow] = {}
    for rec in reader:
        key = (float(rec["flux_a"]), int(rec["repetition"]))
        row = rows.setdefault(key, SweepRow(key[0], key[1], {m: None for m in METHODS}))
        method = rec["method"]
        if rec["error"]:
            row.errors[method] = rec["error"]
            continue
        row.estimates[method] = FluxEstimate(
            phi=float(rec["phi_est"]),
            sigma=float(rec["sigma"]),
            method=method,
            point="A",
            negative_mean_deleted=bool(int(rec["flagged"])),
            phi_raw=float(rec["phi_raw"]),
        )
    return list(rows.values())


def _longest_usable_run(points, usable):
    best, start = (None, None), None
    for i, ok in enumerate(usable + [False]):
        if ok and start is None:
            start = i
        if not ok and start is not None:
            lo, hi = points[start], points[i - 1]
            if best[0] is None or math.log10(hi / lo) > math.log10(best[1] / best[0]):
                best = (lo, hi)
            start = None
    return best


def model_report(rows, threshold=USABLE_RELATIVE_ERROR) -> dict:
    """Per-decade relative bias and spread of each method, and its usable range.

    A flux point is usable for a method when the root-mean-square relative
    error of its repetitions (bias and scatter together) is below
    ``threshold``. The usable span is the longest run of consecutive usable
    points, in decades.
    """
    if not rows:
        raise ValueError("model_report needs at least one row")
    points = sorted({r.flux_a for r in rows})
    by_point = {p: [r for r in rows if r.flux_a == p] for p in points}
    report = {"schema_version": CSV_SCHEMA_VERSION, "threshold": threshold, "methods": {}}
    for method in METHODS:
        per_point, per_decade = [], {}
        for p in points:
            vals = [r.estimates[method].phi_raw for r in by_point[p] if r.estimates.get(method)]
            n_err = sum(1 for r in by_point[p] if r.estimates.get(method) is None)
            rel = np.array(vals) / p - 1.0 if vals else np.array([])
            entry = {
                "flux_a": p,
                "n": len(vals),
                "n_errors": n_err,
                "n_deleted": sum(
                    1 for r in by_point[p] if r.estimates.get(method) and r.estimates[method].negative_mean_deleted
                ),
                "mean_relative_bias": float(rel.mean()) if vals else None,
                "relative_spread": float(rel.std(ddof=1)) if len(vals) > 1 else 0.0 if vals else None,
                "rms_relative_error": float(np.sqrt(np.mean(rel**2))) if vals else None,
            }
            entry["usable"] = bool(vals) and n_err == 0 and entry["rms_relative_error"] < threshold
            per_point.append(entry)
            per_decade.setdefault(int(math.floor(math.log10(p) + 1e-9)), []).append(entry)
        decades = []
        for d, entries in sorted(per_decade.items()):
            biases = [e["mean_relative_bias"] for e in entries if e["mean_relative_bias"] is not None]
            spreads = [e["relative_spread"] for e in entries if e["relative_spread"] is not None]
            decades.append({
                "decade": d,
                "mean_relative_bias": float(np.mean(biases)) if biases else None,
                "mean_relative_spread": float(np.mean(spreads)) if spreads else None,
                "usable": all(e["usable"] for e in entries),
            })
        lo, hi = _longest_usable_run(points, [e["usable"] for e in per_point])
        report["methods"][method] = {
            "points": per_point,
            "decades": decades,
            "usable_decades": [d["decade"] for d in decades if d["usable"]],
            "usable_range": None if lo is None else [lo, hi],
            "usable_span_decades": 0.0 if lo is None else math.log10(hi / lo),
        }
    return report


def _histogram(values, bins):
    counts, edges = np.histogram(values, bins=bins)
    return [(float(a), float(b), int(c)) for a, b, c in zip(edges[:-1], edges[1:], counts)]


def dispersion_test(counts) -> dict:
    """Variance-to-mean test for Poisson counts; two-sided p-value."""
    counts = np.asarray(counts, dtype=float)
    n, mean = counts.size, counts.mean()
    if mean == 0:
        return {"mean": 0.0, "variance": 0.0, "index": None, "statistic": None, "p_value": None}
    stat = float(((counts - mean) ** 2).sum() / mean)
    cdf = float(stats.chi2.cdf(stat, n - 1))
    return {
        "mean": float(mean),
        "variance": float(counts.var(ddof=1)),
        "index": float(counts.var(ddof=1) / mean),
        "statistic": stat,
        "dof": n - 1,
        "p_value": 2 * min(cdf, 1 - cdf),
    }


def stats_report(flux_a, spec: SweepSpec, seed, db_bins=60) -> dict:
    """Time series and histograms of both detectors' records at one flux.

    SPDM: clicks per display bin for bright and dark records with integer
    histograms and a dispersion test. Homodyne: bin powers for signal, QNL
    (vacuum input) and dark-only records, histogrammed in dB.
    """
    scfg = spec.spdm.with_seed(seed)
    hcfg = spec.homodyne.with_seed(seed)
    to_apd = spec.path_to("spdm").total
    bright = simulate_counts(flux_a * to_apd, scfg, stream="bright")
    dark = simulate_counts(0.0, scfg, stream="dark")

    alpha = math.sqrt(flux_a * spec.homodyne_path.total / hcfg.rbw_measured)
    signal = synthesize_variance_record(
        apply_scheme(SidebandField.single_sideband(alpha), spec.scheme), hcfg
    )
    qnl = synthesize_variance_record(SidebandField(vacuum_minus=True), hcfg, stream="qnl")
    dark_h = dark_samples(hcfg)

    spdm = {}
    for name, rec in (("bright", bright), ("dark", dark)):
        c = rec.binned_clicks
        edges = np.arange(c.min(), c.max() + 2) - 0.5 if c.max() - c.min() < 200 else 40
        spdm[name] = {
            "clicks": rec.clicks,
            "gates": rec.gates,
            "bin_seconds": scfg.bin_seconds,
            "time_series": c.tolist(),
            "histogram": _histogram(c, edges),
            "dispersion": dispersion_test(c),
        }

    homodyne = {}
    for name, rec in (("signal", signal), ("qnl", qnl), ("dark", dark_h)):
        positive = rec[rec > 0]
        db = 10 * np.log10(positive) if positive.size else np.array([])
        entry = {
            "n_bins": int(rec.size),
            "mean_power": float(rec.mean()),
            "time_series_db": db.tolist(),
            "histogram_db": _histogram(db, db_bins) if db.size else [],
        }
        if positive.size > 1:
            ks = stats.kstest(rec, "expon", args=(0, rec.mean()))
            entry["exponential_ks_p_value"] = float(ks.pvalue)
        homodyne[name] = entry
    return {"flux_a": flux_a, "seed": seed, "spdm": spdm, "homodyne": homodyne}
