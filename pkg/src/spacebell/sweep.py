"""Distance sweeps over the three models, with CSV and SVG output."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .coincidence import CHSH_SIGNS, simulate_setting_counts, unnormalized_estimator
from .config import Geometry, GPolicy, Model, Spacing, SweepConfig
from .lhv import lhv_decompose
from .plot import decay_svg
from .spatial import DetectorRegion, GaussianPairState, chsh_spin_space, overlap_probability, spin_space_correlators
from .spdc import chsh_rates
from .spin import ChshSettings, singlet_state

CSV_HEADER = ("z", "r1", "r2", "r3", "r4", "bell_value", "bell_ratio", "lhv_feasible")


@dataclass(frozen=True)
class SweepRecord:
    z: float
    r_values: tuple[float, float, float, float]
    bell_value: float
    bell_ratio: float
    lhv_feasible: bool


def sweep_distances(cfg: SweepConfig) -> np.ndarray:
    if cfg.spacing is Spacing.LOG:
        return np.geomspace(cfg.z_min, cfg.z_max, cfg.points)
    return np.linspace(cfg.z_min, cfg.z_max, cfg.points)


def spatial_setup(cfg: SweepConfig, z: float):
    """Packets fixed where the detectors start (along x, z_min apart); regions at separation z."""
    half0 = 0.5 * cfg.z_min
    phi = GaussianPairState([-half0, 0, 0], [half0, 0, 0], cfg.packet_width, cfg.packet_width)
    if cfg.geometry is Geometry.SYMMETRIC:
        ca, cb = -0.5 * z, 0.5 * z
    else:
        ca, cb = -half0, -half0 + z
    oa = DetectorRegion.box([ca, 0, 0], cfg.region_half_width)
    ob = DetectorRegion.box([cb, 0, 0], cfg.region_half_width)
    return phi, oa, ob


def _point(cfg: SweepConfig, index: int, z: float) -> tuple[np.ndarray, float]:
    """Correlator-like values and Bell value at one distance."""
    if cfg.model is Model.SPDC:
        r = chsh_rates(cfg.spdc, *cfg.setting_angles, z)
        return r, float(abs(r[0] - r[1] + r[2] + r[3]))

    settings = ChshSettings.in_plane(*cfg.setting_angles)
    state = singlet_state()
    phi, oa, ob = spatial_setup(cfg, z)
    if cfg.model is Model.SPIN_SPACE:
        regions = (oa, oa, ob, ob)
        e = spin_space_correlators(state, phi, settings, regions)
        return e.as_array(), chsh_spin_space(state, phi, settings, regions)

    if cfg.g_policy is GPolicy.OVERLAP:
        g = overlap_probability(phi, oa, ob).g
    elif cfg.g_policy is GPolicy.INVERSE_Z:
        g = min(1.0, cfg.z_min / z)
    else:
        g = cfg.g
    # the rational estimator is undefined once g drops to zero; the sweep reports the unnormalized one
    counts = simulate_setting_counts(state, settings, cfg.pairs, g, cfg.seed, point_index=index)
    e = np.array([unnormalized_estimator(c) for c in counts])
    return e, float(abs(np.dot(CHSH_SIGNS, e)))


def run_sweep(cfg: SweepConfig) -> list[SweepRecord]:
    """Evaluate the configured model at every sweep distance, ordered by z."""
    zs = sweep_distances(cfg)
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(lambda iz: _point(cfg, *iz), enumerate(zs)))
    else:
        results = [_point(cfg, i, z) for i, z in enumerate(zs)]

    ref_value = results[0][1]
    # spdc rates are dimensionful; scale by the largest rate at z_min so every
    # later correlator lies in [-1, 1] (rates only fall with z)
    scale = float(np.max(np.abs(results[0][0]))) if cfg.model is Model.SPDC else 1.0
    records = []
    for i, (z, (r, value)) in enumerate(zip(zs, results)):
        if i == 0:
            ratio = 1.0
        elif ref_value > 0:
            ratio = value / ref_value
        else:
            ratio = math.nan
        e = np.clip(r / scale, -1.0, 1.0) if scale > 0 else np.zeros(4)
        feasible = lhv_decompose(e).feasible
        records.append(SweepRecord(float(z), tuple(float(v) for v in r), float(value), float(ratio), feasible))
    return records


def crossover_distance(records: list[SweepRecord]) -> float | None:
    """First z at which the correlators admit a local model."""
    return next((r.z for r in records if r.lhv_feasible), None)


def _g12(v: float) -> str:
    return format(v, ".12g")


def records_to_csv(records: list[SweepRecord]) -> str:
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow(
            [_g12(rec.z), *(_g12(v) for v in rec.r_values), _g12(rec.bell_value), _g12(rec.bell_ratio),
             "true" if rec.lhv_feasible else "false"]
        )
    return buf.getvalue()


def write_outputs(records: list[SweepRecord], cfg: SweepConfig, csv_path: Path, svg_path: Path | None) -> None:
    """Write CSV (and SVG when a path is given); OSErrors carry the failing path."""
    data = records_to_csv(records)
    try:
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write CSV: {exc.strerror}", str(csv_path)) from exc
    if svg_path is None:
        return
    svg = decay_svg(
        [r.z for r in records],
        [r.bell_ratio for r in records],
        log_x=cfg.spacing is Spacing.LOG,
        title=f"{cfg.model.value}: Bell value vs detector distance",
    )
    try:
        Path(svg_path).write_text(svg, encoding="utf-8")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write SVG: {exc.strerror}", str(svg_path)) from exc
