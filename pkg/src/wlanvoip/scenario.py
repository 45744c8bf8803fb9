"""Config-driven experiment runs that write CSV/JSON reports plus a manifest."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable

import numpy as np

from . import __version__
from .admission import CSV_COLUMNS, arrival_order, run_admission_stream
from .capacity import C_AP_1_PRESETS, capacity_report, codec_profile, TimingParams
from .coloring import (
    SECTOR,
    SWEEP_COLUMNS,
    CoTDMAParams,
    cell_channels,
    color,
    cs_range_sweep,
    resolve_cs_factor,
    validate_assignment,
)
from .conflict import build_admission_graph, build_coloring_graph
from .errors import ConfigInvalid, InvalidParameter
from .geometry import FREQUENCY_SCHEMES, RadioParams, assign_frequencies, build_topology
from .schemas import validate_file
from .seeding import expand_seeds

MODES = ("topology", "admit", "color", "sweep", "capacity")


@dataclass
class ScenarioConfig:
    mode: str = "topology"
    D: int = 5
    stations_per_cell: int | None = None
    radio: dict[str, float] = field(default_factory=dict)
    frequency_scheme: str | None = None
    cs_range: float | None = None
    cs_range_factor: float | str | None = None
    C_max: float = 8
    m: int = 3
    n: int = 3
    C_AP_1: int = 12
    frequency_plan: str = "fixed"
    n_values: list[int] = field(default_factory=lambda: [1, 2, 3, 4, 6, 12])
    cs_values: list[float | str] = field(default_factory=lambda: [1.637])
    trials: int = 1
    codec: str = "gsm_6_10"
    frames: int = 4
    beacon_interval: float = 99.5
    beacon_duration: float = 0.5
    delay_budget: float = 30.0
    seeds: list[int] | None = None
    base_seed: int = 0
    seed_count: int = 1
    format: str = "csv"
    workers: int = 1

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigInvalid(f"unknown config keys: {unknown}")
        if isinstance(data.get("C_AP_1"), str):
            data = {**data, "C_AP_1": C_AP_1_PRESETS.get(data["C_AP_1"], data["C_AP_1"])}
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> "ScenarioConfig":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"{path}: not valid JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise ConfigInvalid(f"{path}: top level must be an object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def validate(self) -> None:
        def need(cond: bool, msg: str) -> None:
            if not cond:
                raise ConfigInvalid(msg)

        need(self.mode in MODES, f"mode must be one of {MODES}, got {self.mode!r}")
        need(isinstance(self.D, int) and self.D >= 1, "D must be an integer >= 1")
        need(self.stations_per_cell is None or self.stations_per_cell >= 0, "stations_per_cell must be >= 0")
        need(self.frequency_scheme is None or self.frequency_scheme in FREQUENCY_SCHEMES,
             f"frequency_scheme must be one of {FREQUENCY_SCHEMES}")
        need(isinstance(self.C_AP_1, int) and self.C_AP_1 >= 0, "C_AP_1 must be a non-negative integer or preset name")
        need(self.C_max >= 1, "C_max must be >= 1")
        need(self.m >= 1 and self.n >= 1, "m and n must be >= 1")
        need(self.frequency_plan in ("fixed", "free"), "frequency_plan must be fixed or free")
        need(self.trials >= 1, "trials must be >= 1")
        need(self.seed_count >= 1, "seed_count must be >= 1")
        need(self.format in ("csv", "json"), "format must be csv or json")
        need(self.workers >= 1, "workers must be >= 1")
        need(all(isinstance(n, int) and n >= 1 for n in self.n_values), "n_values must be positive integers")
        need(all(v == SECTOR or (isinstance(v, (int, float)) and v >= 0) for v in self.cs_values),
             "cs_values must be non-negative multiples of d_max or 'sector'")
        need(self.cs_range is None or self.cs_range >= 0, "cs_range must be >= 0")
        bad_radio = set(self.radio) - {f.name for f in dataclasses.fields(RadioParams)}
        need(not bad_radio, f"unknown radio keys: {sorted(bad_radio)}")
        try:
            self.radio_params().validate()
        except InvalidParameter as exc:
            raise ConfigInvalid(str(exc)) from exc

    def scheme(self) -> str:
        """Frequency plan; coloring modes default to three channels, the rest to one."""
        if self.frequency_scheme is not None:
            return self.frequency_scheme
        return "three_channel" if self.mode in ("color", "sweep") else "single"

    def radio_params(self) -> RadioParams:
        return RadioParams(**self.radio)

    def seed_list(self) -> list[int]:
        """Explicit ``seeds`` win; otherwise ``expand_seeds(base_seed, seed_count)``."""
        if self.seeds:
            return [int(s) for s in self.seeds]
        return expand_seeds(self.base_seed, self.seed_count)

    def effective_cs_range(self, n: int | None = None) -> float:
        radio = self.radio_params()
        if self.cs_range is not None:
            return float(self.cs_range)
        if self.cs_range_factor is not None:
            return resolve_cs_factor(self.cs_range_factor, n or self.n, self.C_AP_1) * radio.d_max
        return radio.cs_range

    def hash(self) -> str:
        body = {k: v for k, v in self.to_dict().items() if k != "workers"}
        return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()


@dataclass
class RunManifest:
    config_hash: str
    tool_version: str
    mode: str
    seeds: list[int]
    files: list[dict[str, str]]
    timings: dict[str, float]

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _dump_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _csv_text(columns: Iterable[str], rows: Iterable[Iterable]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


class _Writer:
    def __init__(self, out: Path):
        self.out = out
        self.files: list[dict[str, str]] = []

    def write(self, name: str, text: str, schema: str) -> None:
        path = self.out / name
        path.write_text(text)
        self.files.append({"path": name, "schema": schema})


# ---------------------------------------------------------------------------
# per-seed workers (top-level so they pickle for the process pool)


def _admit_one(cfg: ScenarioConfig, seed: int) -> dict:
    per_cell = cfg.C_AP_1 if cfg.stations_per_cell is None else cfg.stations_per_cell
    topo = assign_frequencies(build_topology(cfg.D, cfg.radio_params(), per_cell, seed), cfg.scheme())
    cs = cfg.effective_cs_range()
    graph = build_admission_graph(topo, cs)
    t0 = time.perf_counter()
    report, state = run_admission_stream(topo, cs, arrival_order(len(topo.stations), seed), cfg.C_max, graph=graph)
    return {
        "seed": seed,
        "rows": report.csv_rows(),
        "admitted": report.admitted_total,
        "candidates": len(report.decisions),
        "per_ap_counts": report.per_ap_counts(),
        "max_m": state.max_m(),
        "elapsed": time.perf_counter() - t0,
    }


def _color_one(cfg: ScenarioConfig, seed: int) -> dict:
    per_cell = cfg.C_AP_1 if cfg.stations_per_cell is None else cfg.stations_per_cell
    topo = assign_frequencies(build_topology(cfg.D, cfg.radio_params(), per_cell, seed), cfg.scheme())
    params = CoTDMAParams(cfg.m, cfg.n, cfg.C_AP_1, cfg.frequency_plan)
    cs = cfg.effective_cs_range(cfg.n)
    t0 = time.perf_counter()
    graph = build_coloring_graph(topo, cs)
    result = color(graph, params, cell_channels(topo) if cfg.frequency_plan == "fixed" else None)
    violations = validate_assignment(graph, result.assignment, params)
    doc = {
        "seed": seed,
        "params": {**dataclasses.asdict(params), "k": params.k},
        "cs_range": cs,
        "colored": result.colored_count,
        "total": result.total,
        "coverage": result.coverage,
        **result.assignment.export(graph),
    }
    return {"seed": seed, "doc": doc, "violations": len(violations), "elapsed": time.perf_counter() - t0}


def _map(fn: Callable, cfg: ScenarioConfig, seeds: list[int]) -> list[dict]:
    if cfg.workers > 1 and len(seeds) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(fn, [cfg] * len(seeds), seeds))
    else:
        results = [fn(cfg, s) for s in seeds]
    return results  # pool.map preserves seed order


# ---------------------------------------------------------------------------
# modes


def _run_topology(cfg: ScenarioConfig, w: _Writer, seeds: list[int], timings: dict) -> None:
    per_cell = cfg.stations_per_cell or 0
    for s in seeds:
        t0 = time.perf_counter()
        topo = assign_frequencies(build_topology(cfg.D, cfg.radio_params(), per_cell, s), cfg.scheme())
        w.write(f"topology_seed{s}.json", _dump_json(topo.to_dict()), "topology.v1")
        timings[f"seed{s}"] = time.perf_counter() - t0


def _run_admit(cfg: ScenarioConfig, w: _Writer, seeds: list[int], timings: dict) -> None:
    results = _map(_admit_one, cfg, seeds)
    runs = []
    for r in results:
        s = r["seed"]
        if cfg.format == "csv":
            w.write(f"admission_seed{s}.csv", _csv_text(CSV_COLUMNS, r["rows"]), "admission_csv.v1")
        else:
            doc = {"seed": s, "C_max": cfg.C_max, "decisions": [dict(zip(CSV_COLUMNS, row)) for row in r["rows"]]}
            w.write(f"admission_seed{s}.json", _dump_json(doc), "admission_report.v1")
        timings[f"seed{s}"] = r["elapsed"]
        runs.append({
            "seed": s,
            "candidates": r["candidates"],
            "admitted": r["admitted"],
            "per_ap": r["admitted"] / cfg.D**2,
            "per_ap_counts": r["per_ap_counts"],
            "max_m": r["max_m"],
        })
    mean_admitted = float(np.mean([r["admitted"] for r in runs]))
    summary = {
        "mode": "admit",
        "D": cfg.D,
        "C_max": cfg.C_max,
        "cs_range": cfg.effective_cs_range(),
        "frequency_scheme": cfg.scheme(),
        "runs": runs,
        "mean_admitted": mean_admitted,
        "mean_per_ap": mean_admitted / cfg.D**2,
    }
    w.write("admission_summary.json", _dump_json(summary), "admission_summary.v1")


def _run_color(cfg: ScenarioConfig, w: _Writer, seeds: list[int], timings: dict) -> None:
    results = _map(_color_one, cfg, seeds)
    runs = []
    for r in results:
        s = r["seed"]
        w.write(f"assignment_seed{s}.json", _dump_json(r["doc"]), "assignment.v1")
        timings[f"seed{s}"] = r["elapsed"]
        d = r["doc"]
        runs.append({"seed": s, "colored": d["colored"], "total": d["total"], "coverage": d["coverage"], "violations": r["violations"]})
    summary = {"mode": "color", "runs": runs, "mean_coverage": float(np.mean([r["coverage"] for r in runs]))}
    w.write("coloring_summary.json", _dump_json(summary), "coloring_summary.v1")


def _sweep(cfg: ScenarioConfig, seed: int):
    template = build_topology(cfg.D, cfg.radio_params(), 0, seed)
    params = CoTDMAParams(cfg.m, cfg.n_values[0], cfg.C_AP_1, cfg.frequency_plan)
    return cs_range_sweep(template, params, cfg.n_values, cfg.cs_values, cfg.trials, seed, cfg.stations_per_cell, cfg.scheme())


def _run_sweep(cfg: ScenarioConfig, w: _Writer, seeds: list[int], timings: dict) -> None:
    seed = seeds[0]
    t0 = time.perf_counter()
    rep = _sweep(cfg, seed)
    timings["sweep"] = time.perf_counter() - t0
    if cfg.format == "csv":
        w.write("sweep.csv", _csv_text(SWEEP_COLUMNS, rep.rows), "sweep_csv.v1")
    else:
        w.write("sweep.json", _dump_json({"columns": list(SWEEP_COLUMNS), "rows": [list(r) for r in rep.rows]}), "sweep_rows.v1")
    summary = {"mode": "sweep", "C_AP_1": cfg.C_AP_1, "trials": cfg.trials, "seed": seed, "points": rep.summary()}
    w.write("sweep_summary.json", _dump_json(summary), "sweep_summary.v1")


def _run_capacity(cfg: ScenarioConfig, w: _Writer, seeds: list[int], timings: dict) -> None:
    timing = TimingParams(cfg.frames, cfg.n, cfg.beacon_interval, cfg.beacon_duration, cfg.delay_budget)
    t0 = time.perf_counter()
    report = capacity_report(codec_profile(cfg.codec), timing, cfg.C_AP_1)
    timings["capacity"] = time.perf_counter() - t0
    w.write("capacity.json", _dump_json(report), "capacity.v1")


_RUNNERS = {
    "topology": _run_topology,
    "admit": _run_admit,
    "color": _run_color,
    "sweep": _run_sweep,
    "capacity": _run_capacity,
}


def run(config: ScenarioConfig, out: str | Path) -> RunManifest:
    """Execute ``config`` and write its reports plus ``manifest.json`` into ``out``.

    Report bodies carry no timestamps, so the same config and seeds give
    byte-identical files; wall-clock timings live only in the manifest.
    """
    config.validate()
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    seeds = config.seed_list()
    writer = _Writer(out)
    timings: dict[str, float] = {}
    _RUNNERS[config.mode](config, writer, seeds, timings)

    (out / "config.json").write_text(_dump_json(config.to_dict()))
    for entry in writer.files:
        validate_file(out / entry["path"], entry["schema"])
    manifest = RunManifest(config.hash(), __version__, config.mode, seeds, writer.files, timings)
    (out / "manifest.json").write_text(_dump_json(manifest.to_dict()))
    validate_file(out / "manifest.json", "manifest.v1")
    return manifest


# ---------------------------------------------------------------------------
# replication of published results

PUBLISHED_ADMITTED = {8: 62.0, 12: 70.4}
PUBLISHED_COVERAGE = {
    12: {1: 0.800, 2: 0.986, 3: 1.0, 4: 1.0, 6: 1.0, 12: 1.0},
    60: {1: 0.698, 2: 0.930, 3: 0.996, 4: 1.0, 6: 1.0, 60: 1.0},
}
TABLE4_CS_FACTOR = 1.637
SWEEP_CS_FACTORS = [1.0, 1.25, 1.5, 1.637, 1.75, 2.0]
TABLES = ("table2", "table4", "fig11_14")


def table2_config(c_max: float, seeds: int, base_seed: int = 0) -> ScenarioConfig:
    return ScenarioConfig(mode="admit", D=5, C_AP_1=12, C_max=c_max, frequency_scheme="single",
                          base_seed=base_seed, seed_count=seeds)


def table4_config(c_ap_1: int, seeds: int, base_seed: int = 0) -> ScenarioConfig:
    return ScenarioConfig(mode="sweep", D=5, C_AP_1=c_ap_1, frequency_scheme="three_channel",
                          n_values=[1, 2, 3, 4, 6, c_ap_1], cs_values=[TABLE4_CS_FACTOR],
                          trials=seeds, base_seed=base_seed)


def fig11_14_config(c_ap_1: int, seeds: int, base_seed: int = 0) -> ScenarioConfig:
    return ScenarioConfig(mode="sweep", D=5, C_AP_1=c_ap_1, frequency_scheme="three_channel",
                          n_values=[1, 2, 3, 4, 6, c_ap_1], cs_values=[SECTOR, *SWEEP_CS_FACTORS],
                          trials=seeds, base_seed=base_seed)


def _row(quantity: str, published: float | None, measured: float) -> dict:
    return {"quantity": quantity, "published": published, "measured": measured,
            "deviation": None if published is None else measured - published}


def replicate_table(table: str, seeds: int, out: str | Path | None = None, base_seed: int = 0, workers: int = 1) -> dict:
    """Run the canonical scenario behind a published result set and compare side by side.

    With ``out`` set, the underlying runs land in sub-directories and the
    comparison is written to ``comparison.json``.
    """
    if table not in TABLES:
        raise InvalidParameter(f"table must be one of {TABLES}")
    if seeds < 1:
        raise InvalidParameter("seeds must be >= 1")
    out = Path(out) if out is not None else None
    rows = []
    if table == "table2":
        for c_max, published in PUBLISHED_ADMITTED.items():
            cfg = table2_config(c_max, seeds, base_seed)
            cfg.workers = workers
            if out is not None:
                run(cfg, out / f"cmax{c_max}")
                summary = json.loads((out / f"cmax{c_max}" / "admission_summary.json").read_text())
                mean = summary["mean_admitted"]
            else:
                mean = float(np.mean([_admit_one(cfg, s)["admitted"] for s in cfg.seed_list()]))
            rows.append(_row(f"mean admitted, C_max={c_max}", published, mean))
            rows.append(_row(f"per-AP capacity, C_max={c_max}", published / 25, mean / 25))
    else:
        for c_ap_1 in (12, 60):
            cfg = (table4_config if table == "table4" else fig11_14_config)(c_ap_1, seeds, base_seed)
            if out is not None:
                run(cfg, out / f"cap{c_ap_1}")
                points = json.loads((out / f"cap{c_ap_1}" / "sweep_summary.json").read_text())["points"]
            else:
                points = _sweep(cfg, cfg.seed_list()[0]).summary()
            for point in points:
                n, cs = point["n"], point["cs_range_over_dmax"]
                published = PUBLISHED_COVERAGE[c_ap_1].get(n) if cs == TABLE4_CS_FACTOR else None
                rows.append(_row(f"coverage C_AP_1={c_ap_1} n={n} cs={cs:.4g}d_max", published, point["mean"]))
    comparison = {"table": table, "seeds": seeds, "rows": rows}
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "comparison.json").write_text(_dump_json(comparison))
        validate_file(out / "comparison.json", "comparison.v1")
    return comparison
