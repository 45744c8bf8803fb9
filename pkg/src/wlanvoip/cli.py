"""Command-line entry point: ``wlanvoip <subcommand> [flags]``.

Flags override values read from ``--config``. Exit codes: 0 success,
2 invalid config or arguments, 3 infeasible parameters, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .errors import ConfigInvalid, InfeasibleParameters, InvalidParameter
from .scenario import TABLES, ScenarioConfig, replicate_table, run

log = logging.getLogger("wlanvoip")

OUT_ENV = "WLANVOIP_OUT"

# CLI flag dest -> ScenarioConfig field
_OVERRIDES = {
    "D": "D",
    "stations_per_cell": "stations_per_cell",
    "scheme": "frequency_scheme",
    "cs_range": "cs_range",
    "cs_factor": "cs_range_factor",
    "c_max": "C_max",
    "m": "m",
    "n": "n",
    "c_ap_1": "C_AP_1",
    "plan": "frequency_plan",
    "n_values": "n_values",
    "cs_values": "cs_values",
    "trials": "trials",
    "codec": "codec",
    "frames": "frames",
    "delay_budget": "delay_budget",
    "format": "format",
    "workers": "workers",
}


def _cs_value(text: str):
    return text if text == "sector" else float(text)


def _c_ap_1(text: str):
    return text if not text.isdigit() else int(text)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON scenario config; flags win over file values")
    p.add_argument("--seed", type=int, help="single seed, or base seed when --seeds is given")
    p.add_argument("--seeds", type=int, help="number of seeds derived from the base seed")
    p.add_argument("--out", type=Path, help=f"output directory (default ${OUT_ENV} or ./wlanvoip-out/<cmd>)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--workers", type=int)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wlanvoip", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    topo = sub.add_parser("topology", help="generate and export a multi-cell topology")
    admit = sub.add_parser("admit", help="clique-analytical call admission over random candidates")
    colr = sub.add_parser("color", help="CoTDMA frequency/slot coloring of one topology per seed")
    sweep = sub.add_parser("sweep", help="coloring coverage over (n, CSRange) grids")
    cap = sub.add_parser("capacity", help="closed-form CoTDMA capacity")
    rep = sub.add_parser("replicate", help="rerun a published result set and compare")

    for p in (topo, admit, colr, sweep, cap):
        _common(p)
    for p in (topo, admit, colr, sweep):
        p.add_argument("--D", type=int, help="grid dimension (D x D cells)")
        p.add_argument("--stations-per-cell", type=int)
        p.add_argument("--scheme", choices=("single", "three_channel", "seven_channel"))
    for p in (admit, colr):
        p.add_argument("--cs-range", type=float, help="carrier-sense range in meters")
        p.add_argument("--cs-factor", type=_cs_value, help="carrier-sense range as a multiple of d_max, or 'sector'")
    admit.add_argument("--c-max", type=float, help="clique-size cap (default 8)")
    for p in (admit, colr, sweep, cap):
        p.add_argument("--c-ap-1", type=_c_ap_1, help="single-cell capacity or preset (11b, 11g, ...)")
    for p in (colr, cap):
        p.add_argument("--n", type=int, help="time slots per frame")
    for p in (colr, sweep):
        p.add_argument("--m", type=int, help="frequency channels")
        p.add_argument("--plan", choices=("fixed", "free"))
    sweep.add_argument("--n-values", type=int, nargs="+")
    sweep.add_argument("--cs-values", type=_cs_value, nargs="+", help="multiples of d_max and/or 'sector'")
    sweep.add_argument("--trials", type=int)
    cap.add_argument("--codec", choices=("gsm_6_10",))
    cap.add_argument("--frames", type=int, help="frames per beacon interval (C)")
    cap.add_argument("--delay-budget", type=float, help="ms")

    rep.add_argument("table", choices=TABLES)
    rep.add_argument("--seeds", type=int, default=20)
    rep.add_argument("--seed", type=int, default=0, help="base seed")
    rep.add_argument("--out", type=Path)
    rep.add_argument("--workers", type=int, default=1)
    rep.add_argument("-v", "--verbose", action="store_true")
    return parser


def config_from_args(args: argparse.Namespace) -> ScenarioConfig:
    data = {}
    if args.config is not None:
        try:
            data = json.loads(args.config.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"{args.config}: not valid JSON ({exc})") from exc
        if not isinstance(data, dict):
            raise ConfigInvalid(f"{args.config}: top level must be an object")
    data["mode"] = args.command
    for dest, key in _OVERRIDES.items():
        value = getattr(args, dest, None)
        if value is not None:
            data[key] = value
    if args.seeds is not None:
        data["seeds"] = None
        data["seed_count"] = args.seeds
        if args.seed is not None:
            data["base_seed"] = args.seed
    elif args.seed is not None:
        data["seeds"] = [args.seed]
    if args.command == "sweep" and args.seeds is not None and "trials" not in data:
        data["trials"] = args.seeds
    return ScenarioConfig.from_dict(data)


def _out_dir(args: argparse.Namespace) -> Path:
    if args.out is not None:
        return args.out
    return Path(os.environ.get(OUT_ENV, "wlanvoip-out")) / args.command


def _print_comparison(comparison: dict) -> None:
    print(f"{'quantity':<44} {'published':>9} {'measured':>10} {'deviation':>10}")
    for row in comparison["rows"]:
        published = "-" if row["published"] is None else f"{row['published']:.4g}"
        dev = "-" if row["deviation"] is None else f"{row['deviation']:+.4g}"
        print(f"{row['quantity']:<44} {published:>9} {row['measured']:>10.4g} {dev:>10}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "replicate":
            comparison = replicate_table(args.table, args.seeds, args.out, args.seed, args.workers)
            _print_comparison(comparison)
            return 0
        cfg = config_from_args(args)
        out = _out_dir(args)
        manifest = run(cfg, out)
        log.info("wrote %d files to %s", len(manifest.files), out)
        for f in manifest.files:
            print(out / f["path"])
        return 0
    except (ConfigInvalid, InvalidParameter) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleParameters as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
