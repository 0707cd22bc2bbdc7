"""Command-line front end.

    elastic-lbm VERB [--config PATH] [--out DIR] [--workers N] [--seed N]

Exit status: 0 success, 2 configuration error, 3 numerical divergence,
4 file I/O failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .boundaries import PERIODIC
from .config import ConfigError, default_config, parse_config
from .core import NumericalDivergence
from .diagnostics import Seismogram
from .snapshots import SnapshotFormatError, state_fields, write_csv, write_snapshot
from .solver import ElasticLBM
from .spectral import SpectralOracle

log = logging.getLogger("elastic_lbm")

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGENCE, EXIT_IO = 0, 2, 3, 4

# verb -> experiment kind used when the config does not name one
VERB_KIND = {
    "simulate": "simulate", "oracle": "simulate", "stability": "stability-map",
    "convergence": "convergence", "rayleigh": "rayleigh", "reflect": "reflection",
}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items() if not str(k).startswith("_")}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def _write_summary(out, cfg, result):
    summary = {"config": _jsonable(cfg.to_dict()), "result": _jsonable(result)}
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def _run_simulate(cfg, out, workers):
    if cfg.experiment == "bulk-compare":
        if cfg.nx != cfg.ny:
            raise ConfigError(["bulk-compare needs a square grid"])
        res = ex.bulk_compare(cfg.params.nu, cfg.nx, cfg.n_steps, cfg.params.tau, cfg.source)
        write_snapshot(out / "lbm.elbm", state_fields(res["_lbm"]))
        jo = res["_oracle"]
        write_snapshot(out / "oracle.elbm", {"jx": jo[0], "jy": jo[1]})
        return res
    lb = ElasticLBM(cfg.nx, cfg.ny, cfg.params, cfg.source, cfg.boundary)
    seis = [Seismogram(s) for s in cfg.stations]

    def each(state):
        for s in seis:
            s.append(state)
        n = state.time_step
        if cfg.snapshot_every and n % cfg.snapshot_every == 0:
            write_snapshot(out / f"lbm_{n:06d}.elbm", state_fields(state))

    lb.run(cfg.n_steps, each)
    write_snapshot(out / "lbm_final.elbm", state_fields(lb.state))
    for s in seis:
        s.write_csv(out / f"seismogram_{s.station[0]}_{s.station[1]}.csv")
    return {"steps": cfg.n_steps, "max_abs_j": float(np.abs(lb.state.j).max())}


def _run_oracle(cfg, out, workers):
    if any(cfg.boundary.edge(e).kind != PERIODIC for e in ("left", "right", "bottom", "top")):
        raise ConfigError(["the spectral oracle supports periodic edges only"])
    oracle = SpectralOracle(cfg.nx, cfg.ny, cfg.params, cfg.source)
    seis = [[] for _ in cfg.stations]
    for _ in range(cfg.n_steps):
        oracle.step()
        n = oracle.time_step
        if seis or (cfg.snapshot_every and n % cfg.snapshot_every == 0):
            j = oracle.fields()
            for rows, (x, y) in zip(seis, cfg.stations):
                rows.append((n, j[0][x, y], j[1][x, y]))
            if cfg.snapshot_every and n % cfg.snapshot_every == 0:
                write_snapshot(out / f"oracle_{n:06d}.elbm", {"jx": j[0], "jy": j[1]})
    j = oracle.fields()
    write_snapshot(out / "oracle_final.elbm", {"jx": j[0], "jy": j[1]})
    for rows, (x, y) in zip(seis, cfg.stations):
        write_csv(out / f"oracle_seismogram_{x}_{y}.csv", ["step", "jx", "jy"], rows)
    return {"steps": cfg.n_steps, "max_abs_j": float(np.abs(j).max())}


def _run_stability(cfg, out, workers):
    res = ex.stability(cfg.params.nu, cfg.params.tau, cfg.k_points)
    res["_report"].write_csv(out / "stability_map.csv")
    return res


def _run_convergence(cfg, out, workers):
    res = ex.convergence(cfg.params.nu, cfg.sizes, cfg.params.tau, workers)
    rows = zip(res["sizes"], res["misfit_scaled"], res["misfit_fixed"])
    write_csv(out / "convergence.csv", ["n", "misfit_scaled", "misfit_fixed"], rows)
    return res


def _run_rayleigh(cfg, out, workers):
    if cfg.nx < 2 * cfg.boundary.left.thickness:
        raise ConfigError(["rayleigh grid too narrow for its lateral layers"])
    res = ex.rayleigh(cfg.nx, cfg.ny, cfg.params.nu, cfg.params.tau, cfg.source,
                      cfg.switch_step, cfg.turns, profile_step=cfg.profile_step,
                      layer=cfg.boundary.bottom.thickness)
    write_csv(out / "surface_station.csv", ["step", "jy"], enumerate(res["_surface"], start=1))
    write_csv(out / "depth_profile.csv", ["depth", "abs_jy"], zip(res["_depth"], res["_profile"]))
    return res


def _run_reflect(cfg, out, workers):
    res = ex.reflection(cfg.wall, cfg.params.nu, cfg.nx, tau=cfg.params.tau)
    res["_probe"].write_csv(out / f"reflection_{cfg.wall}.csv")
    return res


RUNNERS = {
    "simulate": _run_simulate, "oracle": _run_oracle, "stability": _run_stability,
    "convergence": _run_convergence, "rayleigh": _run_rayleigh, "reflect": _run_reflect,
}


def build_parser():
    p = argparse.ArgumentParser(prog="elastic-lbm", description=__doc__.split("\n\n")[0])
    p.add_argument("verb", choices=sorted(RUNNERS))
    p.add_argument("--config", type=Path, help="run configuration file")
    p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    p.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    p.add_argument("--seed", type=int, default=0, help="reserved; runs are deterministic")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.workers < 1:
            raise ConfigError(["--workers must be at least 1"])
        if args.config is None:
            cfg = default_config(VERB_KIND[args.verb])
        else:
            cfg = parse_config(args.config.read_text(encoding="utf-8"))
        args.out.mkdir(parents=True, exist_ok=True)
        result = RUNNERS[args.verb](cfg, args.out, args.workers)
        summary = _write_summary(args.out, cfg, result)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    except NumericalDivergence as exc:
        print(f"numerical divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (OSError, SnapshotFormatError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(json.dumps(summary["result"], indent=2, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
