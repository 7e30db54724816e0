"""Command-line front end.

Subcommands ``simulate1d``, ``simulate3d``, ``discriminate`` and ``tof``;
``replay`` re-runs a saved run record. Output files go to ``--out-dir``
(default ``$RELLOC_OUT_DIR`` or ``./relloc-out``).

Files written (positions in lambda, momenta in h/lambda):

simulate1d
    position_density.csv  ``x [lambda], P [1/lambda]``
    momentum_density.csv  ``p [h/lambda], Q [lambda/h]``
    events.csv            ``index, scattered (0/1), theta [rad], wavelength [lambda]``
simulate3d
    marginals.csv         ``x [lambda], Px, Py, Pz [1/lambda]``
    points.csv            ``x, y, z [lambda]`` sampled from |c|^2
    events.csv            ``index, scattered, theta [rad], phi [rad], wavelength [lambda]``
discriminate
    posterior.csv         ``run, P_nl(dp=...)`` one column per resolution

Every command also writes ``run_record.json``. Exit status: 0 success,
1 invalid arguments, 2 runtime failure.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .discriminator import resolution_sweep
from .errors import InvalidDimensionError, InvalidGridError, InvalidParameterError, RellocError
from .io import read_record, write_record, write_table
from .momentum import momentum_grid
from .spectra import parse_source
from .tof import TofParameters, tof_resolution
from .wave1d import (
    EventKind,
    flat_state,
    has_mirror_peaks,
    momentum_density,
    position_density,
    run_localisation,
)
from .wave3d import density_export_3d, flat_state_3d, principal_axis, run_localisation_3d

log = logging.getLogger("relloc")

OUT_DIR_ENV = "RELLOC_OUT_DIR"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _positive_int(minimum):
    def convert(text):
        value = int(text)
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {value}")
        return value
    return convert


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _nonnegative_float(text):
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {value}")
    return value


def _dp_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad resolution list {text!r}") from None
    if not values or any(v < 0 for v in values):
        raise argparse.ArgumentTypeError("resolutions must be non-negative")
    return values


def _shared(p, grid_default):
    p.add_argument("--seed", type=int, default=None, help="RNG seed (drawn from entropy and recorded if omitted)")
    p.add_argument("--out-dir", default=None, help=f"output directory (default ${OUT_DIR_ENV} or ./relloc-out)")
    p.add_argument("--grid", type=_positive_int(2), default=grid_default, help="grid points per axis")
    p.add_argument("--photons", type=_positive_int(0), default=150)
    p.add_argument("--d", type=_positive_float, default=1.0, help="half-width of the region, in lambda")
    p.add_argument("--source", default="mono:1", help="mono:<lambda> or blackbody:<kelvin>")
    p.add_argument("--reference-wavelength", type=_positive_float, default=1e-6,
                   help="reference wavelength in metres (sets blackbody units)")
    p.add_argument("--p-max", type=_positive_float, default=8.0, help="momentum window half-width, h/lambda")
    p.add_argument("--p-bins", type=_positive_int(2), default=1025)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="relloc", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"relloc {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate1d", help="localise a 1D pair and write densities")
    _shared(p, 2048)

    p = sub.add_parser("simulate3d", help="localise a 3D pair and write marginals and a point cloud")
    _shared(p, 64)
    p.add_argument("--samples", type=_positive_int(0), default=20000, help="point-cloud size")

    p = sub.add_parser("discriminate", help="Bayesian induced-vs-prior localisation test")
    _shared(p, 2048)
    p.add_argument("--runs", type=_positive_int(1), default=20)
    p.add_argument("--experiments", type=_positive_int(1), default=300)
    p.add_argument("--dp", type=_dp_list, default=[0.0], help="comma-separated resolutions, h/lambda")
    p.add_argument("--truth", choices=["delocalised", "localised"], default="delocalised")
    p.add_argument("--workers", type=_positive_int(1), default=1)

    p = sub.add_parser("tof", help="detector resolution for a momentum resolution")
    p.add_argument("--mass", type=_positive_float, default=87.0, help="atomic mass units")
    p.add_argument("--wavelength", type=_positive_float, default=400e-9, help="metres")
    p.add_argument("--time", type=_nonnegative_float, default=5e-3, help="flight time, seconds")
    p.add_argument("--detector-length", type=_positive_float, default=10e-3, help="metres")
    p.add_argument("--dp", type=_nonnegative_float, default=0.5, help="momentum resolution, h/lambda")
    p.add_argument("--p-max", type=_positive_float, default=8.0)
    p.add_argument("--out-dir", default=None)

    p = sub.add_parser("replay", help="re-run the command stored in a run record")
    p.add_argument("record")
    p.add_argument("--out-dir", default=None)
    return parser


def _out_dir(config) -> Path:
    out = Path(config.get("out_dir") or os.environ.get(OUT_DIR_ENV) or "relloc-out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _fill_seed(config):
    if config.get("seed") is None:
        config["seed"] = int(np.random.SeedSequence().entropy % (2**63))
    return config["seed"]


def _record_config(config):
    return {k: v for k, v in config.items() if k not in ("out_dir", "verbose", "command")}


def simulate1d(config: dict) -> dict:
    seed = _fill_seed(config)
    source = parse_source(config["source"], config["reference_wavelength"])
    state, events = run_localisation(flat_state(config["d"], config["grid"]), config["photons"], source, seed)
    p = momentum_grid(config["p_max"], config["p_bins"])
    pos = position_density(state)
    mom = momentum_density(state, p)
    out = _out_dir(config)
    write_table(out / "position_density.csv", {"x [lambda]": state.x, "P [1/lambda]": pos},
                "relloc simulate1d position density")
    write_table(out / "momentum_density.csv", {"p [h/lambda]": p, "Q [lambda/h]": mom.q},
                "relloc simulate1d momentum density")
    _write_events(out / "events.csv", events.events, three_d=False)
    two_peaks = bool(has_mirror_peaks(state)) if config["photons"] else False
    write_record(out / "run_record.json", "simulate1d", _record_config(config),
                 events=events.to_dict(), position_density=pos, momentum_density=mom.q,
                 summary={"two_mirror_peaks": two_peaks})
    return {"out_dir": str(out), "seed": seed, "two_mirror_peaks": two_peaks,
            "position": pos, "momentum": mom.q}


def simulate3d(config: dict) -> dict:
    seed = _fill_seed(config)
    source = parse_source(config["source"], config["reference_wavelength"])
    rng = np.random.default_rng(seed)
    state, events = run_localisation_3d(flat_state_3d(config["d"], config["grid"]), config["photons"], source, rng)
    events.seed = seed
    cloud = density_export_3d(state, config["samples"], rng)
    out = _out_dir(config)
    mx, my, mz = cloud.marginals
    write_table(out / "marginals.csv",
                {"x [lambda]": cloud.axis, "Px [1/lambda]": mx, "Py [1/lambda]": my, "Pz [1/lambda]": mz},
                "relloc simulate3d marginal densities")
    write_table(out / "points.csv", {"x [lambda]": cloud.points[:, 0], "y [lambda]": cloud.points[:, 1],
                                     "z [lambda]": cloud.points[:, 2]},
                "relloc simulate3d point cloud drawn from |c|^2")
    _write_events(out / "events.csv", events.events, three_d=True)
    axis = principal_axis(state)
    write_record(out / "run_record.json", "simulate3d", _record_config(config),
                 events=events.to_dict(), marginals=[mx, my, mz], points=cloud.points,
                 summary={"principal_axis": axis})
    return {"out_dir": str(out), "seed": seed, "marginals": (mx, my, mz), "points": cloud.points,
            "density": state.density()}


def discriminate(config: dict) -> dict:
    seed = _fill_seed(config)
    source = parse_source(config["source"], config["reference_wavelength"])
    p = momentum_grid(config["p_max"], config["p_bins"])
    mean, traces = resolution_sweep(
        config["truth"], config["dp"], config["experiments"], config["runs"], config["photons"], source, seed,
        d=config["d"], n=config["grid"], p_grid=p, workers=config.get("workers", 1), return_traces=True,
    )
    out = _out_dir(config)
    columns = {"run": np.arange(config["runs"] + 1)}
    for dp, curve in zip(config["dp"], mean):
        columns[f"P_nl(dp={dp:g} h/lambda)"] = curve
    title = f"relloc discriminate mean posterior over {config['experiments']} experiments, truth={config['truth']}"
    write_table(out / "posterior.csv", columns, title)
    write_record(out / "run_record.json", "discriminate", _record_config(config),
                 mean_p_nl=mean, traces=traces if config["experiments"] <= 50 else None)
    return {"out_dir": str(out), "seed": seed, "mean": mean}


def tof(config: dict) -> dict:
    params = TofParameters(config["mass"], config["wavelength"], config["time"], config["detector_length"],
                           config["dp"])
    result = tof_resolution(params, config["p_max"])
    print(f"detector resolution: {result.resolution * 1e6:.3f} um")
    print(f"momentum window +-{config['p_max']:g} h/lambda spans {result.window_span * 1e3:.3f} mm "
          f"({'fits' if result.fits_detector else 'exceeds'} {params.detector_length * 1e3:g} mm detector)")
    if config.get("out_dir"):
        out = _out_dir(config)
        write_record(out / "run_record.json", "tof", _record_config(config),
                     resolution=result.resolution, window_span=result.window_span)
    return {"resolution": result.resolution, "window_span": result.window_span}


def _write_events(path, events, three_d):
    kinds = np.array([e.kind is EventKind.SCATTERED for e in events], dtype=float)
    theta = np.array([np.nan if e.theta is None else e.theta for e in events])
    wl = np.array([e.wavelength for e in events])
    cols = {"index": np.arange(len(events)), "scattered": kinds, "theta [rad]": theta}
    if three_d:
        cols["phi [rad]"] = np.array([np.nan if e.phi is None else e.phi for e in events])
    cols["wavelength [lambda]"] = wl
    write_table(path, cols, "relloc photon events")


COMMANDS = {"simulate1d": simulate1d, "simulate3d": simulate3d, "discriminate": discriminate, "tof": tof}


def replay(record_path, out_dir=None) -> dict:
    record = read_record(record_path)
    config = dict(record["config"])
    config["out_dir"] = out_dir
    return COMMANDS[record["command"]](config)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "replay":
            result = replay(args.record, args.out_dir)
        else:
            result = COMMANDS[args.command](vars(args))
    except (InvalidParameterError, InvalidDimensionError, InvalidGridError) as exc:
        print(f"relloc: error: {exc}", file=sys.stderr)
        return 1
    except (RellocError, ValueError, ArithmeticError) as exc:
        print(f"relloc: error: {exc}", file=sys.stderr)
        return 2
    if "out_dir" in result:
        print(f"wrote {result['out_dir']} (seed {result['seed']})")
    if "two_mirror_peaks" in result:
        print(f"two mirror peaks: {result['two_mirror_peaks']}")
    if "mean" in result:
        for dp, curve in zip(vars(args).get("dp") or [], result["mean"]):
            print(f"dp={dp:g}: mean P_nl after {curve.size - 1} runs = {curve[-1]:.4f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
