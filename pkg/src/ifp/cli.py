"""Command-line front end.

Three subcommands::

    ifp zeno-sweep --n 1..100 --p 0:0.01:1 --variant mixture -o zeno.csv
    ifp snr-sweep  --n 1..100 --variant mixture -o snr.csv
    ifp run --config scenario.cfg -o outdir/ [--seed 42] [--heatmaps]

Integer ranges are ``a..b`` (inclusive), float ranges ``start:step:stop``
(inclusive of the stop when it lands on the grid); both accept plain values
and comma-separated combinations. All numeric output is fixed at 12
significant digits with LF line endings so files are byte-reproducible.

Exit status: 0 success, 1 runtime error (e.g. unwritable output), 2 usage
or validation error.
"""

import argparse
import dataclasses
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .config import load_scenario
from .errors import PolarimetryError
from .heatmap import render_heatmap_svg
from .polarization import BASES
from .protocol import HERALD_DETECTORS, reconstruct_image, simulate_heralded_run
from .stats import f_factor, mean_absorption
from .zeno import AbsorberModel, ZenoParams, run_protocol

__all__ = ["main", "entry", "build_parser"]

_VARIANTS = [v.value for v in AbsorberModel]


def _fmt(x):
    """12 significant digits, shortest form (golden-file stable).

    Magnitudes below 1e-12, pure float dust on this package's tolerance
    scale, print as 0 so derived columns like the discrimination signal
    stay clean.
    """
    x = float(x)
    if abs(x) < 1e-12:
        return "0"
    return format(x, ".12g")


def _parse_int_atom(atom):
    if ".." in atom:
        lo_s, _, hi_s = atom.partition("..")
        lo, hi = int(lo_s), int(hi_s)
        if hi < lo:
            raise ValueError(f"empty range {atom!r}")
        return list(range(lo, hi + 1))
    return [int(atom)]


def _parse_float_atom(atom):
    if ":" in atom:
        parts = atom.split(":")
        if len(parts) != 3:
            raise ValueError(f"float range must be start:step:stop, got {atom!r}")
        start, step, stop = (float(p) for p in parts)
        if step <= 0.0:
            raise ValueError(f"step must be positive in {atom!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        if count < 1:
            raise ValueError(f"empty range {atom!r}")
        return [start + k * step for k in range(count)]
    return [float(atom)]


def int_list(text):
    """argparse type: comma-separated ints and a..b ranges."""
    try:
        values = [v for atom in text.split(",") if atom.strip() for v in _parse_int_atom(atom.strip())]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if not values:
        raise argparse.ArgumentTypeError(f"no values in {text!r}")
    if any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("cycle counts must be >= 1")
    return values


def float_list(text):
    """argparse type: comma-separated floats and start:step:stop ranges."""
    try:
        values = [v for atom in text.split(",") if atom.strip() for v in _parse_float_atom(atom.strip())]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if not values:
        raise argparse.ArgumentTypeError(f"no values in {text!r}")
    if any(not 0.0 <= v <= 1.0 for v in values):
        raise argparse.ArgumentTypeError("block probabilities must be in [0, 1]")
    return values


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ifp",
        description="Interaction-free polarimetry: Zeno-interferometer sweeps and imaging runs.",
    )
    parser.add_argument("--version", action="version", version=f"ifp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    zs = sub.add_parser("zeno-sweep", help="detection/absorption probabilities over (n, p)")
    zs.add_argument("--n", type=int_list, required=True, metavar="RANGE", help="cycle counts, e.g. 1..100")
    zs.add_argument("--p", type=float_list, required=True, metavar="RANGE", help="block probabilities, e.g. 0:0.01:1")
    zs.add_argument("--variant", choices=_VARIANTS, default="mixture")
    zs.add_argument("-o", "--output", required=True, help="output CSV path")

    ss = sub.add_parser("snr-sweep", help="f(n), g(n), and mean absorption over n")
    ss.add_argument("--n", type=int_list, required=True, metavar="RANGE")
    ss.add_argument("--variant", choices=_VARIANTS, default="mixture")
    ss.add_argument("-o", "--output", required=True, help="output CSV path")

    run = sub.add_parser("run", help="simulate a scenario and reconstruct the sample")
    run.add_argument("--config", required=True, help="scenario file path")
    run.add_argument("-o", "--output", required=True, help="output directory")
    run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    run.add_argument("--heatmaps", action="store_true", help="also render SVG maps of the estimates")
    return parser


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def cmd_zeno_sweep(n_values, p_values, variant, output):
    variant = AbsorberModel(variant)
    lines = ["n,p,variant,p_d0,p_d1,p_abs,discrimination"]
    for n in n_values:
        for p in p_values:
            out = run_protocol(ZenoParams(n, p, variant))
            lines.append(
                ",".join(
                    [
                        str(n),
                        _fmt(p),
                        variant.value,
                        _fmt(out.p_d0),
                        _fmt(out.p_d1),
                        _fmt(out.p_abs),
                        _fmt(out.p_d0 - out.p_d1),
                    ]
                )
            )
    _write_text(output, "\n".join(lines) + "\n")
    return 0


def cmd_snr_sweep(n_values, variant, output):
    variant = AbsorberModel(variant)
    lines = ["n,variant,f,g,mean_absorption"]
    for n in n_values:
        f = f_factor(n, variant)
        mean_abs = mean_absorption(n, variant)
        g = f / math.sqrt(mean_abs) if mean_abs > 0.0 else math.inf
        lines.append(",".join([str(n), variant.value, _fmt(f), _fmt(g), _fmt(mean_abs)]))
    _write_text(output, "\n".join(lines) + "\n")
    return 0


def _write_coincidences(path, cfg, table):
    lines = ["x,y,basis,herald,pairs,c_d0,c_d1,c_abs"]
    for iy in range(cfg.sample.height):
        for ix in range(cfg.sample.width):
            for bi, basis in enumerate(cfg.bases):
                for det, det_label in enumerate(HERALD_DETECTORS):
                    c0, c1, ca = (int(v) for v in table.counts[iy, ix, bi, det])
                    lines.append(
                        f"{ix},{iy},{basis},{det_label},{int(table.pairs[iy, ix, bi, det])},{c0},{c1},{ca}"
                    )
    _write_text(path, "\n".join(lines) + "\n")


def _write_reconstruction(path, result):
    lines = ["x,y,tau_hat,d1_hat,d2_hat,d3_hat,tau_consistency"]
    for iy in range(result.height):
        for ix in range(result.width):
            d = result.d_hat[iy, ix]
            lines.append(
                ",".join(
                    [
                        str(ix),
                        str(iy),
                        _fmt(result.tau_hat[iy, ix]),
                        _fmt(d[0]),
                        _fmt(d[1]),
                        _fmt(d[2]),
                        _fmt(result.tau_consistency[iy, ix]),
                    ]
                )
            )
    _write_text(path, "\n".join(lines) + "\n")


def cmd_run_scenario(config_path, output_dir, seed=None, heatmaps=False):
    cfg = load_scenario(config_path)
    if seed is not None:
        cfg = dataclasses.replace(cfg, seed=seed)
    if set(cfg.bases) != set(BASES):
        print(
            f"ifp run: reconstruction requires all three bases {BASES}, config has {cfg.bases}",
            file=sys.stderr,
        )
        return 2
    os.makedirs(output_dir, exist_ok=True)
    table = simulate_heralded_run(cfg)
    result = reconstruct_image(table, cfg)
    _write_coincidences(os.path.join(output_dir, "coincidences.csv"), cfg, table)
    _write_reconstruction(os.path.join(output_dir, "reconstruction.csv"), result)
    manifest = {
        "command": "run",
        "config": os.path.basename(config_path),
        "cycles": cfg.n,
        "variant": cfg.variant.value,
        "source": cfg.source.value,
        "pairs_per_mode": cfg.pairs_per_mode,
        "bases": list(cfg.bases),
        "seed": cfg.seed,
        "width": cfg.sample.width,
        "height": cfg.sample.height,
        "clipped_estimates": int(result.clipped.sum()),
        "versions": {"ifp": __version__, "numpy": np.__version__},
    }
    _write_text(
        os.path.join(output_dir, "manifest.json"),
        json.dumps(manifest, indent=2, sort_keys=True) + "\n",
    )
    if heatmaps:
        _write_text(
            os.path.join(output_dir, "tau_hat.svg"),
            render_heatmap_svg(result.tau_hat, "tau_hat", vmin=0.0, vmax=1.0),
        )
        for k in range(3):
            _write_text(
                os.path.join(output_dir, f"d{k + 1}_hat.svg"),
                render_heatmap_svg(
                    result.d_hat[:, :, k], f"d{k + 1}_hat", vmin=-1.0, vmax=1.0, diverging=True
                ),
            )
        _write_text(
            os.path.join(output_dir, "tau_consistency.svg"),
            render_heatmap_svg(result.tau_consistency, "tau_consistency"),
        )
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "zeno-sweep":
            return cmd_zeno_sweep(args.n, args.p, args.variant, args.output)
        if args.command == "snr-sweep":
            return cmd_snr_sweep(args.n, args.variant, args.output)
        return cmd_run_scenario(args.config, args.output, seed=args.seed, heatmaps=args.heatmaps)
    except PolarimetryError as exc:
        print(f"ifp {args.command}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"ifp {args.command}: {exc}", file=sys.stderr)
        return 1


def entry():
    sys.exit(main())
