"""Command-line pipeline: subspace selection, completeness check, scan
simulation and maximum-likelihood reconstruction.

Exit codes: 0 success, 1 invalid input, 2 completeness check failed.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .completeness import completeness_scan, is_informationally_complete
from .fileio import (
    ConfigError,
    RunConfig,
    incompatibility_table,
    load_config,
    matrix_tables,
    read_image,
    scan_table,
    write_completeness_report,
    write_density_matrix,
    write_diagnostics,
    write_figure_table,
    write_image,
)
from .modes import Subspace, build_subspace, ell_shift
from .povm import PovmSet, incompatibility_map, induced_povm
from .reconstruction import fidelity, ml_reconstruct, render_matrix
from .simulation import add_noise, ideal_intensity, make_state

# Truncation ranges for the pixel-pair incompatibility table; the reference
# pixel pair sits one mode unit apart, matching the map's original geometry.
_MAP_PIXELS = ((0.0, 0.0), (0.0, 1.0))
_MAP_P_CUTOFFS = range(0, 6)
_MAP_ELL_CUTOFFS = range(0, 6)


def _subspaces(config: RunConfig) -> tuple[Subspace, Subspace]:
    """Base (state labels) and working (detected labels) subspaces."""
    base = build_subspace(config.subspace)
    return base, ell_shift(base, config.ell_shift)


def _build_povm(config: RunConfig) -> PovmSet:
    _, working = _subspaces(config)
    return induced_povm(config.grid, working)


def cmd_check(config: RunConfig, out_dir: Path) -> int:
    povm = _build_povm(config)
    report = is_informationally_complete(povm, config.rel_tol)
    write_completeness_report(out_dir / "completeness.json", report)
    status = "complete" if report.complete else "INCOMPLETE"
    print(
        f"{status}: rank {report.rank}/{report.required} (d={povm.dim}), "
        f"defect {povm.completeness_defect:.3e}, closure {povm.closure_applied}"
    )
    return 0 if report.complete else 2


def cmd_simulate(config: RunConfig, out_dir: Path) -> int:
    if config.state is None:
        raise ConfigError("simulate requires a state section in the config")
    base, _ = _subspaces(config)
    rho = make_state(config.state, base)
    povm = _build_povm(config)
    image = ideal_intensity(rho, povm)
    write_image(out_dir / "ideal.csv", image)
    msg = f"wrote ideal.csv ({image.grid.n_pixels} pixels, remainder {image.remainder:.6e})"
    if config.photons is not None:
        seed = config.seed if config.seed is not None else 0
        counts = add_noise(image, config.photons, seed)
        write_image(out_dir / "counts.csv", counts)
        msg += f"; counts.csv ({config.photons} photons, seed {seed})"
    print(msg)
    return 0


def cmd_reconstruct(config: RunConfig, counts_path: Path, out_dir: Path) -> int:
    image = read_image(counts_path)
    if (image.grid.nx, image.grid.ny) != (config.grid.nx, config.grid.ny) or not np.isclose(
        image.grid.half_width, config.grid.half_width
    ):
        raise ValueError(
            f"counts grid {image.grid.nx}x{image.grid.ny} (hw {image.grid.half_width}) "
            f"does not match config grid {config.grid.nx}x{config.grid.ny} "
            f"(hw {config.grid.half_width})"
        )
    base, working = _subspaces(config)
    povm = _build_povm(config)
    counts = image.values
    if povm.closure_index is not None:
        if image.remainder is None:
            print("counts file has no remainder outcome; assuming 0 (masked detector)", file=sys.stderr)
            counts = np.append(counts, 0.0)
        else:
            counts = np.append(counts, image.remainder)
    result = ml_reconstruct(povm, counts, config.ml, rel_tol=config.rel_tol)
    write_density_matrix(out_dir / "rho.json", result.rho_hat, working)
    rendered = render_matrix(result.rho_hat, working)
    re_table, im_table = matrix_tables(rendered)
    write_figure_table(out_dir / "rho_re.csv", re_table)
    write_figure_table(out_dir / "rho_im.csv", im_table)
    fid = None
    if config.state is not None:
        fid = fidelity(make_state(config.state, base), result.rho_hat)
    write_diagnostics(out_dir / "diagnostics.json", result, fid)
    summary = (
        f"{'converged' if result.converged else 'NOT converged'} in {result.iterations} "
        f"iterations, logL={result.log_likelihood:.6f}, unique={str(result.unique).lower()}"
    )
    if fid is not None:
        summary += f", fidelity={fid:.6f}"
    if result.gauge_note:
        print(result.gauge_note, file=sys.stderr)
    print(summary)
    return 0


def cmd_figures(which: str, config: RunConfig | None, out_dir: Path) -> int:
    if which == "fig1":
        values = incompatibility_map(*_MAP_PIXELS, _MAP_P_CUTOFFS, _MAP_ELL_CUTOFFS)
        write_figure_table(
            out_dir / "fig1.csv",
            incompatibility_table(list(_MAP_P_CUTOFFS), list(_MAP_ELL_CUTOFFS), values),
        )
        print("wrote fig1.csv (pixel-pair incompatibility map)")
        return 0
    if which == "fig5":
        grid = config.grid if config is not None else None
        rel_tol = config.rel_tol if config is not None else 1e-9
        if grid is None:
            from .povm import PixelGrid

            grid = PixelGrid(nx=11, ny=11, half_width=3.5)
        cutoff_max = 6
        names = []
        for family in ("nonnegative", "symmetric"):
            rows = completeness_scan(grid, family, cutoff_max, rel_tol)
            name = f"fig5_{family}.csv"
            write_figure_table(out_dir / name, scan_table(rows))
            names.append(name)
        print(f"wrote {', '.join(names)} (completeness scans)")
        return 0
    raise ValueError(f"unknown figure {which!r}")


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vortextomo",
        description="Vortex-beam tomography from a single pixelized intensity scan",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config_required=True):
        p.add_argument("--config", type=Path, required=config_required, help="run config JSON")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")

    p_check = sub.add_parser("check", help="test informational completeness of the induced POVM")
    add_common(p_check)
    p_sim = sub.add_parser("simulate", help="write ideal and noisy intensity scans")
    add_common(p_sim)
    p_rec = sub.add_parser("reconstruct", help="maximum-likelihood fit from a counts file")
    add_common(p_rec)
    p_rec.add_argument("--counts", type=Path, required=True, help="intensity CSV to fit")
    p_fig = sub.add_parser("figures", help="emit CSV tables behind the survey figures")
    add_common(p_fig, config_required=False)
    p_fig.add_argument(
        "--which", choices=("fig1", "fig5"), required=True, help="which table set to produce"
    )
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        config = load_config(args.config) if args.config is not None else None
        if config is not None and args.seed is not None:
            config = replace(config, seed=args.seed)
        out_dir = args.out
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "check":
            return cmd_check(config, out_dir)
        if args.command == "simulate":
            return cmd_simulate(config, out_dir)
        if args.command == "reconstruct":
            return cmd_reconstruct(config, args.counts, out_dir)
        if args.command == "figures":
            return cmd_figures(args.which, config, out_dir)
        raise AssertionError(f"unhandled command {args.command}")
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
