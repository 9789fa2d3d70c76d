"""File formats: run configs, intensity images, density matrices, figure tables.

All writers are deterministic: the same inputs produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .completeness import CompletenessReport, ScanRow
from .modes import ModeIndex, Subspace, TruncationSpec
from .povm import PixelGrid
from .reconstruction import MlOptions, MlResult, RenderedMatrix
from .simulation import IntensityImage, StateSpec


class ConfigError(ValueError):
    """Invalid or unparseable run configuration."""


@dataclass(frozen=True)
class RunConfig:
    """One reproducible experiment manifest."""

    subspace: TruncationSpec
    grid: PixelGrid
    state: StateSpec | None = None
    photons: int | None = None
    seed: int | None = None
    rel_tol: float = 1e-9
    ml: MlOptions = MlOptions()
    ell_shift: int = 0


def _require_keys(section: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")
    missing = required - set(section)
    if missing:
        raise ConfigError(f"missing required key(s) in {where}: {', '.join(sorted(missing))}")


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where} must be an integer, got {value!r}")
    return value


def parse_config(data: dict) -> RunConfig:
    """Validate a configuration dictionary; unknown keys are rejected."""
    if not isinstance(data, dict):
        raise ConfigError(f"config must be a JSON object, got {type(data).__name__}")
    _require_keys(
        data,
        allowed={"subspace", "grid", "state", "photons", "seed", "rel_tol", "ml", "ell_shift"},
        required={"subspace", "grid"},
        where="config",
    )
    try:
        sub = data["subspace"]
        _require_keys(
            sub, {"p_min", "p_max", "ell_min", "ell_max"},
            {"p_min", "p_max", "ell_min", "ell_max"}, "subspace",
        )
        subspace = TruncationSpec(
            p_min=_int(sub["p_min"], "subspace.p_min"),
            p_max=_int(sub["p_max"], "subspace.p_max"),
            ell_min=_int(sub["ell_min"], "subspace.ell_min"),
            ell_max=_int(sub["ell_max"], "subspace.ell_max"),
        )
        gr = data["grid"]
        _require_keys(gr, {"nx", "ny", "half_width"}, {"nx", "ny", "half_width"}, "grid")
        grid = PixelGrid(
            nx=_int(gr["nx"], "grid.nx"),
            ny=_int(gr["ny"], "grid.ny"),
            half_width=float(gr["half_width"]),
        )
        state = None
        if data.get("state") is not None:
            terms = []
            for i, term in enumerate(data["state"]):
                _require_keys(term, {"ell", "p", "re", "im"}, {"ell", "p", "re"}, f"state[{i}]")
                mode = ModeIndex(_int(term["ell"], "state.ell"), _int(term["p"], "state.p"))
                terms.append((mode, complex(float(term["re"]), float(term.get("im", 0.0)))))
            state = StateSpec(tuple(terms))
        ml_data = data.get("ml", {})
        _require_keys(ml_data, {"max_iters", "dilution", "stop_tol", "start"}, set(), "ml")
        ml = MlOptions(
            max_iters=_int(ml_data.get("max_iters", 5000), "ml.max_iters"),
            dilution=float(ml_data.get("dilution", 1.0)),
            stop_tol=float(ml_data.get("stop_tol", 1e-12)),
            start=str(ml_data.get("start", "maximally_mixed")),
        )
        photons = data.get("photons")
        if photons is not None:
            photons = _int(photons, "photons")
            if photons < 0:
                raise ConfigError(f"photons must be nonnegative, got {photons}")
        seed = data.get("seed")
        if seed is not None:
            seed = _int(seed, "seed")
        rel_tol = float(data.get("rel_tol", 1e-9))
        if rel_tol <= 0.0:
            raise ConfigError(f"rel_tol must be positive, got {rel_tol}")
        return RunConfig(
            subspace=subspace,
            grid=grid,
            state=state,
            photons=photons,
            seed=seed,
            rel_tol=rel_tol,
            ml=ml,
            ell_shift=_int(data.get("ell_shift", 0), "ell_shift"),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(data)


def _fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_image(path: str | Path, image: IntensityImage) -> None:
    """One value per line, row-major (y outer, x inner), after a header line
    carrying nx, ny, half_width, kind, total_photons and seed."""
    grid = image.grid
    header = ",".join(
        [
            str(grid.nx),
            str(grid.ny),
            repr(float(grid.half_width)),
            image.kind,
            "" if image.total_photons is None else str(image.total_photons),
            "" if image.seed is None else str(image.seed),
        ]
    )
    lines = [f"# {header}"]
    if image.kind == "counts":
        lines += [str(int(v)) for v in image.values]
        if image.remainder is not None:
            lines.append(f"rem,{int(image.remainder)}")
    else:
        lines += [repr(float(v)) for v in image.values]
        if image.remainder is not None:
            lines.append(f"rem,{repr(float(image.remainder))}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_image(path: str | Path) -> IntensityImage:
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ValueError(f"{path}: missing image header line")
    fields = lines[0][2:].split(",")
    if len(fields) != 6:
        raise ValueError(f"{path}: malformed image header {lines[0]!r}")
    nx, ny = int(fields[0]), int(fields[1])
    grid = PixelGrid(nx=nx, ny=ny, half_width=float(fields[2]))
    kind = fields[3]
    total_photons = int(fields[4]) if fields[4] else None
    seed = int(fields[5]) if fields[5] else None
    values = []
    remainder = None
    for line in lines[1:]:
        line = line.strip()
        if not line:
            continue
        if line.startswith("rem,"):
            remainder = float(line[4:])
            continue
        values.append(float(line))
    if len(values) != nx * ny:
        raise ValueError(f"{path}: expected {nx * ny} pixel values, found {len(values)}")
    return IntensityImage(
        grid=grid,
        values=np.array(values),
        kind=kind,
        remainder=remainder,
        total_photons=total_photons,
        seed=seed,
    )


def _json_dump(path: str | Path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_density_matrix(path: str | Path, rho: np.ndarray, s: Subspace) -> None:
    """Self-describing JSON with mode labels and real/imaginary tables."""
    rho = np.asarray(rho, dtype=complex)
    _json_dump(
        path,
        {
            "dim": s.dim,
            "modes": [[m.ell, m.p] for m in s.modes],
            "re": rho.real.tolist(),
            "im": rho.imag.tolist(),
        },
    )


def read_density_matrix(path: str | Path) -> tuple[np.ndarray, Subspace]:
    data = json.loads(Path(path).read_text())
    s = Subspace(tuple(ModeIndex(int(ell), int(p)) for ell, p in data["modes"]))
    rho = np.array(data["re"], dtype=complex) + 1j * np.array(data["im"], dtype=float)
    if rho.shape != (data["dim"], data["dim"]) or s.dim != data["dim"]:
        raise ValueError(f"{path}: inconsistent dimensions")
    return rho, s


def write_completeness_report(path: str | Path, report: CompletenessReport) -> None:
    _json_dump(
        path,
        {
            "rank": report.rank,
            "required": report.required,
            "complete": bool(report.complete),
            "singular_values": [float(v) for v in report.singular_values],
            "kernel": [[float(x) for x in row] for row in report.kernel],
        },
    )


def write_diagnostics(path: str | Path, result: MlResult, fid: float | None = None) -> None:
    data = {
        "iterations": result.iterations,
        "log_likelihood": result.log_likelihood,
        "converged": bool(result.converged),
        "unique": bool(result.unique),
        "gauge_note": result.gauge_note,
    }
    if fid is not None:
        data["fidelity"] = float(fid)
    _json_dump(path, data)


@dataclass(frozen=True)
class FigureTable:
    """A rectangular numeric table destined for a CSV file."""

    kind: str  # incompatibility_map | completeness_scan | intensity | density_matrix
    header: tuple[str, ...]
    rows: tuple[tuple, ...]

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.header):
                raise ValueError(f"row {row!r} does not match header {self.header}")


def write_figure_table(path: str | Path, table: FigureTable) -> None:
    lines = [",".join(table.header)]
    lines += [",".join(_fmt(v) for v in row) for row in table.rows]
    Path(path).write_text("\n".join(lines) + "\n")


def scan_table(rows: list[ScanRow]) -> FigureTable:
    """Completeness-scan rows as a fixed-column table."""
    return FigureTable(
        kind="completeness_scan",
        header=("ell_cutoff", "d", "rank", "required", "complete"),
        rows=tuple((r.ell_cutoff, r.d, r.rank, r.required, r.complete) for r in rows),
    )


def incompatibility_table(p_cutoffs, ell_cutoffs, values: np.ndarray) -> FigureTable:
    rows = []
    for i, pc in enumerate(p_cutoffs):
        for j, lc in enumerate(ell_cutoffs):
            rows.append((pc, lc, float(values[i, j])))
    return FigureTable(
        kind="incompatibility_map",
        header=("p_cutoff", "ell_cutoff", "commutator_norm"),
        rows=tuple(rows),
    )


def matrix_tables(rendered: RenderedMatrix) -> tuple[FigureTable, FigureTable]:
    """Real and imaginary density-matrix tables with mode-labeled rows."""

    def build(part: np.ndarray) -> FigureTable:
        rows = tuple(
            (label,) + tuple(float(x) for x in row)
            for label, row in zip(rendered.labels, part)
        )
        return FigureTable(kind="density_matrix", header=("mode",) + rendered.labels, rows=rows)

    return build(rendered.real), build(rendered.imag)
