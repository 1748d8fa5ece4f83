"""Config parsing, delimited output, and run manifests.

All file writes go through a temp-file-then-rename so that readers never see
a partially written artifact.  Numeric CSV fields use 17 significant digits,
which round-trips IEEE doubles exactly.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import __version__
from .grid import PeriodicGrid
from .operators import CirculantOperator, OperatorPair, make_pair, make_standard
from .wavenumber import ErrorCurve, standard_error_pairs

FLOAT_FORMAT = "%.17g"

SEED_ENV_VAR = "MIXEDDERIV_SEED"


class ConfigError(ValueError):
    """A simulation config is missing or malforms a required field."""


def env_seed(default: int = 0) -> int:
    """Seed for randomized check suites, from MIXEDDERIV_SEED (default 0)."""
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class SimulationConfig:
    equation_id: str
    equation_params: Mapping[str, object]
    grid_size: int
    dt: float
    t_final: float
    method: str
    initial_generator: str
    initial_params: Mapping[str, object]
    monitors: Sequence[str] | None
    output_stride: int
    source_digest: str = ""
    raw: Mapping[str, object] = field(default_factory=dict)


def _require(section: Mapping, key: str, path: str, kind=None):
    if key not in section:
        raise ConfigError(f"config is missing required field '{path}'")
    value = section[key]
    if kind is not None and not isinstance(value, kind):
        raise ConfigError(
            f"config field '{path}' has wrong type "
            f"{type(value).__name__}, expected {getattr(kind, '__name__', kind)}")
    return value


def parse_config(data: Mapping, digest: str = "") -> SimulationConfig:
    if not isinstance(data, Mapping):
        raise ConfigError("config root must be a JSON object")
    equation = _require(data, "equation", "equation", dict)
    grid = _require(data, "grid", "grid", dict)
    time_sec = _require(data, "time", "time", dict)
    initial = _require(data, "initial_data", "initial_data", dict)

    eq_id = _require(equation, "id", "equation.id", str)
    k = _require(grid, "K", "grid.K", int)
    if isinstance(k, bool) or k < 4:
        raise ConfigError("config field 'grid.K' must be an integer >= 4")
    dt = _require(time_sec, "dt", "time.dt", (int, float))
    t_final = _require(time_sec, "t_final", "time.t_final", (int, float))
    if dt <= 0:
        raise ConfigError("config field 'time.dt' must be positive")
    if t_final < dt:
        raise ConfigError("config field 'time.t_final' must be at least 'time.dt'")
    method = _require(data, "method", "method", str)
    generator = _require(initial, "generator", "initial_data.generator", str)

    monitors = data.get("monitors")
    if monitors is not None and (not isinstance(monitors, list)
                                 or not all(isinstance(m, str) for m in monitors)):
        raise ConfigError("config field 'monitors' must be a list of strings")
    output = data.get("output", {})
    if not isinstance(output, dict):
        raise ConfigError("config field 'output' must be an object")
    stride = output.get("stride", 1)
    if not isinstance(stride, int) or isinstance(stride, bool) or stride < 1:
        raise ConfigError("config field 'output.stride' must be an integer >= 1")

    eq_params = equation.get("params", {})
    if not isinstance(eq_params, dict):
        raise ConfigError("config field 'equation.params' must be an object")
    init_params = initial.get("params", {})
    if not isinstance(init_params, dict):
        raise ConfigError("config field 'initial_data.params' must be an object")

    return SimulationConfig(
        equation_id=eq_id,
        equation_params=eq_params,
        grid_size=k,
        dt=float(dt),
        t_final=float(t_final),
        method=method,
        initial_generator=generator,
        initial_params=init_params,
        monitors=list(monitors) if monitors is not None else None,
        output_stride=stride,
        source_digest=digest,
        raw=dict(data),
    )


def load_config(path: str | Path) -> SimulationConfig:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as err:
        raise ConfigError(f"cannot read config file {path}: {err}") from None
    try:
        data = json.loads(blob)
    except json.JSONDecodeError as err:
        raise ConfigError(f"config file {path} is not valid JSON: {err}") from None
    return parse_config(data, digest=hashlib.sha256(blob).hexdigest())


# ---------------------------------------------------------------------------
# atomic writers


def _atomic_write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def write_csv(path: str | Path, header: Sequence[str],
              rows: Iterable[Sequence[float]]):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(FLOAT_FORMAT % float(x) for x in row))
    _atomic_write_text(Path(path), "\n".join(lines) + "\n")


def read_csv(path: str | Path) -> tuple[list[str], np.ndarray]:
    with open(path) as handle:
        header = handle.readline().strip().split(",")
        data = np.loadtxt(handle, delimiter=",", ndmin=2)
    return header, data


def write_manifest(path: str | Path, manifest: Mapping):
    _atomic_write_text(Path(path), json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def base_manifest(config_echo: Mapping | None = None) -> dict:
    return {
        "tool": "mixedderiv",
        "version": __version__,
        "created_utc": datetime.now(timezone.utc).isoformat(),
        "seed_env": os.environ.get(SEED_ENV_VAR),
        "config": dict(config_echo) if config_echo else None,
    }


# ---------------------------------------------------------------------------
# simulation outputs


def write_simulation_outputs(record, out_dir: str | Path,
                             config: SimulationConfig | None = None,
                             figures: bool = True) -> dict:
    """Write states.csv, monitors.csv, figures and manifest.json; return the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    k = record.states.shape[1]

    states_path = out / "states.csv"
    write_csv(states_path,
              ["t"] + [f"u_{i}" for i in range(k)],
              (np.concatenate(([t], row))
               for t, row in zip(record.times, record.states)))

    monitors_path = out / "monitors.csv"
    names = list(record.monitors)
    write_csv(monitors_path,
              ["t"] + names,
              (np.concatenate(([t], [record.monitors[n][i] for n in names]))
               for i, t in enumerate(record.times)))

    outputs = [states_path.name, monitors_path.name]
    if figures:
        from . import figures as fig
        outputs.append(fig.render_monitor_series(record, out / "monitors.png").name)
        outputs.append(fig.render_state_evolution(record, out / "states.png").name)

    manifest = base_manifest(config.raw if config else None)
    manifest.update({
        "config_sha256": config.source_digest if config else None,
        "equation": record.equation.name,
        "equation_params": {key: val for key, val in record.equation.params.items()},
        "method": record.method,
        "dt": record.dt,
        "status": {
            "kind": record.status.kind,
            "time": record.status.time,
            "detail": record.status.detail,
            "ladder_value": record.status.ladder_value,
        },
        "warnings": record.warnings,
        "runtime_seconds": record.wall_seconds,
        "outputs": outputs,
    })
    write_manifest(out / "manifest.json", manifest)
    return manifest


# ---------------------------------------------------------------------------
# spectral-error outputs

BUILTIN_OPERATOR_LABELS = ("central", "one_sided", "average_difference",
                           "fourier_spectral")


def _pair_from_spec(label: str, spec: Mapping, grid: PeriodicGrid) -> OperatorPair:
    if not isinstance(spec, Mapping) or "stencil" not in spec:
        raise ConfigError(
            f"operator {label!r}: expected an object with a 'stencil' field")

    def parse_stencil(entries, scale: float) -> dict[int, float]:
        stencil = {}
        for item in entries:
            if (not isinstance(item, Sequence) or len(item) != 2
                    or isinstance(item, str)):
                raise ConfigError(
                    f"operator {label!r}: stencil entries must be "
                    "[offset, coefficient] pairs")
            offset, coeff = item
            if not isinstance(offset, int) or isinstance(offset, bool):
                raise ConfigError(f"operator {label!r}: offsets must be integers")
            stencil[offset] = stencil.get(offset, 0.0) + float(coeff) * scale
        return stencil

    # difference coefficients are given in units of 1/dx, average ones verbatim
    diff = CirculantOperator.from_stencil(
        grid, parse_stencil(spec["stencil"], 1.0 / grid.dx), name=label)
    if "average" in spec:
        avg = CirculantOperator.from_stencil(
            grid, parse_stencil(spec["average"], 1.0), name=label + "_avg")
        return OperatorPair(diff, avg, name=label)
    return OperatorPair.plain(diff, name=label)


def load_operator_set(ops_arg: str, grid: PeriodicGrid) -> dict[str, OperatorPair]:
    """Resolve --ops: comma-separated builtin labels, or a JSON stencil file.

    The JSON shape is ``{"label": {"stencil": [[offset, coeff], ...],
    "average": [[offset, coeff], ...]}}`` where the difference coefficients
    are in units of 1/dx and the optional average side is dimensionless.
    """
    candidate = Path(ops_arg)
    if ops_arg.endswith(".json") or candidate.is_file():
        try:
            data = json.loads(candidate.read_text())
        except OSError as err:
            raise ConfigError(f"cannot read operator file {ops_arg}: {err}") from None
        except json.JSONDecodeError as err:
            raise ConfigError(f"operator file {ops_arg} is not valid JSON: {err}") from None
        if not isinstance(data, Mapping) or not data:
            raise ConfigError("operator file must map labels to operator specs")
        return {str(lbl): _pair_from_spec(str(lbl), spec, grid)
                for lbl, spec in data.items()}

    labels = [lbl.strip() for lbl in ops_arg.split(",") if lbl.strip()]
    if not labels:
        raise ConfigError("no operator labels given")
    builtin = standard_error_pairs(grid)
    pairs = {}
    for lbl in labels:
        if lbl not in builtin:
            raise ConfigError(
                f"unknown operator label {lbl!r}; "
                f"builtin labels: {', '.join(BUILTIN_OPERATOR_LABELS)}")
        pairs[lbl] = builtin[lbl]
    return pairs


def write_error_curve_outputs(curve: ErrorCurve, out_path: str | Path,
                              figures: bool = True) -> list[Path]:
    """Write the sampled curve CSV, a companion closed-form CSV and a figure.

    For ``--out curves.csv`` the companion lands at
    ``curves_closed_form.csv`` and the figure at ``curves.png``.
    """
    out = Path(out_path)
    labels = list(curve.errors)
    write_csv(out, ["omega_tilde"] + labels,
              (np.concatenate(([wt], [curve.errors[lbl][i] for lbl in labels]))
               for i, wt in enumerate(curve.omega_tilde)))
    written = [out]

    if curve.closed_form:
        closed_labels = list(curve.closed_form)
        companion = out.with_name(out.stem + "_closed_form" + (out.suffix or ".csv"))
        write_csv(companion, ["omega_tilde"] + closed_labels,
                  (np.concatenate(([wt], [curve.closed_form[lbl][i]
                                          for lbl in closed_labels]))
                   for i, wt in enumerate(curve.omega_tilde)))
        written.append(companion)

    if figures:
        from . import figures as fig
        written.append(fig.render_error_curves(curve, out.with_suffix(".png")))
    return written
