"""Configuration parsing and persistence: snapshots, diagnostics CSV, key: value reports.

Snapshot layout (all little-endian)::

    b"NLSW"  int32 version(=1)  int32 dims  int32[dims] points
    f64[dims] lengths  f64 gamma  f64 omega  f64[dims] c
    complex128[prod(points)] u  complex128[prod(points)] v    (row-major)
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .grid import FieldPair, ModelParams, SpectralGrid, make_grid

log = logging.getLogger(__name__)

__all__ = [
    "SnapshotFormatError",
    "UnsupportedVersionError",
    "GridMismatchError",
    "RunConfig",
    "UsageError",
    "DEFAULTS",
    "SUBCOMMANDS",
    "write_snapshot",
    "read_snapshot",
    "write_diagnostics",
    "write_report",
    "read_report",
    "flatten_report",
    "parse_cli",
]

MAGIC = b"NLSW"
VERSION = 1


class SnapshotFormatError(ValueError):
    pass


class UnsupportedVersionError(SnapshotFormatError):
    pass


class GridMismatchError(SnapshotFormatError):
    pass


class UsageError(ValueError):
    """Bad command line or config file; the CLI exits with status 2."""


# -- snapshots --------------------------------------------------------------------


def write_snapshot(state: FieldPair, params: ModelParams, path) -> None:
    g = state.grid
    if params.dims != g.dims:
        raise ValueError("params and state disagree on dimension")
    head = bytearray(MAGIC)
    head += struct.pack("<ii", VERSION, g.dims)
    head += struct.pack(f"<{g.dims}i", *g.points_per_dim)
    head += struct.pack(f"<{g.dims}d", *g.box_lengths)
    head += struct.pack("<dd", params.gamma, params.omega)
    head += struct.pack(f"<{g.dims}d", *params.velocity)
    with open(path, "wb") as fh:
        fh.write(bytes(head))
        fh.write(np.ascontiguousarray(state.u, dtype="<c16").tobytes())
        fh.write(np.ascontiguousarray(state.v, dtype="<c16").tobytes())


def _take(buf: bytes, pos: int, fmt: str):
    size = struct.calcsize(fmt)
    if pos + size > len(buf):
        raise SnapshotFormatError("truncated snapshot header")
    return struct.unpack_from(fmt, buf, pos), pos + size


def read_snapshot(path, grid: SpectralGrid | None = None) -> tuple[FieldPair, ModelParams]:
    buf = Path(path).read_bytes()
    if buf[:4] != MAGIC:
        raise SnapshotFormatError(f"bad magic bytes {buf[:4]!r}")
    (version, dims), pos = _take(buf, 4, "<ii")
    if version != VERSION:
        raise UnsupportedVersionError(f"unsupported snapshot version {version}")
    if dims not in (1, 2, 3):
        raise SnapshotFormatError(f"bad dimension {dims}")
    pts, pos = _take(buf, pos, f"<{dims}i")
    lens, pos = _take(buf, pos, f"<{dims}d")
    (gamma, omega), pos = _take(buf, pos, "<dd")
    c, pos = _take(buf, pos, f"<{dims}d")
    try:
        file_grid = make_grid(dims, pts, lens)
    except ValueError as e:
        raise SnapshotFormatError(f"invalid grid in snapshot: {e}") from None
    count = int(np.prod(pts))
    need = pos + 2 * 16 * count
    if len(buf) < need:
        raise SnapshotFormatError(f"truncated snapshot: {len(buf)} bytes, expected {need}")
    if len(buf) > need:
        raise SnapshotFormatError("trailing bytes after snapshot payload")
    data = np.frombuffer(buf, dtype="<c16", count=2 * count, offset=pos)
    u = data[:count].reshape(pts).astype(complex)
    v = data[count:].reshape(pts).astype(complex)
    if grid is not None:
        if not (grid.points_per_dim == tuple(pts) and grid.box_lengths == tuple(lens)):
            raise GridMismatchError(f"snapshot grid {pts}/{lens} does not match "
                                    f"{grid.points_per_dim}/{grid.box_lengths}")
        file_grid = grid
    return FieldPair(u, v, file_grid), ModelParams(gamma, omega, tuple(c), dims)


# -- diagnostics ------------------------------------------------------------------


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def write_diagnostics(record, path) -> None:
    """CSV ``t,mass,energy,px[,py[,pz]],grad_norm,max_amp`` at 17 significant digits."""
    names = ["px", "py", "pz"][: record.dims]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "mass", "energy", *names, "grad_norm", "max_amp"])
        for i in range(len(record.times)):
            row = [record.times[i], record.mass[i], record.energy[i], *record.momentum[i],
                   record.grad_norm[i], record.max_amp[i]]
            w.writerow([_g17(x) for x in row])


class DiagnosticsSink:
    """Streams rows to a CSV as the evolution produces them."""

    def __init__(self, path, dims: int):
        self._fh = open(path, "w", newline="")
        self._w = csv.writer(self._fh, lineterminator="\n")
        self._w.writerow(["t", "mass", "energy", *["px", "py", "pz"][:dims], "grad_norm", "max_amp"])

    def __call__(self, row: dict) -> None:
        vals = [row["t"], row["mass"], row["energy"], *row["momentum"], row["grad_norm"], row["max_amp"]]
        self._w.writerow([_g17(x) for x in vals])

    def close(self):
        self._fh.close()


# -- reports ----------------------------------------------------------------------


def _scalar(v) -> str | None:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _g17(v)
    if isinstance(v, str):
        return v.replace("\n", " ")
    if v is None:
        return "none"
    return None


def flatten_report(result: Any, prefix: str = "") -> dict[str, str]:
    """Flatten dicts, dataclasses and sequences of scalars to ``key -> text``.

    Sequences of scalars become comma-separated values; nested containers get
    ``_``-joined keys. Arrays, fields and trajectories are skipped.
    """
    if dataclasses.is_dataclass(result) and not isinstance(result, type):
        items = {f.name: getattr(result, f.name) for f in dataclasses.fields(result)}
    elif isinstance(result, dict):
        items = result
    else:
        raise TypeError(f"cannot report a {type(result).__name__}")
    out: dict[str, str] = {}
    for k, v in items.items():
        key = f"{prefix}{k}"
        s = _scalar(v)
        if s is not None:
            out[key] = s
        elif isinstance(v, (list, tuple)):
            parts = [_scalar(x) for x in v]
            if all(p is not None for p in parts):
                out[key] = ",".join(parts)
            else:
                for i, x in enumerate(v):
                    if isinstance(x, dict) or dataclasses.is_dataclass(x):
                        out.update(flatten_report(x, f"{key}_{i}_"))
                    elif isinstance(x, (list, tuple)) and all(_scalar(y) is not None for y in x):
                        out[f"{key}_{i}"] = ",".join(_scalar(y) for y in x)
        elif isinstance(v, dict) or (dataclasses.is_dataclass(v) and not isinstance(v, type)):
            if not isinstance(v, (FieldPair, SpectralGrid)):
                out.update(flatten_report(v, f"{key}_"))
    return out


def write_report(result: Any, path) -> None:
    """Write a flat ``key: value`` document, one entry per line, in insertion order."""
    flat = flatten_report(result)
    with open(path, "w", newline="\n") as fh:
        for k, v in flat.items():
            fh.write(f"{k}: {v}\n")


def read_report(path) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text().splitlines():
        if line.strip():
            k, _, v = line.partition(": ")
            out[k] = v
    return out


# -- configuration ----------------------------------------------------------------

SUBCOMMANDS = ("ground-state", "evolve", "hfl", "gn", "scaling", "global", "nonexist", "verify")

DEFAULTS: dict[str, Any] = {
    "dims": 1,
    "n": None,            # 1024 in 1-D, 256 in 2-D, 64 in 3-D
    "L": None,            # 40 in 1-D, 30 in 2-D, 20 in 3-D
    "gamma": 1.0,
    "omega": 1.0,
    "c": None,            # zero vector
    "dt": None,           # 0.5 * min(dx)^2, halved when the peak amplitude doubles
    "t_end": 1.0,
    "tol": 1e-8,          # gradient tolerance (relative)
    "nehari_tol": 1e-10,
    "max_iterations": 50000,
    "seed": 0,
    "epsilon": 1e-3,
    "omegas": "4,16,64",
    "record_every": 10,
    "init": None,
    "out": "out",
    "log_level": "INFO",
}

_DIM_DEFAULTS = {1: (1024, 40.0), 2: (256, 30.0), 3: (64, 20.0)}


@dataclass
class RunConfig:
    subcommand: str
    dims: int
    points: tuple[int, ...]
    lengths: tuple[float, ...]
    gamma: float
    omega: float
    c: tuple[float, ...]
    dt: float | None
    t_end: float
    tol: float
    nehari_tol: float
    max_iterations: int
    seed: int
    epsilon: float
    omegas: tuple[float, ...]
    record_every: int
    init: str | None
    output_dir: Path
    log_level: str
    provenance: dict[str, str] = field(default_factory=dict)

    def grid(self) -> SpectralGrid:
        return make_grid(self.dims, self.points, self.lengths)

    def params(self) -> ModelParams:
        return ModelParams(self.gamma, self.omega, self.c, self.dims)

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["output_dir"] = str(self.output_dir)
        d.pop("provenance")
        return d


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="nlswave", description="Boosted ground states and dynamics of a coupled cubic NLS system.")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--dims", type=str)
    p.add_argument("--n", type=str, help="points per dimension (one value or comma list)")
    p.add_argument("--L", type=str, help="box length per dimension (one value or comma list)")
    p.add_argument("--gamma", type=str)
    p.add_argument("--omega", type=str)
    p.add_argument("--c", type=str, help="velocity, comma separated")
    p.add_argument("--dt", type=str)
    p.add_argument("--t-end", dest="t_end", type=str)
    p.add_argument("--tol", type=str)
    p.add_argument("--nehari-tol", dest="nehari_tol", type=str)
    p.add_argument("--max-iterations", dest="max_iterations", type=str)
    p.add_argument("--record-every", dest="record_every", type=str)
    p.add_argument("--seed", type=str)
    p.add_argument("--epsilon", type=str)
    p.add_argument("--omegas", type=str, help="frequency list for hfl/scaling")
    p.add_argument("--init", type=str, help="snapshot file used as initial state")
    p.add_argument("--config", type=str, help="key=value file; command-line flags take precedence")
    p.add_argument("--out", type=str)
    p.add_argument("--log-level", dest="log_level", type=str)
    return p


def _read_config_file(path: str) -> dict[str, str]:
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read config file {path}: {e}") from None
    for i, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{i}: expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        k = k.replace("-", "_")
        if k not in DEFAULTS:
            raise UsageError(f"{path}:{i}: unknown key {k!r}")
        out[k] = v
    return out


def _num(name: str, text: str, kind=float):
    try:
        x = kind(text)
    except (TypeError, ValueError):
        raise UsageError(f"--{name.replace('_', '-')}: malformed number {text!r}") from None
    if kind is float and not math.isfinite(x):
        raise UsageError(f"--{name}: value must be finite")
    return x


def _list(name: str, text: str, kind, dims: int | None) -> tuple:
    vals = tuple(_num(name, t.strip(), kind) for t in str(text).split(",") if t.strip() != "")
    if not vals:
        raise UsageError(f"--{name}: empty list")
    if dims is not None:
        if len(vals) == 1:
            vals = vals * dims
        elif len(vals) != dims:
            raise UsageError(f"--{name}: {len(vals)} values given for dims={dims}")
    return vals


def parse_cli(argv: Sequence[str]) -> RunConfig:
    """Parse ``argv`` (without the program name). Precedence: flag > config file > default."""
    ns = _parser().parse_args(list(argv))
    file_vals = _read_config_file(ns.config) if ns.config else {}
    raw: dict[str, Any] = {}
    prov: dict[str, str] = {}
    for key, default in DEFAULTS.items():
        cli_val = getattr(ns, key, None)
        if cli_val is not None:
            raw[key], prov[key] = cli_val, "flag"
            if key in file_vals and file_vals[key] != cli_val:
                log.info("config: %s=%s from flag overrides %s from %s", key, cli_val, file_vals[key], ns.config)
        elif key in file_vals:
            raw[key], prov[key] = file_vals[key], "config"
        else:
            raw[key], prov[key] = default, "default"

    dims = _num("dims", raw["dims"], int)
    if dims not in (1, 2, 3):
        raise UsageError(f"--dims must be 1, 2 or 3, got {dims}")
    n_def, L_def = _DIM_DEFAULTS[dims]
    points = _list("n", raw["n"] if raw["n"] is not None else n_def, int, dims)
    lengths = _list("L", raw["L"] if raw["L"] is not None else L_def, float, dims)
    c_raw = raw["c"] if raw["c"] is not None else "0"
    c = tuple(_num("c", t.strip()) for t in str(c_raw).split(","))
    if len(c) == 1 and dims > 1 and c[0] == 0:
        c = (0.0,) * dims
    if len(c) != dims:
        raise UsageError(f"--c has {len(c)} components but dims={dims}")
    cfg = RunConfig(
        subcommand=ns.subcommand,
        dims=dims,
        points=points,
        lengths=lengths,
        gamma=_num("gamma", raw["gamma"]),
        omega=_num("omega", raw["omega"]),
        c=c,
        dt=None if raw["dt"] in (None, "", "auto") else _num("dt", raw["dt"]),
        t_end=_num("t_end", raw["t_end"]),
        tol=_num("tol", raw["tol"]),
        nehari_tol=_num("nehari_tol", raw["nehari_tol"]),
        max_iterations=_num("max_iterations", raw["max_iterations"], int),
        seed=_num("seed", raw["seed"], int),
        epsilon=_num("epsilon", raw["epsilon"]),
        omegas=_list("omegas", raw["omegas"], float, None),
        record_every=_num("record_every", raw["record_every"], int),
        init=raw["init"],
        output_dir=Path(raw["out"]),
        log_level=str(raw["log_level"]).upper(),
        provenance=prov,
    )
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    try:
        make_grid(cfg.dims, cfg.points, cfg.lengths)
        ModelParams(cfg.gamma, cfg.omega, cfg.c, cfg.dims)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if not 0 < cfg.tol < 1 or not 0 < cfg.nehari_tol < 1:
        raise UsageError("tolerances must lie in (0, 1)")
    if cfg.max_iterations < 1 or cfg.record_every < 1:
        raise UsageError("max_iterations and record_every must be >= 1")
    if cfg.dt is not None and cfg.dt == 0:
        raise UsageError("--dt must be nonzero")
    if not cfg.t_end > 0:
        raise UsageError("--t-end must be positive")
    if not cfg.epsilon > 0:
        raise UsageError("--epsilon must be positive")
    if cfg.log_level not in ("DEBUG", "INFO", "WARNING", "ERROR"):
        raise UsageError(f"unknown log level {cfg.log_level}")
