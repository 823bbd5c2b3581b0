"""Configuration parsing and the on-disk formats (snapshots, diagnostics CSV).

Config files are INI-style::

    [grid]
    nx = 64        # comments start with '#'

Every key is optional (documented defaults apply) but unknown sections or
keys are rejected.
"""
from __future__ import annotations

import configparser
import csv
import dataclasses
import os
import struct
from dataclasses import dataclass, field

import numpy as np

from .audit import CSV_COLUMNS, DiagRecord
from .constitutive import Params
from .errors import ConfigError, SnapshotError
from .grid import Grid
from .state import State

SCENARIOS = ("spinodal", "spinodal_shear", "bubble", "shear", "manufactured")
OUT_DIR_ENV = "THERMOPHASE_OUT_DIR"

SNAPSHOT_MAGIC = b"THPF"
SNAPSHOT_VERSION = 1
_HEADER = struct.Struct("<4sIIIddd")
FIELD_ORDER = ("u1", "u2", "phi", "mu", "theta", "p")


@dataclass
class GridConfig:
    nx: int = 64
    ny: int = 64
    lx: float = 2 * np.pi
    ly: float = 2 * np.pi


@dataclass
class PhysicsConfig:
    epsilon: float = 1.0
    beta: float = 2.0
    delta: float = 0.75
    nu0: float = 0.05
    nu1: float = 0.1
    stab: float = 2.0


@dataclass
class TimeConfig:
    dt: float = 1e-3
    t_final: float = 0.5
    cfl: float = 0.25


@dataclass
class InitialConfig:
    scenario: str = "spinodal"
    m0: float = 0.0
    amplitude: float = 0.1
    theta0: float = 1.0
    seed: int = 42
    radius: float = 1.0


@dataclass
class OutputConfig:
    dir: str = "out"
    snap_every: int = 10
    diag_file: str = "diagnostics.csv"


@dataclass
class Config:
    grid: GridConfig = field(default_factory=GridConfig)
    physics: PhysicsConfig = field(default_factory=PhysicsConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    initial: InitialConfig = field(default_factory=InitialConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def make_grid(self):
        return Grid(self.grid.nx, self.grid.ny, self.grid.lx, self.grid.ly)

    def make_params(self):
        return Params(**dataclasses.asdict(self.physics))

    def replace(self, **sections):
        """Copy with selected fields overridden, e.g. ``replace(time={"dt": 5e-4})``."""
        kw = {}
        for f in dataclasses.fields(self):
            sec = getattr(self, f.name)
            kw[f.name] = dataclasses.replace(sec, **sections.get(f.name, {}))
        cfg = Config(**kw)
        validate(cfg)
        return cfg


def _section_lines(text):
    """Map 'section.key' to the 1-based line where it is defined."""
    lines, section = {}, None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
        elif "=" in line and section is not None:
            lines[f"{section}.{line.split('=', 1)[0].strip().lower()}"] = no
    return lines


def _convert(value, typ, where, line):
    try:
        if typ is int:
            as_float = float(value)
            if as_float != int(as_float):
                raise ValueError
            return int(as_float)
        if typ is float:
            return float(value)
        return str(value).strip().strip('"').strip("'")
    except ValueError:
        raise ConfigError(f"{where}: cannot parse {value!r} as {typ.__name__}", line) from None


def parse_config(text):
    parser = configparser.ConfigParser(
        inline_comment_prefixes=("#",), comment_prefixes=("#",),
        interpolation=None, strict=True, empty_lines_in_values=False,
    )
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        if line is None and getattr(exc, "errors", None):
            line = exc.errors[0][0]
        raise ConfigError(f"syntax error: {exc}", line) from None
    lines = _section_lines(text)

    cfg = Config()
    known = {f.name: f for f in dataclasses.fields(Config)}
    for section in parser.sections():
        if section not in known:
            raise ConfigError(f"unknown section [{section}]", _first_line(text, f"[{section}]"))
        target = getattr(cfg, section)
        types = {f.name: f.type for f in dataclasses.fields(target)}
        for key, value in parser.items(section):
            line = lines.get(f"{section}.{key}")
            if key not in types:
                raise ConfigError(f"unknown key '{key}' in [{section}]", line)
            typ = {"int": int, "float": float, "str": str}[types[key]]
            setattr(target, key, _convert(value, typ, f"{section}.{key}", line))
    validate(cfg)
    return cfg


def _first_line(text, needle):
    for no, raw in enumerate(text.splitlines(), 1):
        if raw.strip().startswith(needle):
            return no
    return None


def validate(cfg):
    try:
        cfg.make_params()
    except ValueError as exc:
        raise ConfigError(f"[physics] {exc}") from None
    try:
        cfg.make_grid()
    except ValueError as exc:
        raise ConfigError(f"[grid] {exc}") from None
    t, ini, out = cfg.time, cfg.initial, cfg.output
    if not t.dt > 0:
        raise ConfigError("[time] dt must be positive")
    if not t.t_final >= 0:
        raise ConfigError("[time] t_final must be >= 0")
    if not t.cfl > 0:
        raise ConfigError("[time] cfl must be positive")
    if ini.scenario not in SCENARIOS:
        raise ConfigError(f"[initial] unknown scenario {ini.scenario!r}; expected one of {SCENARIOS}")
    if not ini.theta0 > 0:
        raise ConfigError("[initial] theta0 must be strictly positive")
    if not ini.radius >= 0:
        raise ConfigError("[initial] radius must be >= 0")
    if out.snap_every < 1:
        raise ConfigError("[output] snap_every must be >= 1")
    return cfg


def load_config(path):
    with open(path) as fh:
        return parse_config(fh.read())


def config_to_text(cfg):
    """Canonical text form; ``parse_config(config_to_text(c)) == c``."""
    out = []
    for f in dataclasses.fields(cfg):
        out.append(f"[{f.name}]")
        for k, v in dataclasses.asdict(getattr(cfg, f.name)).items():
            out.append(f"{k} = {v!r}" if isinstance(v, float) else f"{k} = {v}")
        out.append("")
    return "\n".join(out)


def resolve_out_dir(cfg, override=None):
    if override:
        return override
    return os.environ.get(OUT_DIR_ENV) or cfg.output.dir


# -- snapshots ---------------------------------------------------------------

def write_snapshot(state, grid, path):
    nx, ny = grid.shape
    header = _HEADER.pack(SNAPSHOT_MAGIC, SNAPSHOT_VERSION, nx, ny, grid.lx, grid.ly, float(state.t))
    fields = (state.u[0], state.u[1], state.phi, state.mu, state.theta, state.p)
    with open(path, "wb") as fh:
        fh.write(header)
        for f in fields:
            fh.write(np.ascontiguousarray(f, dtype="<f8").tobytes())


def read_snapshot(path):
    """Return ``(state, grid)``; raises SnapshotError on any corruption."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _HEADER.size:
        raise SnapshotError(f"{path}: truncated header ({len(data)} bytes)")
    magic, version, nx, ny, lx, ly, t = _HEADER.unpack_from(data)
    if magic != SNAPSHOT_MAGIC:
        raise SnapshotError(f"{path}: bad magic {magic!r}")
    if version != SNAPSHOT_VERSION:
        raise SnapshotError(f"{path}: unsupported version {version}")
    n = nx * ny
    expected = _HEADER.size + 6 * 8 * n
    if len(data) != expected:
        raise SnapshotError(f"{path}: expected {expected} bytes, found {len(data)}")
    try:
        grid = Grid(nx, ny, lx, ly)
    except ValueError as exc:
        raise SnapshotError(f"{path}: invalid grid header ({exc})") from None
    arr = np.frombuffer(data, dtype="<f8", offset=_HEADER.size).reshape(6, nx, ny).astype(float)
    state = State(t=t, u=arr[0:2].copy(), phi=arr[2].copy(), mu=arr[3].copy(),
                  theta=arr[4].copy(), p=arr[5].copy())
    return state, grid


# -- diagnostics CSV ---------------------------------------------------------

def write_diagnostics(records, path):
    records = list(records)
    if not records:
        raise ValueError("no diagnostics records to write")
    with open(path, "w", newline="") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for r in records:
            fh.write(",".join(f"{v:.17g}" for v in r.as_row()) + "\n")


def read_diagnostics(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected header {header}")
        return [DiagRecord(*(float(v) for v in row)) for row in reader]
