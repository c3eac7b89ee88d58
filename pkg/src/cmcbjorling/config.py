"""Run configuration: file loading, validation and command-line overrides."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import tomli

from .bjoerling import BjoerlingData
from .errors import InvalidData
from .gallery import GALLERY, gallery_item
from .grid import DomainGrid
from .loops import DEFAULT_DEGREE

MODES = ("solve", "potential", "verify", "example", "family")


class ConfigError(InvalidData):
    """Malformed or inconsistent run configuration."""


def load_config_file(path):
    """Read a JSON or TOML configuration file into a dict."""
    path = Path(path)
    try:
        if path.suffix.lower() == ".toml":
            with open(path, "rb") as fh:
                return tomli.load(fh)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _lambda0(value):
    """Phase (radians) or [re, im] pair -> unimodular complex."""
    if value is None:
        return 1.0 + 0j
    if isinstance(value, (list, tuple)):
        lam = complex(float(value[0]), float(value[1]))
    else:
        lam = complex(math.cos(float(value)), math.sin(float(value)))
    if abs(abs(lam) - 1.0) > 1e-12:
        raise ConfigError("lambda0 must be unimodular")
    return lam


def _grid(value, default: DomainGrid):
    if value is None:
        return default
    if isinstance(value, str):
        value = [int(t) for t in value.split(",")]
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError("grid must be 'nx,ny'")
        return DomainGrid(default.x_range, default.y_max, int(value[0]), int(value[1]), default.x0)
    try:
        return DomainGrid(tuple(value.get("x_range", default.x_range)),
                          float(value.get("y_max", default.y_max)),
                          int(value.get("nx", default.nx)), int(value.get("ny", default.ny)),
                          float(value.get("x0", default.x0)))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad grid block: {exc}") from exc


@dataclass
class RunConfig:
    mode: str
    example: str | None = None
    params: dict = field(default_factory=dict)
    data: BjoerlingData | None = None
    grid: DomainGrid | None = None
    degree: int = DEFAULT_DEGREE
    lambda0: complex = 1.0 + 0j
    H: float | None = None
    t: float | None = None
    values: list = field(default_factory=list)
    out: Path = Path(".")
    obj: Path | None = None
    meta: Path | None = None
    cmc_tol: float = 1e-3
    unit_tol: float = 1e-8
    ode_tol: float = 1e-12
    raw: dict = field(default_factory=dict)

    def item(self):
        """Gallery item for ``example`` with the configured parameters."""
        return gallery_item(self.example, **self.params)

    def to_json(self):
        out = {"mode": self.mode, "example": self.example, "params": self.params,
               "grid": self.grid.to_json() if self.grid else None, "degree": self.degree,
               "lambda0": [self.lambda0.real, self.lambda0.imag], "H": self.H, "t": self.t,
               "values": self.values, "cmc_tol": self.cmc_tol, "unit_tol": self.unit_tol,
               "ode_tol": self.ode_tol}
        if self.data is not None:
            out["data"] = {"curve": [str(e) for e in self.data.f0.exprs],
                           "v": [str(e) for e in self.data.v.exprs],
                           "H": str(self.data.H), "x0": self.data.x0, "J": list(self.data.J)}
        return out


def build_config(mode, raw=None, example=None, H=None, t=None, lambda0=None, grid=None,
                 degree=None, out=None, values=None, obj=None, meta=None):
    """Merge a config dict with command-line overrides and validate the result."""
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}")
    raw = dict(raw or {})
    example = example or raw.get("example")
    params = dict(raw.get("params", {}))
    H = H if H is not None else raw.get("H")
    t = t if t is not None else raw.get("t")
    cfg = RunConfig(mode=mode, raw=raw)
    cfg.degree = int(degree if degree is not None else raw.get("N", raw.get("degree", DEFAULT_DEGREE)))
    if cfg.degree < 2:
        raise ConfigError("truncation degree must be at least 2")
    cfg.lambda0 = _lambda0(lambda0 if lambda0 is not None else raw.get("lambda0"))
    cfg.out = Path(out or raw.get("out", "."))
    cfg.obj = Path(obj) if obj else (Path(raw["obj"]) if "obj" in raw else None)
    cfg.meta = Path(meta) if meta else (Path(raw["meta"]) if "meta" in raw else None)
    tol = raw.get("tolerances", {})
    cfg.cmc_tol = float(tol.get("cmc", cfg.cmc_tol))
    cfg.unit_tol = float(tol.get("unitarity", cfg.unit_tol))
    cfg.ode_tol = float(tol.get("ode", cfg.ode_tol))
    if values is not None:
        cfg.values = [float(v) for v in (values.split(",") if isinstance(values, str) else values)]
    else:
        cfg.values = [float(v) for v in raw.get("values", [])]

    if mode in ("verify",):
        if H is None and cfg.meta is None:
            raise ConfigError("verify needs --H or a metadata file")
        cfg.H = float(H) if H is not None else None
        value = grid if grid is not None else raw.get("grid")
        cfg.grid = _grid(value, DomainGrid((-1.0, 1.0), 0.4, 201, 81)) if value else None
        return cfg

    if example is None and "curve" not in raw:
        if mode == "example":
            return cfg
        raise ConfigError("give --example or a config with curve/v data")

    if example is not None:
        if example not in GALLERY:
            raise ConfigError(f"unknown example {example!r}; choose from {sorted(GALLERY)}")
        cfg.example = example
        if example == "two_param_sphere":
            if t is not None:
                params["t"] = float(t)
        elif H is not None:
            params["H"] = float(H)
        cfg.params = params
        item = cfg.item()
        cfg.data = item.data
        cfg.H = item.H if item.family_t is None else 1.0
        cfg.t = item.family_t
        cfg.grid = _grid(grid if grid is not None else raw.get("grid"), item.grid)
    else:
        if H is None:
            raise ConfigError("H is required")
        try:
            cfg.data = BjoerlingData(list(raw["curve"]), list(raw["v"]), str(H),
                                     float(raw.get("x0", 0.0)),
                                     tuple(raw.get("J", (-1.0, 1.0))), name=raw.get("name", "custom"))
        except KeyError as exc:
            raise ConfigError(f"missing key {exc}") from exc
        cfg.data.validate()
        cfg.H = cfg.data.H_value
        default = DomainGrid(tuple(raw.get("J", (-1.0, 1.0))), 0.4, 201, 81, cfg.data.x0)
        cfg.grid = _grid(grid if grid is not None else raw.get("grid"), default)
    if mode == "solve" and (cfg.H is None or cfg.H == 0):
        raise ConfigError("mean curvature must be non-zero")
    if cfg.data is not None and abs(cfg.grid.x0 - cfg.data.x0) > 1e-12:
        raise ConfigError("grid x0 must equal the data base point")
    return cfg
