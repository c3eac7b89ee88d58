"""Command-line entry point ``cmc``.

    cmc solve|potential|verify|example|family [--config path] [--example name]
        [--H v] [--t v] [--lambda0 phase] [--grid nx,ny] [--degree N] [--out dir]

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 verification failure.  Failures also leave ``error.json`` in the output
directory.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .bjoerling import BjoerlingData, boundary_potential
from .config import MODES, ConfigError, RunConfig, build_config, load_config_file
from .dpw import build_surface, family_surface, surface_from_potential
from .errors import CMCError, NumericFailure, OutOfDomain
from .gallery import GALLERY, gallery_item
from .grid import DomainGrid
from .meshfile import dumps, read_obj, write_json, write_obj
from .verify import bjorling_residual, cmc_residual, fundamental_forms, gauss_codazzi_residual

log = logging.getLogger("cmcbjorling")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4


def parse_args(argv=None) -> argparse.Namespace:
    p = argparse.ArgumentParser(prog="cmc", description=__doc__.split("\n\n")[0])
    p.add_argument("mode", choices=MODES)
    p.add_argument("name", nargs="?", help="example name (mode 'example')")
    p.add_argument("--config", help="JSON or TOML run configuration")
    p.add_argument("--example", help=f"gallery entry: {', '.join(GALLERY)}")
    p.add_argument("--H", type=float, help="mean curvature")
    p.add_argument("--t", type=float, help="deformation-family parameter")
    p.add_argument("--lambda0", type=float, help="spectral parameter phase in radians")
    p.add_argument("--grid", help="node counts 'nx,ny' (ny odd)")
    p.add_argument("--degree", type=int, help="Laurent truncation N")
    p.add_argument("--values", help="comma-separated sweep values (mode 'family')")
    p.add_argument("--obj", help="OBJ mesh to verify")
    p.add_argument("--meta", help="report.json written by 'solve' (mode 'verify')")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")
    return p.parse_args(argv)


def _surface(cfg: RunConfig, H=None, t=None):
    """Surface for the configured data or example, optionally at another H or t."""
    kw = {"unit_tol": cfg.unit_tol, "ode_tol": cfg.ode_tol}
    if cfg.example is not None:
        params = dict(cfg.params)
        if cfg.example == "two_param_sphere":
            if t is not None:
                params["t"] = t
        elif H is not None:
            params["H"] = H
        item = gallery_item(cfg.example, **params)
        if item.family_t is not None:
            return family_surface(item.source, item.family_t, cfg.grid, cfg.lambda0, cfg.degree,
                                  **kw), 1.0
        if item.data is not None:
            return build_surface(item.data, cfg.grid, cfg.lambda0, cfg.degree, **kw), item.H
        return surface_from_potential(item.potential, cfg.grid, item.H, cfg.lambda0, cfg.degree,
                                      **kw), item.H
    data = cfg.data
    if H is not None:
        data = BjoerlingData(data.f0, data.v, H, data.x0, data.J, data.name)
    return build_surface(data, cfg.grid, cfg.lambda0, cfg.degree, **kw), data.H_value


def _data_for(cfg, H=None):
    if cfg.example is None:
        return cfg.data
    params = dict(cfg.params)
    if H is not None and cfg.example != "two_param_sphere":
        params["H"] = H
    return gallery_item(cfg.example, **params).data


def geometry_report(surface, H, data=None, tol=1e-3):
    """Summary dict of all residuals; ``passed`` applies the gates."""
    rep = fundamental_forms(surface)
    out = {"H": H, "cmc_residual": cmc_residual(rep, H), "summary": rep.summary()}
    try:
        g, c = gauss_codazzi_residual(rep.u, rep.Q_est, H, rep.hx, rep.hy)
        out["gauss_residual"], out["codazzi_residual"] = g, c
    except CMCError as exc:
        out["gauss_residual"] = out["codazzi_residual"] = None
        out["gauss_codazzi_error"] = str(exc)
    passed = out["cmc_residual"] <= tol
    if data is not None and surface.metadata.get("scale") is None:
        bj = bjorling_residual(surface, data.f0, data.v)
        out["bjorling"] = bj
        passed = passed and bj["position"] <= 1e-5 and bj["tangent"] <= 1e-5 and bj["v"] <= 1e-5
    out["tolerance"] = tol
    out["passed"] = bool(passed)
    return out


def _metadata(surface, cfg):
    meta = {k: v for k, v in surface.metadata.items()}
    meta["grid"] = surface.grid.to_json()
    meta["config"] = cfg.to_json()
    return meta


def run_solve(cfg: RunConfig):
    cfg.out.mkdir(parents=True, exist_ok=True)
    surface, H = _surface(cfg)
    write_obj(surface, cfg.out / "surface.obj")
    on_data = cfg.t is None and abs(cfg.lambda0 - 1) < 1e-15
    report = geometry_report(surface, H, _data_for(cfg) if on_data else None, cfg.cmc_tol)
    report["metadata"] = _metadata(surface, cfg)
    write_json(report, cfg.out / "report.json")
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def run_potential(cfg: RunConfig):
    cfg.out.mkdir(parents=True, exist_ok=True)
    item = cfg.item() if cfg.example else None
    if item is not None and item.potential is not None:
        pot = item.potential
    else:
        pot = boundary_potential(item.data if item is not None else cfg.data)
    xs = np.unique(np.r_[cfg.grid.x_range[0], cfg.grid.x0, cfg.grid.x_range[1]])
    out = {"potential": pot.to_json(xs), "config": cfg.to_json()}
    if item is not None and item.display is not None:
        out["display"] = {"name": item.display.name,
                          "modes": [{"k": k, "entries": [[e.to_text() for e in row] for row in m]}
                                    for k, m in item.display.modes.items()]}
    write_json(out, cfg.out / "potential.json")
    return EXIT_OK


def run_verify(cfg: RunConfig):
    meta = {}
    if cfg.meta is not None:
        with open(cfg.meta, encoding="utf-8") as fh:
            meta = json.load(fh)
        meta = meta.get("metadata", meta)
    grid = cfg.grid or (DomainGrid.from_json(meta["grid"]) if "grid" in meta else None)
    if grid is None:
        raise ConfigError("verify needs the grid (from --meta or --grid)")
    H = cfg.H if cfg.H is not None else meta.get("H")
    if H is None:
        raise ConfigError("mean curvature unknown; pass --H")
    if cfg.obj is None:
        raise ConfigError("verify needs --obj")
    surface = read_obj(cfg.obj, grid, meta)
    report = geometry_report(surface, float(H), None, cfg.cmc_tol)
    cfg.out.mkdir(parents=True, exist_ok=True)
    write_json(report, cfg.out / "verify_report.json")
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def run_example(cfg: RunConfig, name=None):
    name = name or cfg.example
    if name is None:
        for key, factory in GALLERY.items():
            print(f"{key:18s} {(factory.__doc__ or '').strip().splitlines()[0]}")
        return EXIT_OK
    item = gallery_item(name, **(cfg.params if cfg.example == name else {}))
    out = {"name": item.name, "H": item.H, "description": item.description,
           "grid": item.grid.to_json()}
    if item.data is not None:
        out["curve"] = [str(e) for e in item.data.f0.exprs]
        out["v"] = [str(e) for e in item.data.v.exprs]
        out["x0"], out["J"] = item.data.x0, list(item.data.J)
    if item.potential is not None:
        out["potential"] = item.potential.to_json()
    print(dumps(out))
    return EXIT_OK


def run_family(cfg: RunConfig):
    cfg.out.mkdir(parents=True, exist_ok=True)
    sweep_t = cfg.example == "two_param_sphere"
    values = cfg.values or ([0.5, 0.75, 1.0] if sweep_t else [0.5, 0.75, 1.0, 1.25])
    records, status = [], EXIT_OK
    for val in values:
        surface, H = _surface(cfg, H=None if sweep_t else val, t=val if sweep_t else None)
        tag = f"{'t' if sweep_t else 'H'}_{val:g}"
        write_obj(surface, cfg.out / f"surface_{tag}.obj")
        on_data = not sweep_t and abs(cfg.lambda0 - 1) < 1e-15
        rep = geometry_report(surface, H, _data_for(cfg, val) if on_data else None, cfg.cmc_tol)
        rep["metadata"] = _metadata(surface, cfg)
        rep["value"] = val
        records.append(rep)
        if not rep["passed"]:
            status = EXIT_VERIFY
    write_json({"parameter": "t" if sweep_t else "H", "members": records}, cfg.out / "family.json")
    return status


def run(cfg: RunConfig, name=None):
    if cfg.mode == "solve":
        return run_solve(cfg)
    if cfg.mode == "potential":
        return run_potential(cfg)
    if cfg.mode == "verify":
        return run_verify(cfg)
    if cfg.mode == "example":
        return run_example(cfg, name)
    return run_family(cfg)


def _error_record(exc, code, out):
    record = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(dumps(record), file=sys.stderr)
    if out is not None:
        try:
            Path(out).mkdir(parents=True, exist_ok=True)
            write_json(record, Path(out) / "error.json")
        except OSError:
            pass
    return code


def main(argv=None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = args.out
    try:
        raw = load_config_file(args.config) if args.config else {}
        out = out or raw.get("out")
        example = args.example or args.name
        cfg = build_config(args.mode, raw, example, args.H, args.t, args.lambda0, args.grid,
                           args.degree, out, args.values, args.obj, args.meta)
        return run(cfg, args.name)
    except (NumericFailure, OutOfDomain) as exc:
        return _error_record(exc, EXIT_NUMERIC, out)
    except (CMCError, ValueError, KeyError, OSError) as exc:
        return _error_record(exc, EXIT_CONFIG, out)


if __name__ == "__main__":
    sys.exit(main())
