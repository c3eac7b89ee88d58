"""Shared fixtures.  Full-size surfaces take ~20 s each, so they are built once
per session and reused by every test module that needs them."""
import sys
from functools import lru_cache

import numpy as np
import pytest

from cmcbjorling import (
    DomainGrid, build_surface, family_surface, fundamental_forms, gallery_item,
    surface_from_potential,
)


class SurfaceCache:
    @lru_cache(maxsize=None)
    def item_surface(self, name, lam0=1.0, **params):
        item = gallery_item(name, **params)
        if item.data is not None:
            return build_surface(item.data, item.grid, lam0)
        return surface_from_potential(item.potential, item.grid, item.H, lam0)

    def example(self, name, lam0=1.0, **params):
        return self.item_surface(name, complex(lam0), **params)

    @lru_cache(maxsize=None)
    def report(self, name, lam0=1.0, **params):
        return fundamental_forms(self.example(name, lam0, **params))

    @lru_cache(maxsize=None)
    def circle(self, H, nx=201, ny=81, lam0=1.0):
        item = gallery_item("delaunay_circle", H=H)
        if (nx, ny) == (item.grid.nx, item.grid.ny):
            return self.example("delaunay_circle", lam0, H=H)
        return build_surface(item.data, DomainGrid((-1.0, 1.0), 0.4, nx, ny), lam0)

    @lru_cache(maxsize=None)
    def family(self, t, scaled=True):
        item = gallery_item("two_param_sphere", t=t)
        return family_surface(item.source, t, item.grid, scaled=scaled)


_CACHE = SurfaceCache()


@pytest.fixture(scope="session")
def surfaces():
    return _CACHE


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(lines):
        terminalreporter.write_line(lines[key])
