"""Delaunay surfaces from one circle.

The unit circle in the x1x3-plane with the constant normal-plane field e2 is
Björling data for every H.  H = 1 closes up into the unit sphere, H = 1/2 is
the cylinder of radius 1, and the other values give unduloids and nodoids.
The script builds each member on a coarse grid, writes an OBJ per value and
prints the verifier's residuals.

    python demos/delaunay_sweep.py [outdir]
"""
import sys
from pathlib import Path

import numpy as np

from cmcbjorling import DomainGrid, build_surface, cmc_residual, fundamental_forms, gallery_item
from cmcbjorling.meshfile import write_obj

out = Path(sys.argv[1] if len(sys.argv) > 1 else "delaunay_out")
out.mkdir(parents=True, exist_ok=True)
grid = DomainGrid((-1.5, 1.5), 0.5, 121, 41)

for H in (0.5, 0.75, 1.0, 1.25):
    item = gallery_item("delaunay_circle", H=H)
    surf = build_surface(item.data, grid)
    rep = fundamental_forms(surf)
    P = surf.points
    # distance from the rotation axis (x2) along the middle meridian
    radius = np.hypot(P[grid.i0, :, 0], P[grid.i0, :, 2])
    print(f"H={H:<5} cmc residual {cmc_residual(rep, H):.1e}  "
          f"max |Q| {np.nanmax(np.abs(rep.Q_est)):.3f}  "
          f"meridian radius {radius.min():.3f}..{radius.max():.3f}")
    write_obj(surf, out / f"delaunay_H{H:g}.obj")
