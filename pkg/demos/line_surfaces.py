"""CMC surfaces through a straight line.

Along the x1-axis the tangent plane is turned by an angle theta(x) about the
line.  A constant angle gives a round cylinder; the other profiles twist it.
For each profile the boundary potential is printed in closed form, then the
surface is built and checked against the data along the line.

    python demos/line_surfaces.py [outdir]
"""
import sys
from pathlib import Path

from cmcbjorling import DomainGrid, bjorling_residual, build_surface, cmc_residual, gallery_item
from cmcbjorling.bjoerling import boundary_potential
from cmcbjorling.meshfile import write_obj

out = Path(sys.argv[1] if len(sys.argv) > 1 else "line_out")
out.mkdir(parents=True, exist_ok=True)
grid = DomainGrid((-1.0, 1.0), 0.4, 101, 41)

for name in ("line_theta_const", "line_theta_2x", "line_theta_xsq", "line_theta_sin2"):
    item = gallery_item(name)
    pot = boundary_potential(item.data)
    print(name)
    for k in sorted(pot.modes):
        print(f"  lambda^{k:+d}: {[[str(e.expr) for e in row] for row in pot.modes[k]]}")
    surf = build_surface(item.data, grid)
    bj = bjorling_residual(surf, item.data.f0, item.data.v)
    print(f"  cmc residual {cmc_residual(surf, item.H):.1e}, "
          f"curve defect {bj['position']:.1e}, tangency {max(bj['tangent'], bj['v']):.1e}")
    write_obj(surf, out / f"{name}.obj")
