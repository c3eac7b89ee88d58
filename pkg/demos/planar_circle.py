"""A planar circle with a rotating tangent plane.

The unit circle in the x1x2-plane carries a tangent-plane field that turns
by theta(t) about the circle.  The closed-form potential lives on an annulus
in w = e^{it}; the library works on the strip in t, where it agrees with the
boundary potential of the data after a diagonal gauge.  The script prints the
deviation between the two forms at a few points and builds the surface.

    python demos/planar_circle.py [amplitude] [outdir]
"""
import sys
from pathlib import Path

import numpy as np

from cmcbjorling import bjorling_residual, build_surface, cmc_residual, gallery_item
from cmcbjorling.bjoerling import boundary_potential
from cmcbjorling.gallery import planar_circle_potential, planar_circle_theta
from cmcbjorling.meshfile import write_obj

amp = float(sys.argv[1]) if len(sys.argv) > 1 else 0.3
out = Path(sys.argv[2] if len(sys.argv) > 2 else "planar_out")
out.mkdir(parents=True, exist_ok=True)

item = gallery_item("planar_circle", amplitude=amp)
theta = planar_circle_theta(amplitude=amp)
print(f"theta(t) = {theta}")

# strip form vs boundary potential, after the gauge D = diag(d e^{it/2}, 1/(d e^{it/2}))
zs = np.array([0.2 + 0.1j, -0.5 + 0.3j])
lam = np.exp(1j * np.array([0.4, 2.0]))
d = np.sqrt(1j) * np.exp(0.5j * zs)
D = np.zeros(zs.shape + (2, 2), complex)
D[:, 0, 0], D[:, 1, 1] = d, 1 / d
gauged = (np.linalg.inv(D)[:, None] @ planar_circle_potential(theta, item.H, "t").samples(zs, lam)
          @ D[:, None] + np.diag([0.5j, -0.5j]))
print(f"gauge deviation {np.max(np.abs(gauged - boundary_potential(item.data).samples(zs, lam))):.1e}")

surf = build_surface(item.data, item.grid)
bj = bjorling_residual(surf, item.data.f0, item.data.v)
print(f"cmc residual {cmc_residual(surf, item.H):.1e}, curve defect {bj['position']:.1e}")
write_obj(surf, out / "planar_circle.obj")
