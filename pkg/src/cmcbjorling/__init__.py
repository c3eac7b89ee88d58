"""CMC surfaces from Björling data by the DPW loop-group method.

Typical use::

    from cmcbjorling import BjoerlingData, DomainGrid, build_surface, fundamental_forms
    data = BjoerlingData(["sin(2*z)", "0", "-cos(2*z)"], ["0", "1", "0"], H=0.75)
    surf = build_surface(data, DomainGrid((-1, 1), 0.4, 201, 81))
"""
from .analytic import AnalyticVec3, Expression, TaylorSeries, parse, taylor_of
from .bjoerling import (
    BjoerlingData, FrameCurve, HolomorphicPotential, boundary_potential, curve_frame, hopf_Q,
    metric_u, schwarz_minimal, two_parameter_potential,
)
from .dpw import (
    build_surface, family_surface, integrate_frame, integrate_path, normal_field,
    surface_from_potential, sym_bobenko, sym_bobenko_coeffs,
)
from .errors import (
    CMCError, FrameDiscontinuity, GridTooCoarse, InvalidData, NearSingularLoop, NoConvergence,
    NonRegularCurve, NonUnitaryFrame, NotInBigCell, NumericFailure, OutOfDomain, RegularityLoss,
    SingularCenter, StepFailure, StructureViolation, UnknownExample,
)
from .factorization import BirkhoffResult, IwasawaResult, birkhoff, iwasawa, normalized_potential
from .gallery import GALLERY, example_gallery, gallery_item
from .grid import DomainGrid, SurfaceGrid
from .loops import PlusLoop, TwistedLoop, loop_inverse, loop_mul, loop_star
from .verify import (
    GeometryReport, bjorling_residual, cmc_residual, fundamental_forms, gauss_codazzi_residual,
    hopf_rotation_check,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticVec3", "Expression", "TaylorSeries", "parse", "taylor_of", "BjoerlingData",
    "FrameCurve", "HolomorphicPotential", "boundary_potential", "curve_frame", "hopf_Q",
    "metric_u", "schwarz_minimal", "two_parameter_potential", "build_surface",
    "family_surface", "integrate_frame", "integrate_path", "normal_field",
    "surface_from_potential", "sym_bobenko", "sym_bobenko_coeffs", "CMCError",
    "FrameDiscontinuity", "GridTooCoarse", "InvalidData", "NearSingularLoop", "NoConvergence",
    "NonRegularCurve", "NonUnitaryFrame", "NotInBigCell", "NumericFailure", "OutOfDomain",
    "RegularityLoss", "SingularCenter", "StepFailure", "StructureViolation", "UnknownExample",
    "BirkhoffResult", "IwasawaResult", "birkhoff", "iwasawa", "normalized_potential",
    "GALLERY", "example_gallery", "gallery_item", "DomainGrid", "SurfaceGrid", "PlusLoop",
    "TwistedLoop", "loop_inverse", "loop_mul", "loop_star", "GeometryReport",
    "bjorling_residual", "cmc_residual", "fundamental_forms", "gauss_codazzi_residual",
    "hopf_rotation_check",
]
