"""Set-valued risk measures of multivariate scenario portfolios.

Portfolios are finite weighted scenario sets (:class:`EmpiricalDist`).  Risks
are drawn from depth-trimmed regions (zonoid, halfspace, expected convex hull)
and ordered by a Riesz cone ``K = A^{-1} R^d_+``.
"""

from ._kernels import BACKEND
from .cone_algebra import ConeError, RieszCone, cone_contains, dual_generators, k_infimum, leq_k
from .convex_region import (
    ConstraintRegion,
    DirectionGrid,
    SupportRegion,
    minkowski_sum,
    polygon_2d,
    scale_translate,
    subset_on_grid,
)
from .depth_regions import RegionSpec, build_region, ech_support, halfspace_threshold, zonoid_support
from .empirical import DataError, Density, EmpiricalDist, load, quantile, reweight, tail_density
from .risk_engine import (
    RiskPoint,
    ScalarRisk,
    homogenise,
    is_acceptable,
    marginal_risk,
    region_report,
    region_risk,
    translate_construct,
    worst_conditioning,
)
from .univariate_risk import cd_interval, em, em_alpha, entropic, es, neg_mean, var

__version__ = "0.1.0"
