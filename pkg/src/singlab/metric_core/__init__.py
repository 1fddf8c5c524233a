"""Conformal path metrics on sampled singular spaces."""

from .chains import (ChainKind, ChainValidation, PhiChain, PhiFormula, RayRecord, build_phi_chain,
                     classify_boundary_rays, gromov_admissible_delta, inner_boundary, phi_gromov,
                     phi_halfspace, validate_phi_chain)
from .density import (DensityField, DensityMode, attach_density, constant_density, hybrid_density_value,
                      smooth_density)
from .geodesics import GeodesicPath, UnreachableError, conformal_distance, geodesic_between, make_path, \
    path_from_distances
from .hyperbolicity import HyperbolicityReport, estimate_delta, fourpoint_delta, gromov_product, sample_pool
from .space import (DegenerateSpaceError, SampledSpace, annulus, build_space, euclidean_grid, half_disk,
                    punctured_disk, random_tree, read_space, segment, write_space)
from .uniformity import (MetricSuiteReport, NotGeodesicError, UniformityResult, b_const, b_star, c_bound,
                         check_uniform_curve, fit_skin_parameter, metric_inequality_suite,
                         skin_uniformity_from_geodesic)

__all__ = [name for name in dir() if not name.startswith("_")]
