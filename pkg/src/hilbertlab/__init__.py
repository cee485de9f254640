"""Exact Hilbert geometry of properly convex projective domains."""

__version__ = "0.1.0"

from .domain import (Face, HilbertLength, Location, PolytopeDomain, QuadricDomain, Where,
                     chord, face_of, geodesic_point, half_triangle, hausdorff_distance,
                     hilbert_distance, locate, supporting_data)
from .errors import HilbertLabError
from .examples import (ConeProduct, GroupGens, benzecri_rescale, direct_sum, make_standard,
                       orbit_sample, parallel_family, product_domain, stabilizer_lattice,
                       thicken, triangle_group)
from .projections import (LinearProjection, SupportingSet, build_projection, closest_point,
                          coarse_gap, project, supporting_sets)
from .projective import HPoint, LinSubspace, ProjMap, cross_ratio, span
from .relhyp import (aps_check, isolation_diameter, morse_check, thin_certify,
                     transverse_measure)
from .com import center_of_mass
from .simplices import (EmbeddedSimplex, SimplexFamily, are_parallel, canonicalize,
                        contained_after_sliding, enumerate_max_simplices, flat_coords,
                        flat_distance, join_opposite, recognize, simplex_distance, slide)

__all__ = [name for name in dir() if not name.startswith("_")]
