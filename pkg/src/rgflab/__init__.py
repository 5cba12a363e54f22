"""Coarse-geometry machinery for free products of reducible torus mapping
classes: exact Farey-graph model, hyperbolicity toolkit, projection-system
axioms, Bass-Serre orbit maps, and certificate checkers.
"""

from .farey import INFINITY, MappingClass, Slope, act, adjacent, annular_distance, \
    annular_projection, farey_distance, farey_geodesic, twist_about
from .hypgraph import check_gp_geodesic_bound, check_local_to_global, \
    estimate_delta, gromov_product
from .raag import PresentationGraph, admissibility_check, components, \
    normal_form, power_threshold, support_bookkeeping
from .subgroups import MatrixGroup, canonical_reducing_system, is_multitwist, \
    nielsen_thurston_type, orbit
from .projections import TorusAnnuli, behrstock_scan, bgit_scan, \
    estimate_constants, general_persistence_check, persistence_check, \
    synthetic_system
from .bassserre import FactorSpec, build_ball, free_product_check, \
    loxodromic_scan, phi, qi_certificate, tree_distance
from .constructions import FamilySpec, check_displacing, check_misaligned, \
    check_separated, conjugate_twist_family, definite_distance_scan, \
    gromov_bound_scan, separation_constants, twist_orbit_family

__version__ = "0.1.0"
