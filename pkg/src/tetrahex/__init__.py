"""tetrahex: search, verification and classification of transitive
homogeneous 3-(v,{4,6},1) designs."""

from .backend import HAVE_NUMBA, USING_NUMBA
from .canon import (are_isomorphic, automorphism_group, canonical_certificate,
                    canonical_form, iso_reduce)
from .classify import (Classification, GDType, SchemeParams, TwoClassParams,
                       association_scheme_params, classify, gd_type)
from .designs import (BalanceResult, SetSystem, admissible_v, develop, double,
                      is_tactical, replication_profile, tetrad_count,
                      verify_twbd)
from .dlx import CoverMatrix
from .orbits import OrbitIndex, orbits_on_ksubsets
from .perms import (PermGroup, Permutation, closure_order, compose, inverse,
                    parse_cycle_notation)

__version__ = "0.1.0"

__all__ = [
    "BalanceResult", "Classification", "CoverMatrix", "GDType", "OrbitIndex",
    "PermGroup", "Permutation", "SchemeParams", "SetSystem", "TwoClassParams",
    "HAVE_NUMBA", "USING_NUMBA",
    "admissible_v", "are_isomorphic", "association_scheme_params",
    "automorphism_group", "canonical_certificate", "canonical_form",
    "classify", "closure_order", "compose", "develop", "double", "gd_type",
    "inverse", "is_tactical", "iso_reduce", "orbits_on_ksubsets",
    "parse_cycle_notation", "replication_profile", "tetrad_count",
    "verify_twbd",
]
