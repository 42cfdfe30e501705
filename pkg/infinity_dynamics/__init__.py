"""
Dynamics at infinity of endomorphisms of affine surfaces

Exact tools for completions and their boundary divisors, valuations
centered at infinity, eigenvaluations and dynamical degrees of monomial
germs, zigzag and cycle boundaries, the Thompson-group action on the
circle at infinity, and an independent degree-growth oracle.
"""

from .boundary import Completion, DivisorAtInfinity, FreePoint, PrimeDivisor, SatellitePoint, join, meet
from .config import Config, DEFAULT_CONFIG
from .degoracle import PolyMap, iterate_degrees, lambda1_estimate, monomial_degree_oracle
from .dynamics import (ChartMonomial, EigenData, MonomialEndo, classify_normal_form, eigenvaluation,
                       pushforward, skewness_mobius)
from .errors import InfinityDynamicsError, ParseError
from .exactnum import INF, IntMat2, MobiusMap, QuadNumber, mobius_apply, mobius_classify, spectral_radius
from .fixtures import verify_all
from .infnear import BlowupTree, FreeOn, SatelliteBetween
from .perron import QuadraticInteger, is_weak_perron, realize_as_matrix, spectrum_membership
from .thompson import ThompsonElement, compose, free_product_check, loxodromic_analysis, markov_circle
from .valuation import L_v, eval_monomial, local_dual, pair_local_duals
from .zigzag import Zigzag, classify_boundary, is_almost_standard, is_standard, standardize

__version__ = "1.0.0"
__all__ = [
    "Completion", "DivisorAtInfinity", "FreePoint", "PrimeDivisor", "SatellitePoint", "join", "meet",
    "Config", "DEFAULT_CONFIG",
    "PolyMap", "iterate_degrees", "lambda1_estimate", "monomial_degree_oracle",
    "ChartMonomial", "EigenData", "MonomialEndo", "classify_normal_form", "eigenvaluation",
    "pushforward", "skewness_mobius",
    "InfinityDynamicsError", "ParseError",
    "INF", "IntMat2", "MobiusMap", "QuadNumber", "mobius_apply", "mobius_classify", "spectral_radius",
    "verify_all",
    "BlowupTree", "FreeOn", "SatelliteBetween",
    "QuadraticInteger", "is_weak_perron", "realize_as_matrix", "spectrum_membership",
    "ThompsonElement", "compose", "free_product_check", "loxodromic_analysis", "markov_circle",
    "L_v", "eval_monomial", "local_dual", "pair_local_duals",
    "Zigzag", "classify_boundary", "is_almost_standard", "is_standard", "standardize",
]
