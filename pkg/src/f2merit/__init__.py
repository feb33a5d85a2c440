"""Equidistribution, minimum-weight relations and lagged birthday tests for F2-linear generators."""

__version__ = "0.1.0"

from .f2poly import F2Poly, berlekamp_massey
from .generators import MEMT19937II, MT19937, GeneratorSpec, characteristic_poly, make_generator
from .lattice import DualLattice, defect_profile, reduce_basis, reduced_bases
from .merit import LinearRelation, enumerate_min_weight, minimal_relations, verify_relation
from .birthday import BirthdayParams, birthday_spacings, poisson_right_tail

__all__ = [
    "F2Poly",
    "berlekamp_massey",
    "MT19937",
    "MEMT19937II",
    "GeneratorSpec",
    "characteristic_poly",
    "make_generator",
    "DualLattice",
    "defect_profile",
    "reduce_basis",
    "reduced_bases",
    "LinearRelation",
    "enumerate_min_weight",
    "minimal_relations",
    "verify_relation",
    "BirthdayParams",
    "birthday_spacings",
    "poisson_right_tail",
]
