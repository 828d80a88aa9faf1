"""Pronormality of odd-index subgroups: a small finite-group engine with
fast criteria for products of wreath products Z_p wr Sym_n and brute-force
oracles to check them against.
"""
from .criteria import Decision, Reason, Verdict, binary_dominance, special_form, theorem1_predicate, thm2_decide
from .group import (
    Group,
    Subgroup,
    all_subgroups,
    closure,
    conjugate_subgroup,
    direct_product,
    join,
    normalizer,
    overgroups_of,
    p_core,
    quotient,
    sylow_p,
)
from .oracle import prn_definition
from .perm import Perm
from .wreath import build_product, wreath_product

__all__ = [
    "Decision", "Reason", "Verdict", "binary_dominance", "special_form", "theorem1_predicate", "thm2_decide",
    "Group", "Subgroup", "all_subgroups", "closure", "conjugate_subgroup", "direct_product", "join",
    "normalizer", "overgroups_of", "p_core", "quotient", "sylow_p", "prn_definition", "Perm",
    "build_product", "wreath_product",
]
