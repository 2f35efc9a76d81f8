"""Exact p-group machinery for the class-breadth inequality cl(G) <= b(G) + 1 (p > 2)."""

from .actions import GroupSpec, Kind
from .corpus import family, standard_corpus
from .errors import *  # noqa: F401,F403
from .fileformat import format_group_file, parse_group_file
from .group import (
    GroupTable,
    Projection,
    Subgroup,
    build_group,
    center,
    centralizer,
    commutator,
    commutator_set,
    commutator_subgroup,
    conjugacy_classes,
    generated_subgroup,
    index_log,
    is_normal,
    normal_subgroups,
    preimage,
    product_of_normals,
    quotient,
    trivial_subgroup,
    whole_group,
)
from .lemmas import lemma1_P, lemma2_refine, lemma4_select, maximal_subgroups_through
from .series import (
    FFunction,
    breadth_profile,
    breadth_rel,
    check_F_membership,
    cl_f,
    lower_central_ffunction,
    lower_central_series,
    nilpotency_class,
)
from .theorems import (
    audit_certificate,
    class_breadth_check,
    cl_restricted,
    conjecture_report,
    k_restricted_bounds,
    prop1_covering,
    theorem1,
    theorem2,
    theorem3,
)

__version__ = "0.1.0"
