"""Finite diagrams of algebras, their completions, amalgams and bounded property checks."""

from .abelian import AbelianGroup, abelian_amalgam, abelian_t_isolating_extension, invariants_of, smith_normal_form
from .catalog import Catalog, abelian_pool, library_pool, load_catalog, nil2_pool, pool_build, save_catalog
from .checkers import (
    check_ap_instance,
    check_jep_at,
    check_wap_witness,
    gamma_stabilizer_search,
    non_wap_pattern_check,
    t_isolation_check,
    wap_via_groups,
)
from .completion import Completion, algebra_complete_within, complete_within
from .diagrams import (
    Diagram,
    EnumeratedApprox,
    check_partial_consistency,
    diagram_of,
    extends,
    logic_metric,
    parse_diagram,
    relabel,
)
from .forcing import Condition, decides, extension_game, forces, generic_check, parse_sentence
from .groups import FiniteGroup, Morphism, direct_sum, read_group, structure_report, write_group
from .nil2 import (
    Nil2Presentation,
    baer_group,
    embed_into_amalg_base,
    is_amalgamation_base,
    nil2_amalgam,
    presentation_of,
)
from .report import PropertyReport, replay_report
from .semiring import Presentation, group_to_semigroup_presentation, parse_presentation, rewrite_correctness_check
from .varieties import VarietySpec, variety_from_name

__version__ = "0.1.0"
