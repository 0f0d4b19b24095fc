"""Instance generators with independently known answers.

Builders for the selection/randomize/variable/clause gadget families, the
formula and colored-graph reductions built from them, and the exhaustive
evaluators (``eval_qbf``, ``find_multicolored_clique``) used to cross-check
every generated instance.
"""

from .fragments import (
    BadParameter,
    Fragment,
    GadgetKind,
    build_gadget,
    enlarge,
    fragment_to_instance,
)
from .mcc import (
    ColoredGraph,
    find_multicolored_clique,
    mcc_to_instance,
    parse_colored_graph,
)
from .qbf import (
    QbfFormula,
    eval_qbf,
    parse_qbf,
    parse_cnf,
    qbf_to_instance,
    sat_to_first_round_instance,
    trim_to_generalized,
)

__all__ = [
    "BadParameter",
    "ColoredGraph",
    "Fragment",
    "GadgetKind",
    "QbfFormula",
    "build_gadget",
    "enlarge",
    "eval_qbf",
    "find_multicolored_clique",
    "fragment_to_instance",
    "mcc_to_instance",
    "parse_cnf",
    "parse_colored_graph",
    "parse_qbf",
    "qbf_to_instance",
    "sat_to_first_round_instance",
    "trim_to_generalized",
]
