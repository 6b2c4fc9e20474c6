"""Constraint-based causal discovery for max-linear Bayesian networks."""

from .discovery import (
    DiscoveryResult,
    PcstarOptions,
    SepsetTable,
    find_orientable_cycles,
    meek_rules,
    orient_colliders,
    orient_colliders_sepset,
    orient_cycle,
    pc,
    pc_skeleton,
    pcstar,
    pcstar_variants,
    recovered_edges,
    witness_counts,
)
from .errors import (
    GenerationError,
    GenericityError,
    GraphError,
    InconsistencyError,
    PcstarError,
    ResourceError,
)
from .graph import Dag, Pdag, Skeleton, induced_cycles, induced_subgraph, relatives, skeleton, unshielded_triples
from .random_models import GenConfig, random_weighted_dag, replicate_suite
from .reduction import ReducedModel, weighted_transitive_reduction
from .separation import (
    CIStatement,
    CriticalDag,
    SeparationOracle,
    critical_dag,
    cstar_separated,
    d_separated,
    global_markov,
    oracle,
    star_separated,
)
from .tropical import Path, WeightedDag, critical_path, is_generic, kleene_star, path_weight, tropical_star

__version__ = "0.1.0"
