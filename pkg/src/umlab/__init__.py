"""Finite ultrametric spaces, quasi-order jump operators, and the
reduction constructions between them, with brute-force oracles and a
seeded verification-campaign runner."""

from .balltree import (
    BallTree,
    canonical_code,
    canonical_space,
    canonicalize,
    embeds,
    from_ball_tree,
    internal,
    isometric,
    leaf,
    leaves,
    to_ball_tree,
)
from .errors import (
    BaseMismatchError,
    InputError,
    NotUltrametricError,
    SizeBoundError,
    UmlabError,
)
from .genlab import (
    Bounds,
    CampaignReport,
    gen_ball_tree,
    gen_multiset,
    gen_qo,
    gen_tree,
    mutate_pair,
    property_names,
    run_campaign,
)
from .metric import (
    DistanceSet,
    FiniteMetric,
    ValidationReport,
    brute_embeds,
    brute_isometric,
    is_well_spaced,
    realized_distances,
    triangle_audit,
    validate,
)
from .qo import (
    OMEGA,
    IterationTrace,
    OmegaMultiset,
    QuasiOrder,
    Witness,
    cf_le,
    closure,
    einj_equivalent,
    equiv_inj_le,
    es_classes,
    has_incomparable_pair,
    inj_le,
    iterate_levels,
    level_respecting_witness,
    verify_witness,
    wqo_inj_le,
)
from .reduce import (
    Graph,
    RootedTree,
    add_tail,
    decompose_space,
    glue_canonical,
    graph_metric,
    rank_ultrametric,
    rooted_tree_embeds,
    rooted_tree_iso,
    subset_space,
    tree_ultrametric,
    union_at_distance,
)

__all__ = [name for name in dir() if not name.startswith("_")]
