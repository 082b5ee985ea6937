"""Alignable video retrieval toolkit.

Thin python surface over the C++ core: per-frame feature sequences,
contextualization, DTW alignment, DRAQ alignability scoring, exact cosine
retrieval, the end-to-end AVR pipeline, and evaluation utilities.
"""

from ._core import (
    AlignabilityScore,
    ContextualizedSequence,
    CostMatrix,
    FeatureSequence,
    RetrievalIndex,
    SequenceStore,
    SyntheticSpec,
    apa,
    avr_query,
    build_index,
    build_index_from_manifest,
    contextualize,
    cost_matrix,
    cycle_consistency,
    draq,
    dtw,
    dtw_cost_indicator,
    embed_clip,
    generate_synthetic,
    kendall_tau_indicator,
    load_index,
    load_sequence,
    oracle_candidates,
    query_topk,
    random_path_cost,
    sample_random_path,
    save_index,
    save_sequence,
    skip_still_frames,
    warp_labels,
)

__all__ = [
    "AlignabilityScore",
    "ContextualizedSequence",
    "CostMatrix",
    "FeatureSequence",
    "RetrievalIndex",
    "SequenceStore",
    "SyntheticSpec",
    "apa",
    "avr_query",
    "build_index",
    "build_index_from_manifest",
    "contextualize",
    "cost_matrix",
    "cycle_consistency",
    "draq",
    "dtw",
    "dtw_cost_indicator",
    "embed_clip",
    "generate_synthetic",
    "kendall_tau_indicator",
    "load_index",
    "load_sequence",
    "oracle_candidates",
    "query_topk",
    "random_path_cost",
    "sample_random_path",
    "save_index",
    "save_sequence",
    "skip_still_frames",
    "warp_labels",
]
