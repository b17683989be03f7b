"""DOM transduction: raw HTML in, Page Affordance Model out."""

from .affordances import AFFORDANCE_KINDS, AffordanceNode, classify_interactive, extract_affordances
from .blocks import CONTAINER_TAGS, Block, BlockTree, partition_blocks
from .cleaning import clean
from .config import (
    CleaningConfig,
    TaskContext,
    TransducerConfig,
    load_transducer_config,
)
from .emmet import CompactEncoding, decode_compact, encode_compact
from .pipeline import PageAffordanceModel, ReductionStats, transduce, transduce_tree
from .pruning import kept_block_ids, prune
from .scoring import LexicalScorer, RelevanceScorer, score_blocks
from .summarize import DomSummarizer, IdentitySummarizer, apply_summarizer

__all__ = [
    "AFFORDANCE_KINDS",
    "AffordanceNode",
    "Block",
    "BlockTree",
    "CONTAINER_TAGS",
    "CleaningConfig",
    "CompactEncoding",
    "DomSummarizer",
    "IdentitySummarizer",
    "LexicalScorer",
    "PageAffordanceModel",
    "ReductionStats",
    "RelevanceScorer",
    "TaskContext",
    "TransducerConfig",
    "apply_summarizer",
    "classify_interactive",
    "clean",
    "decode_compact",
    "encode_compact",
    "extract_affordances",
    "kept_block_ids",
    "load_transducer_config",
    "partition_blocks",
    "prune",
    "score_blocks",
    "transduce",
    "transduce_tree",
]
