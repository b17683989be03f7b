"""Stage three of transduction: task-relevance scoring for blocks.

The default scorer is lexical so that runs are deterministic and need
no model. RelevanceScorer is the extension point for anything smarter
(embeddings, a ranking model); implementations must say whether they
are reentrant since transductions may run concurrently.
"""

from __future__ import annotations

from ..errors import EmptyTask
from .blocks import Block, BlockTree
from .config import TaskContext


class RelevanceScorer:
    """Scores one block against the task; higher means keep."""

    # True when score() may be called from multiple threads at once.
    reentrant = False
    # True when the scorer cannot work without ctx.keywords.
    requires_keywords = False

    def score(self, block: Block, ctx: TaskContext) -> float:
        raise NotImplementedError


class LexicalScorer(RelevanceScorer):
    """Keyword-overlap relevance with a flat bonus for interactivity.

    score = |keywords ∩ block terms| / |keywords|, plus 0.25 if the
    block contains any interactive element, clamped to 1.0.
    """

    reentrant = True
    requires_keywords = True
    interactive_bonus = 0.25

    def score(self, block: Block, ctx: TaskContext) -> float:
        if not ctx.keywords:
            raise EmptyTask("task context has no keywords to match against")
        value = len(ctx.keywords & block.terms) / len(ctx.keywords)
        if block.has_interactive:
            value += self.interactive_bonus
        return min(value, 1.0)


SCORERS = {"lexical": LexicalScorer}


def score_blocks(
    blocks: BlockTree, ctx: TaskContext, scorer: RelevanceScorer | None = None
) -> BlockTree:
    """Return a new BlockTree with relevance filled in.

    Raises EmptyTask for keyword-driven scorers on a keywordless task;
    the caller is expected to fall back to budget-only pruning.
    """
    scorer = scorer or LexicalScorer()
    if scorer.requires_keywords and not ctx.keywords:
        raise EmptyTask("task context has no keywords to match against")
    scores = {b.block_id: float(scorer.score(b, ctx)) for b in blocks.blocks}
    for block_id, value in scores.items():
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"scorer returned {value} for {block_id}, outside [0,1]")
    return blocks.with_relevance(scores)
