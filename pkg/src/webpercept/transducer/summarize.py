"""Optional summarization hook between pruning and encoding.

The default is identity. Real implementations (say, a small model that
rewrites verbose prose) plug in here, but whatever they do they must
not lose interactive elements; the harness enforces that contract at
runtime rather than trusting implementations.
"""

from __future__ import annotations

from ..errors import SummarizerError, WebPerceptError
from ..html_ingest import DomTree
from .affordances import extract_affordances
from .config import TaskContext


class DomSummarizer:
    """Shrinks a pruned tree while keeping every affordance node."""

    def summarize(self, tree: DomTree, ctx: TaskContext) -> DomTree:
        raise NotImplementedError


class IdentitySummarizer(DomSummarizer):
    def summarize(self, tree: DomTree, ctx: TaskContext) -> DomTree:
        return tree


def apply_summarizer(summarizer: DomSummarizer | None, tree: DomTree, ctx: TaskContext) -> DomTree:
    """Run a summarizer and enforce affordance preservation.

    Implementation failures and contract violations both surface as
    SummarizerError so callers have one thing to catch.
    """
    if summarizer is None or isinstance(summarizer, IdentitySummarizer):
        return tree
    try:
        result = summarizer.summarize(tree, ctx)
    except WebPerceptError:
        raise
    except Exception as exc:
        raise SummarizerError(f"summarizer failed: {exc}") from exc
    if not isinstance(result, DomTree):
        raise SummarizerError("summarizer returned something other than a DomTree")
    before = {a.node_id for a in extract_affordances(tree)}
    after = {a.node_id for a in extract_affordances(result)}
    if before != after:
        missing = sorted(before - after)
        added = sorted(after - before)
        raise SummarizerError(
            f"summarizer changed the affordance set (lost {missing}, added {added})"
        )
    return result
