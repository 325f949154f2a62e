"""Ranked outputs and ranking metrics."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..data.entities import EntityRef

__all__ = ["RankedList", "compute_auroc", "hits_at_k"]


@dataclass
class RankedList:
    """Scored drugs for one query entity, best first.

    Scores are non-increasing and exact ties are broken by ascending drug
    id, so every ranking the platform emits is deterministic.
    """

    query: EntityRef
    entries: list[tuple[EntityRef, float]]
    model_id: str = ""

    def __post_init__(self):
        for (a, sa), (b, sb) in zip(self.entries, self.entries[1:]):
            if sb > sa:
                raise ValueError("ranked scores must be non-increasing")
            if sb == sa and b.id < a.id:
                raise ValueError("tied scores must be ordered by ascending drug id")
        for _, s in self.entries:
            if not np.isfinite(s):
                raise ValueError("ranking scores must be finite")

    @classmethod
    def from_scores(cls, query: EntityRef, scored: list[tuple[EntityRef, float]],
                    top_n: int, model_id: str = "") -> "RankedList":
        """Sort (entity, score) pairs and truncate to the request size."""
        if top_n < 0:
            raise ValueError("top_n must be >= 0")
        ordered = sorted(scored, key=lambda pair: (-pair[1], pair[0].id))
        return cls(query=query, entries=ordered[:top_n], model_id=model_id)

    def __len__(self) -> int:
        return len(self.entries)

    def ids(self) -> list[str]:
        return [ref.id for ref, _ in self.entries]


def compute_auroc(scores, labels) -> float:
    """Area under the ROC curve via the rank (Mann-Whitney) statistic.

    Ties contribute one half.  Raises ValueError unless both classes are
    present.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be parallel 1-D arrays")
    pos = labels == 1
    neg = labels == 0
    n_pos, n_neg = int(pos.sum()), int(neg.sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUROC needs both classes present")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores))
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    rank_sum = ranks[pos].sum()
    return float((rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def hits_at_k(ranks, k: int) -> float:
    """Fraction of ranks (1-based) at or under k."""
    ranks = np.asarray(ranks)
    if ranks.size == 0:
        raise ValueError("no ranks given")
    return float(np.mean(ranks <= k))
