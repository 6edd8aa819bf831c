"""Variant detection and merging for cited references.

Matching compares title (when both records carry one), authors' last
names, and source title with a normalized edit-distance similarity, then
aggregates the per-attribute scores into a weighted mean. Records are
blocked by reference publication year (optionally +/- a tolerance), so
pairwise work is O(sum of block sizes squared) rather than O(n^2).
Above-threshold pairs are clustered transitively; each cluster elects the
variant with the most occurrences as its representative, which absorbs
the counts of every merged member.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations

from .errors import ConfigError, StaleProposal
from .model import CitedReference, Dataset, apply_merge

_PUNCT = re.compile(r"[^0-9a-z\s]")

MatchPair = tuple[str, str, float]


@dataclass(frozen=True)
class SimilarityConfig:
    threshold: float = 0.75
    title_weight: float = 0.5
    author_weight: float = 0.25
    source_weight: float = 0.25
    year_tolerance: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError(f"threshold must lie in [0, 1], got {self.threshold}")
        weights = (self.title_weight, self.author_weight, self.source_weight)
        if any(w < 0 for w in weights):
            raise ConfigError(f"weights must be non-negative, got {weights}")
        if sum(weights) <= 0:
            raise ConfigError("at least one attribute weight must be positive")
        if self.year_tolerance < 0:
            raise ConfigError(f"year tolerance must be >= 0, got {self.year_tolerance}")


@dataclass(frozen=True)
class ClusterProposal:
    """A candidate merge group: transitively matching variants and the
    elected representative (most occurrences; ties go to the older
    publication year, then the smaller id)."""

    member_ids: tuple[str, ...]
    pair_scores: tuple[MatchPair, ...]
    representative_id: str


def canonical(text: str | None) -> str:
    """Case-fold, strip punctuation, and collapse whitespace."""
    if not text:
        return ""
    return " ".join(_PUNCT.sub(" ", text.casefold()).split())


def levenshtein(a: str, b: str, cutoff: int | None = None) -> int:
    """Edit distance; with a cutoff, returns cutoff + 1 as soon as the
    distance provably exceeds it (exact otherwise)."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    if cutoff is not None and len(a) - len(b) > cutoff:
        return cutoff + 1
    previous = list(range(len(b) + 1))
    for i, char_a in enumerate(a, start=1):
        current = [i]
        append = current.append
        for j, char_b in enumerate(b, start=1):
            append(
                min(
                    previous[j] + 1,
                    current[j - 1] + 1,
                    previous[j - 1] + (char_a != char_b),
                )
            )
        if cutoff is not None and min(current) > cutoff:
            return cutoff + 1
        previous = current
    return previous[-1]


def edit_similarity(a: str, b: str) -> float:
    """Levenshtein distance normalized to a similarity in [0, 1]."""
    if a == b:
        return 1.0
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def _author_text(cr: CitedReference) -> str:
    return canonical(" ".join(last for last, _ in cr.authors))


def _canon_attrs(cr: CitedReference) -> tuple[str, str, str]:
    return canonical(cr.title), _author_text(cr), canonical(cr.source)


def _weighted_score(
    attrs_a: tuple[str, str, str],
    attrs_b: tuple[str, str, str],
    cfg: SimilarityConfig,
    min_score: float | None = None,
) -> float:
    """Weighted mean of per-attribute edit similarities over the attributes
    present in both records.

    With min_score set, pairs that provably cannot reach it short-circuit
    to 0.0: the length-difference bound caps each attribute's similarity
    from above, and each edit-distance run gets a cutoff derived from the
    bounds of the remaining attributes. Pairs at or above min_score always
    come back with their exact score.
    """
    weights = (cfg.title_weight, cfg.author_weight, cfg.source_weight)
    present = [
        (weight, a, b)
        for weight, a, b in zip(weights, attrs_a, attrs_b)
        if weight > 0 and a and b
    ]
    if not present:
        return 0.0
    total_weight = sum(weight for weight, _, _ in present)

    bounds = [
        1.0 - abs(len(a) - len(b)) / max(len(a), len(b)) for _, a, b in present
    ]
    if min_score is not None and min_score > 0:
        optimum = sum(w * ub for (w, _, _), ub in zip(present, bounds))
        if optimum < min_score * total_weight - 1e-12:
            return 0.0

    score = 0.0
    rest = sum(w * ub for (w, _, _), ub in zip(present, bounds))
    for (weight, a, b), bound in zip(present, bounds):
        rest -= weight * bound
        longest = max(len(a), len(b))
        cutoff = None
        if min_score is not None and min_score > 0:
            # the least this attribute may contribute while the pair can
            # still reach min_score, assuming the others hit their bounds
            needed = min_score * total_weight - score - rest
            if needed > weight + 1e-12:
                return 0.0
            if needed > 0:
                cutoff = int((1.0 - needed / weight) * longest + 1e-9)
        distance = levenshtein(a, b, cutoff)
        if cutoff is not None and distance > cutoff:
            return 0.0
        score += weight * (1.0 - distance / longest)
    return score / total_weight


def similarity(a: CitedReference, b: CitedReference, cfg: SimilarityConfig) -> float:
    """Weighted mean of per-attribute edit similarities over the attributes
    present in both records; 0 when the publication years differ by more
    than the tolerance or no attribute is shared."""
    if abs(a.rpy - b.rpy) > cfg.year_tolerance:
        return 0.0
    return _weighted_score(_canon_attrs(a), _canon_attrs(b), cfg)


def match_pairs(dataset: Dataset, cfg: SimilarityConfig) -> list[MatchPair]:
    """All unordered pairs with similarity >= threshold, blocked by
    publication year, sorted by id pair."""
    blocks: dict[int, list[str]] = {}
    attrs: dict[str, tuple[str, str, str]] = {}
    for cr_id in sorted(dataset.crs):
        cr = dataset.crs[cr_id]
        blocks.setdefault(cr.rpy, []).append(cr_id)
        attrs[cr_id] = _canon_attrs(cr)

    pairs: list[MatchPair] = []

    def consider(id_a: str, id_b: str) -> None:
        if id_b < id_a:
            id_a, id_b = id_b, id_a
        score = _weighted_score(attrs[id_a], attrs[id_b], cfg, min_score=cfg.threshold)
        if score >= cfg.threshold:
            pairs.append((id_a, id_b, score))

    years = sorted(blocks)
    for year in years:
        for id_a, id_b in combinations(blocks[year], 2):
            consider(id_a, id_b)
        for other in range(year + 1, year + cfg.year_tolerance + 1):
            for id_a in blocks[year]:
                for id_b in blocks.get(other, ()):
                    consider(id_a, id_b)

    pairs.sort()
    return pairs


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict[str, str] = {}

    def find(self, key: str) -> str:
        root = self.parent.setdefault(key, key)
        while root != self.parent[root]:
            root = self.parent[root]
        while key != root:
            self.parent[key], key = root, self.parent[key]
        return root

    def union(self, a: str, b: str) -> None:
        root_a, root_b = self.find(a), self.find(b)
        if root_a != root_b:
            # Deterministic orientation keeps results order-independent.
            if root_b < root_a:
                root_a, root_b = root_b, root_a
            self.parent[root_b] = root_a


def elect_representative(members: list[CitedReference]) -> str:
    best = min(members, key=lambda cr: (-cr.n_cr, cr.rpy, cr.id))
    return best.id


def cluster(dataset: Dataset, pairs: list[MatchPair]) -> list[ClusterProposal]:
    """Connected components of the match graph, singletons omitted."""
    uf = _UnionFind()
    for id_a, id_b, _ in pairs:
        uf.union(id_a, id_b)

    groups: dict[str, list[str]] = {}
    for cr_id in uf.parent:
        groups.setdefault(uf.find(cr_id), []).append(cr_id)
    pair_groups: dict[str, list[MatchPair]] = {}
    for pair in sorted(pairs):
        pair_groups.setdefault(uf.find(pair[0]), []).append(pair)

    proposals = []
    for root in sorted(groups):
        member_ids = tuple(sorted(groups[root]))
        if len(member_ids) < 2:
            continue
        proposals.append(
            ClusterProposal(
                member_ids=member_ids,
                pair_scores=tuple(pair_groups[root]),
                representative_id=elect_representative(
                    [dataset.crs[m] for m in member_ids]
                ),
            )
        )
    return proposals


def merge(dataset: Dataset, accepted: list[ClusterProposal]) -> Dataset:
    """Apply the accepted proposals: every member's counts fold into its
    cluster representative, and the members disappear. The whole call is
    one undoable history event. Total citation mass is conserved."""
    groups = []
    for proposal in accepted:
        dead = [m for m in proposal.member_ids if m not in dataset.crs]
        if dead:
            raise StaleProposal(
                f"proposal members no longer exist: {', '.join(sorted(dead))}"
            )
        others = [m for m in proposal.member_ids if m != proposal.representative_id]
        groups.append((proposal.representative_id, others))
    if not groups:
        return dataset
    return apply_merge(dataset, groups)
