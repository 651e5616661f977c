"""Diversity measures over collected paraphrases.

Four measures: type-token ratio over the whole corpus, n-gram novelty of a
candidate against its source (mean over orders 1..max_n), mean pairwise
novelty within each seed's paraphrase set, and distinct-pattern ratio.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptyCandidate, EmptyCorpus, EmptyInput, GroupTooSmall, MissingPattern
from .records import ParaphraseRecord
from .textutils import ngram_set, tokenize

DEFAULT_MAX_NGRAM = 4

TokenSeq = list[str]


def ttr(corpus: list[TokenSeq]) -> float:
    """Distinct token types over total tokens, corpus-level."""
    total = sum(len(seq) for seq in corpus)
    if not corpus or total == 0:
        raise EmptyCorpus("ttr needs at least one token")
    types = set()
    for seq in corpus:
        types.update(seq)
    return len(types) / total


def pinc(source: TokenSeq, candidate: TokenSeq, max_n: int = DEFAULT_MAX_NGRAM) -> float:
    """Fraction of candidate n-grams absent from the source.

    Averaged over n = 1..max_n; orders where the candidate is too short to
    have any n-gram are skipped rather than counted as zero.
    """
    if not candidate:
        raise EmptyCandidate("pinc candidate is empty")
    shares = []
    for n in range(1, max_n + 1):
        cand_grams = ngram_set(candidate, n)
        if not cand_grams:
            continue
        src_grams = ngram_set(source, n)
        shares.append(1.0 - len(src_grams & cand_grams) / len(cand_grams))
    return sum(shares) / len(shares)


def div(groups: list[list[TokenSeq]], max_n: int = DEFAULT_MAX_NGRAM) -> float:
    """Mean pairwise ``pinc`` within each group, averaged across groups.

    Pairs are ordered (pinc is not symmetric) and groups are weighted
    equally regardless of size.
    """
    if not groups:
        raise EmptyCorpus("div needs at least one group")
    group_means = []
    for group in groups:
        if len(group) < 2:
            raise GroupTooSmall(f"group of size {len(group)} has no pairs")
        scores = [
            pinc(a, b, max_n)
            for i, a in enumerate(group)
            for j, b in enumerate(group)
            if i != j
        ]
        group_means.append(sum(scores) / len(scores))
    return sum(group_means) / len(group_means)


def pattern_diversity(paraphrases: list[ParaphraseRecord]) -> float:
    """Distinct canonical patterns divided by total paraphrases."""
    if not paraphrases:
        raise EmptyInput("no paraphrases")
    missing = [r.id for r in paraphrases if r.pattern is None]
    if missing:
        raise MissingPattern(f"records without patterns: {missing}")
    return len({r.pattern for r in paraphrases}) / len(paraphrases)


@dataclass(frozen=True)
class MetricsReport:
    ttr: float
    pinc_mean: float
    div_mean: float
    pattern_diversity: float
    counts: dict
    per_seed: dict

    def to_dict(self) -> dict:
        return {
            "ttr": self.ttr,
            "pinc_mean": self.pinc_mean,
            "div_mean": self.div_mean,
            "pattern_diversity": self.pattern_diversity,
            "counts": self.counts,
            "per_seed": self.per_seed,
        }

    def table(self) -> str:
        """Fixed-order metric table, four decimal places."""
        rows = [
            ("ttr", self.ttr),
            ("pinc_mean", self.pinc_mean),
            ("div_mean", self.div_mean),
            ("pattern_diversity", self.pattern_diversity),
        ]
        return "\n".join(f"{name:<18} {value:.4f}" for name, value in rows)


def compute_report(
    records: list[ParaphraseRecord],
    seed_texts: dict[str, str],
    max_n: int = DEFAULT_MAX_NGRAM,
    require_patterns: bool = True,
) -> MetricsReport:
    """Full report over a curated collection.

    ``pinc_mean`` averages each paraphrase against its own seed text.
    ``div_mean`` averages over seed groups that have at least two
    paraphrases (0.0 when no group qualifies).  By default every record
    must carry a pattern; with ``require_patterns=False`` (live rounds
    before trees are attached) pattern diversity covers the patterned
    subset and ``counts.patterned`` says how large that subset is.
    """
    if not records:
        raise EmptyCorpus("no paraphrases to report on")

    token_seqs = [tokenize(r.text) for r in records]
    corpus_ttr = ttr(token_seqs)

    pinc_scores = []
    for record, cand in zip(records, token_seqs):
        source = tokenize(seed_texts[record.seed_id])
        if cand:
            pinc_scores.append(pinc(source, cand, max_n))
    pinc_mean = sum(pinc_scores) / len(pinc_scores) if pinc_scores else 0.0

    by_seed: dict[str, list[TokenSeq]] = {}
    for record, seq in zip(records, token_seqs):
        by_seed.setdefault(record.seed_id, []).append(seq)
    eligible = [group for _, group in sorted(by_seed.items()) if len(group) >= 2]
    div_mean = div(eligible, max_n) if eligible else 0.0

    patterned = [r for r in records if r.pattern is not None]
    if require_patterns and len(patterned) != len(records):
        missing = [r.id for r in records if r.pattern is None]
        raise MissingPattern(f"records without patterns: {missing}")
    pat_div = pattern_diversity(patterned) if patterned else 0.0

    tokens_total = sum(len(seq) for seq in token_seqs)
    types_total = len({tok for seq in token_seqs for tok in seq})
    per_seed = {}
    for seed_id in sorted(by_seed):
        group = by_seed[seed_id]
        per_seed[seed_id] = {
            "paraphrases": len(group),
            "ttr": ttr(group) if sum(len(s) for s in group) else 0.0,
        }

    return MetricsReport(
        ttr=corpus_ttr,
        pinc_mean=pinc_mean,
        div_mean=div_mean,
        pattern_diversity=pat_div,
        counts={
            "paraphrases": len(records),
            "patterned": len(patterned),
            "distinct_patterns": len({r.pattern for r in patterned}),
            "tokens": tokens_total,
            "distinct_token_types": types_total,
        },
        per_seed=per_seed,
    )
