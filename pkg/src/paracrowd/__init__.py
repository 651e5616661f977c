"""Crowd paraphrase collection with syntactic-diversity steering.

Subpackages cover bracket-tree ingestion and pattern extraction, text
utilities, diversity metrics, pattern selection, prompt construction and
validation, round orchestration with simulated pools, JSONL persistence,
and an HTTP task service with a CLI driver.
"""

__version__ = "0.1.0"
