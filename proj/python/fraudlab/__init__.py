"""Fraud detection lab: synthetic corpora, anomaly detectors and risk scoring.

The heavy lifting lives in the C++ extension module ``fraudlab._core``; this
package re-exports its public surface.
"""

from fraudlab._core import (
    auc,
    generate_corpus,
    nearest_rank_quantile,
    run,
    weighted_score,
)

__all__ = [
    "auc",
    "generate_corpus",
    "nearest_rank_quantile",
    "run",
    "weighted_score",
]
