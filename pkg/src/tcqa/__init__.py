"""Time-context aware QA toolkit.

Generates time-context dependent span-extraction (TCSE) datasets from
question-context templates, scores model predictions for time awareness
(TA), context awareness (CA) and TC-score, and ships reference loss
kernels and long-passage chunking.
"""

__version__ = "0.1.0"

from .errors import TcqaError

__all__ = ["TcqaError", "__version__"]
