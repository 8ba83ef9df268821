"""Reference numeric kernels for the training objective.

Span extraction uses summed start/end cross-entropy. The contrastive
kernel scores question/context embedding pairs by cosine distance s and
accumulates w_p*y*exp(s) + w_n*(1-y)*exp(1-s); the joint objective is
l_rc + lambda_t*l_tcse + lambda_c*l_contrast. Values and analytic
gradients here are the oracle any training harness is checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import TcqaError


class ZeroVector(TcqaError):
    """Cosine distance is undefined for zero-norm vectors."""


class DimMismatch(TcqaError):
    """Operands have different lengths."""


class IndexOutOfRange(TcqaError):
    """Gold index outside the logit sequence."""


@dataclass(frozen=True)
class LossWeights:
    """Positive/negative pair weights and the joint-objective lambdas."""

    w_p: float = 1.0
    w_n: float = 1.0
    lambda_t: float = 1.0
    lambda_c: float = 0.5

    def __post_init__(self) -> None:
        for field in ("w_p", "w_n", "lambda_t", "lambda_c"):
            v = getattr(self, field)
            if not math.isfinite(v) or v < 0:
                raise TcqaError(f"{field} must be finite and >= 0, got {v}")


class ContrastivePair:
    """A question/context embedding pair with label y (1 = positive)."""

    __slots__ = ("v_q", "v_c", "y")

    def __init__(self, v_q: Sequence[float], v_c: Sequence[float], y: int):
        self.v_q = np.asarray(v_q, dtype=float)
        self.v_c = np.asarray(v_c, dtype=float)
        if self.v_q.ndim != 1 or self.v_c.ndim != 1:
            raise DimMismatch("embeddings must be 1-D")
        if self.v_q.shape != self.v_c.shape:
            raise DimMismatch(f"dims differ: {self.v_q.shape} vs {self.v_c.shape}")
        if not (np.all(np.isfinite(self.v_q)) and np.all(np.isfinite(self.v_c))):
            raise TcqaError("embeddings must be finite")
        if y not in (0, 1):
            raise TcqaError(f"y must be 0 or 1, got {y!r}")
        self.y = int(y)

    def to_dict(self) -> dict:
        return {"v_q": self.v_q.tolist(), "v_c": self.v_c.tolist(), "y": self.y}

    @classmethod
    def from_dict(cls, d: dict) -> "ContrastivePair":
        return cls(d["v_q"], d["v_c"], d["y"])


def cosine_distance(u: Sequence[float], v: Sequence[float]) -> float:
    """1 minus the cosine similarity; 0 for parallel vectors, 2 for antipodal."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.ndim != 1 or v.ndim != 1 or u.shape != v.shape:
        raise DimMismatch(f"shapes {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector("cosine distance needs nonzero vectors")
    return 1.0 - float(u @ v) / (nu * nv)


def contrastive_terms(
    pairs: Iterable[ContrastivePair], w: LossWeights = LossWeights()
) -> list[float]:
    """Per-pair contributions w_p*y*exp(s) + w_n*(1-y)*exp(1-s)."""
    terms = []
    for p in pairs:
        s = cosine_distance(p.v_q, p.v_c)
        if p.y:
            terms.append(w.w_p * math.exp(s))
        else:
            terms.append(w.w_n * math.exp(1.0 - s))
    return terms


def contrastive_loss(
    pairs: Iterable[ContrastivePair],
    w: LossWeights = LossWeights(),
    mean: bool = False,
) -> float:
    """Batch contrastive loss; plain sum unless mean reduction is asked for."""
    terms = contrastive_terms(pairs, w)
    if not mean:
        return sum(terms)
    if not terms:
        raise TcqaError("mean reduction over an empty batch")
    return sum(terms) / len(terms)


def contrastive_grad(
    pairs: Sequence[ContrastivePair], w: LossWeights = LossWeights()
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Per-pair analytic gradients of the summed loss w.r.t. v_q and v_c."""
    grads = []
    for p in pairs:
        q, c = p.v_q, p.v_c
        nq = float(np.linalg.norm(q))
        nc = float(np.linalg.norm(c))
        if nq == 0.0 or nc == 0.0:
            raise ZeroVector("cosine distance needs nonzero vectors")
        cossim = float(q @ c) / (nq * nc)
        ds_dq = cossim * q / nq**2 - c / (nq * nc)
        ds_dc = cossim * c / nc**2 - q / (nq * nc)
        s = 1.0 - cossim
        if p.y:
            dl_ds = w.w_p * math.exp(s)
        else:
            dl_ds = -w.w_n * math.exp(1.0 - s)
        grads.append((dl_ds * ds_dq, dl_ds * ds_dc))
    return grads


def _nll(logits: np.ndarray, gold: int) -> float:
    shift = logits - logits.max()
    return float(np.log(np.exp(shift).sum()) - shift[gold])


def span_cross_entropy(
    start_logits: Sequence[float],
    end_logits: Sequence[float],
    gold_start: int,
    gold_end: int,
) -> float:
    """Summed negative log softmax of the gold start and end indices."""
    s = np.asarray(start_logits, dtype=float)
    e = np.asarray(end_logits, dtype=float)
    if s.ndim != 1 or e.ndim != 1 or s.shape != e.shape:
        raise DimMismatch(f"logit shapes {s.shape} vs {e.shape}")
    n = len(s)
    if not 0 <= gold_start < n:
        raise IndexOutOfRange(f"gold_start {gold_start} for length {n}")
    if not 0 <= gold_end < n:
        raise IndexOutOfRange(f"gold_end {gold_end} for length {n}")
    return _nll(s, gold_start) + _nll(e, gold_end)


def total_loss(
    l_rc: float, l_tcse: float, l_contrast: float, w: LossWeights = LossWeights()
) -> float:
    """Joint objective: l_rc + lambda_t*l_tcse + lambda_c*l_contrast."""
    return l_rc + w.lambda_t * l_tcse + w.lambda_c * l_contrast
