"""Monte Carlo estimation of average best m-term widths.

Samples are processed in batches.  Each batch is reduced to a
:class:`MomentAccumulator`; accumulators merge associatively with Chan's
pairwise update, so a run split across workers is combined exactly as if
the stream were processed in one pass (up to rounding).

For the surface measure the cone points carry importance weights with an
unknown normalizing constant; those estimates use the self-normalized
ratio ``sum w f / sum w`` with the delta-method standard error.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial
from statistics import NormalDist
from typing import Callable

import numpy as np

from .errors import DegenerateEstimateError, DomainError
from .samplers import MeasureKind, MeasureSpec, RngState, sample
from .sparse_approx import as_pnorm

__all__ = [
    "EstimateResult",
    "MomentAccumulator",
    "WidthQuery",
    "accumulate",
    "estimate_widths",
    "merge",
    "ratio_check_prop10",
    "sigma_batch",
]

BATCH_ELEMENTS = 2**21
DEFAULT_CI = 0.99


def _zeros_like(v):
    return np.zeros_like(np.asarray(v, dtype=float))


def _chan(wa, ma, sa, wb, mb, sb):
    """Merge (total weight, mean, sum of weighted squared deviations) pairs."""
    w = wa + wb
    if wa == 0:
        return wb, mb, sb
    if wb == 0:
        return wa, ma, sa
    delta = mb - ma
    mean = ma + delta * (wb / w)
    return w, mean, sa + sb + delta * delta * (wa * wb / w)


@dataclass
class MomentAccumulator:
    """Streaming count/mean/M2 for a vector of estimands.

    The ``weight_*`` / ``sq_weight_*`` fields are only populated when weights
    are supplied.  Weight sums are stored relative to ``exp(log_scale)``
    (and ``exp(2 log_scale)`` for squared weights) to stay in range.
    """

    count: int = 0
    mean: np.ndarray | float = 0.0
    m2: np.ndarray | float = 0.0
    weighted: bool = False
    log_scale: float = -math.inf
    weight_sum: float = 0.0
    weighted_mean: np.ndarray | float = 0.0
    weighted_m2: np.ndarray | float = 0.0
    sq_weight_sum: float = 0.0
    sq_weighted_mean: np.ndarray | float = 0.0
    sq_weighted_m2: np.ndarray | float = 0.0

    @classmethod
    def from_batch(cls, values, log_weights=None) -> "MomentAccumulator":
        values = np.asarray(values, dtype=float)
        k = values.shape[0]
        if k == 0:
            return cls()
        mean = values.mean(axis=0)
        dev = values - mean
        acc = cls(count=k, mean=mean, m2=np.einsum("i...,i...->...", dev, dev))
        if log_weights is None:
            return acc
        log_weights = np.asarray(log_weights, dtype=float)
        scale = float(log_weights.max())
        if not math.isfinite(scale):
            raise DegenerateEstimateError("importance weights are all zero or not finite")
        w = np.exp(log_weights - scale)
        w_sum = float(math.fsum(w))
        w_mean = np.tensordot(w, values, axes=1) / w_sum
        w_dev = values - w_mean
        w2 = w * w
        w2_sum = float(math.fsum(w2))
        w2_mean = np.tensordot(w2, values, axes=1) / w2_sum
        w2_dev = values - w2_mean
        return replace(
            acc,
            weighted=True,
            log_scale=scale,
            weight_sum=w_sum,
            weighted_mean=w_mean,
            weighted_m2=np.tensordot(w, w_dev * w_dev, axes=1),
            sq_weight_sum=w2_sum,
            sq_weighted_mean=w2_mean,
            sq_weighted_m2=np.tensordot(w2, w2_dev * w2_dev, axes=1),
        )

    @property
    def mode(self) -> str:
        return "self_normalized" if self.weighted else "plain"

    @property
    def weighted_mean_num(self):
        return self.weight_sum * np.asarray(self.weighted_mean)

    def _rescaled(self, log_scale):
        f = math.exp(self.log_scale - log_scale) if self.weight_sum else 0.0
        return (
            self.weight_sum * f,
            np.asarray(self.weighted_m2) * f,
            self.sq_weight_sum * f * f,
            np.asarray(self.sq_weighted_m2) * f * f,
        )

    def estimate(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(mean, std_error)`` arrays for the accumulated stream."""
        if self.count == 0:
            raise DegenerateEstimateError("no samples accumulated")
        n = self.count
        if not self.weighted:
            mean = np.asarray(self.mean, dtype=float)
            if n < 2:
                return mean, np.full_like(mean, math.inf)
            return mean, np.sqrt(np.asarray(self.m2) / ((n - 1) * n))
        if self.weight_sum <= 0:
            raise DegenerateEstimateError("importance weights sum to zero")
        mean = np.asarray(self.weighted_mean, dtype=float)
        if n < 2:
            return mean, np.full_like(mean, math.inf)
        # sum w^2 (f - mean)^2, recentred from the w^2-weighted moments
        shift = np.asarray(self.sq_weighted_mean) - mean
        ss = np.asarray(self.sq_weighted_m2) + self.sq_weight_sum * shift * shift
        se = np.sqrt(np.maximum(ss, 0.0) * (n / (n - 1))) / self.weight_sum
        return mean, se


def merge(a: MomentAccumulator, b: MomentAccumulator) -> MomentAccumulator:
    """Statistics of the concatenation of the streams behind ``a`` and ``b``."""
    if a.count == 0:
        return b
    if b.count == 0:
        return a
    if a.weighted != b.weighted:
        raise DomainError("cannot merge weighted with unweighted accumulators")
    count, mean, m2 = _chan(a.count, np.asarray(a.mean), np.asarray(a.m2), b.count, np.asarray(b.mean), np.asarray(b.m2))
    out = MomentAccumulator(count=count, mean=mean, m2=m2)
    if not a.weighted:
        return out
    scale = max(a.log_scale, b.log_scale)
    wa, sa, w2a, s2a = a._rescaled(scale)
    wb, sb, w2b, s2b = b._rescaled(scale)
    w, wm, ws = _chan(wa, np.asarray(a.weighted_mean), sa, wb, np.asarray(b.weighted_mean), sb)
    w2, w2m, w2s = _chan(w2a, np.asarray(a.sq_weighted_mean), s2a, w2b, np.asarray(b.sq_weighted_mean), s2b)
    return replace(
        out,
        weighted=True,
        log_scale=scale,
        weight_sum=w,
        weighted_mean=wm,
        weighted_m2=ws,
        sq_weight_sum=w2,
        sq_weighted_mean=w2m,
        sq_weighted_m2=w2s,
    )


@dataclass(frozen=True)
class EstimateResult:
    mean: float
    std_error: float
    ci_low: float
    ci_high: float
    samples: int
    mode: str

    @classmethod
    def from_moments(cls, mean, std_error, samples, mode, ci_level=DEFAULT_CI):
        if not 0 < ci_level < 1:
            raise DomainError(f"ci_level must lie in (0, 1), got {ci_level}")
        z = NormalDist().inv_cdf(0.5 + ci_level / 2)
        half = z * std_error
        return cls(float(mean), float(std_error), float(mean - half), float(mean + half), int(samples), mode)


@dataclass(frozen=True)
class WidthQuery:
    """Estimand ``E sigma_m(x)_q`` for each ``m`` in ``m_values`` under ``measure``."""

    q: float
    m_values: tuple[int, ...]
    measure: MeasureSpec

    def __post_init__(self):
        q = as_pnorm(self.q)
        object.__setattr__(self, "q", q)
        if self.measure.p > q:
            raise DomainError(f"need p <= q, got p={self.measure.p}, q={q}")
        ms = tuple(sorted(set(int(m) for m in self.m_values)))
        if not ms:
            raise DomainError("m_values is empty")
        if ms[0] < 0 or ms[-1] > self.measure.n - 1:
            raise DomainError(f"m must lie in [0, {self.measure.n - 1}], got {ms}")
        object.__setattr__(self, "m_values", ms)

    @property
    def p(self) -> float:
        return self.measure.p

    @property
    def n(self) -> int:
        return self.measure.n

    @classmethod
    def build(cls, p, q, n, m_values, measure="cone") -> "WidthQuery":
        spec = measure if isinstance(measure, MeasureSpec) else MeasureSpec.parse(measure, p, n)
        if spec.p != as_pnorm(p) or spec.n != n:
            raise DomainError("measure parameters disagree with (p, n)")
        return cls(q, tuple(m_values), spec)


def sigma_batch(points: np.ndarray, m_values, q: float) -> np.ndarray:
    """``sigma_m(x)_q`` for each row of ``points`` and each ``m``; shape ``(rows, len(m_values))``."""
    points = np.asarray(points, dtype=float)
    n = points.shape[1]
    ms = np.asarray(m_values, dtype=int)
    if q == math.inf:
        kth = n - 1 - ms
        if ms.size <= 8:
            part = np.partition(points, np.unique(kth), axis=1)
            return part[:, kth]
        desc = np.sort(points, axis=1)[:, ::-1]
        return desc[:, ms]
    powers = points**q
    if ms.size <= 4:
        cols = []
        for m in ms:
            if m == 0:
                cols.append(powers.sum(axis=1))
            else:
                cols.append(np.partition(powers, n - m, axis=1)[:, : n - m].sum(axis=1))
        tail = np.stack(cols, axis=1)
    else:
        asc = np.sort(powers, axis=1)
        # tail beyond the m largest = sum of the n - m smallest
        csum = np.cumsum(asc, axis=1)
        tail = np.where(ms < n, csum[:, np.clip(n - 1 - ms, 0, n - 1)], 0.0)
    return tail ** (1.0 / q)


def _width_batch(spec, q, m_values, gen, k):
    batch = sample(spec, gen, size=k)
    values = sigma_batch(batch.points, m_values, q)
    return values, (batch.log_weights if spec.kind is MeasureKind.SURFACE else None)


def _run_worker(batch_fn, n_samples, state, worker_index, batch_rows):
    gen = state.generator(worker_index)
    acc = MomentAccumulator()
    done = 0
    while done < n_samples:
        k = min(batch_rows, n_samples - done)
        values, log_w = batch_fn(gen, k)
        acc = merge(acc, MomentAccumulator.from_batch(values, log_w))
        done += k
    return acc


def default_workers() -> int:
    text = os.environ.get("LPWIDTHS_WORKERS")
    if not text:
        return 1
    try:
        workers = int(text)
    except ValueError:
        raise DomainError(f"LPWIDTHS_WORKERS must be a positive integer, got {text!r}") from None
    if workers < 1:
        raise DomainError(f"LPWIDTHS_WORKERS must be a positive integer, got {text!r}")
    return workers


def accumulate(
    batch_fn: Callable,
    samples: int,
    seed: RngState,
    workers: int = 1,
    batch_rows: int = 4096,
) -> MomentAccumulator:
    """Run ``batch_fn(generator, k) -> (values, log_weights | None)`` over ``samples`` rows.

    Worker ``i`` draws from ``seed.generator(i)``; results are merged in worker
    order, so output depends on ``(seed, workers)`` only.  ``batch_fn`` must be
    picklable when ``workers > 1``.
    """
    if not isinstance(samples, (int, np.integer)) or samples < 1:
        raise DomainError(f"samples must be a positive integer, got {samples!r}")
    if workers < 1:
        raise DomainError("workers must be >= 1")
    workers = min(workers, samples)
    base, extra = divmod(samples, workers)
    shares = [base + (i < extra) for i in range(workers)]
    if workers == 1:
        parts = [_run_worker(batch_fn, shares[0], seed, 0, batch_rows)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_worker, batch_fn, shares[i], seed, i, batch_rows) for i in range(workers)]
            parts = [f.result() for f in futures]
    acc = MomentAccumulator()
    for part in parts:
        acc = merge(acc, part)
    return acc


def estimate_widths(
    query: WidthQuery,
    samples: int,
    seed: RngState,
    workers: int = 1,
    ci_level: float = DEFAULT_CI,
) -> dict[int, EstimateResult]:
    """Average best m-term widths for every ``m`` in the query.

    All ``m`` share one sample stream.  The surface measure is estimated by
    self-normalized importance sampling over cone points.
    """
    rows = max(1, BATCH_ELEMENTS // query.n)
    fn = partial(_width_batch, query.measure, query.q, query.m_values)
    acc = accumulate(fn, samples, seed, workers, rows)
    means, errors = acc.estimate()
    return {
        m: EstimateResult.from_moments(means[i], errors[i], samples, acc.mode, ci_level)
        for i, m in enumerate(query.m_values)
    }


def ratio_check_prop10(p, q, n: int, m: int, samples: int, seed: RngState, workers: int = 1) -> tuple[float, float]:
    """Volume/cone width ratio and its z-score against ``n/(n+1)``.

    The cone run uses ``seed``; the volume run uses the next stream id.
    """
    cone = estimate_widths(WidthQuery.build(p, q, n, [m], "cone"), samples, seed, workers)[m]
    vol_seed = RngState(seed.seed, (seed.stream_id + 1) % 2**64)
    vol = estimate_widths(WidthQuery.build(p, q, n, [m], "volume"), samples, vol_seed, workers)[m]
    if cone.mean <= 0 or cone.mean <= 4 * cone.std_error:
        raise DegenerateEstimateError("cone estimate is indistinguishable from zero")
    ratio = vol.mean / cone.mean
    rel = math.hypot(vol.std_error / vol.mean, cone.std_error / cone.mean)
    target = n / (n + 1)
    se = ratio * rel
    if se == 0:
        z = 0.0 if ratio == target else math.copysign(math.inf, ratio - target)
    else:
        z = (ratio - target) / se
    return ratio, z
