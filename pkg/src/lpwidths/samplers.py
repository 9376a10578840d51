"""Random points on the positive part of the l_p unit sphere.

Every measure is realized through normalized i.i.d. variates: draw
``G_j ~ Gamma((beta+1)/p)`` and set ``x_j = (G_j / sum G)^(1/p)``, which is the
l_p normalization of ``omega_j = G_j^(1/p)`` (density proportional to
``t^beta exp(-t^p)``).  Work is done on log-variates so that shapes as small
as ``1/n`` do not underflow.

Randomness comes from :class:`RngState` (numpy ``PCG64`` seeded through
``SeedSequence(seed, spawn_key=(stream_id, ...))``).  Streams are
reproducible bit-for-bit for a fixed numpy release.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .sparse_approx import as_pnorm

__all__ = [
    "MeasureKind",
    "MeasureSpec",
    "RngState",
    "WeightedBatch",
    "WeightedSample",
    "sample",
    "sample_cone",
    "sample_gamma",
    "sample_gen_gamma",
    "sample_surface",
    "sample_tensor",
    "sample_volume",
]

_U64 = 2**64
LOG_SPACE_SHAPE = 0.1


@dataclass(frozen=True)
class RngState:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= v < _U64:
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def generator(self, *subkeys: int) -> np.random.Generator:
        """A fresh generator for this stream; ``subkeys`` select sub-streams (e.g. workers)."""
        ss = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id), *map(int, subkeys)))
        return np.random.Generator(np.random.PCG64(ss))


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngState):
        return rng.generator()
    raise TypeError(f"expected RngState or numpy Generator, got {type(rng).__name__}")


class MeasureKind(str, enum.Enum):
    CONE = "cone"
    VOLUME = "volume"
    SURFACE = "surface"
    TENSOR = "tensor"
    TENSOR_SPARSE = "tensor-sparse"


@dataclass(frozen=True)
class MeasureSpec:
    """Which probability law to sample, for exponent ``p`` in dimension ``n``.

    ``beta`` is required for ``TENSOR`` only; ``TENSOR_SPARSE`` always uses
    ``beta = p/n - 1``.
    """

    kind: MeasureKind
    p: float
    n: int
    beta: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", MeasureKind(self.kind))
        p = as_pnorm(self.p)
        if p == math.inf:
            raise DomainError("sampling requires finite p")
        object.__setattr__(self, "p", p)
        if not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise DomainError(f"n must be an integer >= 2, got {self.n!r}")
        if self.kind is MeasureKind.TENSOR:
            if self.beta is None or not math.isfinite(self.beta) or self.beta <= -1:
                raise DomainError(f"tensor measure needs beta > -1, got {self.beta!r}")
        elif self.beta is not None:
            raise DomainError(f"beta is only meaningful for the tensor measure ({self.kind.value})")

    @property
    def exponent_beta(self) -> float:
        if self.kind is MeasureKind.TENSOR:
            return float(self.beta)
        if self.kind is MeasureKind.TENSOR_SPARSE:
            return self.p / self.n - 1.0
        return 0.0

    @property
    def on_sphere(self) -> bool:
        return self.kind is not MeasureKind.VOLUME

    @property
    def tag(self) -> str:
        if self.kind is MeasureKind.TENSOR:
            return f"tensor:{self.beta!r}"
        return self.kind.value

    @classmethod
    def parse(cls, tag: str, p, n: int) -> "MeasureSpec":
        """Build from a tag such as ``cone``, ``tensor:0.5`` or ``tensor-sparse``."""
        text = tag.strip().lower()
        if text.startswith("tensor:"):
            try:
                beta = float(text.split(":", 1)[1])
            except ValueError:
                raise DomainError(f"bad tensor exponent in {tag!r}") from None
            return cls(MeasureKind.TENSOR, p, n, beta)
        try:
            kind = MeasureKind(text)
        except ValueError:
            raise DomainError(f"unknown measure {tag!r}") from None
        if kind is MeasureKind.TENSOR:
            raise DomainError("use tensor:<beta> to give the exponent")
        return cls(kind, p, n)


@dataclass(frozen=True)
class WeightedSample:
    point: np.ndarray
    weight: float


@dataclass(frozen=True)
class WeightedBatch:
    """``points`` has shape ``(size, n)``; weights are unnormalized densities.

    ``log_points`` holds ``log(points)`` computed before exponentiation, so it
    stays finite where ``points`` underflowed to zero.
    """

    points: np.ndarray
    log_points: np.ndarray
    log_weights: np.ndarray
    redraws: int = 0

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.log_weights)

    def __len__(self):
        return self.points.shape[0]

    def __getitem__(self, i) -> WeightedSample:
        return WeightedSample(self.points[i], float(np.exp(self.log_weights[i])))


def _log_gamma_variates(gen, shape, size):
    """Logarithms of standard gamma variates with the given shape."""
    if shape < LOG_SPACE_SHAPE:
        # G(a) = G(a+1) * U^(1/a); U taken from (0, 1]
        g = gen.standard_gamma(shape + 1.0, size=size)
        u = 1.0 - gen.random(size=size)
        return np.log(g) + np.log(u) / shape
    return np.log(gen.standard_gamma(shape, size=size))


def _check_shape(shape):
    if not (isinstance(shape, (int, float, np.floating)) and math.isfinite(shape) and shape > 0):
        raise DomainError(f"gamma shape must be positive, got {shape!r}")


def sample_gamma(shape: float, rng, size=None):
    """Standard gamma variates of the given shape.

    Shapes below 0.1 are drawn as ``G(shape+1) * U^(1/shape)`` in log space;
    the exponentiated result can still round to zero for very small shapes.
    """
    _check_shape(shape)
    gen = _as_generator(rng)
    out = np.exp(_log_gamma_variates(gen, float(shape), 1 if size is None else size))
    return float(out[0]) if size is None else out


def sample_gen_gamma(p, beta: float, rng, size=None):
    """Variates with density proportional to ``t^beta exp(-t^p)`` on ``(0, inf)``."""
    p = as_pnorm(p)
    if p == math.inf:
        raise DomainError("p must be finite")
    if not math.isfinite(beta) or beta <= -1:
        raise DomainError(f"beta must exceed -1, got {beta!r}")
    gen = _as_generator(rng)
    log_g = _log_gamma_variates(gen, (beta + 1.0) / p, 1 if size is None else size)
    out = np.exp(log_g / p)
    return float(out[0]) if size is None else out


def _log_normalized(gen, spec, size):
    shape = (spec.exponent_beta + 1.0) / spec.p
    log_g = _log_gamma_variates(gen, shape, (size, spec.n))
    top = log_g.max(axis=1, keepdims=True)
    log_total = top + np.log(np.exp(log_g - top).sum(axis=1, keepdims=True))
    return (log_g - log_total) / spec.p


def _sphere_batch(gen, spec, size):
    log_x = _log_normalized(gen, spec, size)
    return WeightedBatch(np.exp(log_x), log_x, np.zeros(size))


def _finish(batch, size):
    return batch[0] if size is None else batch


def _require(spec, *kinds):
    if spec.kind not in kinds:
        raise DomainError(f"{spec.kind.value} spec passed to a {'/'.join(k.value for k in kinds)} sampler")


def sample_cone(spec: MeasureSpec, rng, size=None):
    """Cone measure: normalized i.i.d. variates with density ``c_p exp(-t^p)``."""
    _require(spec, MeasureKind.CONE)
    return _finish(_sphere_batch(_as_generator(rng), spec, 1 if size is None else size), size)


def sample_tensor(spec: MeasureSpec, rng, size=None):
    """Tensor-product measure with density ``prod x_i^beta`` against the cone measure."""
    _require(spec, MeasureKind.TENSOR, MeasureKind.TENSOR_SPARSE)
    return _finish(_sphere_batch(_as_generator(rng), spec, 1 if size is None else size), size)


def sample_volume(spec: MeasureSpec, rng, size=None):
    """Uniform law on ``[0,1] * sphere``: a cone point scaled by ``U^(1/n)``."""
    _require(spec, MeasureKind.VOLUME)
    gen = _as_generator(rng)
    k = 1 if size is None else size
    log_x = _log_normalized(gen, spec, k)
    log_r = np.log(1.0 - gen.random(size=(k, 1))) / spec.n
    log_x = log_x + log_r
    return _finish(WeightedBatch(np.exp(log_x), log_x, np.zeros(k)), size)


def _surface_log_weights(log_x, p):
    # 0.5 * log(sum x_i^(2p-2)), evaluated as a log-sum-exp
    t = (2.0 * p - 2.0) * log_x
    top = t.max(axis=1)
    return 0.5 * (top + np.log(np.exp(t - top[:, None]).sum(axis=1)))


def sample_surface(spec: MeasureSpec, rng, size=None):
    """Cone points carrying importance weights ``(sum x_i^(2p-2))^(1/2)``.

    The weights are the surface measure's density against the cone measure
    up to a constant, so estimators must self-normalize.  Rows whose weight
    is not finite are redrawn; the count is reported in ``redraws``.
    """
    _require(spec, MeasureKind.SURFACE)
    gen = _as_generator(rng)
    k = 1 if size is None else size
    log_x = _log_normalized(gen, spec, k)
    log_w = _surface_log_weights(log_x, spec.p)
    redraws = 0
    bad = ~np.isfinite(log_w)
    while bad.any():
        idx = np.flatnonzero(bad)
        redraws += idx.size
        log_x[idx] = _log_normalized(gen, spec, idx.size)
        log_w[idx] = _surface_log_weights(log_x[idx], spec.p)
        bad = ~np.isfinite(log_w)
    return _finish(WeightedBatch(np.exp(log_x), log_x, log_w, redraws), size)


_DISPATCH = {
    MeasureKind.CONE: sample_cone,
    MeasureKind.VOLUME: sample_volume,
    MeasureKind.SURFACE: sample_surface,
    MeasureKind.TENSOR: sample_tensor,
    MeasureKind.TENSOR_SPARSE: sample_tensor,
}


def sample(spec: MeasureSpec, rng, size=None):
    return _DISPATCH[spec.kind](spec, rng, size)
