"""Closed-form and quadrature values for average widths.

Gamma ratios are evaluated in log space throughout; ``Gamma(201)`` already
overflows a double.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, NumericalError
from .sparse_approx import as_pnorm
from .specfun import EULER_GAMMA, IncGammaProfile, inv_y_to_log_omega, log_gamma

__all__ = [
    "BoundEnvelope",
    "BridgeFactor",
    "EnvelopeKind",
    "bound_envelope",
    "bridge_lemma1",
    "bridge_surface",
    "bridge_tensor",
    "lemma17_sequence",
    "limit_constant_lemma17",
    "log_tensor_moment",
    "theorem17_bounds",
    "theorem17_quadrature",
]


def _finite_p(p):
    p = as_pnorm(p)
    if p == math.inf:
        raise DomainError("p must be finite")
    return p


def _check_n(n, lowest=2):
    if not isinstance(n, (int, np.integer)) or n < lowest:
        raise DomainError(f"n must be an integer >= {lowest}, got {n!r}")


@dataclass(frozen=True)
class BridgeFactor:
    p: float
    n: int
    value: float


def bridge_lemma1(p, n: int) -> BridgeFactor:
    """``Gamma(n/p) / Gamma(n/p + 1/p)``.

    Multiplying the expected ``m``-th largest of ``n`` unnormalized cone
    variates by this factor gives the cone-measure average of ``x_m^*``.
    """
    p = _finite_p(p)
    _check_n(n)
    value = math.exp(log_gamma(n / p) - log_gamma(n / p + 1.0 / p))
    return BridgeFactor(p, int(n), value)


def bridge_tensor(p, beta: float, n: int) -> float:
    """``Gamma(n(beta+1)/p) / Gamma(n(beta+1)/p + 1/p)``, the tensor-measure analogue."""
    p = _finite_p(p)
    _check_n(n)
    if beta <= -1:
        raise DomainError("beta must exceed -1")
    s = n * (beta + 1.0) / p
    return math.exp(log_gamma(s) - log_gamma(s + 1.0 / p))


def bridge_surface(p, n: int) -> float:
    """``Gamma(n/p + 1 - 1/p) / Gamma(n/p + 1)``, the radial factor for the surface measure."""
    p = _finite_p(p)
    _check_n(n)
    return math.exp(log_gamma(n / p + 1.0 - 1.0 / p) - log_gamma(n / p + 1.0))


def log_tensor_moment(p, beta: float, n: int) -> float:
    """``log E prod omega_i^beta`` for i.i.d. ``omega_i`` with density ``c_p exp(-t^p)``.

    Each factor is ``c_p/p * Gamma((beta+1)/p)`` with ``c_p = p / Gamma(1/p)``.
    """
    p = _finite_p(p)
    if beta <= -1:
        raise DomainError("beta must exceed -1")
    log_cp = math.log(p) - log_gamma(1.0 / p)
    return n * (log_cp - math.log(p) + log_gamma((beta + 1.0) / p))


def _check_thm17_args(p, n, m):
    p = _finite_p(p)
    _check_n(n)
    if not isinstance(m, (int, np.integer)) or not 1 <= m <= n:
        raise DomainError(f"m must be an integer in [1, n], got {m!r}")
    return p


def theorem17_quadrature(p, n: int, m: int, rel_tol: float = 1e-10) -> float:
    """Average of ``x_m^*`` (= ``sigma_{m-1}(x)_inf``) under the tensor measure with
    ``beta = p/n - 1``, by one-dimensional quadrature.

    The value is ``Gamma(n+1) / (Gamma(m) Gamma(n-m+1) Gamma(1+1/p))`` times
    ``int_0^1 omega(y)^(1/p) y^(n-m) (1-y)^(m-1) dy`` where ``omega`` inverts
    the regularized incomplete gamma of shape ``1/n``.  The integral is
    taken in ``t = -log(1-y)`` and split at ``1 - y = e^-1 / Gamma(1/n)``.
    """
    p = _check_thm17_args(p, n, m)
    profile = IncGammaProfile(int(n))
    log_pref = log_gamma(n + 1.0) - log_gamma(m) - log_gamma(n - m + 1.0) - log_gamma(1.0 + 1.0 / p)
    inv_p = 1.0 / p

    def integrand(t):
        if t <= 0.0:
            return 0.0
        if t > 700.0:
            return 0.0
        z = math.exp(-t)
        y = -math.expm1(-t)
        u = inv_y_to_log_omega(profile, y, upper_tail=z)
        log_val = log_pref + inv_p * u + (n - m) * math.log(y) - m * t
        return math.exp(log_val) if log_val > -745.0 else 0.0

    split = 1.0 + math.log(profile.gamma_n)
    total = 0.0
    for lo, hi in ((0.0, split), (split, np.inf)):
        val, err, info = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=rel_tol, limit=500, full_output=1)[:3]
        if not math.isfinite(val) or err > max(1e-8 * abs(val), 1e-300):
            raise NumericalError(
                f"quadrature did not converge on [{lo}, {hi}] for p={p}, n={n}, m={m}: "
                f"value={val}, error estimate={err}, evaluations={info.get('neval')}"
            )
        total += val
    return total


def theorem17_bounds(p, n: int, m: int) -> tuple[float, float]:
    """Shape-only lower and upper envelopes (constants set to 1) for the
    tensor-measure average of ``x_m^*`` with ``beta = p/n - 1``."""
    p = _check_thm17_args(p, n, m)
    head = log_gamma(n + 1.0) - log_gamma(n - m + 1.0)
    main = log_gamma(n / p + n - m + 1.0) - log_gamma(n / p + n + 1.0)
    extra = -log_gamma(m + 1.0) + m * (-1.0 - log_gamma(1.0 / n))
    return math.exp(head + main), math.exp(head + np.logaddexp(main, extra))


class EnvelopeKind(str, enum.Enum):
    THM6_UPPER = "thm6-upper"
    THM6_LOWER = "thm6-lower"
    THM9_UPPER = "thm9-upper"
    PROP12 = "prop12"
    EQ1 = "eq1"


@dataclass(frozen=True)
class BoundEnvelope:
    """An asymptotic bound shape scaled by ``constant``."""

    kind: EnvelopeKind
    p: float
    q: float
    constant: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", EnvelopeKind(self.kind))
        object.__setattr__(self, "p", as_pnorm(self.p))
        object.__setattr__(self, "q", as_pnorm(self.q))
        if not self.constant > 0:
            raise DomainError("constant must be positive")
        if self.p > self.q:
            raise DomainError(f"need p <= q, got p={self.p}, q={self.q}")
        if self.kind in (EnvelopeKind.THM6_UPPER, EnvelopeKind.THM6_LOWER, EnvelopeKind.THM9_UPPER):
            if self.q != math.inf:
                raise DomainError(f"{self.kind.value} concerns q = inf")
        if self.kind in (EnvelopeKind.THM9_UPPER, EnvelopeKind.PROP12) and self.p == math.inf:
            raise DomainError(f"{self.kind.value} needs finite p")
        if self.kind is EnvelopeKind.PROP12 and self.q == math.inf:
            raise DomainError("prop12 concerns finite q")

    def __call__(self, n: int, m: int = 0) -> float:
        _check_n(n)
        if not isinstance(m, (int, np.integer)) or not 0 <= m <= n - 1:
            raise DomainError(f"m must be an integer in [0, n-1], got {m!r}")
        inv_p = 1.0 / self.p
        inv_q = 1.0 / self.q
        if self.kind in (EnvelopeKind.THM6_UPPER, EnvelopeKind.THM6_LOWER):
            shape = (math.log(math.e * n / (m + 1)) / n) ** inv_p
        elif self.kind is EnvelopeKind.THM9_UPPER:
            if m != 0:
                raise DomainError("thm9-upper is stated for m = 0")
            shape = (math.log(n + 1.0) / n) ** inv_p
        elif self.kind is EnvelopeKind.PROP12:
            if m != 0:
                raise DomainError("prop12 is stated for m = 0")
            shape = float(n) ** (inv_q - inv_p)
        else:
            shape = (m + 1.0) ** (inv_q - inv_p)
        return self.constant * shape


def bound_envelope(kind, p, q, n: int, m: int = 0) -> float:
    """Evaluate a bound's shape function with unit constant."""
    return BoundEnvelope(kind, p, q)(n, m)


def limit_constant_lemma17() -> float:
    """``exp(-Euler's constant)``, the limit of ``(Gamma(1/n)/n)^n``."""
    return math.exp(-EULER_GAMMA)


def lemma17_sequence(n: int) -> float:
    """``(Gamma(1/n)/n)^n``, computed as ``exp(n log Gamma(1 + 1/n))``."""
    _check_n(n, lowest=1)
    return math.exp(n * log_gamma(1.0 + 1.0 / n))
