"""Special functions: log-gamma, digamma, regularized incomplete gamma and
the inverse map y -> omega used by the tensor-measure quadrature.

Everything here is scalar and pure.  Inputs are validated and violations
raise :class:`~lpwidths.errors.DomainError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError, NumericalError, RangeError, UnsupportedBoundaryError

__all__ = [
    "EULER_GAMMA",
    "IncGammaProfile",
    "TailBoundCase",
    "digamma",
    "inv_y_to_log_omega",
    "inv_y_to_omega",
    "log_gamma",
    "reg_lower_inc_gamma",
    "reg_lower_inc_gamma_at_log",
    "reg_upper_inc_gamma",
    "tail_bound",
]

EULER_GAMMA = 0.57721566490153286061
_HALF_LOG_2PI = 0.91893853320467274178

# B_2k / (2k (2k-1)) for the Stirling series of ln Gamma
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
)
# B_2k / (2k) for the asymptotic series of digamma
_DIGAMMA = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
)
_SHIFT = 10.0

_EPS = 1e-16
_MAX_ITER = 100_000
_TINY = 1e-300


def _check_positive(name, s):
    if not (isinstance(s, (int, float)) and math.isfinite(s) and s > 0):
        raise DomainError(f"{name} must be a positive finite real, got {s!r}")


def log_gamma(s: float) -> float:
    """Natural logarithm of the Gamma function for ``s > 0``.

    Arguments below 10 are shifted upward with the recurrence
    ``Gamma(s+1) = s Gamma(s)``; the Stirling series with eight Bernoulli
    terms is used from there on.
    """
    _check_positive("s", s)
    s = float(s)
    shift_logs = []
    while s < _SHIFT:
        shift_logs.append(math.log(s))
        s += 1.0
    inv = 1.0 / s
    inv2 = inv * inv
    series = 0.0
    for c in reversed(_STIRLING):
        series = series * inv2 + c
    series *= inv
    value = (s - 0.5) * math.log(s) - s + _HALF_LOG_2PI + series
    if shift_logs:
        value -= math.fsum(shift_logs)
    return value


def digamma(s: float) -> float:
    """Logarithmic derivative of Gamma, ``Psi(s) = Gamma'(s)/Gamma(s)``."""
    _check_positive("s", s)
    s = float(s)
    shift = []
    while s < _SHIFT:
        shift.append(1.0 / s)
        s += 1.0
    inv2 = 1.0 / (s * s)
    series = 0.0
    for c in reversed(_DIGAMMA):
        series = series * inv2 + c
    series *= inv2
    value = math.log(s) - 0.5 / s - series
    if shift:
        value -= math.fsum(shift)
    return value


def _series_p(a, x, log_x, lga):
    # P(a, x) = x^a e^-x / Gamma(a) * sum_k x^k / (a (a+1) ... (a+k))
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    else:
        raise NumericalError(f"incomplete gamma series did not converge (a={a}, x={x})")
    return total * math.exp(a * log_x - x - lga)


def _contfrac_q(a, x, log_x, lga):
    # modified Lentz evaluation of the continued fraction for Q(a, x)
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    else:
        raise NumericalError(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")
    return h * math.exp(a * log_x - x - lga)


def _gamma_pq(a, x, log_x):
    """Return ``(P, Q)``; one side is computed directly, the other by complement."""
    if x == 0.0 and log_x == -math.inf:
        return 0.0, 1.0
    lga = log_gamma(a)
    if x < a + 1.0:
        p = min(_series_p(a, x, log_x, lga), 1.0)
        return p, 1.0 - p
    q = min(_contfrac_q(a, x, log_x, lga), 1.0)
    return 1.0 - q, q


def _check_inc_args(a, x):
    _check_positive("a", a)
    if not (isinstance(x, (int, float)) and x >= 0 and not math.isnan(x)):
        raise DomainError(f"x must be a nonnegative real, got {x!r}")


def reg_lower_inc_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma ``P(a, x)``."""
    _check_inc_args(a, x)
    if math.isinf(x):
        return 1.0
    if x == 0:
        return 0.0
    return _gamma_pq(float(a), float(x), math.log(x))[0]


def reg_upper_inc_gamma(a: float, x: float) -> float:
    """Regularized upper incomplete gamma ``Q(a, x) = 1 - P(a, x)``, accurate when small."""
    _check_inc_args(a, x)
    if math.isinf(x):
        return 0.0
    if x == 0:
        return 1.0
    return _gamma_pq(float(a), float(x), math.log(x))[1]


def reg_lower_inc_gamma_at_log(a: float, log_x: float) -> float:
    """``P(a, exp(log_x))`` without forming ``exp(log_x)`` in the prefactor.

    For small shapes the relevant ``x`` can lie far below the smallest
    double (``P(1e-3, 1e-400)`` is about 0.4).
    """
    _check_positive("a", a)
    if math.isnan(log_x):
        raise DomainError("log_x is NaN")
    if log_x == -math.inf:
        return 0.0
    if log_x == math.inf:
        return 1.0
    return _gamma_pq(float(a), math.exp(log_x), float(log_x))[0]


@dataclass(frozen=True)
class IncGammaProfile:
    """Shape ``1/n`` incomplete gamma with its total mass ``Gamma(1/n)``."""

    n: int
    gamma_n: float = field(init=False)

    def __post_init__(self):
        if not isinstance(self.n, int) or isinstance(self.n, bool) or self.n < 1:
            raise DomainError(f"n must be an integer >= 1, got {self.n!r}")
        object.__setattr__(self, "gamma_n", math.exp(log_gamma(1.0 / self.n)))

    @property
    def shape(self) -> float:
        return 1.0 / self.n


def _solve_log_omega(a, y, z):
    """Find u = ln(omega) with P(a, e^u) = y, given also z = 1 - y.

    Newton on the log residual ``ln P - ln y`` (``y <= 1/2``) or
    ``ln z - ln Q`` (otherwise), safeguarded by bisection.  Both residuals
    are increasing in u and nearly linear, and each keeps full relative
    accuracy in its own tail.
    """
    lga = log_gamma(a)
    use_lower = y <= 0.5
    target = math.log(y) if use_lower else math.log(z)

    def residual(u):
        p, q = _gamma_pq(a, math.exp(u), u)
        side = p if use_lower else q
        if side <= 0.0:
            return (-math.inf if use_lower else math.inf), -math.inf
        log_side = math.log(side)
        return (log_side - target if use_lower else target - log_side), log_side

    # P(a, w) <= w^a / Gamma(a+1), so this is a lower bracket
    lo = (math.log(y) + log_gamma(a + 1.0)) / a
    r_lo, _ = residual(lo)
    if r_lo >= 0:
        return lo
    hi = max(lo + 1.0, 0.0)
    while residual(hi)[0] < 0:
        hi = hi + max(1.0, abs(hi))
        if hi > 800.0:
            raise NumericalError(f"could not bracket omega for y={y}")

    u = lo
    for _ in range(200):
        r, log_side = residual(u)
        if r == 0.0:
            return u
        if r < 0:
            lo = u
        else:
            hi = u
        cand = math.nan
        if math.isfinite(r):
            slope = math.exp(a * u - math.exp(u) - lga - log_side)
            if slope > 0:
                cand = u - r / slope
        if not (lo < cand < hi):
            cand = 0.5 * (lo + hi)
        if abs(r) <= 1e-15 or abs(cand - u) <= 1e-15 * max(1.0, abs(u)):
            return cand
        u = cand
    raise NumericalError(f"omega inversion did not converge for y={y}")


def _check_y(y):
    if not (isinstance(y, (int, float)) and 0.0 <= y <= 1.0):
        raise DomainError(f"y must lie in [0, 1), got {y!r}")
    if y == 1.0:
        raise RangeError("omega(1) is infinite")


def inv_y_to_log_omega(profile: IncGammaProfile, y: float, upper_tail: float | None = None) -> float:
    """Logarithm of ``omega(y)``, the inverse of ``y(omega) = P(1/n, omega)``.

    ``upper_tail`` may carry ``1 - y`` computed without cancellation; it is
    then used for the root search whenever ``y > 1/2``, so ``y`` itself may
    have rounded to 1.
    """
    if upper_tail is not None:
        if not (isinstance(y, (int, float)) and 0.0 <= y <= 1.0):
            raise DomainError(f"y must lie in [0, 1), got {y!r}")
        if upper_tail == 0.0:
            raise RangeError("omega(1) is infinite")
        if not (0.0 < upper_tail <= 1.0):
            raise DomainError(f"upper_tail must lie in (0, 1], got {upper_tail!r}")
        z = float(upper_tail)
    else:
        _check_y(y)
        z = 1.0 - y
    if y == 0.0:
        return -math.inf
    return _solve_log_omega(profile.shape, float(y), z)


def inv_y_to_omega(profile: IncGammaProfile, y: float) -> float:
    """``omega(y)`` with ``P(1/n, omega(y)) = y``; ``omega(0) = 0``.

    For large ``n`` and moderate ``y`` the root underflows double range
    (``omega(0.1)`` is about ``1e-1000`` when ``n = 1000``); use
    :func:`inv_y_to_log_omega` there.
    """
    return math.exp(inv_y_to_log_omega(profile, y))


@dataclass(frozen=True)
class TailBoundCase:
    alpha: float
    delta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.delta)):
            raise DomainError("alpha and delta must be finite")
        if self.delta <= 0:
            raise DomainError(f"delta must be positive, got {self.delta}")


def tail_bound(case: TailBoundCase) -> float:
    """Upper bound for ``int_delta^inf u^alpha e^-u du``.

    ``delta^alpha e^-delta`` times 1 (alpha <= 0), ``1/(1 - alpha/delta)``
    (0 < alpha < delta) or ``(alpha/delta)^alpha (alpha/delta)/(1 - delta/alpha)``
    (alpha > delta).
    """
    a, d = case.alpha, case.delta
    base = math.exp(a * math.log(d) - d)
    if a <= 0:
        return base
    r = a / d
    if r < 1:
        return base / (1.0 - r)
    if r > 1:
        return base * r**a * r / (1.0 - 1.0 / r)
    raise UnsupportedBoundaryError("alpha == delta is not covered by the tail bound")
