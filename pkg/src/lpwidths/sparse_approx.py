"""Quasi-norms, rearrangements and best m-term approximation errors on R^n_+.

Vectors are 1-D numpy arrays of nonnegative finite entries.  Exponents are
floats in ``(0, inf]``; ``math.inf`` (or the string ``"inf"``) stands for the
maximum norm.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

__all__ = [
    "SIMPLEX_TOL",
    "as_pnorm",
    "as_positive_vector",
    "best_m_term_error",
    "check_simplex_point",
    "extremal_witness",
    "quasi_norm",
    "rearrange",
    "width_bounds",
]

SIMPLEX_TOL = 1e-9


def as_pnorm(value) -> float:
    """Validate an exponent; accepts numbers and the strings ``"inf"``/``"infinity"``."""
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinity", "+inf"):
            return math.inf
        try:
            value = float(text)
        except ValueError:
            raise DomainError(f"not an exponent: {value!r}") from None
    try:
        p = float(value)
    except (TypeError, ValueError):
        raise DomainError(f"not an exponent: {value!r}") from None
    if math.isnan(p) or p <= 0:
        raise DomainError(f"exponent must lie in (0, inf], got {value!r}")
    return p


def as_positive_vector(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("expected a non-empty 1-D vector")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError("vector entries must be finite and nonnegative")
    return arr


def _norm_sorted_desc(xs, q):
    # xs sorted non-increasingly; sum the q-th powers largest first
    if q == math.inf:
        return float(xs[0]) if xs.size else 0.0
    if xs.size == 0 or xs[0] == 0:
        return 0.0
    # scale by the largest entry so q-th powers stay in range
    top = float(xs[0])
    total = math.fsum((xs / top) ** q)
    return top * total ** (1.0 / q)


def quasi_norm(x, q) -> float:
    """``(sum x_j^q)^(1/q)``, or ``max x_j`` for ``q = inf``."""
    q = as_pnorm(q)
    xs = rearrange(x)
    return _norm_sorted_desc(xs, q)


def rearrange(x) -> np.ndarray:
    """Non-increasing rearrangement; stable, so ties keep their input order."""
    arr = as_positive_vector(x)
    order = np.argsort(-arr, kind="stable")
    return arr[order]


def best_m_term_error(x, m: int, q) -> float:
    """Error of the best approximation of ``x`` by vectors with at most ``m`` nonzeros,
    measured in the ``q`` quasi-norm.  Equals the norm of the rearranged tail."""
    q = as_pnorm(q)
    xs = rearrange(x)
    if not isinstance(m, (int, np.integer)) or m < 0 or m > xs.size:
        raise DomainError(f"m must be an integer in [0, {xs.size}], got {m!r}")
    if m == xs.size:
        return 0.0
    return _norm_sorted_desc(xs[m:], q)


def width_bounds(p, q, m: int) -> tuple[float, float]:
    """Two-sided bounds on the worst-case best m-term width of ``l_p -> l_q``."""
    p, q = as_pnorm(p), as_pnorm(q)
    if p > q:
        raise DomainError(f"need p <= q, got p={p}, q={q}")
    if m < 0:
        raise DomainError("m must be nonnegative")
    expo = 1.0 / q - 1.0 / p
    upper = (m + 1.0) ** expo
    return 2.0 ** (-1.0 / p) * upper, upper


def extremal_witness(p, m: int, n: int) -> np.ndarray:
    """The flat vector ``(m+1)^(-1/p) (e_1 + ... + e_{m+1})`` of length ``n``."""
    p = as_pnorm(p)
    if p == math.inf:
        raise DomainError("witness requires finite p")
    if m < 0 or m + 1 > n:
        raise DomainError(f"need 0 <= m and m+1 <= n, got m={m}, n={n}")
    x = np.zeros(n)
    x[: m + 1] = (m + 1.0) ** (-1.0 / p)
    return x


def check_simplex_point(x, p, tol: float = SIMPLEX_TOL) -> bool:
    """True if ``x`` is nonnegative with unit ``p`` quasi-norm within ``tol``."""
    try:
        arr = as_positive_vector(x)
    except DomainError:
        return False
    return abs(quasi_norm(arr, p) - 1.0) <= tol
