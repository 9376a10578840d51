"""Named suites of identity and bound checks, run by ``lpwidths validate``.

Each suite returns a list of :class:`Check`; statistical checks report a
z-score against a fixed threshold, deterministic ones an absolute error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np
from scipy import integrate

from . import analytic, specfun
from .estimators import WidthQuery, accumulate, estimate_widths, ratio_check_prop10
from .samplers import MeasureKind, MeasureSpec, RngState, sample_gen_gamma

__all__ = ["Check", "SUITES", "run_suite"]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    statistic: float
    threshold: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.detail} (stat={self.statistic:.4g}, limit={self.threshold:.4g})"


def _z(a_mean, a_se, b_mean, b_se):
    se = math.hypot(a_se, b_se)
    diff = a_mean - b_mean
    if se == 0:
        return 0.0 if diff == 0 else math.inf
    return diff / se


def _fmt_p(p):
    return "inf" if p == math.inf else f"{p:g}"


def prop10(samples=10**6, seed=0, workers=1):
    checks = []
    stream = 0
    for p, q, m in ((1.0, math.inf, 0), (2.0, 2.0, 0), (0.5, math.inf, 5)):
        for n in (10, 100):
            ratio, z = ratio_check_prop10(p, q, n, m, samples, RngState(seed, stream), workers)
            stream += 2
            checks.append(
                Check(
                    f"prop10 p={_fmt_p(p)} q={_fmt_p(q)} n={n} m={m}",
                    abs(z) < 4,
                    abs(z),
                    4.0,
                    f"volume/cone={ratio:.6f} vs n/(n+1)={n / (n + 1):.6f}",
                )
            )
    return checks


def _unnormalized_order_batch(p, n, ms, gen, k):
    omega = sample_gen_gamma(p, 0.0, gen, size=(k, n))
    desc = -np.sort(-omega, axis=1)
    return desc[:, np.asarray(ms) - 1], None


def lemma1(samples=10**5, seed=0, workers=1):
    """Cone-measure average of x_m^* against the bridge factor times E omega_m^*."""
    checks = []
    stream = 0
    for p in (0.5, 1.0, 2.0):
        for n in (5, 50):
            ms = (1, 3)
            sphere = estimate_widths(WidthQuery.build(p, math.inf, n, [m - 1 for m in ms], "cone"), samples, RngState(seed, stream), workers)
            acc = accumulate(partial(_unnormalized_order_batch, p, n, ms), samples, RngState(seed, stream + 1), workers)
            stream += 2
            raw_mean, raw_se = acc.estimate()
            bridge = analytic.bridge_lemma1(p, n).value
            for i, m in enumerate(ms):
                s = sphere[m - 1]
                z = _z(s.mean, s.std_error, bridge * raw_mean[i], bridge * raw_se[i])
                checks.append(
                    Check(
                        f"lemma1 p={p:g} n={n} m={m}",
                        abs(z) < 4,
                        abs(z),
                        4.0,
                        f"sphere={s.mean:.6g} bridge*E={bridge * raw_mean[i]:.6g}",
                    )
                )
    return checks


def _tensor_moment_batch(p, beta, n, gen, k):
    omega = sample_gen_gamma(p, 0.0, gen, size=(k, n))
    return np.prod(omega**beta, axis=1)[:, None], None


def _weighted_order_batch(p, beta, n, ms, gen, k):
    # cone variates reweighted by prod omega_i^beta
    omega = sample_gen_gamma(p, 0.0, gen, size=(k, n))
    desc = -np.sort(-omega, axis=1)
    return desc[:, np.asarray(ms) - 1], beta * np.log(omega).sum(axis=1)


def lemma15(samples=10**6, seed=0, workers=1):
    """Product moment formula, and the tensor-measure average as a reweighted cone average."""
    checks = []
    stream = 0
    for p in (0.5, 1.0, 2.0):
        for beta in (0.5, 1.0):
            n = 3
            acc = accumulate(partial(_tensor_moment_batch, p, beta, n), samples, RngState(seed, stream), workers)
            stream += 1
            mean, se = acc.estimate()
            exact = math.exp(analytic.log_tensor_moment(p, beta, n))
            z = (mean[0] - exact) / se[0]
            checks.append(
                Check(f"lemma15(ii) p={p:g} beta={beta:g} n={n}", abs(z) < 4, abs(z), 4.0, f"MC={mean[0]:.6g} exact={exact:.6g}")
            )
        beta, n, ms = 0.5, 5, (1, 3)
        direct = estimate_widths(
            WidthQuery(math.inf, [m - 1 for m in ms], MeasureSpec(MeasureKind.TENSOR, p, n, beta)),
            samples,
            RngState(seed, stream),
            workers,
        )
        acc = accumulate(partial(_weighted_order_batch, p, beta, n, ms), samples, RngState(seed, stream + 1), workers)
        stream += 2
        w_mean, w_se = acc.estimate()
        bridge = analytic.bridge_tensor(p, beta, n)
        for i, m in enumerate(ms):
            d = direct[m - 1]
            z = _z(d.mean, d.std_error, bridge * w_mean[i], bridge * w_se[i])
            checks.append(
                Check(
                    f"lemma15(i) p={p:g} beta={beta:g} n={n} m={m}",
                    abs(z) < 4,
                    abs(z),
                    4.0,
                    f"tensor={d.mean:.6g} reweighted cone={bridge * w_mean[i]:.6g}",
                )
            )
    return checks


def surface_coincide(samples=10**5, seed=0, workers=1):
    checks = []
    for p in (1.0, 2.0):
        for n in (5, 50):
            for q in (p, math.inf):
                ms = [0, 1, n - 1]
                cone = estimate_widths(WidthQuery.build(p, q, n, ms, "cone"), samples, RngState(seed), workers)
                surf = estimate_widths(WidthQuery.build(p, q, n, ms, "surface"), samples, RngState(seed), workers)
                worst = max(abs(cone[m].mean - surf[m].mean) for m in ms)
                checks.append(
                    Check(f"surface=cone p={p:g} q={_fmt_p(q)} n={n}", worst <= 1e-12, worst, 1e-12, "max |difference| over m")
                )
    return checks


def thm17(samples=10**6, seed=0, workers=1):
    checks = []
    stream = 0
    for p in (0.5, 1.0, 2.0):
        for n in (10, 100):
            ms = (1, 2, 3)
            mc = estimate_widths(WidthQuery.build(p, math.inf, n, [m - 1 for m in ms], "tensor-sparse"), samples, RngState(seed, stream), workers)
            stream += 1
            for m in ms:
                quad = analytic.theorem17_quadrature(p, n, m)
                r = mc[m - 1]
                z = (r.mean - quad) / r.std_error
                checks.append(
                    Check(f"thm17 p={p:g} n={n} m={m}", abs(z) < 3, abs(z), 3.0, f"quadrature={quad:.8g} MC={r.mean:.8g}")
                )
    return checks


def _surface_weighted_max_batch(p, n, gen, k):
    # unnormalized cone variates weighted by (sum omega_i^(2p-2))^(1/2)
    omega = sample_gen_gamma(p, 0.0, gen, size=(k, n))
    t = (2.0 * p - 2.0) * np.log(omega)
    top = t.max(axis=1)
    log_w = 0.5 * (top + np.log(np.exp(t - top[:, None]).sum(axis=1)))
    return omega.max(axis=1)[:, None], log_w


def _thm6_ratios(p, samples, seed, workers):
    ratios = []
    for j, n in enumerate((10, 100, 1000)):
        r = estimate_widths(WidthQuery.build(p, math.inf, n, [0], "cone"), samples, RngState(seed, j), workers)[0]
        ratios.append(r.mean / analytic.bound_envelope("thm6-upper", p, math.inf, n, 0))
    return ratios


def bounds(samples=10**5, seed=0, workers=1):
    checks = []
    for p in (0.5, 1.0, 2.0):
        ratios = _thm6_ratios(p, samples, seed, workers)
        spread = max(ratios) / min(ratios)
        checks.append(
            Check(f"thm6 shape p={p:g} m=0", spread < 2, spread, 2.0, "max/min of mean/[log(en)/n]^(1/p) over n=10,100,1000")
        )
    for p in (0.5, 1.0, 2.0):
        for q in (p, 2.0 * p, math.inf):
            n = 20
            res = estimate_widths(WidthQuery.build(p, q, n, range(n), "cone"), samples, RngState(seed, 7), workers)
            worst = max(res[m].mean - 4 * res[m].std_error - analytic.bound_envelope("eq1", p, q, n, m) for m in res)
            checks.append(
                Check(f"eq1 containment p={p:g} q={_fmt_p(q)} n={n}", worst <= 0, worst, 0.0, "max(mean - 4 se - upper bound)")
            )
    for p in (0.5, 1.0, 2.0):
        shape_ratios, band = [], []
        for j, n in enumerate((10, 100, 1000)):
            r = estimate_widths(WidthQuery.build(p, math.inf, n, [0], "surface"), samples, RngState(seed, 20 + j), workers)[0]
            shape_ratios.append(r.mean / analytic.bound_envelope("thm9-upper", p, math.inf, n, 0))
            acc = accumulate(partial(_surface_weighted_max_batch, p, n), samples, RngState(seed, 40 + j), workers)
            raw_mean, raw_se = acc.estimate()
            band.append(r.mean / (raw_mean[0] * n ** (-1.0 / p)))
            bridge = analytic.bridge_surface(p, n)
            z = _z(r.mean, r.std_error, bridge * raw_mean[0], bridge * raw_se[0])
            checks.append(
                Check(
                    f"lemma8 identity p={p:g} n={n}",
                    abs(z) < 4,
                    abs(z),
                    4.0,
                    f"surface={r.mean:.6g} bridge*ratio={bridge * raw_mean[0]:.6g}",
                )
            )
        spread = max(band) / min(band)
        checks.append(
            Check(f"lemma8 band p={p:g}", spread < 2, spread, 2.0, "max/min of surface/(weighted ratio * n^(-1/p)) over n=10,100,1000")
        )
        # upper bound only: the ratio may fall with n but must not grow
        growth = max(shape_ratios) / shape_ratios[0]
        checks.append(
            Check(f"thm9 upper shape p={p:g} m=0", growth < 2, growth, 2.0, "max over n of mean/[log(n+1)/n]^(1/p), relative to n=10")
        )
    for p in (0.5, 1.0, 2.0):
        lows, ups = [], []
        for n in (10, 100, 1000, 10000):
            lo, hi = analytic.theorem17_bounds(p, n, 2)
            v = analytic.theorem17_quadrature(p, n, 2)
            lows.append(v / lo)
            ups.append(v / hi)
        spread = max(max(lows) / min(lows), max(ups) / min(ups))
        checks.append(Check(f"thm17 envelope stability p={p:g} m=2", spread < 2, spread, 2.0, "quadrature/envelope over n=10..10^4"))
    return checks


def specfun_suite(samples=None, seed=0, workers=1):
    checks = []
    worst = 0.0
    for n in (1, 2, 5, 10, 100, 1000):
        prof = specfun.IncGammaProfile(n)
        for y in np.linspace(0.0, 1.0 - 1e-6, 101):
            u = specfun.inv_y_to_log_omega(prof, float(y))
            worst = max(worst, abs(specfun.reg_lower_inc_gamma_at_log(1.0 / n, u) - y))
    checks.append(Check("omega round trip", worst <= 1e-10, worst, 1e-10, "max |y(omega(y)) - y|"))
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for _ in range(200):
        alpha = rng.uniform(-3.0, 3.0)
        delta = max(1.0, 2 * abs(alpha)) + rng.exponential(2.0) + 1e-3
        truth = integrate.quad(lambda u: u**alpha * math.exp(-u), delta, np.inf, epsabs=0, epsrel=1e-13)[0]
        worst = max(worst, truth - specfun.tail_bound(specfun.TailBoundCase(alpha, delta)))
    checks.append(Check("tail bound soundness", worst <= 1e-12, worst, 1e-12, "max(integral - bound) over 200 cases"))
    gap = abs(analytic.lemma17_sequence(10**4) - analytic.limit_constant_lemma17())
    checks.append(Check("lemma17 limit", gap < 1e-3, gap, 1e-3, "|(Gamma(1/n)/n)^n - e^-C| at n=10^4"))
    return checks


SUITES = {
    "prop10": prop10,
    "lemma1": lemma1,
    "lemma15": lemma15,
    "surface_coincide": surface_coincide,
    "thm17": thm17,
    "bounds": bounds,
    "specfun": specfun_suite,
}


def run_suite(name: str, samples=None, seed=0, workers=1) -> list[Check]:
    fn = SUITES[name]
    if samples is None:
        return fn(seed=seed, workers=workers)
    return fn(samples=samples, seed=seed, workers=workers)
