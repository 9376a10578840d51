"""Command line entry point: ``lpwidths {estimate,figure1,validate,analytic}``.

Exit status: 0 success, 1 a validation check failed, 2 usage error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys

from . import analytic
from .errors import DomainError, NumericalError
from .estimators import DEFAULT_CI, default_workers
from .harness import ExperimentConfig, cmd_estimate, cmd_figure1, format_number
from .validation import SUITES, run_suite

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def _real_or_inf(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a real number or 'inf', got {text!r}") from None


def _m_range(text: str) -> tuple[int, ...]:
    """``7`` or ``a..b`` (inclusive)."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError
            return tuple(range(lo, hi + 1))
        return (int(text),)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or a range a..b, got {text!r}") from None


def _p_list(text: str) -> tuple[float, ...]:
    return tuple(_real_or_inf(t) for t in text.split(",") if t.strip())


def _u64(text: str) -> int:
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must lie in [0, 2^64), got {v}")
    return v


def _common(sub, samples_default):
    sub.add_argument("--samples", type=int, default=samples_default)
    sub.add_argument("--seed", type=_u64, default=0)
    sub.add_argument("--workers", type=int, default=None, help="default: $LPWIDTHS_WORKERS or 1")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lpwidths", description="Average best m-term widths on the l_p sphere.")
    subs = parser.add_subparsers(dest="command", required=True)

    est = subs.add_parser("estimate", help="Monte Carlo estimate of sigma_m for a range of m")
    est.add_argument("--p", type=_real_or_inf, required=True)
    est.add_argument("--q", type=_real_or_inf, required=True)
    est.add_argument("--n", type=int, required=True)
    est.add_argument("--m", type=_m_range, default=(0,), help="m or a..b, inclusive (default 0)")
    est.add_argument("--measure", default="cone", help="cone|volume|surface|tensor:<beta>|tensor-sparse")
    _common(est, 10**6)
    est.add_argument("--ci", type=float, default=DEFAULT_CI)
    est.add_argument("--format", choices=("csv", "json"), default="csv")
    est.add_argument("--out", default=None, help="output file (default stdout)")
    est.add_argument("--no-timestamp", action="store_true")

    fig = subs.add_parser("figure1", help="both panels of the cone/tensor comparison")
    fig.add_argument("--p", type=_p_list, default=(0.5, 1.0, 2.0), help="comma separated list (default 0.5,1,2)")
    fig.add_argument("--n", type=int, default=100)
    _common(fig, 10**6)
    fig.add_argument("--out", default=".", help="output directory")
    fig.add_argument("--no-timestamp", action="store_true")

    val = subs.add_parser("validate", help="run a named check suite")
    val.add_argument("suite", choices=sorted(SUITES))
    val.add_argument("--samples", type=int, default=None, help="per-check budget (default: suite's own)")
    val.add_argument("--seed", type=_u64, default=0)
    val.add_argument("--workers", type=int, default=None)

    ana = subs.add_parser("analytic", help="closed-form and quadrature values")
    ana.add_argument("what", choices=("thm17", "thm17-bounds", "bridge", "envelope", "lemma17"))
    ana.add_argument("--p", type=_real_or_inf, default=1.0)
    ana.add_argument("--q", type=_real_or_inf, default=math.inf)
    ana.add_argument("--n", type=int, default=100)
    ana.add_argument("--m", type=_m_range, default=(0,), help="width index m (sigma_m = x_{m+1}^*)")
    ana.add_argument("--kind", default="thm6-upper", help="envelope kind")
    return parser


def _workers(args) -> int:
    return args.workers if args.workers is not None else default_workers()


def _run_estimate(args) -> int:
    config = ExperimentConfig(
        p=args.p,
        q=args.q,
        n=args.n,
        m_values=args.m,
        measure=args.measure,
        samples=args.samples,
        seed=args.seed,
        workers=_workers(args),
        ci_level=args.ci,
        output_format=args.format,
        output_path=args.out,
        timestamp=not args.no_timestamp,
    )
    cmd_estimate(config)
    return EXIT_OK


def _run_figure1(args) -> int:
    workers = _workers(args)
    if workers < 1:
        raise DomainError(f"workers: must be a positive integer, got {workers}")
    a, b = cmd_figure1(args.p, args.n, args.samples, args.seed, args.out, workers, not args.no_timestamp)
    print(f"wrote {len(a)} + {len(b)} rows to {args.out}", file=sys.stderr)
    return EXIT_OK


def _run_validate(args) -> int:
    if args.samples is not None and args.samples < 10:
        raise DomainError(f"samples: must be >= 10, got {args.samples}")
    checks = run_suite(args.suite, args.samples, args.seed, _workers(args))
    for c in checks:
        print(c.line())
    failed = sum(not c.passed for c in checks)
    print(f"{args.suite}: {len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_FAILED if failed else EXIT_OK


def _run_analytic(args) -> int:
    n = args.n
    if args.what == "lemma17":
        seq = analytic.lemma17_sequence(n)
        lim = analytic.limit_constant_lemma17()
        print(f"n={n} sequence={format_number(seq)} limit={format_number(lim)} gap={format_number(seq - lim)}")
    elif args.what == "bridge":
        print(f"p={format_number(args.p)} n={n} bridge={format_number(analytic.bridge_lemma1(args.p, n).value)}")
    else:
        for m in args.m:
            head = f"p={format_number(args.p)} n={n} m={m}"
            if args.what == "thm17":
                print(f"{head} value={format_number(analytic.theorem17_quadrature(args.p, n, m + 1))}")
            elif args.what == "thm17-bounds":
                lo, hi = analytic.theorem17_bounds(args.p, n, m + 1)
                print(f"{head} lower_shape={format_number(lo)} upper_shape={format_number(hi)}")
            else:
                try:
                    kind = analytic.EnvelopeKind(args.kind)
                except ValueError:
                    raise DomainError(f"kind: unknown envelope {args.kind!r}") from None
                value = analytic.bound_envelope(kind, args.p, args.q, n, m)
                print(f"{head} q={format_number(args.q)} {kind.value}={format_number(value)}")
    return EXIT_OK


_COMMANDS = {"estimate": _run_estimate, "figure1": _run_figure1, "validate": _run_validate, "analytic": _run_analytic}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except DomainError as exc:
        print(f"lpwidths {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"lpwidths {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericalError as exc:
        print(f"lpwidths {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
