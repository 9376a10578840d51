"""Experiment orchestration: parameter sweeps, result rows and file output."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, fields
from datetime import datetime, timezone
from pathlib import Path

from . import analytic
from .errors import DomainError
from .estimators import DEFAULT_CI, EstimateResult, WidthQuery, estimate_widths
from .samplers import MeasureKind, RngState
from .sparse_approx import as_pnorm

__all__ = [
    "CSV_FIELDS",
    "ExperimentConfig",
    "ResultRow",
    "cmd_estimate",
    "cmd_figure1",
    "format_number",
    "render_rows",
    "write_rows",
]

MIN_SAMPLES = 10


def format_number(x) -> str:
    """17 significant digits; infinities as ``inf``/``-inf``; ``None`` as empty."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return f"{x:.17g}"


def _json_number(x):
    if x is None or isinstance(x, (int, str)):
        return x
    x = float(x)
    if not math.isfinite(x):
        return format_number(x)
    return float(f"{x:.17g}")


@dataclass(frozen=True)
class ResultRow:
    p: float
    q: float
    n: int
    m: int
    measure: str
    estimator_mode: str
    samples: int
    mean: float
    std_error: float
    ci_low: float
    ci_high: float
    seed: int
    analytic_value: float | None = None
    envelope_value: float | None = None


CSV_FIELDS = tuple(f.name for f in fields(ResultRow))


@dataclass(frozen=True)
class ExperimentConfig:
    p: float
    q: float
    n: int
    m_values: tuple[int, ...]
    measure: str = "cone"
    samples: int = 10**6
    seed: int = 0
    workers: int = 1
    ci_level: float = DEFAULT_CI
    output_format: str = "csv"
    output_path: str | None = None
    timestamp: bool = True

    def __post_init__(self):
        if not isinstance(self.samples, int) or self.samples < MIN_SAMPLES:
            raise DomainError(f"samples: must be an integer >= {MIN_SAMPLES}, got {self.samples!r}")
        if not 0 < self.ci_level < 1:
            raise DomainError(f"ci: must lie in (0, 1), got {self.ci_level!r}")
        if self.output_format not in ("csv", "json"):
            raise DomainError(f"format: must be csv or json, got {self.output_format!r}")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise DomainError(f"workers: must be a positive integer, got {self.workers!r}")
        # raises with a message naming the offending field
        self.query()
        RngState(self.seed)

    def query(self) -> WidthQuery:
        try:
            return WidthQuery.build(self.p, self.q, self.n, self.m_values, self.measure)
        except DomainError as exc:
            raise DomainError(f"query: {exc}") from None


def _analytic_value(query: WidthQuery, m: int):
    kind = query.measure.kind
    if query.p == query.q and m == 0:
        return query.n / (query.n + 1.0) if kind is MeasureKind.VOLUME else 1.0
    if kind is MeasureKind.TENSOR_SPARSE and query.q == math.inf:
        return analytic.theorem17_quadrature(query.p, query.n, m + 1)
    return None


def _envelope_value(query: WidthQuery, m: int):
    kind = query.measure.kind
    E = analytic.EnvelopeKind
    if kind in (MeasureKind.CONE, MeasureKind.VOLUME):
        if query.q == math.inf:
            return analytic.bound_envelope(E.THM6_UPPER, query.p, query.q, query.n, m)
        if m == 0:
            return analytic.bound_envelope(E.PROP12, query.p, query.q, query.n, 0)
    if kind is MeasureKind.SURFACE and query.q == math.inf and m == 0:
        return analytic.bound_envelope(E.THM9_UPPER, query.p, query.q, query.n, 0)
    return analytic.bound_envelope(E.EQ1, query.p, query.q, query.n, m)


def _rows(query: WidthQuery, results: dict[int, EstimateResult], seed: int) -> list[ResultRow]:
    return [
        ResultRow(
            p=query.p,
            q=query.q,
            n=query.n,
            m=m,
            measure=query.measure.tag,
            estimator_mode=r.mode,
            samples=r.samples,
            mean=r.mean,
            std_error=r.std_error,
            ci_low=r.ci_low,
            ci_high=r.ci_high,
            seed=seed,
            analytic_value=_analytic_value(query, m),
            envelope_value=_envelope_value(query, m),
        )
        for m, r in results.items()
    ]


def render_rows(rows, fmt: str = "csv", timestamp: bool = True, extra: dict | None = None) -> str:
    """Serialize rows; ``extra`` maps additional column names to per-row values."""
    extra = extra or {}
    columns = list(CSV_FIELDS) + list(extra)
    records = []
    for i, row in enumerate(rows):
        rec = asdict(row)
        for name, values in extra.items():
            rec[name] = values[i]
        records.append(rec)
    if fmt == "json":
        out = [
            {k: (format_number(v) if k in ("p", "q") and math.isinf(v) else _json_number(v)) for k, v in rec.items()}
            for rec in records
        ]
        return json.dumps(out, indent=1) + "\n"
    buf = io.StringIO()
    if timestamp:
        buf.write(f"# generated {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        writer.writerow([rec[c] if isinstance(rec[c], str) else format_number(rec[c]) for c in columns])
    return buf.getvalue()


def write_rows(rows, path, fmt="csv", timestamp=True, extra=None) -> None:
    text = render_rows(rows, fmt, timestamp, extra)
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    Path(path).write_text(text)


def _summary(row: ResultRow) -> str:
    return (
        f"{row.measure} p={format_number(row.p)} q={format_number(row.q)} n={row.n} m={row.m}: "
        f"mean={row.mean:.6g} +- {row.std_error:.2g} [{row.ci_low:.6g}, {row.ci_high:.6g}]"
    )


def cmd_estimate(config: ExperimentConfig, log=None) -> list[ResultRow]:
    """Estimate every requested width, write the table, print one summary line per row."""
    query = config.query()
    results = estimate_widths(query, config.samples, RngState(config.seed), config.workers, config.ci_level)
    rows = _rows(query, results, config.seed)
    write_rows(rows, config.output_path, config.output_format, config.timestamp)
    log = log or (sys.stderr if config.output_path in (None, "-") else sys.stdout)
    for row in rows:
        print(_summary(row), file=log)
    return rows


FIGURE1_FILES = ("figure1_panel_a.csv", "figure1_panel_b.csv")


def cmd_figure1(
    p_list=(0.5, 1.0, 2.0),
    n: int = 100,
    samples: int = 10**6,
    seed: int = 0,
    out_dir=".",
    workers: int = 1,
    timestamp: bool = True,
) -> tuple[list[ResultRow], list[ResultRow]]:
    """Both panels of the cone/tensor comparison for every ``m`` in ``[0, n-1]``.

    Panel A is the cone-measure average of ``x_{m+1}^*`` scaled by ``n^(1/p)``;
    panel B is ``log10`` of the same average under the tensor measure with
    ``beta = p/n - 1``.  The plotted quantity is the extra ``plot_value``
    column.  Each (panel, p) pair uses its own stream id.
    """
    if not isinstance(n, int) or n < 2:
        raise DomainError(f"n: must be an integer >= 2, got {n!r}")
    if samples < MIN_SAMPLES:
        raise DomainError(f"samples: must be >= {MIN_SAMPLES}")
    ps = [as_pnorm(p) for p in p_list]
    if any(p == math.inf for p in ps):
        raise DomainError("p: figure1 needs finite p")
    panel_a, panel_b, plot_a, plot_b = [], [], [], []
    for i, p in enumerate(ps):
        for stream, measure, rows, plot in ((2 * i, "cone", panel_a, plot_a), (2 * i + 1, "tensor-sparse", panel_b, plot_b)):
            query = WidthQuery.build(p, math.inf, n, range(n), measure)
            res = estimate_widths(query, samples, RngState(seed, stream), workers)
            new = _rows(query, res, seed)
            rows.extend(new)
            for row in new:
                if measure == "cone":
                    plot.append(n ** (1.0 / p) * row.mean)
                else:
                    plot.append(math.log10(row.mean) if row.mean > 0 else -math.inf)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_rows(panel_a, out / FIGURE1_FILES[0], "csv", timestamp, {"plot_value": plot_a})
    write_rows(panel_b, out / FIGURE1_FILES[1], "csv", timestamp, {"plot_value": plot_b})
    return panel_a, panel_b
