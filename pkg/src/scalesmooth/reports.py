"""Tables behind the command-line reports, and their CSV/JSON encodings."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .kernel import KernelParams, kernel_density, kernel_small_t, stationary_density, support_lower
from .smoother import IncomeSeries, SeriesError, StepFunction, smooth_profile


class InputError(ValueError):
    """Bad input file; carries the offending line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def fmt(v: float) -> str:
    """17 significant digits: re-parsing gives back the same double."""
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(float(v), ".17g")


def read_income_csv(path) -> IncomeSeries:
    """Parse a ``time,income`` CSV and shift times so the latest is 0."""
    text = Path(path).read_text(encoding="utf-8")
    rows = list(csv.reader(io.StringIO(text, newline="")))
    if not rows:
        raise InputError("empty file")
    header = [c.strip().lower() for c in rows[0]]
    if header != ["time", "income"]:
        raise InputError(f"expected header 'time,income', got {','.join(rows[0])!r}", 1)
    times, incomes = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise InputError(f"expected 2 fields, got {len(row)}", lineno)
        try:
            t, v = float(row[0]), float(row[1])
        except ValueError:
            raise InputError(f"not a number: {','.join(row)!r}", lineno) from None
        if not (math.isfinite(t) and math.isfinite(v)):
            raise InputError("non-finite value", lineno)
        if times and t <= times[-1]:
            raise InputError(f"time {t} does not increase (previous {times[-1]})", lineno)
        times.append(t)
        incomes.append(v)
    if not times:
        raise InputError("no data rows")
    try:
        return IncomeSeries.normalized(times, incomes)
    except SeriesError as exc:
        raise InputError(str(exc)) from None


@dataclass
class Row:
    scale: float
    x: float
    value: float


def smooth_rows(f: StepFunction, r: float, scales, xs) -> list[Row]:
    rows = []
    for t in scales:
        prof = smooth_profile(f, KernelParams(r, t), xs)
        rows += [Row(t, x, v) for x, v in zip(prof.xs, prof.values)]
    return rows


def weight_grid(params: KernelParams, x0: float, n_points: int) -> np.ndarray:
    return np.linspace(support_lower(params, x0), 0.0, n_points)


def folded_small_t(params: KernelParams, y):
    """Small-scale shape of ``p_t(0, .)``: the drifted Gaussian reflected onto
    the half-line, ``(2/sqrt t) phi((y - rt)/sqrt t)``."""
    return 2.0 * kernel_small_t(params, 0.0, y)


def weights_rows(r: float, scales, x0: float = 0.0, n_points: int = 4001):
    """Kernel curves ``p_t(x0, .)`` plus their limits.

    Returns ``(kernel, gaussian, stationary)`` row lists.  ``stationary`` is
    empty unless ``r > 0``; it is sampled on the grid of the largest scale and
    tagged with ``scale = inf``.
    """
    kernel, gaussian, stationary = [], [], []
    for t in scales:
        p = KernelParams(r, t)
        ys = weight_grid(p, x0, n_points)
        vals = kernel_density(p, x0, ys)
        asym = folded_small_t(p, ys) if x0 == 0.0 else kernel_small_t(p, x0, ys)
        kernel += [Row(t, y, v) for y, v in zip(ys, vals)]
        gaussian += [Row(t, y, v) for y, v in zip(ys, asym)]
    if r > 0.0 and len(scales):
        ys = weight_grid(KernelParams(r, max(scales)), x0, n_points)
        stationary = [Row(math.inf, y, v) for y, v in zip(ys, stationary_density(r, ys))]
    return kernel, gaussian, stationary


def exponential_average(f: StepFunction, r: float) -> float:
    """``int f(y) 2r e^{2ry} dy``, exact per step segment."""
    total = 0.0
    for a, b, v in f.segments():
        total += v * (math.exp(2.0 * r * b) - (0.0 if math.isinf(a) else math.exp(2.0 * r * a)))
    return total


def flat_window_average(f: StepFunction, width: float) -> float:
    """Plain mean of ``f`` over the last ``width`` units of time."""
    lo = -width
    total = 0.0
    for a, b, v in f.segments():
        w = min(b, 0.0) - max(a, lo)
        if w > 0.0:
            total += v * w
    return total / width


@dataclass
class ComparisonRow:
    scale: float
    kernel: float
    exponential: float
    flat_window: float


def compare_rows(f: StepFunction, r: float, scales) -> list[ComparisonRow]:
    """Present-time average at each scale next to exponential smoothing with
    weight ``2r e^{2ry}`` and a flat window of width ``1/(2r)``.

    As the scale grows the kernel column approaches the exponential one.
    """
    if not r > 0.0:
        raise ValueError("exponential comparison needs r > 0")
    expo = exponential_average(f, r)
    flat = flat_window_average(f, 1.0 / (2.0 * r))
    out = []
    for t in scales:
        g0 = smooth_profile(f, KernelParams(r, t), [0.0]).values[0]
        out.append(ComparisonRow(t, float(g0), expo, flat))
    return out


def write_table(path, header, rows, fmt_row) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(fmt_row(row))


def write_rows_csv(path, rows: list[Row]) -> None:
    write_table(path, ["scale", "x", "value"], rows, lambda r: [fmt(r.scale), fmt(r.x), fmt(r.value)])


def read_rows_csv(path) -> list[Row]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["scale", "x", "value"]:
            raise InputError(f"unexpected header {header}", 1)
        return [Row(float(a), float(b), float(c)) for a, b, c in reader]


def _json_float(v):
    return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")


def write_json(path, config: dict, results: list[dict]) -> None:
    doc = {"config": config, "results": results}
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def rows_to_json(rows: list[Row], **extra) -> list[dict]:
    return [{"scale": _json_float(r.scale), "x": r.x, "value": r.value, **extra} for r in rows]
