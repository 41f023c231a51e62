"""Long-format CSV panels and report emission.

Panel files have one row per (series_id, t, tau, h) with columns
``series_id`` (optional), ``t``, ``y``, ``tau``, ``h``, ``forecast`` and any
number of ``z_*`` augmenting regressors.
"""

import csv
import io
import json
import math
from collections import defaultdict

import numpy as np

from .errors import LoadError, ValidationError
from .results import LEVELS
from .samples import AugmentedSample, EvalSample, MultiSeriesSample, as_series_list

REQUIRED = ("t", "y", "tau", "h", "forecast")
DEFAULT_SERIES = "0"

# names of the key components of each test's contribution cells
KEY_FIELDS = {
    "mz": ("tau", "h"),
    "amz": ("tau", "h"),
    "mmz": ("series", "tau", "h"),
    "mh": ("tau", "h_short", "h_long"),
}
KEY_FIELDS_MULTI_MH = ("series", "tau", "h_short", "h_long")


def _num(text):
    # shortest repr that round-trips exactly
    return repr(float(text))


# --- loading -------------------------------------------------------------------


def _parse_float(raw, column, key):
    try:
        val = float(raw)
    except (TypeError, ValueError):
        raise LoadError(f"column {column!r} is not numeric ({raw!r}) at {key}") from None
    if not math.isfinite(val):
        raise LoadError(f"non-finite {column} at {key}")
    return val


def _parse_int(raw, column, key):
    val = _parse_float(raw, column, key)
    if val != int(val):
        raise LoadError(f"column {column!r} must be an integer ({raw!r}) at {key}")
    return int(val)


def _fmt_key(sid, t, tau, h):
    return f"(series_id={sid}, t={t}, tau={tau}, h={h})"


def read_records(stream):
    """Parse panel rows into ``{(series_id, t, tau, h): (y, forecast, z)}``."""
    reader = csv.DictReader(stream)
    if reader.fieldnames is None:
        raise LoadError("panel file is empty (a header row is required)")
    fields = [f.strip() for f in reader.fieldnames]
    missing = [c for c in REQUIRED if c not in fields]
    if missing:
        raise LoadError(f"panel header lacks required columns {missing}")
    z_cols = sorted((f for f in fields if f.startswith("z_")), key=_z_order)
    records = {}
    for lineno, raw in enumerate(reader, start=2):
        row = {k.strip(): (v.strip() if isinstance(v, str) else v) for k, v in raw.items() if k}
        sid = row.get("series_id") or DEFAULT_SERIES
        where = f"line {lineno}"
        t = _parse_int(row.get("t"), "t", where)
        tau = _parse_float(row.get("tau"), "tau", where)
        h = _parse_int(row.get("h"), "h", where)
        key = (sid, t, tau, h)
        label = _fmt_key(*key)
        y = _parse_float(row.get("y"), "y", label)
        fc = _parse_float(row.get("forecast"), "forecast", label)
        z = tuple(_parse_float(row.get(c), c, label) for c in z_cols)
        if key in records:
            raise LoadError(f"duplicate row for {label}")
        records[key] = (y, fc, z)
    if not records:
        raise LoadError("panel file has a header but no data rows")
    return records, z_cols


def _z_order(name):
    suffix = name[2:]
    return (0, int(suffix), "") if suffix.isdigit() else (1, 0, suffix)


def build_sample(records, z_cols):
    """Check grid completeness and consistency and build the sample object."""
    by_series = defaultdict(dict)
    for (sid, t, tau, h), val in records.items():
        by_series[sid][(t, tau, h)] = val
    grid = None
    built = []
    for sid in sorted(by_series):
        cells = by_series[sid]
        times = sorted({t for t, _, _ in cells})
        levels = sorted({tau for _, tau, _ in cells})
        horizons = sorted({h for _, _, h in cells})
        this_grid = (times, levels, horizons)
        if grid is None:
            grid = this_grid
        elif this_grid != grid:
            _report_grid_mismatch(sid, grid, this_grid)
        P, K, H = len(times), len(levels), len(horizons)
        y = np.empty(P)
        fc = np.empty((K, H, P))
        z = np.empty((P, H, len(z_cols)))
        for i, t in enumerate(times):
            y_seen = None
            z_seen = {}
            for k, tau in enumerate(levels):
                for j, h in enumerate(horizons):
                    label = _fmt_key(sid, t, tau, h)
                    if (t, tau, h) not in cells:
                        raise LoadError(f"incomplete grid: missing {label}")
                    yv, fv, zv = cells[(t, tau, h)]
                    if y_seen is None:
                        y_seen = yv
                    elif yv != y_seen:
                        raise LoadError(f"inconsistent y at {label}: {yv} vs {y_seen}")
                    if h in z_seen and zv != z_seen[h]:
                        raise LoadError(f"z values differ across levels at {label}")
                    z_seen[h] = zv
                    fc[k, j, i] = fv
                    z[i, j] = zv
            y[i] = y_seen
        try:
            base = EvalSample(y, fc, levels, horizons, name=sid)
            built.append(AugmentedSample(base, z) if z_cols else base)
        except ValidationError as err:
            raise LoadError(f"series {sid}: {err}") from None
    if len(built) == 1:
        return built[0]
    return MultiSeriesSample(tuple(built))


def _report_grid_mismatch(sid, ref, got):
    names = ("time indices", "quantile levels", "horizons")
    for name, a, b in zip(names, ref, got):
        if a != b:
            extra = sorted(set(a) ^ set(b))[:5]
            raise LoadError(f"series {sid}: {name} differ from the first series (e.g. {extra})")


def load_panel(path):
    """Read a long-format panel CSV.

    Returns
    -------
    EvalSample, AugmentedSample or MultiSeriesSample
        Augmented when ``z_*`` columns exist; multi-series when more than one
        ``series_id`` occurs.

    Raises
    ------
    LoadError
        Duplicate keys, an incomplete grid, inconsistent ``y`` or ``z`` values,
        or non-finite numbers. The message names the offending key.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        return loads_panel(fh)


def loads_panel(stream):
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    records, z_cols = read_records(stream)
    return build_sample(records, z_cols)


def dumps_panel(sample):
    """Serialise a sample to long-format CSV text (inverse of :func:`loads_panel`)."""
    series = as_series_list(sample)
    q = series[0].q if isinstance(series[0], AugmentedSample) else 0
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["series_id", *REQUIRED] + [f"z_{i + 1}" for i in range(q)])
    for s in series:
        for i in range(s.P):
            for k, tau in enumerate(s.levels):
                for j, h in enumerate(s.horizons):
                    row = [s.name, i, _num(s.y[i]), _num(tau), int(h), _num(s.forecasts[k, j, i])]
                    if q:
                        row.extend(_num(v) for v in s.z[i, j])
                    writer.writerow(row)
    return buf.getvalue()


def write_panel(sample, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(dumps_panel(sample))


# --- reports -------------------------------------------------------------------


def key_fields(result):
    if result.test == "mh" and result.contributions:
        if len(next(iter(result.contributions))) == 4:
            return KEY_FIELDS_MULTI_MH
    return KEY_FIELDS.get(result.test, ())


def report_dict(result):
    """JSON-ready dictionary view of a :class:`TestResult`."""
    names = key_fields(result)
    return {
        "test": result.test,
        "statistic": result.statistic,
        "critical_values": {f"{lev:.2f}": v for lev, v in result.critical_values.items()},
        "p_value": result.p_value,
        "kappa": result.kappa,
        "P": result.P,
        "block_length": result.block_length,
        "draws": result.draws,
        "seed": result.seed,
        "failed_draws": result.failed_draws,
        "contributions": [dict(zip(names, key), value=v) for key, v in result.contributions.items()],
        "coefficients": [dict(zip(names, key), values=list(v))
                         for key, v in result.coefficients.items()],
        "diagnostics": list(result.diagnostics),
    }


def summary_header():
    return ["", "Stat"] + [f"{int(round(lev * 100))}%" for lev in LEVELS] + ["p-value"]


def summary_row(label, result):
    return [label, _num(result.statistic)] + [
        _num(result.critical_values[lev]) for lev in LEVELS] + [_num(result.p_value)]


def contribution_matrix(result):
    """Contributions pivoted to rows (all key parts but tau) by columns (tau).

    Returns ``(row_labels, column_labels, matrix)`` without margins.
    """
    names = key_fields(result)
    t_pos = names.index("tau") if "tau" in names else 0
    rows, cols = [], []
    cells = {}
    for key, v in result.contributions.items():
        tau = key[t_pos]
        rest = tuple(p for i, p in enumerate(key) if i != t_pos)
        if rest not in rows:
            rows.append(rest)
        if tau not in cols:
            cols.append(tau)
        cells[(rest, tau)] = v
    rows.sort(key=lambda r: tuple(str(p) if isinstance(p, str) else p for p in r))
    cols.sort()
    mat = np.array([[cells.get((r, c), 0.0) for c in cols] for r in rows])
    return rows, cols, mat


def _row_label(names, rest):
    parts = [n for n in names if n != "tau"]
    return " ".join(f"{n}={v}" for n, v in zip(parts, rest))


def emit_report(result, fmt="json"):
    """Serialise a result as UTF-8 bytes.

    ``"json"`` gives one object. ``"csv"`` gives a summary table, a blank line
    and the contribution matrix with a ``Sum`` row and column.
    """
    if fmt == "json":
        return (json.dumps(report_dict(result), indent=2) + "\n").encode("utf-8")
    if fmt != "csv":
        raise ValidationError(f"unknown report format {fmt!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(summary_header())
    writer.writerow(summary_row(result.test, result))
    writer.writerow([])
    names = key_fields(result)
    rows, cols, mat = contribution_matrix(result)
    writer.writerow([""] + [f"tau={c}" for c in cols] + ["Sum"])
    for label, vals in zip(rows, mat):
        writer.writerow([_row_label(names, label)] + [_num(v) for v in vals]
                        + [_num(math.fsum(vals))])
    col_sums = [math.fsum(mat[:, j]) for j in range(len(cols))]
    writer.writerow(["Sum"] + [_num(v) for v in col_sums] + [_num(result.statistic)])
    return buf.getvalue().encode("utf-8")


def emit_summary_table(rows):
    """CSV summary with one line per ``(label, TestResult)`` pair."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(summary_header())
    for label, res in rows:
        writer.writerow(summary_row(label, res))
    return buf.getvalue().encode("utf-8")


def parse_report_csv(data):
    """Read back :func:`emit_report` CSV output into ``(summary, header, matrix rows)``."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    head, _, body = text.partition("\n\n")
    summary = list(csv.reader(io.StringIO(head)))
    table = list(csv.reader(io.StringIO(body)))
    return summary, table[0], table[1:]


def emit_mz_plotdata(sample, fit, tau=None, h=None):
    """Scatter data for one MZ regression as CSV bytes.

    Columns are forecast, realization, fitted_line_value and diagonal_value,
    one row per observation. ``tau`` and ``h`` select the forecast slice and
    default to the fit's own level and horizon.
    """
    tau = fit.tau if tau is None else float(tau)
    h = fit.horizon if h is None else int(h)
    ks = np.flatnonzero(np.isclose(sample.levels, tau, rtol=0, atol=1e-12))
    js = np.flatnonzero(sample.horizons == h)
    if ks.size == 0 or js.size == 0:
        raise ValidationError(f"no forecasts for tau={tau}, h={h}")
    fc = sample.forecasts[ks[0], js[0]]
    line = fit.alpha + fit.beta * fc
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["forecast", "realization", "fitted_line_value", "diagonal_value"])
    for f, yv, lv in zip(fc, sample.y, line):
        writer.writerow([_num(f), _num(yv), _num(lv), _num(f)])
    return buf.getvalue().encode("utf-8")
