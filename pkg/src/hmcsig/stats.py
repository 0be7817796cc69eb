"""Mann-Whitney U comparison of expert and novice feature tables."""

import csv
import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np
from scipy.stats import norm, rankdata

from .errors import SchemaError

EXACT_MAX_TOTAL = 20


class Method(str, enum.Enum):
    EXACT = "Exact"
    NORMAL = "NormalApprox"


@dataclass(frozen=True)
class GroupComparison:
    u_statistic: float
    p_value: float
    n1: int
    n2: int
    method: Method


@lru_cache(maxsize=None)
def u_counts(n1, n2):
    """Number of rank arrangements giving each U = 0..n1*n2 (no ties).

    Uses the recursion c(n1, n2, u) = c(n1-1, n2, u-n2) + c(n1, n2-1, u),
    obtained by asking whether the largest pooled value belongs to group 1.
    """
    if n1 == 0 or n2 == 0:
        return (1,)
    a = u_counts(n1 - 1, n2)
    b = u_counts(n1, n2 - 1)
    out = [0] * (n1 * n2 + 1)
    for u, c in enumerate(a):
        out[u + n2] += c
    for u, c in enumerate(b):
        out[u] += c
    return tuple(out)


def exact_p(u, n1, n2, alternative="two-sided"):
    """Exact p-value of U from the full null distribution.

    ``alternative="greater"`` tests whether group 1 tends to be larger
    (large U); ``"less"`` the reverse. Two-sided doubles the smaller tail.
    """
    counts = u_counts(n1, n2)
    total = comb(n1 + n2, n1)
    k = int(round(u))
    upper = sum(counts[k:])
    lower = sum(counts[:k + 1])
    if alternative == "greater":
        return upper / total
    if alternative == "less":
        return lower / total
    return min(1.0, 2 * min(upper, lower) / total)


def _normal_p(u, n1, n2, ranks, alternative):
    mu = n1 * n2 / 2.0
    n = n1 + n2
    _, tie_sizes = np.unique(ranks, return_counts=True)
    tie_term = np.sum(tie_sizes ** 3 - tie_sizes) / (n * (n - 1))
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term)
    if var <= 0:
        return 1.0
    sd = math.sqrt(var)
    if alternative == "greater":
        z = (u - mu - 0.5) / sd
        return float(norm.sf(z))
    if alternative == "less":
        z = (u - mu + 0.5) / sd
        return float(norm.cdf(z))
    z = max(abs(u - mu) - 0.5, 0.0) / sd
    return float(min(1.0, 2.0 * norm.sf(z)))


def mann_whitney_u(a, b, alternative="two-sided"):
    """Mann-Whitney U for sample ``a`` against ``b``.

    U counts pairs (a_i, b_j) with a_i > b_j, ties counting one half. The
    p-value is exact when ``n1 + n2 <= 20`` and there are no ties, otherwise
    a normal approximation with tie and continuity corrections.
    """
    if alternative not in ("two-sided", "greater", "less"):
        raise ValueError(f"unknown alternative {alternative!r}")
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    n1, n2 = a.size, b.size
    if n1 < 1 or n2 < 1:
        raise ValueError("both groups need at least one observation")
    ranks = rankdata(np.concatenate([a, b]))
    u = float(ranks[:n1].sum() - n1 * (n1 + 1) / 2.0)
    ties = np.unique(ranks).size < n1 + n2
    if n1 + n2 <= EXACT_MAX_TOTAL and not ties:
        return GroupComparison(u, exact_p(u, n1, n2, alternative), n1, n2, Method.EXACT)
    return GroupComparison(u, _normal_p(u, n1, n2, ranks, alternative), n1, n2, Method.NORMAL)


@dataclass(frozen=True)
class ComparisonRow:
    channel: str
    band: str
    metric: str
    median_expert: float
    median_novice: float
    iqr_expert: float
    iqr_novice: float
    result: GroupComparison


def _iqr(x):
    q1, q3 = np.percentile(x, [25, 75])
    return float(q3 - q1)


def group_compare(expert, novice, alternative="two-sided"):
    """One Mann-Whitney comparison per feature column.

    ``expert`` and ``novice`` map ``(channel, band, metric)`` keys to per-subject
    values. Rows come back sorted by channel, band, metric.
    """
    if set(expert) != set(novice):
        missing = sorted(set(expert) ^ set(novice))
        raise SchemaError(f"feature columns differ between groups: {missing}")
    rows = []
    for key in sorted(expert):
        channel, band, metric = key
        e = np.asarray(expert[key], dtype=float)
        n = np.asarray(novice[key], dtype=float)
        res = mann_whitney_u(e, n, alternative)
        rows.append(ComparisonRow(channel, band, metric, float(np.median(e)), float(np.median(n)),
                                  _iqr(e), _iqr(n), res))
    return rows


COMPARISON_COLUMNS = ("channel", "band", "metric", "median_expert", "median_novice", "U", "p", "method")


def write_comparison_csv(rows, path_or_file):
    def emit(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COMPARISON_COLUMNS)
        for r in rows:
            w.writerow([r.channel, r.band, r.metric, repr(r.median_expert), repr(r.median_novice),
                        repr(r.result.u_statistic), repr(r.result.p_value), r.result.method.value])

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", encoding="utf-8", newline="") as fh:
            emit(fh)


def read_feature_table(path):
    """Long-format table (subject, channel, band, metric, value) -> column dict."""
    table = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        need = {"subject", "channel", "band", "metric", "value"}
        if reader.fieldnames is None or not need <= set(reader.fieldnames):
            raise SchemaError(f"feature table needs columns {sorted(need)}")
        for row in reader:
            key = (row["channel"], row["band"], row["metric"])
            table.setdefault(key, []).append(float(row["value"]))
    return table


def write_feature_table(path, table_by_subject):
    """Inverse of :func:`read_feature_table`: {subject: {key: value}}."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["subject", "channel", "band", "metric", "value"])
        for subject in table_by_subject:
            for (channel, band, metric), v in sorted(table_by_subject[subject].items()):
                w.writerow([subject, channel, band, metric, repr(float(v))])
