"""Reading and writing score, parameter and metrics files."""
from __future__ import annotations

import csv
import json
import math
import os
from contextlib import contextmanager

import numpy as np

METRIC_COLUMNS = ("ell", "algo", "seed", "ME", "AE", "wall-time-ms", "sample-time-ms", "bfs-time-ms")
_NUMERIC = METRIC_COLUMNS[3:]


@contextmanager
def _opened(target, mode):
    if isinstance(target, (str, os.PathLike)):
        with open(target, mode, newline="", encoding="utf-8") as fh:
            yield fh
    else:
        yield target


def write_scores(dest, labels, values) -> None:
    """``node,score`` rows keyed by original labels, at full float precision."""
    labels = np.asarray(labels)
    values = np.asarray(getattr(values, "values", values), dtype=np.float64)
    if len(labels) != len(values):
        raise ValueError("labels and scores differ in length")
    with _opened(dest, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("node", "score"))
        for label, v in zip(labels.tolist(), values.tolist()):
            w.writerow((label, repr(v)))


def read_scores(source) -> tuple[np.ndarray, np.ndarray]:
    with _opened(source, "r") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["node", "score"]:
        raise ValueError("scores file must start with the header 'node,score'")
    labels, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            labels.append(int(row[0]))
            values.append(float(row[1]))
        except (ValueError, IndexError):
            raise ValueError(f"line {lineno}: cannot parse {','.join(row)!r}") from None
    return np.array(labels, dtype=np.int64), np.array(values)


def align_scores(labels_a, values_a, labels_b, values_b) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Reorder two score files onto a common sorted node order."""
    if len(set(labels_a.tolist())) != len(labels_a) or len(set(labels_b.tolist())) != len(labels_b):
        raise ValueError("duplicate node in a scores file")
    if set(labels_a.tolist()) != set(labels_b.tolist()):
        raise ValueError("the two score files cover different nodes")
    ia, ib = np.argsort(labels_a), np.argsort(labels_b)
    return labels_a[ia], values_a[ia], values_b[ib]


def _json_value(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return None if math.isnan(v) else v
    if isinstance(v, np.integer):
        return int(v)
    return v


def write_params(dest, params) -> None:
    d = {k: _json_value(v) for k, v in params.to_dict().items()}
    with _opened(dest, "w") as fh:
        json.dump(d, fh, indent=2)
        fh.write("\n")


def read_params(source) -> dict:
    with _opened(source, "r") as fh:
        return json.load(fh)


def aggregate_rows(rows: list[dict]) -> list[dict]:
    """Mean and std rows per ``(ell, algo)`` group, in first-seen order."""
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        groups.setdefault((r["ell"], r["algo"]), []).append(r)
    out = []
    for (ell, algo), members in groups.items():
        table = np.array([[float(m[c]) for c in _NUMERIC] for m in members])
        for label, stat in (("mean", table.mean(axis=0)), ("std", table.std(axis=0))):
            row = {"ell": ell, "algo": algo, "seed": label}
            row.update(zip(_NUMERIC, stat.tolist()))
            out.append(row)
    return out


def write_metrics(dest, rows: list[dict], aggregate: bool = True) -> None:
    with _opened(dest, "w") as fh:
        w = csv.DictWriter(fh, fieldnames=METRIC_COLUMNS, lineterminator="\n")
        w.writeheader()
        all_rows = list(rows) + (aggregate_rows(rows) if aggregate else [])
        for r in all_rows:
            w.writerow({k: (repr(float(v)) if k in _NUMERIC else v) for k, v in r.items()})


def read_metrics(source) -> list[dict]:
    with _opened(source, "r") as fh:
        return list(csv.DictReader(fh))
