"""Readers and writers for the pipeline's output files.

Every file starts with a comment line embedding the full run configuration
as canonical JSON, so any artifact documents how to reproduce itself. Floats
are written with repr, which round-trips exactly; re-reading a scores file
therefore yields bit-identical downstream results.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Mapping, Sequence

from annodiff.difficulty import DifficultyScore
from annodiff.errors import AnnodiffError
from annodiff.simulation import Aggregate, ConfigResult

CONFIG_PREFIX = "# config: "

SCORES_FIELDS = ("institution", "tweet_id", "A", "C", "L", "ds", "class")
OUTCOMES_FIELDS = ("institution", "metric", "phase", "n", "code", "mean_delta")
CURVES_FIELDS = ("institution", "metric", "phase", "n", "k", "hf1_easy", "hf1_difficult")


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: str, header_json: str, fields: Sequence[str], rows: Iterable[Sequence]) -> None:
    buf = io.StringIO()
    buf.write(CONFIG_PREFIX + header_json + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def read_csv(path: str) -> tuple[dict | None, list[dict]]:
    """Read one of our CSV files back: (embedded config, row dicts)."""
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
        config = None
        if first.startswith(CONFIG_PREFIX):
            config = json.loads(first[len(CONFIG_PREFIX):])
            header_line = fh.readline()
        else:
            header_line = first
        fields = next(csv.reader([header_line]))
        rows = [dict(zip(fields, row)) for row in csv.reader(fh)]
    return config, rows


def write_scores_csv(path: str, header_json: str, scored: Mapping[str, Sequence[DifficultyScore]]) -> None:
    """One row per (institution, tweet)."""
    rows = []
    for institution in sorted(scored):
        for s in scored[institution]:
            rows.append((institution, s.tweet_id, s.agreement, s.certainty, s.cost, s.ds, s.klass))
    _write_csv(path, header_json, SCORES_FIELDS, rows)


def read_scores_csv(path: str) -> tuple[dict | None, dict[str, dict[str, DifficultyScore]]]:
    """Returns (embedded config, institution -> tweet_id -> score)."""
    config, rows = read_csv(path)
    out: dict[str, dict[str, DifficultyScore]] = {}
    for row in rows:
        try:
            score = DifficultyScore(
                tweet_id=row["tweet_id"],
                agreement=float(row["A"]),
                certainty=float(row["C"]),
                cost=float(row["L"]),
                ds=float(row["ds"]),
                klass=row["class"],
            )
            institution = row["institution"]
        except (KeyError, ValueError) as exc:
            raise AnnodiffError(f"malformed scores file {path}: {exc}")
        out.setdefault(institution, {})[score.tweet_id] = score
    return config, out


def write_outcomes_csv(path: str, header_json: str, results: Sequence[ConfigResult]) -> None:
    rows = []
    for r in results:
        code = r.code if r.code is not None else "undefined"
        delta = _fmt(r.mean_delta) if r.mean_delta is not None else ""
        rows.append((r.institution, r.metric, r.phase, r.train_size, code, delta))
    _write_csv(path, header_json, OUTCOMES_FIELDS, rows)


def write_curves_csv(path: str, header_json: str, results: Sequence[ConfigResult]) -> None:
    rows = []
    for r in results:
        if r.curve_easy is None or r.curve_difficult is None:
            continue
        for k in sorted(r.curve_easy.points):
            rows.append(
                (
                    r.institution,
                    r.metric,
                    r.phase,
                    r.train_size,
                    k,
                    r.curve_easy.points[k],
                    r.curve_difficult.points[k],
                )
            )
    _write_csv(path, header_json, CURVES_FIELDS, rows)


def stats_payload(agg: Aggregate, p_values: Mapping[str, float], config: dict, extra: dict | None = None) -> dict:
    payload = {
        "config": config,
        "outcome_counts": agg.counts,
        "tables": {
            name: {
                "rows": list(table.row_labels),
                "columns": list(table.col_labels),
                "counts": [list(table.counts[0]), list(table.counts[1])],
                "p_value": p_values[name],
            }
            for name, table in agg.tables.items()
        },
    }
    if extra:
        payload.update(extra)
    return payload


def write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def read_json(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
