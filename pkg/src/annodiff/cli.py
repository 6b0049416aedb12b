"""Command-line pipeline: ingest, score, simulate, report.

Exit codes: 0 on success, 1 on invalid input or configuration, 2 on an
internal invariant violation. The seed comes from --seed, falling back to
the ANNODIFF_SEED environment variable, then to 0.
"""

from __future__ import annotations

import argparse
import os
import sys
import traceback
from pathlib import Path

from annodiff.config import DEFAULT_K_GRID, DEFAULT_METRICS, SEED_ENV_VAR, RunConfig
from annodiff.dataset import GROUPS, INSTITUTIONS, Dataset, load_dataset
from annodiff.difficulty import DIFFICULT, EASY, ScoreConfig, difficulty_scores
from annodiff.errors import AnnodiffError
from annodiff.outputs import (
    read_json,
    read_scores_csv,
    stats_payload,
    write_curves_csv,
    write_json,
    write_outcomes_csv,
    write_scores_csv,
)
from annodiff.simulation import (
    PHASES,
    aggregate,
    build_strata,
    make_context,
    run_grid,
    test_proportions,
    TRAIN_SIZES,
)
from annodiff.textsim import SimilarityMetric


class _Parser(argparse.ArgumentParser):
    """argparse maps usage errors to exit code 2; ours are input errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise AnnodiffError(message)


def _add_dataset_args(parser):
    parser.add_argument("--dataset", required=True, help="annotations.jsonl path")
    parser.add_argument("--tweets", required=True, help="tweets.jsonl path")


def _add_scoring_args(parser):
    parser.add_argument("--institution", choices=INSTITUTIONS, help="restrict to one institution (default: both)")
    parser.add_argument("--smoothing", type=float, default=1.0, help="additive smoothing of certainty rows (default 1)")
    parser.add_argument("--k-certainty", type=int, default=3, help="neighbors for the certainty predictors (default 3)")
    parser.add_argument("--split", type=float, default=0.4, help="training share of each worker's tweets (default 0.4)")
    parser.add_argument("--seed", type=int, default=None, help=f"master seed (default: ${SEED_ENV_VAR} or 0)")
    parser.add_argument("--out", default="out", help="output directory (default ./out)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="annodiff", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="validate a dataset and print worker counts")
    _add_dataset_args(p_ingest)

    p_score = sub.add_parser("score", help="compute difficulty scores and class tweets")
    _add_dataset_args(p_score)
    _add_scoring_args(p_score)

    p_sim = sub.add_parser("simulate", help="run the easy/difficult predictor grid")
    _add_dataset_args(p_sim)
    _add_scoring_args(p_sim)
    p_sim.add_argument("--metrics", default=",".join(DEFAULT_METRICS), help="comma-separated similarity metrics (default all)")
    p_sim.add_argument("--k-grid", default=",".join(str(k) for k in DEFAULT_K_GRID), help="comma-separated neighbor counts")
    p_sim.add_argument("--epsilon", type=float, default=0.01, help="dominance threshold for outcome coding (default 0.01)")

    p_report = sub.add_parser("report", help="render a human-readable summary of prior outputs")
    p_report.add_argument("--out", default="out", help="directory holding score and simulation outputs")
    p_report.add_argument("--alpha", type=float, default=0.05, help="significance level for verdicts (default 0.05)")
    return parser


def _resolve_seed(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get(SEED_ENV_VAR)
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise AnnodiffError(f"{SEED_ENV_VAR} must be an integer, got {env!r}")


def _make_run_config(args) -> RunConfig:
    institutions = (args.institution,) if args.institution else INSTITUTIONS
    metrics = tuple(m.strip() for m in getattr(args, "metrics", ",".join(DEFAULT_METRICS)).split(",") if m.strip())
    valid = {m.value for m in SimilarityMetric}
    for m in metrics:
        if m not in valid:
            raise AnnodiffError(f"unknown metric {m!r}; choose from {sorted(valid)}")
    if not metrics:
        raise AnnodiffError("at least one metric is required")
    raw_grid = getattr(args, "k_grid", ",".join(str(k) for k in DEFAULT_K_GRID))
    try:
        k_grid = tuple(int(k.strip()) for k in raw_grid.split(",") if k.strip())
    except ValueError:
        raise AnnodiffError(f"--k-grid must be comma-separated integers, got {raw_grid!r}")
    if not k_grid or any(k < 1 for k in k_grid):
        raise AnnodiffError("--k-grid needs at least one positive integer")
    epsilon = getattr(args, "epsilon", 0.01)
    if epsilon < 0:
        raise AnnodiffError("--epsilon must be non-negative")
    if not 0 < args.split < 1:
        raise AnnodiffError("--split must lie strictly between 0 and 1")
    if args.k_certainty < 1:
        raise AnnodiffError("--k-certainty must be at least 1")
    if args.smoothing < 0:
        raise AnnodiffError("--smoothing must be non-negative")
    return RunConfig(
        annotations=args.dataset,
        tweets=args.tweets,
        institutions=institutions,
        metrics=metrics,
        smoothing=args.smoothing,
        k_certainty=args.k_certainty,
        k_grid=k_grid,
        epsilon=epsilon,
        split_ratio=args.split,
        seed=_resolve_seed(args.seed),
        alpha=getattr(args, "alpha", 0.05),
        out=args.out,
    )


def cmd_ingest(args) -> int:
    dataset = load_dataset(args.dataset, args.tweets)
    counts = {inst: {g: 0 for g in GROUPS} for inst in INSTITUTIONS}
    for worker in dataset.workers.values():
        counts[worker.institution][worker.group] += 1
    n_annotations = sum(len(w.annotations) for w in dataset.workers.values())

    print(f"workers: {len(dataset.workers)}")
    print(f"{'institution':<12}" + "".join(f"{g:>6}" for g in GROUPS) + f"{'total':>8}")
    for inst in INSTITUTIONS:
        row = counts[inst]
        print(f"{inst:<12}" + "".join(f"{row[g]:>6}" for g in GROUPS) + f"{sum(row.values()):>8}")
    print(f"annotations: {n_annotations}")
    print(f"tweets with text: {len(dataset.texts)}")
    print(f"labels pruned below Irrelevant: {dataset.pruned_label_count}")
    print(f"annotations with incomplete durations: {dataset.missing_duration_count}")
    return 0


def _score_institutions(dataset: Dataset, config: RunConfig):
    """Score each requested institution. Returns (scores per institution,
    summary payload)."""
    score_config = ScoreConfig(
        metric=SimilarityMetric(config.certainty_metric),
        k=config.k_certainty,
        smoothing=config.smoothing,
        split_ratio=config.split_ratio,
        seed=config.seed,
    )
    scored: dict[str, list] = {}
    summary: dict[str, dict] = {}
    for institution in config.institutions:
        subset = dataset.filter_institution(institution)
        if not subset.workers:
            print(f"{institution}: no workers, skipped")
            continue
        result = difficulty_scores(subset, score_config)
        scored[institution] = result.scores
        class_by_tweet = {s.tweet_id: s.klass for s in result.scores}
        built = build_strata(subset, class_by_tweet)
        phases = {}
        for phase in PHASES:
            population = {
                tid
                for (wid, ph), window in built.windows.items()
                if ph == phase
                for tid, _ in window
            }
            phases[phase] = {
                klass: sum(1 for tid in population if class_by_tweet.get(tid) == klass)
                for klass in (EASY, DIFFICULT)
            }
        summary[institution] = {
            "workers": len(subset.workers),
            "workers_excluded_under_50": sorted(built.excluded_workers),
            "tweets_scored": len(result.scores),
            "certainty_imputed": len(result.imputed_certainty),
            "tweets_excluded": result.excluded,
            "classes": {
                klass: sum(1 for s in result.scores if s.klass == klass) for klass in (EASY, DIFFICULT)
            },
            "phases": phases,
        }
    if not scored:
        raise AnnodiffError("no institution has any workers to score")
    return scored, {"config": config.to_dict(), "institutions": summary}


def _print_score_summary(summary: dict) -> None:
    for institution, info in sorted(summary["institutions"].items()):
        classes = info["classes"]
        print(f"{institution}: {info['tweets_scored']} tweets scored, "
              f"{classes[EASY]} easy / {classes[DIFFICULT]} difficult")
        for phase in PHASES:
            ph = info["phases"][phase]
            total = ph[EASY] + ph[DIFFICULT]
            share = 100.0 * ph[EASY] / total if total else 0.0
            print(f"  {phase:<5} window population: {ph[EASY]} easy ({share:.1f}%), {ph[DIFFICULT]} difficult")
        if info["certainty_imputed"]:
            print(f"  certainty imputed for {info['certainty_imputed']} tweet(s)")
        if info["tweets_excluded"]:
            print(f"  excluded from scoring: {len(info['tweets_excluded'])} tweet(s)")


def cmd_score(args) -> int:
    config = _make_run_config(args)
    dataset = load_dataset(config.annotations, config.tweets)
    scored, summary = _score_institutions(dataset, config)
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    write_scores_csv(str(out / "scores.csv"), config.header_json(), scored)
    write_json(str(out / "summary.json"), summary)
    _print_score_summary(summary)
    print(f"wrote {out / 'scores.csv'} and {out / 'summary.json'}")
    return 0


def cmd_simulate(args) -> int:
    config = _make_run_config(args)
    dataset = load_dataset(config.annotations, config.tweets)
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)

    scores_path = out / "scores.csv"
    if scores_path.exists():
        embedded, by_institution = read_scores_csv(str(scores_path))
        if embedded is not None:
            theirs = RunConfig(**{k: tuple(v) if isinstance(v, list) else v for k, v in embedded.items()})
            if theirs.scoring_fields() != config.scoring_fields():
                raise AnnodiffError(
                    f"{scores_path} was produced under a different scoring configuration; "
                    "rerun score or remove the file"
                )
        scored = {inst: list(scores.values()) for inst, scores in sorted(by_institution.items())}
        print(f"loaded difficulty scores from {scores_path}")
    else:
        scored, summary = _score_institutions(dataset, config)
        write_scores_csv(str(scores_path), config.header_json(), scored)
        write_json(str(out / "summary.json"), summary)
        print(f"wrote {scores_path}")

    metrics = [SimilarityMetric(m) for m in config.metrics]
    results = []
    for institution in config.institutions:
        if institution not in scored:
            print(f"{institution}: no scores, skipped")
            continue
        class_by_tweet = {s.tweet_id: s.klass for s in scored[institution]}
        ctx = make_context(dataset, institution, class_by_tweet)
        if not ctx.worker_ids:
            print(f"{institution}: no worker has {TRAIN_SIZES[-1]} strata tweets, skipped")
            continue
        results.extend(run_grid(ctx, metrics, config.k_grid, config.seed, config.epsilon))

    if not results:
        raise AnnodiffError("nothing to simulate: no institution produced any configuration")

    write_outcomes_csv(str(out / "outcomes.csv"), config.header_json(), results)
    write_curves_csv(str(out / "curves.csv"), config.header_json(), results)

    valid = [(r.phase, r.code) for r in results if r.code is not None]
    undefined = sum(1 for r in results if r.code is None)
    agg = aggregate(valid)
    p_values = {name: test_proportions(table) for name, table in agg.tables.items()}
    payload = stats_payload(agg, p_values, config.to_dict(), extra={"undefined_comparisons": undefined})
    write_json(str(out / "stats.json"), payload)

    print(f"{len(results)} comparisons ({undefined} undefined)")
    for phase in PHASES:
        row = agg.counts[phase]
        print(f"  {phase:<5} T={row['T']} E={row['E']} D={row['D']}")
    for name, table in agg.tables.items():
        print(f"  {name}: {table.counts} {_format_p(p_values[name])}")
    print(f"wrote {out / 'outcomes.csv'}, {out / 'curves.csv'}, {out / 'stats.json'}")
    return 0


def _format_p(p: float) -> str:
    return "p < 0.0001" if p < 1e-4 else f"p = {p:.4f}"


def cmd_report(args) -> int:
    out = Path(args.out)
    alpha = args.alpha
    if not 0 < alpha < 1:
        raise AnnodiffError("--alpha must lie strictly between 0 and 1")
    required = {name: out / name for name in ("summary.json", "outcomes.csv", "stats.json")}
    missing = [str(p) for p in required.values() if not p.exists()]
    if missing:
        raise AnnodiffError(f"missing inputs: {', '.join(missing)}; run score and simulate first")

    summary = read_json(str(required["summary.json"]))
    from annodiff.outputs import read_csv

    _, outcome_rows = read_csv(str(required["outcomes.csv"]))
    stats = read_json(str(required["stats.json"]))
    if not outcome_rows:
        raise AnnodiffError("outcomes file holds no comparisons")

    lines = ["# Annotation difficulty report", ""]
    lines.append("## Class balance by phase window")
    lines.append("")
    lines.append("| institution | phase | easy | difficult | easy share |")
    lines.append("|---|---|---|---|---|")
    for institution, info in sorted(summary.get("institutions", {}).items()):
        for phase in PHASES:
            ph = info["phases"][phase]
            total = ph[EASY] + ph[DIFFICULT]
            share = f"{100.0 * ph[EASY] / total:.1f}%" if total else "n/a"
            lines.append(f"| {institution} | {phase} | {ph[EASY]} | {ph[DIFFICULT]} | {share} |")
    lines.append("")

    lines.append("## Outcomes per configuration")
    lines.append("")
    sizes = sorted({int(r["n"]) for r in outcome_rows})
    lines.append("| institution | metric | phase | " + " | ".join(f"n={n}" for n in sizes) + " |")
    lines.append("|" + "---|" * (3 + len(sizes)))
    keyed = {(r["institution"], r["metric"], r["phase"], int(r["n"])): r["code"] for r in outcome_rows}
    combos = sorted({(r["institution"], r["metric"]) for r in outcome_rows})
    for institution, metric in combos:
        for phase in PHASES:
            codes = [keyed.get((institution, metric, phase, n), "") for n in sizes]
            if any(codes):
                lines.append(f"| {institution} | {metric} | {phase} | " + " | ".join(codes) + " |")
    lines.append("")

    lines.append("## Outcome counts and pairwise tests")
    lines.append("")
    counts = stats["outcome_counts"]
    lines.append("| phase | T | E | D |")
    lines.append("|---|---|---|---|")
    for phase in PHASES:
        row = counts[phase]
        lines.append(f"| {phase} | {row['T']} | {row['E']} | {row['D']} |")
    lines.append("")
    significant = []
    for name, table in sorted(stats["tables"].items()):
        p = table["p_value"]
        verdict = "significant" if p < alpha else "not significant"
        if p < alpha:
            significant.append(name)
        pretty = name.replace("_vs_", " vs ")
        lines.append(f"- {pretty}: rows {table['rows']}, counts {table['counts']}, {_format_p(p)} ({verdict} at alpha={alpha:g})")
    if not significant:
        lines.append(f"- no significant differences at alpha={alpha:g}")
    lines.append("")

    report = "\n".join(lines)
    print(report)
    (out / "report.md").write_text(report, encoding="utf-8")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "ingest": cmd_ingest,
            "score": cmd_score,
            "simulate": cmd_simulate,
            "report": cmd_report,
        }[args.command]
        return handler(args)
    except AnnodiffError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        print("internal error:", file=sys.stderr)
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
